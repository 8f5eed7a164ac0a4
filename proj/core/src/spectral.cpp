#include "vdtk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vdtk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. sign = -1 forward, +1 inverse
// (inverse leaves the 1/N factor to the caller).
void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Bluestein chirp transform: DFT of arbitrary length via a power-of-two
// convolution. Chirp phases use the half-angle trick so k*k never overflows
// the double-exact integer range for realistic T.
std::vector<std::complex<double>> bluestein(
    const std::vector<std::complex<double>>& x, int sign) {
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n + 1) m <<= 1;

  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // angle = pi * k^2 / n, computed modulo 2*pi via (k^2 mod 2n)
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = sign * std::numbers::pi * static_cast<double>(k2) /
                       static_cast<double>(n);
    chirp[k] = {std::cos(ang), std::sin(ang)};
  }

  std::vector<std::complex<double>> a(m, {0.0, 0.0});
  std::vector<std::complex<double>> b(m, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = x[k] * chirp[k];
    b[k] = std::conj(chirp[k]);
    if (k != 0) b[m - k] = std::conj(chirp[k]);
  }
  fft_pow2(a, -1);
  fft_pow2(b, -1);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_pow2(a, +1);
  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * inv_m * chirp[k];
  return out;
}

}  // namespace

std::string to_string(MetricName m) {
  switch (m) {
    case MetricName::kAbsRel: return "absrel";
    case MetricName::kRmse: return "rmse";
    case MetricName::kOneMinusDelta1: return "one_minus_delta1";
  }
  return "absrel";
}

MetricName metric_name_from_string(const std::string& s) {
  if (s == "absrel") return MetricName::kAbsRel;
  if (s == "rmse") return MetricName::kRmse;
  if (s == "one_minus_delta1") return MetricName::kOneMinusDelta1;
  throw UsageError("unknown metric: " + s);
}

ErrorSequence::ErrorSequence(std::vector<double> v, MetricName m)
    : values(std::move(v)), metric(m) {
  if (values.size() < 2) throw DataError("error sequence needs length >= 2");
  for (double x : values) {
    if (!std::isfinite(x) || x < 0.0) {
      throw DataError("error sequence values must be finite and non-negative");
    }
  }
}

std::vector<std::complex<double>> dft_complex(
    const std::vector<std::complex<double>>& x, bool inverse) {
  if (x.empty()) return {};
  std::vector<std::complex<double>> a = x;
  const int sign = inverse ? +1 : -1;
  if (is_power_of_two(a.size())) {
    fft_pow2(a, sign);
    return a;
  }
  return bluestein(a, sign);
}

std::vector<std::complex<double>> dft_real(const std::vector<double>& x) {
  std::vector<std::complex<double>> cx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) cx[i] = {x[i], 0.0};
  return dft_complex(cx, false);
}

ErrorSpectrum dft(const ErrorSequence& seq) {
  return ErrorSpectrum{dft_real(seq.values), seq.length()};
}

std::vector<double> idft_real(const std::vector<std::complex<double>>& coeffs) {
  const std::size_t n = coeffs.size();
  if (n == 0) return {};
  std::vector<std::complex<double>> time = dft_complex(coeffs, true);
  double max_abs = 0, max_imag = 0;
  std::vector<double> out(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) {
    time[t] *= inv_n;
    out[t] = time[t].real();
    max_abs = std::max(max_abs, std::abs(time[t]));
    max_imag = std::max(max_imag, std::abs(time[t].imag()));
  }
  if (max_imag >= 1e-6 * std::max(1.0, max_abs)) {
    throw DataError("idft: spectrum is not conjugate-symmetric");
  }
  return out;
}

std::vector<double> idft(const ErrorSpectrum& spectrum) {
  if (spectrum.length() != spectrum.source_length) {
    throw DataError("idft: coefficient count != source length");
  }
  return idft_real(spectrum.coefficients);
}

int BandPartition::band_of_bin(int k) const {
  if (k < 0 || k > max_bin) throw DataError("band_of_bin: bin out of range");
  if (k == 0) return 0;
  int b = 1;
  while (b < band_count - 1 && k >= boundaries[b]) ++b;
  return b;
}

std::pair<int, int> BandPartition::band_range(int b) const {
  if (b < 0 || b >= band_count) throw DataError("band_range: band out of range");
  if (b == 0) return {0, 0};
  const int first = boundaries[b - 1];
  const int last = (b == band_count - 1) ? max_bin : boundaries[b] - 1;
  return {first, last};
}

BandPartition make_band_partition(int length, int band_count, BandScheme scheme,
                                  const std::vector<int>& custom_boundaries) {
  if (length < 2) throw DataError("band partition: length must be >= 2");
  const int max_bin = length / 2;
  if (band_count < 2 || band_count > max_bin + 1) {
    throw DataError("band partition: band count infeasible for length " +
                    std::to_string(length));
  }
  BandPartition p;
  p.band_count = band_count;
  p.max_bin = max_bin;
  p.scheme = scheme;
  p.boundaries.assign(band_count, 0);
  p.boundaries[0] = 1;  // band 0 = {0}
  if (scheme == BandScheme::kCustom) {
    if (static_cast<int>(custom_boundaries.size()) != band_count) {
      throw UsageError("custom band partition: need band_count boundaries");
    }
    p.boundaries = custom_boundaries;
    if (p.boundaries[0] != 1 || p.boundaries[band_count - 1] > max_bin + 1) {
      throw UsageError("custom band partition: invalid boundary range");
    }
    for (int b = 1; b < band_count; ++b) {
      if (p.boundaries[b] <= p.boundaries[b - 1]) {
        throw UsageError("custom band partition: boundaries must increase");
      }
    }
    return p;
  }
  for (int b = 1; b < band_count; ++b) {
    long long target;
    if (scheme == BandScheme::kExponential) {
      target = std::llround(
          std::pow(static_cast<double>(max_bin),
                   static_cast<double>(b) / static_cast<double>(band_count - 1)));
    } else {
      target = 1 + std::llround(static_cast<double>(b) *
                                static_cast<double>(max_bin - 1) /
                                static_cast<double>(band_count - 1));
    }
    p.boundaries[b] =
        static_cast<int>(std::max<long long>(p.boundaries[b - 1] + 1, target));
  }
  if (p.boundaries[band_count - 2] > max_bin) {
    throw DataError("band partition: infeasible for length " +
                    std::to_string(length));
  }
  return p;
}

double band_metric(const ErrorSequence& seq, const BandPartition& partition,
                   int band_index) {
  if (band_index < 0 || band_index >= partition.band_count) {
    throw DataError("band_metric: band index out of range");
  }
  const int n = seq.length();
  ErrorSpectrum full = dft(seq);
  const auto [first, last] = partition.band_range(band_index);
  std::vector<std::complex<double>> kept(n, {0.0, 0.0});
  for (int k = first; k <= last; ++k) {
    kept[k] = full.coefficients[k];
    if (k != 0 && n - k != k) kept[n - k] = full.coefficients[n - k];
  }
  const std::vector<double> recon = idft_real(kept);
  long double acc = 0;
  for (double v : recon) acc += std::abs(v);
  return static_cast<double>(acc / n);
}

std::vector<double> band_metrics(const ErrorSequence& seq,
                                 const BandPartition& partition) {
  std::vector<double> out(partition.band_count);
  for (int b = 0; b < partition.band_count; ++b) {
    out[b] = band_metric(seq, partition, b);
  }
  return out;
}

std::vector<double> magnitude_spectrum(const ErrorSequence& seq) {
  ErrorSpectrum s = dft(seq);
  std::vector<double> mags(s.half_bins() + 1);
  for (int k = 0; k <= s.half_bins(); ++k) mags[k] = std::abs(s.coefficients[k]);
  return mags;
}

std::vector<std::optional<double>> amplitude_ratio(const ErrorSequence& a,
                                                   const ErrorSequence& b) {
  if (a.length() != b.length()) {
    throw DataError("amplitude_ratio: length mismatch");
  }
  const std::vector<double> ma = magnitude_spectrum(a);
  const std::vector<double> mb = magnitude_spectrum(b);
  std::vector<std::optional<double>> out(ma.size());
  for (std::size_t k = 0; k < ma.size(); ++k) {
    if (mb[k] < 1e-12) {
      out[k] = std::nullopt;
    } else {
      out[k] = ma[k] / mb[k];
    }
  }
  return out;
}

ErrorSpectrum lowpass_error_model(const ErrorSpectrum& spectrum, int k_thr,
                                  double alpha) {
  const int n = spectrum.source_length;
  if (k_thr < 0 || k_thr > n / 2) {
    throw DataError("lowpass_error_model: threshold out of range");
  }
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw DataError("lowpass_error_model: alpha must be in (0, 1]");
  }
  ErrorSpectrum out = spectrum;
  for (int k = 0; k < n; ++k) {
    const int freq = std::min(k, n - k);
    if (freq > k_thr) out.coefficients[k] *= alpha;
  }
  return out;
}

ParsevalResult parseval_check(const ErrorSequence& seq) {
  ParsevalResult r;
  long double te = 0;
  for (double v : seq.values) te += static_cast<long double>(v) * v;
  r.time_energy = static_cast<double>(te);
  ErrorSpectrum s = dft(seq);
  long double fe = 0;
  for (const auto& c : s.coefficients) fe += std::norm(c);
  r.freq_energy = static_cast<double>(fe / seq.length());
  return r;
}

std::vector<double> band_energies(const std::vector<double>& sequence,
                                  const BandPartition& partition) {
  const int n = static_cast<int>(sequence.size());
  if (n / 2 != partition.max_bin) {
    throw DataError("band_energies: partition does not match sequence length");
  }
  const std::vector<std::complex<double>> coeffs = dft_real(sequence);
  std::vector<double> out(partition.band_count, 0.0);
  for (int k = 0; k <= partition.max_bin; ++k) {
    const int b = partition.band_of_bin(k);
    double e = std::norm(coeffs[k]);
    if (k != 0 && n - k != k) e += std::norm(coeffs[n - k]);
    out[b] += e;
  }
  return out;
}

}  // namespace vdtk

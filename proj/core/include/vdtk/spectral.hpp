#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "vdtk/error.hpp"

namespace vdtk {

enum class MetricName { kAbsRel, kRmse, kOneMinusDelta1 };

std::string to_string(MetricName m);
MetricName metric_name_from_string(const std::string& s);

// Per-frame scalar metric values; finite and non-negative, length >= 2.
struct ErrorSequence {
  std::vector<double> values;
  MetricName metric = MetricName::kAbsRel;

  ErrorSequence() = default;
  ErrorSequence(std::vector<double> v, MetricName m);
  int length() const { return static_cast<int>(values.size()); }
};

// Unnormalized forward-transform coefficients, full length T.
struct ErrorSpectrum {
  std::vector<std::complex<double>> coefficients;
  int source_length = 0;

  int length() const { return static_cast<int>(coefficients.size()); }
  int half_bins() const { return source_length / 2; }  // highest distinct bin
};

// A disjoint cover of the non-negative-frequency bins {0..floor(T/2)}.
// Band 0 is always {0} (DC).
enum class BandScheme { kExponential, kLinear, kCustom };

struct BandPartition {
  int band_count = 0;
  int max_bin = 0;  // floor(T/2)
  // boundaries[b] is the first bin of band b+1; band b covers
  // [boundaries[b-1], boundaries[b]) with band 0 = {0} and the last band
  // absorbing the remainder up to max_bin inclusive.
  std::vector<int> boundaries;
  BandScheme scheme = BandScheme::kExponential;

  int band_of_bin(int k) const;
  std::pair<int, int> band_range(int b) const;  // [first, last] inclusive
};

// Forward transform F(k) = sum_t x_t e^{-i 2 pi k t / T}, no normalization.
// FFT-backed for all lengths (radix-2 plus Bluestein); agrees with the
// direct sum to better than 1e-9 relative.
std::vector<std::complex<double>> dft_complex(
    const std::vector<std::complex<double>>& x, bool inverse);
ErrorSpectrum dft(const ErrorSequence& seq);
std::vector<std::complex<double>> dft_real(const std::vector<double>& x);

// Inverse transform with the 1/T factor. Throws if the spectrum is not
// conjugate-symmetric (relative imaginary residue >= 1e-6); smaller residue
// is discarded.
std::vector<double> idft(const ErrorSpectrum& spectrum);
std::vector<double> idft_real(const std::vector<std::complex<double>>& coeffs);

BandPartition make_band_partition(int length, int band_count, BandScheme scheme,
                                  const std::vector<int>& custom_boundaries = {});

// Zeroes every bin outside the chosen band (with conjugate mirroring),
// inverts, and returns (1/T) sum_t |x_t|. Band 0 yields the sequence mean.
double band_metric(const ErrorSequence& seq, const BandPartition& partition,
                   int band_index);
std::vector<double> band_metrics(const ErrorSequence& seq,
                                 const BandPartition& partition);

// |F(k)| for k = 0..floor(T/2) (the non-redundant half).
std::vector<double> magnitude_spectrum(const ErrorSequence& seq);

// Elementwise |F_a(k)| / |F_b(k)| over the half-spectrum; bins where
// |F_b(k)| < 1e-12 are reported missing.
std::vector<std::optional<double>> amplitude_ratio(const ErrorSequence& a,
                                                   const ErrorSequence& b);

// Keeps bins with min(k, T-k) <= k_thr, scales all others by alpha.
ErrorSpectrum lowpass_error_model(const ErrorSpectrum& spectrum, int k_thr,
                                  double alpha);

struct ParsevalResult {
  double time_energy = 0;  // sum |x_t|^2
  double freq_energy = 0;  // (1/T) sum |F(k)|^2
};
ParsevalResult parseval_check(const ErrorSequence& seq);

// Per-band spectral energy sum |F(k)|^2 over a band's bins and their
// conjugate mirrors, for any real-valued sequence (signed diagnostics
// included). Total over bands equals T * sum x_t^2.
std::vector<double> band_energies(const std::vector<double>& sequence,
                                  const BandPartition& partition);

}  // namespace vdtk

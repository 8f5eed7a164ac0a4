#include "vdtk/fusion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "vdtk/parallel.hpp"
#include "vdtk/rng.hpp"
#include "vdtk/spectral.hpp"

namespace vdtk {

WindowPlan plan_windows(int frame_count, int window_length, int overlap) {
  if (frame_count <= 0) throw DataError("plan_windows: empty video");
  if (window_length <= 0 || overlap < 0 || overlap >= window_length) {
    throw UsageError("plan_windows: need 0 <= overlap < window_length");
  }
  WindowPlan plan;
  plan.window_length = window_length;
  plan.overlap = overlap;
  if (window_length >= frame_count) {
    plan.windows.emplace_back(0, frame_count - 1);
    return plan;
  }
  const int stride = window_length - overlap;
  for (int start = 0; start + window_length <= frame_count; start += stride) {
    plan.windows.emplace_back(start, start + window_length - 1);
  }
  if (plan.windows.back().second < frame_count - 1) {
    plan.windows.emplace_back(frame_count - window_length, frame_count - 1);
  }
  return plan;
}

int DenoiserConfig::inject_timestep() const {
  return spacing.timesteps[inject_step_index];
}

void DenoiserConfig::validate() const {
  if (!(cutoff_hz > 0.0) || cutoff_hz > 0.5) {
    throw UsageError("denoiser: cutoff_hz must be in (0, 0.5]");
  }
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw UsageError("denoiser: alpha must be in (0, 1]");
  }
  if (inject_step_index < 0 ||
      inject_step_index >= spacing.inference_steps()) {
    throw UsageError("denoiser: inject_step_index outside the spacing");
  }
}

namespace {

struct WindowNormalization {
  double lo = 0, hi = 1;
};

// Window-level range from the 1st/99th percentiles of valid samples; the
// affine map itself is not clamped so it inverts exactly.
WindowNormalization window_range(const DepthVideo& window) {
  std::vector<float> samples;
  samples.reserve(static_cast<std::size_t>(window.frame_count()) *
                  window.pixels_per_frame());
  for (int t = 0; t < window.frame_count(); ++t) {
    auto vals = window.frame(t);
    auto mask = window.frame_validity(t);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (mask[i]) samples.push_back(vals[i]);
    }
  }
  if (samples.size() < 2) return {0.0, 1.0};
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(
        std::llround(q * static_cast<double>(samples.size() - 1)));
    std::nth_element(samples.begin(), samples.begin() + idx, samples.end());
    return static_cast<double>(samples[idx]);
  };
  WindowNormalization n;
  n.lo = rank(0.01);
  n.hi = rank(0.99);
  return n;
}

}  // namespace

std::vector<double> denoise_trajectory(const std::vector<double>& values,
                                       const DenoiserConfig& cfg,
                                       std::uint64_t seed,
                                       std::uint64_t sample_stride,
                                       std::uint64_t sample_base,
                                       int frame_offset) {
  const int frames = static_cast<int>(values.size());
  if (frames < 4) throw DataError("denoise_trajectory: needs >= 4 samples");
  const int k_thr = static_cast<int>(cfg.cutoff_hz * frames);
  const int t_inject = cfg.inject_timestep();
  const double ab = cfg.schedule.alpha_bar(t_inject);
  const double signal_coeff = std::sqrt(ab);
  const double noise_coeff = std::sqrt(1.0 - ab);
  const NoiseField noise{seed, rng::kDenoiseNoise, cfg.null_noise};

  std::vector<double> eps(frames);
  std::vector<double> xt(frames);
  for (int t = 0; t < frames; ++t) {
    eps[t] = noise.sample(
        static_cast<std::uint64_t>(frame_offset + t) * sample_stride +
        sample_base);
    xt[t] = signal_coeff * values[t] + noise_coeff * eps[t];
  }
  // Shrink both the noised state and the known noise with the same low-pass
  // so the one-step reconstruction divides out the forward process exactly.
  ErrorSpectrum sx{dft_real(xt), frames};
  ErrorSpectrum se{dft_real(eps), frames};
  const std::vector<double> fx =
      idft_real(lowpass_error_model(sx, k_thr, cfg.alpha).coefficients);
  const std::vector<double> fe =
      idft_real(lowpass_error_model(se, k_thr, cfg.alpha).coefficients);
  std::vector<double> out(frames);
  for (int t = 0; t < frames; ++t) {
    out[t] = (fx[t] - noise_coeff * fe[t]) / signal_coeff;
  }
  return out;
}

DepthVideo spectral_denoise_window(const DepthVideo& window,
                                   const DenoiserConfig& cfg,
                                   std::uint64_t seed, int frame_offset) {
  cfg.validate();
  const int frames = window.frame_count();
  if (frames < 4) {
    throw DataError("spectral_denoise_window: window shorter than 4 frames");
  }

  // No-op configuration: the shrink is the identity and no noise enters, so
  // the output is the input bit for bit.
  if (cfg.alpha == 1.0 && cfg.null_noise) return window;

  const WindowNormalization norm = window_range(window);
  if (!(norm.hi > norm.lo)) return window;  // constant window

  DepthVideo out = window;
  const std::int64_t pixels = window.pixels_per_frame();
  parallel_for(pixels, [&](std::int64_t p) {
    const int y = static_cast<int>(p / window.width());
    const int x = static_cast<int>(p % window.width());
    for (int t = 0; t < frames; ++t) {
      if (!window.valid(t, y, x)) return;  // gap: pass trajectory through
    }
    std::vector<double> u(frames);
    for (int t = 0; t < frames; ++t) {
      u[t] = (window.at(t, y, x) - norm.lo) / (norm.hi - norm.lo);
    }
    const std::vector<double> x0 = denoise_trajectory(
        u, cfg, seed, static_cast<std::uint64_t>(pixels),
        static_cast<std::uint64_t>(p), frame_offset);
    for (int t = 0; t < frames; ++t) {
      const double value = norm.lo + x0[t] * (norm.hi - norm.lo);
      if (std::isfinite(value) && value > 0) {
        out.set(t, y, x, static_cast<float>(value));
      } else {
        out.invalidate(t, y, x);
      }
    }
  });
  return out;
}

DepthVideo blend_windows(const std::vector<DepthVideo>& slices,
                         const WindowPlan& plan, bool blend) {
  if (slices.size() != plan.windows.size()) {
    throw DataError("blend_windows: slice count != plan window count");
  }
  for (std::size_t w = 0; w < slices.size(); ++w) {
    const auto [start, end] = plan.windows[w];
    if (slices[w].frame_count() != end - start + 1) {
      throw DataError("blend_windows: slice " + std::to_string(w) +
                      " length mismatch");
    }
  }
  const int frames = plan.windows.back().second + 1;
  const DepthVideo& first = slices.front();
  DepthVideo out(first.width(), first.height(), frames, first.kind());

  auto copy_frame = [&](const DepthVideo& src, int src_t, int dst_t) {
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        if (src.valid(src_t, y, x)) {
          out.set(dst_t, y, x, src.at(src_t, y, x));
        } else {
          out.invalidate(dst_t, y, x);
        }
      }
    }
  };

  // First window verbatim, then each successor fades in over the region it
  // shares with what has been written so far.
  copy_frame(first, 0, 0);
  for (int t = 1; t < first.frame_count(); ++t) copy_frame(first, t, t);
  int written_end = plan.windows.front().second;

  for (std::size_t w = 1; w < slices.size(); ++w) {
    const auto [start, end] = plan.windows[w];
    const DepthVideo& slice = slices[w];
    const int overlap_len = std::max(0, written_end - start + 1);
    for (int t = start; t <= end; ++t) {
      const int local = t - start;
      if (t > written_end) {
        copy_frame(slice, local, t);
        continue;
      }
      if (!blend) {
        copy_frame(slice, local, t);  // hard cut: later window wins
        continue;
      }
      const double ramp = overlap_len >= 2
                              ? static_cast<double>(local) / (overlap_len - 1)
                              : 0.5;
      for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
          const bool new_valid = slice.valid(local, y, x);
          const bool old_valid = out.valid(t, y, x);
          if (new_valid && old_valid) {
            const double v =
                (1.0 - ramp) * out.at(t, y, x) + ramp * slice.at(local, y, x);
            if (v > 0 && std::isfinite(v)) {
              out.set(t, y, x, static_cast<float>(v));
            } else {
              out.invalidate(t, y, x);
            }
          } else if (new_valid) {
            out.set(t, y, x, slice.at(local, y, x));
          } else if (!old_valid) {
            out.invalidate(t, y, x);
          }
        }
      }
    }
    written_end = std::max(written_end, end);
  }
  return out;
}

DepthVideo denoise_video(const DepthVideo& video, const FusionConfig& cfg,
                         std::uint64_t seed) {
  const WindowPlan plan =
      plan_windows(video.frame_count(), cfg.window_length, cfg.overlap);
  std::vector<DepthVideo> slices;
  slices.reserve(plan.windows.size());
  for (const auto& [start, end] : plan.windows) {
    DepthVideo slice(video.width(), video.height(), end - start + 1,
                     video.kind());
    for (int t = start; t <= end; ++t) {
      for (int y = 0; y < video.height(); ++y) {
        for (int x = 0; x < video.width(); ++x) {
          if (video.valid(t, y, x)) {
            slice.set(t - start, y, x, video.at(t, y, x));
          } else {
            slice.invalidate(t - start, y, x);
          }
        }
      }
    }
    slices.push_back(
        spectral_denoise_window(slice, cfg.denoiser, seed, start));
  }
  return blend_windows(slices, plan, cfg.blend);
}

TwoStageResult run_two_stage(const PairGraph& graph, const FusionConfig& cfg,
                             std::uint64_t seed,
                             const AlignOptions& align_options) {
  using clock = std::chrono::steady_clock;
  TwoStageResult result;
  const auto t0 = clock::now();
  result.stage1 = align_global(graph, align_options);
  const auto t1 = clock::now();
  result.fused = denoise_video(result.stage1.depth, cfg, seed);
  const auto t2 = clock::now();
  result.stage1_seconds = std::chrono::duration<double>(t1 - t0).count();
  result.stage2_seconds = std::chrono::duration<double>(t2 - t1).count();
  return result;
}

}  // namespace vdtk

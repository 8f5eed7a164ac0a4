#pragma once

#include <cstdint>
#include <vector>

#include "vdtk/global_align.hpp"
#include "vdtk/schedule.hpp"
#include "vdtk/types.hpp"

namespace vdtk {

struct WindowPlan {
  int window_length = 110;
  int overlap = 25;
  std::vector<std::pair<int, int>> windows;  // inclusive (start, end)
};

// Stride window_length - overlap; the last window is right-aligned to end at
// the final frame, so it may overlap its predecessor by more than `overlap`.
WindowPlan plan_windows(int frame_count, int window_length = 110,
                        int overlap = 25);

// Temporal denoiser configuration. The surrogate implements a one-step
// reconstruction: trajectories are forward-noised at the train timestep
// selected by spacing[inject_step_index], transformed along time, bins above
// cutoff_hz * window_length are shrunk by alpha, and the injected noise is
// subtracted back out through the same filter (an exact noise predictor), so
// the net transfer function keeps low-frequency content and scales
// high-frequency content by alpha.
struct DenoiserConfig {
  double cutoff_hz = 0.05;  // cycles per frame, in (0, 0.5]
  double alpha = 0.3;       // shrink factor in (0, 1]
  TimestepSpacing spacing = make_spacing(1000, 4, SpacingMode::kTrailing);
  int inject_step_index = 2;
  ScheduleTable schedule = default_schedule();
  bool null_noise = false;  // test hook: inject exactly zero noise

  int inject_timestep() const;
  void validate() const;
};

// The per-trajectory kernel in double precision: normalized values are
// forward-noised, shrunk along time, and reconstructed. `sample_stride` and
// `sample_base` key the noise draws ((frame_offset + t) * stride + base).
std::vector<double> denoise_trajectory(const std::vector<double>& values,
                                       const DenoiserConfig& cfg,
                                       std::uint64_t seed,
                                       std::uint64_t sample_stride = 1,
                                       std::uint64_t sample_base = 0,
                                       int frame_offset = 0);

// Denoises one window in place of a copy. `frame_offset` is the window's
// first global frame index; noise draws are keyed by (seed, global frame,
// pixel) so any window plan sees the same field. Trajectories containing any
// invalid sample pass through unchanged.
DepthVideo spectral_denoise_window(const DepthVideo& window,
                                   const DenoiserConfig& cfg,
                                   std::uint64_t seed, int frame_offset = 0);

// Cross-fades overlapped frames (ramp 0 -> 1 across each overlap region);
// with blend = false the later window wins from its first frame (hard cut).
DepthVideo blend_windows(const std::vector<DepthVideo>& slices,
                         const WindowPlan& plan, bool blend = true);

struct FusionConfig {
  int window_length = 110;
  int overlap = 25;
  bool blend = true;
  DenoiserConfig denoiser;
};

struct TwoStageResult {
  AlignResult stage1;
  DepthVideo fused;
  double stage1_seconds = 0;
  double stage2_seconds = 0;
};

// Stage 1: align_global over the pair graph. Stage 2: window, denoise,
// blend. Both the intermediate and fused videos are returned.
TwoStageResult run_two_stage(const PairGraph& graph, const FusionConfig& cfg,
                             std::uint64_t seed,
                             const AlignOptions& align_options = {});

// Stage 2 alone, applied to an existing depth video.
DepthVideo denoise_video(const DepthVideo& video, const FusionConfig& cfg,
                         std::uint64_t seed);

}  // namespace vdtk

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vdtk/error.hpp"
#include "vdtk/types.hpp"

namespace vdtk {

enum class ScheduleKind { kLinear, kScaledLinear };

std::string to_string(ScheduleKind k);
ScheduleKind schedule_kind_from_string(const std::string& s);

// Precomputed discrete variance schedule. Indices are 1-based train
// timesteps t in [1, train_steps]; beta(t), alpha(t) = 1 - beta(t),
// alpha_bar(t) = prod_{s<=t} alpha(s), snr(t) = alpha_bar / (1 - alpha_bar).
class ScheduleTable {
 public:
  ScheduleTable(ScheduleKind kind, double beta_start, double beta_end,
                int train_steps);

  int train_steps() const { return static_cast<int>(beta_.size()); }
  ScheduleKind kind() const { return kind_; }
  double beta(int t) const { return beta_[check(t)]; }
  double alpha(int t) const { return 1.0 - beta_[check(t)]; }
  double alpha_bar(int t) const { return alpha_bar_[check(t)]; }
  double snr(int t) const;

  std::string csv() const;  // t,beta,alpha_bar,snr

 private:
  std::size_t check(int t) const;
  ScheduleKind kind_;
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;
};

ScheduleTable build_schedule(ScheduleKind kind, double beta_start,
                             double beta_end, int train_steps);

// The SVD-style defaults used throughout the pipeline.
ScheduleTable default_schedule();

enum class SpacingMode { kLeading, kTrailing };

std::string to_string(SpacingMode m);
SpacingMode spacing_mode_from_string(const std::string& s);

// Strictly decreasing inference timesteps in [1, train_steps].
// trailing: t_i = T - i * floor(T/N)          (always starts at T)
// leading:  t_i = (N - 1 - i) * floor(T/N) + 1 (always ends at 1, and never
//           contains T for N < T)
struct TimestepSpacing {
  SpacingMode mode = SpacingMode::kTrailing;
  std::vector<int> timesteps;

  int inference_steps() const { return static_cast<int>(timesteps.size()); }
  std::string json() const;
};

TimestepSpacing make_spacing(int train_steps, int inference_steps,
                             SpacingMode mode);

// Counter-based standard normal field, one draw per sample index.
struct NoiseField {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool null_noise = false;  // test hook: epsilon identically zero

  double sample(std::uint64_t counter) const;
};

// Forward process x_t = sqrt(alpha_bar) x0 + sqrt(1 - alpha_bar) eps applied
// elementwise; eps indexed by position so any parallel order agrees.
std::vector<double> q_sample(const std::vector<double>& x0,
                             const ScheduleTable& table, int t,
                             const NoiseField& noise,
                             std::uint64_t counter_base = 0);

// Per-frame mean of valid pixels after min-max normalization of each video
// to [0, 1]; plot data for drift diagnostics.
struct MeanSeriesPoint {
  double pred_mean = 0;
  double gt_mean = 0;
};
std::vector<MeanSeriesPoint> mean_shift_diagnostic(const DepthVideo& pred,
                                                   const DepthVideo& gt);

}  // namespace vdtk

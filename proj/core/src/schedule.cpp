#include "vdtk/schedule.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "vdtk/rng.hpp"

namespace vdtk {

std::string to_string(ScheduleKind k) {
  return k == ScheduleKind::kLinear ? "linear" : "scaled_linear";
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "linear") return ScheduleKind::kLinear;
  if (s == "scaled_linear") return ScheduleKind::kScaledLinear;
  throw UsageError("unknown schedule kind: " + s);
}

ScheduleTable::ScheduleTable(ScheduleKind kind, double beta_start,
                             double beta_end, int train_steps)
    : kind_(kind) {
  if (!(beta_start > 0.0) || !(beta_end < 1.0) || beta_start > beta_end) {
    throw UsageError("schedule: need 0 < beta_start <= beta_end < 1");
  }
  if (train_steps < 1) throw UsageError("schedule: train_steps must be >= 1");
  beta_.resize(train_steps);
  alpha_bar_.resize(train_steps);
  const double s0 = std::sqrt(beta_start);
  const double s1 = std::sqrt(beta_end);
  double running = 1.0;
  for (int t = 0; t < train_steps; ++t) {
    const double u = train_steps == 1
                         ? 0.0
                         : static_cast<double>(t) / (train_steps - 1);
    double b;
    if (kind == ScheduleKind::kLinear) {
      b = beta_start + (beta_end - beta_start) * u;
    } else {
      const double r = s0 + (s1 - s0) * u;
      b = r * r;
    }
    beta_[t] = b;
    running *= 1.0 - b;
    alpha_bar_[t] = running;
  }
}

std::size_t ScheduleTable::check(int t) const {
  if (t < 1 || t > train_steps()) {
    throw DataError("schedule: timestep " + std::to_string(t) +
                    " outside [1, " + std::to_string(train_steps()) + "]");
  }
  return static_cast<std::size_t>(t - 1);
}

double ScheduleTable::snr(int t) const {
  const double ab = alpha_bar(t);
  return ab / (1.0 - ab);
}

std::string ScheduleTable::csv() const {
  std::string out = "t,beta,alpha_bar,snr\n";
  char buf[128];
  for (int t = 1; t <= train_steps(); ++t) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", t, beta(t),
                  alpha_bar(t), snr(t));
    out += buf;
  }
  return out;
}

ScheduleTable build_schedule(ScheduleKind kind, double beta_start,
                             double beta_end, int train_steps) {
  return ScheduleTable(kind, beta_start, beta_end, train_steps);
}

ScheduleTable default_schedule() {
  return ScheduleTable(ScheduleKind::kLinear, 0.00085, 0.012, 1000);
}

std::string to_string(SpacingMode m) {
  return m == SpacingMode::kLeading ? "leading" : "trailing";
}

SpacingMode spacing_mode_from_string(const std::string& s) {
  if (s == "leading") return SpacingMode::kLeading;
  if (s == "trailing") return SpacingMode::kTrailing;
  throw UsageError("unknown spacing mode: " + s);
}

TimestepSpacing make_spacing(int train_steps, int inference_steps,
                             SpacingMode mode) {
  if (inference_steps < 1 || inference_steps > train_steps) {
    throw UsageError("spacing: need 1 <= N <= train_steps");
  }
  TimestepSpacing spacing;
  spacing.mode = mode;
  spacing.timesteps.resize(inference_steps);
  const int step = train_steps / inference_steps;
  for (int i = 0; i < inference_steps; ++i) {
    if (mode == SpacingMode::kTrailing) {
      spacing.timesteps[i] = train_steps - i * step;
    } else {
      spacing.timesteps[i] = (inference_steps - 1 - i) * step + 1;
    }
  }
  return spacing;
}

std::string TimestepSpacing::json() const {
  nlohmann::ordered_json j;
  j["mode"] = to_string(mode);
  j["inference_steps"] = inference_steps();
  j["timesteps"] = timesteps;
  return j.dump(2) + "\n";
}

double NoiseField::sample(std::uint64_t counter) const {
  if (null_noise) return 0.0;
  return rng::normal(seed, stream, counter);
}

std::vector<double> q_sample(const std::vector<double>& x0,
                             const ScheduleTable& table, int t,
                             const NoiseField& noise,
                             std::uint64_t counter_base) {
  const double ab = table.alpha_bar(t);
  const double signal_coeff = std::sqrt(ab);
  const double noise_coeff = std::sqrt(1.0 - ab);
  std::vector<double> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    out[i] = signal_coeff * x0[i] +
             noise_coeff * noise.sample(counter_base + i);
  }
  return out;
}

std::vector<MeanSeriesPoint> mean_shift_diagnostic(const DepthVideo& pred,
                                                   const DepthVideo& gt) {
  if (!pred.same_shape(gt)) {
    throw DataError("mean_shift_diagnostic: shape mismatch");
  }
  auto min_max = [](const DepthVideo& v) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < v.frame_count(); ++t) {
      auto vals = v.frame(t);
      auto mask = v.frame_validity(t);
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!mask[i]) continue;
        lo = std::min(lo, static_cast<double>(vals[i]));
        hi = std::max(hi, static_cast<double>(vals[i]));
      }
    }
    if (!(hi > lo)) {
      throw DataError("mean_shift_diagnostic: constant video cannot be normalized");
    }
    return std::pair<double, double>(lo, hi);
  };
  const auto [plo, phi] = min_max(pred);
  const auto [glo, ghi] = min_max(gt);
  std::vector<MeanSeriesPoint> out(pred.frame_count());
  for (int t = 0; t < pred.frame_count(); ++t) {
    long double pacc = 0, gacc = 0;
    std::int64_t pn = 0, gn = 0;
    auto pv = pred.frame(t);
    auto pm = pred.frame_validity(t);
    auto gv = gt.frame(t);
    auto gm = gt.frame_validity(t);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      if (pm[i]) {
        pacc += (pv[i] - plo) / (phi - plo);
        ++pn;
      }
      if (gm[i]) {
        gacc += (gv[i] - glo) / (ghi - glo);
        ++gn;
      }
    }
    out[t].pred_mean = pn > 0 ? static_cast<double>(pacc / pn) : 0.0;
    out[t].gt_mean = gn > 0 ? static_cast<double>(gacc / gn) : 0.0;
  }
  return out;
}

}  // namespace vdtk

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vdtk/types.hpp"

namespace vdtk {

enum class AbsRelDenominator { kGt, kPred };

struct MetricOptions {
  AbsRelDenominator absrel_denominator = AbsRelDenominator::kGt;
  // Default RMSE is sqrt(mean(sq)); the variant places 1/N outside the root.
  bool rmse_outside_root = false;
};

struct FrameMetrics {
  double absrel = 0;
  double rmse = 0;
  double delta1 = 0;
  double delta2 = 0;
  std::int64_t pixel_count = 0;  // 0 => frame excluded from aggregates
};

struct MetricReport {
  double absrel = 0;
  double rmse = 0;
  double delta1 = 0;
  double delta2 = 0;
  std::vector<FrameMetrics> per_frame;
  int empty_frame_count = 0;  // frames with zero selected pixels

  // Per-frame values of one metric, for spectral analysis. Empty frames
  // contribute 0 and are rare by construction of the callers.
  std::vector<double> sequence(const std::string& metric) const;
};

// Per-frame metrics over selected valid pixels; aggregates are means over
// frames with at least one selected pixel. The prediction is expected to be
// affine-aligned already.
MetricReport compute_metrics(const DepthVideo& pred_aligned,
                             const DepthVideo& gt,
                             const RegionMasks* selection = nullptr,
                             bool select_dynamic = true,
                             const MetricOptions& options = {});

struct RegionMetricReports {
  MetricReport dynamic;
  MetricReport static_region;
  MetricReport overall;
};

// Dynamic mask, its complement, and no mask. Alignment is not re-fit per
// region; use one video-level fit beforehand.
RegionMetricReports region_split_metrics(const DepthVideo& pred_aligned,
                                         const DepthVideo& gt,
                                         const RegionMasks& masks,
                                         const MetricOptions& options = {});

// Serialization: one row per frame plus an "aggregate" row.
std::string metric_report_csv(const MetricReport& report);
std::string metric_report_json(const MetricReport& report);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace vdtk

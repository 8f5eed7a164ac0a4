#include "vdtk/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "vdtk/parallel.hpp"

namespace vdtk {

namespace {

FrameMetrics frame_metrics(const DepthVideo& pred, const DepthVideo& gt,
                           const RegionMasks* selection, bool select_dynamic,
                           const MetricOptions& options, int t) {
  FrameMetrics m;
  long double abs_acc = 0, sq_acc = 0;
  std::int64_t d1 = 0, d2 = 0, n = 0;
  const int height = pred.height();
  const int width = pred.width();
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!pred.valid(t, y, x) || !gt.valid(t, y, x)) continue;
      if (selection != nullptr && selection->dynamic(t, y, x) != select_dynamic)
        continue;
      const double p = pred.at(t, y, x);
      const double g = gt.at(t, y, x);
      const double diff = g - p;
      const double denom =
          options.absrel_denominator == AbsRelDenominator::kGt ? g : p;
      abs_acc += std::abs(diff) / denom;
      sq_acc += diff * diff;
      const double ratio = std::max(g / p, p / g);
      d1 += ratio < 1.25;
      d2 += ratio < 1.25 * 1.25;
      ++n;
    }
  }
  m.pixel_count = n;
  if (n == 0) return m;
  m.absrel = static_cast<double>(abs_acc / n);
  m.rmse = options.rmse_outside_root
               ? std::sqrt(static_cast<double>(sq_acc)) / static_cast<double>(n)
               : std::sqrt(static_cast<double>(sq_acc / n));
  m.delta1 = static_cast<double>(d1) / static_cast<double>(n);
  m.delta2 = static_cast<double>(d2) / static_cast<double>(n);
  return m;
}

}  // namespace

std::vector<double> MetricReport::sequence(const std::string& metric) const {
  std::vector<double> seq;
  seq.reserve(per_frame.size());
  for (const FrameMetrics& f : per_frame) {
    if (metric == "absrel") {
      seq.push_back(f.absrel);
    } else if (metric == "rmse") {
      seq.push_back(f.rmse);
    } else if (metric == "one_minus_delta1") {
      seq.push_back(f.pixel_count > 0 ? 1.0 - f.delta1 : 0.0);
    } else {
      throw UsageError("unknown metric: " + metric);
    }
  }
  return seq;
}

MetricReport compute_metrics(const DepthVideo& pred_aligned,
                             const DepthVideo& gt, const RegionMasks* selection,
                             bool select_dynamic, const MetricOptions& options) {
  if (!pred_aligned.same_shape(gt)) {
    throw DataError("compute_metrics: shape mismatch");
  }
  if (selection != nullptr && !selection->same_shape(gt)) {
    throw DataError("compute_metrics: mask shape mismatch");
  }
  MetricReport report;
  report.per_frame.resize(gt.frame_count());
  parallel_for(gt.frame_count(), [&](std::int64_t t) {
    report.per_frame[t] = frame_metrics(pred_aligned, gt, selection,
                                        select_dynamic, options,
                                        static_cast<int>(t));
  });
  long double absrel = 0, rmse = 0, d1 = 0, d2 = 0;
  int included = 0;
  for (const FrameMetrics& f : report.per_frame) {
    if (f.pixel_count == 0) {
      ++report.empty_frame_count;
      continue;
    }
    absrel += f.absrel;
    rmse += f.rmse;
    d1 += f.delta1;
    d2 += f.delta2;
    ++included;
  }
  if (included == 0) return report;  // empty selection: zeroed aggregates
  report.absrel = static_cast<double>(absrel / included);
  report.rmse = static_cast<double>(rmse / included);
  report.delta1 = static_cast<double>(d1 / included);
  report.delta2 = static_cast<double>(d2 / included);
  return report;
}

RegionMetricReports region_split_metrics(const DepthVideo& pred_aligned,
                                         const DepthVideo& gt,
                                         const RegionMasks& masks,
                                         const MetricOptions& options) {
  RegionMetricReports reports{
      compute_metrics(pred_aligned, gt, &masks, true, options),
      compute_metrics(pred_aligned, gt, &masks, false, options),
      compute_metrics(pred_aligned, gt, nullptr, true, options)};
  return reports;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string metric_report_csv(const MetricReport& report) {
  std::string out = "frame,absrel,rmse,delta1,delta2,pixel_count\n";
  for (std::size_t t = 0; t < report.per_frame.size(); ++t) {
    const FrameMetrics& f = report.per_frame[t];
    out += std::to_string(t) + "," + fmt(f.absrel) + "," + fmt(f.rmse) + "," +
           fmt(f.delta1) + "," + fmt(f.delta2) + "," +
           std::to_string(f.pixel_count) + "\n";
  }
  out += "aggregate," + fmt(report.absrel) + "," + fmt(report.rmse) + "," +
         fmt(report.delta1) + "," + fmt(report.delta2) + "," +
         std::to_string(report.empty_frame_count) + "\n";
  return out;
}

std::string metric_report_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["absrel"] = report.absrel;
  j["rmse"] = report.rmse;
  j["delta1"] = report.delta1;
  j["delta2"] = report.delta2;
  j["empty_frame_count"] = report.empty_frame_count;
  nlohmann::ordered_json frames = nlohmann::ordered_json::array();
  for (const FrameMetrics& f : report.per_frame) {
    frames.push_back({{"absrel", f.absrel},
                      {"rmse", f.rmse},
                      {"delta1", f.delta1},
                      {"delta2", f.delta2},
                      {"pixel_count", f.pixel_count}});
  }
  j["per_frame"] = std::move(frames);
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write: " + path.string());
  out << text;
}

}  // namespace vdtk

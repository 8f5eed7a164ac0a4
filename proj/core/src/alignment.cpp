#include "vdtk/alignment.hpp"

#include <cmath>

namespace vdtk {

namespace {

struct FitSums {
  // long double keeps the normal equations accurate to ~1e-10 relative even
  // on million-pixel videos.
  long double sp = 0, sg = 0, spp = 0, spg = 0;
  std::int64_t n = 0;

  void accumulate(const DepthVideo& pred, const DepthVideo& gt, int t) {
    auto pv = pred.frame(t);
    auto pm = pred.frame_validity(t);
    auto gv = gt.frame(t);
    auto gm = gt.frame_validity(t);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      if (pm[i] && gm[i]) {
        const long double p = pv[i];
        const long double g = gv[i];
        sp += p;
        sg += g;
        spp += p * p;
        spg += p * g;
        ++n;
      }
    }
  }

  AffineFit solve() const {
    if (n == 0) throw DataError("affine fit: no jointly-valid pixels");
    const long double det = spp * n - sp * sp;
    const long double scale_det = std::max<long double>(spp * n, sp * sp);
    if (n < 2 || det <= scale_det * 1e-14L) {
      throw DataError("affine fit: degenerate (constant or near-constant prediction)");
    }
    AffineFit fit;
    fit.scale = static_cast<double>((spg * n - sp * sg) / det);
    fit.shift = static_cast<double>((spp * sg - sp * spg) / det);
    fit.valid_pixel_count = n;
    if (!std::isfinite(fit.scale) || !std::isfinite(fit.shift)) {
      throw DataError("affine fit: non-finite solution");
    }
    return fit;
  }
};

void check_shapes(const DepthVideo& pred, const DepthVideo& gt) {
  if (!pred.same_shape(gt)) {
    throw DataError("affine fit: prediction and ground truth shapes differ");
  }
}

}  // namespace

AffineFit fit_affine_shared(const DepthVideo& pred, const DepthVideo& gt) {
  check_shapes(pred, gt);
  FitSums sums;
  for (int t = 0; t < pred.frame_count(); ++t) sums.accumulate(pred, gt, t);
  return sums.solve();
}

std::vector<AffineFit> fit_affine_per_frame(const DepthVideo& pred,
                                            const DepthVideo& gt) {
  check_shapes(pred, gt);
  std::vector<AffineFit> fits;
  fits.reserve(pred.frame_count());
  for (int t = 0; t < pred.frame_count(); ++t) {
    FitSums sums;
    sums.accumulate(pred, gt, t);
    fits.push_back(sums.solve());
  }
  return fits;
}

AffineApplyResult apply_affine(const DepthVideo& video, const AffineFit& fit) {
  AffineApplyResult result{DepthVideo(video.width(), video.height(),
                                      video.frame_count(), video.kind()),
                           0};
  for (int t = 0; t < video.frame_count(); ++t) {
    for (int y = 0; y < video.height(); ++y) {
      for (int x = 0; x < video.width(); ++x) {
        if (!video.valid(t, y, x)) {
          result.video.invalidate(t, y, x);
          continue;
        }
        const double v = fit.scale * video.at(t, y, x) + fit.shift;
        if (v <= 0.0 || !std::isfinite(v)) {
          result.video.invalidate(t, y, x);
          ++result.invalidated_count;
        } else {
          result.video.set(t, y, x, static_cast<float>(v));
        }
      }
    }
  }
  return result;
}

double affine_objective(const DepthVideo& pred, const DepthVideo& gt,
                        double scale, double shift) {
  check_shapes(pred, gt);
  long double acc = 0;
  for (int t = 0; t < pred.frame_count(); ++t) {
    auto pv = pred.frame(t);
    auto pm = pred.frame_validity(t);
    auto gv = gt.frame(t);
    auto gm = gt.frame_validity(t);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      if (pm[i] && gm[i]) {
        const long double r = scale * static_cast<long double>(pv[i]) + shift -
                              static_cast<long double>(gv[i]);
        acc += r * r;
      }
    }
  }
  return static_cast<double>(acc);
}

}  // namespace vdtk

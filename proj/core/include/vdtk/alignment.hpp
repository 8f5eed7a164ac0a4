#pragma once

#include <vector>

#include "vdtk/types.hpp"

namespace vdtk {

// Least-squares scale/shift mapping prediction onto ground truth.
struct AffineFit {
  double scale = 1.0;
  double shift = 0.0;
  std::int64_t valid_pixel_count = 0;
};

// Minimizes sum over all jointly-valid pixels of all frames of
// (scale * pred + shift - gt)^2 via the 2x2 normal equations. One (scale,
// shift) is shared by the whole video. Accumulation is compensated and
// frame-ordered, so results are identical under any thread budget.
AffineFit fit_affine_shared(const DepthVideo& pred, const DepthVideo& gt);

// Same objective solved independently per frame.
std::vector<AffineFit> fit_affine_per_frame(const DepthVideo& pred,
                                            const DepthVideo& gt);

struct AffineApplyResult {
  DepthVideo video;
  std::int64_t invalidated_count = 0;  // pixels driven <= 0 by the map
};

// v -> scale * v + shift on valid pixels; results <= 0 are invalidated.
AffineApplyResult apply_affine(const DepthVideo& video, const AffineFit& fit);

// Residual sum of squares of a candidate fit, over jointly-valid pixels.
double affine_objective(const DepthVideo& pred, const DepthVideo& gt,
                        double scale, double shift);

}  // namespace vdtk

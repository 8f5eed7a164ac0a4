#pragma once

#include <string>
#include <vector>

#include "vdtk/synth.hpp"
#include "vdtk/types.hpp"

namespace vdtk {

struct PairDistance {
  int frame_i = 0;
  int frame_j = 0;
  double mean_distance = 0;  // meters
  std::int64_t count = 0;
};

struct TempConsReport {
  double mean_distance = 0;  // count-weighted over pairs
  std::vector<PairDistance> per_pair;
  int delta = 10;
  int skipped_pairs = 0;

  std::string csv() const;
  std::string json() const;
};

// Lifts predicted depth to 3-D with the (ground-truth) intrinsics, transports
// across delta-spaced frame pairs (i, i+delta) for i = 0, delta, 2*delta, ...
// with the ground-truth poses, and averages Euclidean distances over the
// static correspondences. Depth at the frame-j subpixel is sampled
// bilinearly and requires all four neighbours valid. The prediction must be
// affine-aligned to ground truth beforehand.
TempConsReport temporal_consistency(const DepthVideo& pred,
                                    const CameraTrack& track,
                                    const CorrespondenceTable& correspondences,
                                    bool static_only = true, int delta = 10);

}  // namespace vdtk

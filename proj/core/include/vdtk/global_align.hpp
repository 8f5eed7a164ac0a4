#pragma once

#include "vdtk/pair_graph.hpp"
#include "vdtk/registration.hpp"

namespace vdtk {

struct AlignOptions {
  // Pixels participate in a registration when both confidences are strictly
  // greater than this.
  double confidence_threshold = 0.0;
  EdgeWeight edge_weight = EdgeWeight::kMeanConfidence;
};

struct AlignResult {
  DepthVideo depth;          // per-frame z in each frame's recovered camera
  CameraTrack track;         // recovered poses and pinhole intrinsics
  std::vector<std::size_t> tree_edges;
  int root_frame = 0;
};

// Closed-form global initialization: traverses the maximum-confidence
// spanning tree from the root (the node incident to the strongest tree
// edge), registers each pair into the accumulating world frame by similarity
// Procrustes over jointly-confident pixels, and composes transforms down the
// tree. No iterative refinement. Per-frame cameras come from the rigid part
// of each frame's own pair-to-world registration; the final frame (which
// never leads a pair) is recovered by DLT resection. Principal point is
// assumed at the grid center ((w-1)/2, (h-1)/2).
AlignResult align_global(const PairGraph& graph, const AlignOptions& options = {});

}  // namespace vdtk

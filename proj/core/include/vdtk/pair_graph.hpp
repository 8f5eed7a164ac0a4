#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "vdtk/geometry.hpp"
#include "vdtk/types.hpp"

namespace vdtk {

// One two-frame stereo prediction: dense pointmaps for both frames expressed
// in frame_i's camera coordinates, with per-pixel confidence. Confidence is
// exactly 0 on dynamic or invalid pixels.
struct PairwisePrediction {
  int frame_i = 0;
  int frame_j = 0;
  std::vector<Eigen::Vector3d> pointmap_i;  // row-major, width*height
  std::vector<Eigen::Vector3d> pointmap_j;
  std::vector<double> confidence_i;
  std::vector<double> confidence_j;
  double mean_confidence = 0;

  void recompute_mean_confidence();
};

enum class EdgeWeight { kMeanConfidence, kSumConfidence, kMedianConfidence };

struct PairGraph {
  int frame_count = 0;
  int width = 0;
  int height = 0;
  int neighbor_span = 0;  // the n used for pairing
  std::vector<PairwisePrediction> edges;

  const PairwisePrediction& edge(std::size_t e) const { return edges[e]; }
  double edge_weight(std::size_t e, EdgeWeight kind) const;
  void validate() const;
};

// All (i, j) with 0 <= i < j <= min(i + n, T-1), lexicographic; the count is
// n*T - n*(n+1)/2 for n < T.
std::vector<std::pair<int, int>> enumerate_pairs(int frame_count, int n);

// Spanning tree maximizing total weight (Kruskal on descending weights,
// lexicographic edge-id tie-break). Returns edge indices into graph.edges.
// Throws DataError listing components if the graph is disconnected.
std::vector<std::size_t> max_confidence_spanning_tree(
    const PairGraph& graph, EdgeWeight weight = EdgeWeight::kMeanConfidence);

// Directory layout: graph.json plus per-edge payloads
// pair_%06d_%06d_{pm0,pm1,conf0,conf1}.f32 (pointmaps xyz-interleaved).
void write_pair_graph(const PairGraph& graph, const std::filesystem::path& dir);
PairGraph read_pair_graph(const std::filesystem::path& dir);

// Inspection dump: edges, weights, and the chosen tree.
std::string pair_graph_summary_json(const PairGraph& graph,
                                    std::span<const std::size_t> tree_edges);

}  // namespace vdtk

#include "vdtk/global_align.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace vdtk {

namespace {

struct FrameState {
  bool known = false;
  std::vector<Eigen::Vector3d> world_points;
  std::vector<double> world_conf;
};

std::vector<double> joint_weights(const std::vector<double>& a,
                                  const std::vector<double>& b, double tau) {
  std::vector<double> w(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > tau && b[i] > tau) w[i] = a[i] * b[i];
  }
  return w;
}

std::size_t count_positive(const std::vector<double>& w) {
  std::size_t n = 0;
  for (double v : w) n += v > 0;
  return n;
}

std::string edge_name(const PairwisePrediction& e) {
  return "(" + std::to_string(e.frame_i) + ", " + std::to_string(e.frame_j) + ")";
}

ProcrustesResult register_into_world(const PairwisePrediction& e,
                                     const std::vector<Eigen::Vector3d>& source,
                                     const std::vector<double>& source_conf,
                                     const FrameState& anchor, double tau) {
  const std::vector<double> w =
      joint_weights(source_conf, anchor.world_conf, tau);
  if (count_positive(w) < 3) {
    throw DataError("align_global: edge " + edge_name(e) +
                    " has fewer than 3 usable correspondences");
  }
  return procrustes_similarity(source, anchor.world_points, w);
}

}  // namespace

AlignResult align_global(const PairGraph& graph, const AlignOptions& options) {
  graph.validate();
  if (graph.frame_count < 2) {
    throw DataError("align_global: need at least 2 frames");
  }
  const double tau = options.confidence_threshold;
  const std::size_t pixels = static_cast<std::size_t>(graph.width) * graph.height;

  AlignResult result;
  result.tree_edges = max_confidence_spanning_tree(graph, options.edge_weight);

  // Root: the node incident to the strongest tree edge.
  std::size_t best_tree_edge = result.tree_edges[0];
  double best_w = -1.0;
  for (std::size_t e : result.tree_edges) {
    const double w = graph.edge_weight(e, options.edge_weight);
    const auto& pe = graph.edges[e];
    const auto& pb = graph.edges[best_tree_edge];
    if (w > best_w ||
        (w == best_w && std::pair(pe.frame_i, pe.frame_j) <
                            std::pair(pb.frame_i, pb.frame_j))) {
      best_w = w;
      best_tree_edge = e;
    }
  }
  result.root_frame = graph.edges[best_tree_edge].frame_i;

  // Tree adjacency, processed in deterministic order.
  std::vector<std::vector<std::size_t>> incident(graph.frame_count);
  for (std::size_t e : result.tree_edges) {
    incident[graph.edges[e].frame_i].push_back(e);
    incident[graph.edges[e].frame_j].push_back(e);
  }
  for (auto& list : incident) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      const auto& ea = graph.edges[a];
      const auto& eb = graph.edges[b];
      return std::pair(ea.frame_i, ea.frame_j) < std::pair(eb.frame_i, eb.frame_j);
    });
  }

  std::vector<FrameState> frames(graph.frame_count);
  {
    const PairwisePrediction& root_edge = graph.edges[best_tree_edge];
    FrameState& root = frames[result.root_frame];
    root.known = true;
    root.world_points = result.root_frame == root_edge.frame_i
                            ? root_edge.pointmap_i
                            : root_edge.pointmap_j;
    root.world_conf = result.root_frame == root_edge.frame_i
                          ? root_edge.confidence_i
                          : root_edge.confidence_j;
  }

  std::queue<int> frontier;
  frontier.push(result.root_frame);
  while (!frontier.empty()) {
    const int a = frontier.front();
    frontier.pop();
    for (std::size_t e : incident[a]) {
      const PairwisePrediction& pred = graph.edges[e];
      const int b = pred.frame_i == a ? pred.frame_j : pred.frame_i;
      if (frames[b].known) continue;
      const bool a_is_first = pred.frame_i == a;
      const auto& src = a_is_first ? pred.pointmap_i : pred.pointmap_j;
      const auto& src_conf = a_is_first ? pred.confidence_i : pred.confidence_j;
      const ProcrustesResult reg =
          register_into_world(pred, src, src_conf, frames[a], tau);
      const auto& other = a_is_first ? pred.pointmap_j : pred.pointmap_i;
      const auto& other_conf = a_is_first ? pred.confidence_j : pred.confidence_i;
      FrameState& state = frames[b];
      state.known = true;
      state.world_points.resize(pixels);
      for (std::size_t p = 0; p < pixels; ++p) {
        state.world_points[p] = reg.transform.apply(other[p]);
      }
      state.world_conf = other_conf;
      frontier.push(b);
    }
  }
  for (int f = 0; f < graph.frame_count; ++f) {
    if (!frames[f].known) {
      throw DataError("align_global: frame " + std::to_string(f) +
                      " not reached by the spanning tree");
    }
  }

  // Best leading edge per frame for camera recovery.
  std::vector<int> lead_edge(graph.frame_count, -1);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const int i = graph.edges[e].frame_i;
    if (lead_edge[i] < 0) {
      lead_edge[i] = static_cast<int>(e);
      continue;
    }
    const double cur = graph.edge_weight(lead_edge[i], options.edge_weight);
    const double cand = graph.edge_weight(e, options.edge_weight);
    if (cand > cur) lead_edge[i] = static_cast<int>(e);
  }

  const double cx = (graph.width - 1) / 2.0;
  const double cy = (graph.height - 1) / 2.0;
  result.depth = DepthVideo(graph.width, graph.height, graph.frame_count,
                            ValueKind::kDepth);
  result.track = CameraTrack(graph.frame_count);

  for (int f = 0; f < graph.frame_count; ++f) {
    Eigen::Matrix3d r_cw;
    Eigen::Vector3d t_cw;
    double focal;
    if (lead_edge[f] >= 0) {
      const PairwisePrediction& pred = graph.edges[lead_edge[f]];
      const ProcrustesResult reg = register_into_world(
          pred, pred.pointmap_i, pred.confidence_i, frames[f], tau);
      r_cw = reg.transform.rotation;
      t_cw = reg.transform.translation;
      // Own-camera points for the focal estimate (similarity inverse).
      std::vector<Eigen::Vector3d> own(pixels);
      const SimilarityTransform inv = reg.transform.inverse();
      for (std::size_t p = 0; p < pixels; ++p) {
        own[p] = inv.apply(frames[f].world_points[p]);
      }
      focal = weiszfeld_focal(own, graph.width, graph.height, cx, cy, 10,
                              frames[f].world_conf);
    } else {
      // Typically only the final frame, which never leads a pair.
      const ResectionResult res =
          resect_camera(frames[f].world_points, graph.width, graph.height, cx,
                        cy, frames[f].world_conf);
      r_cw = res.pose.topLeftCorner<3, 3>();
      t_cw = res.pose.topRightCorner<3, 1>();
      focal = res.focal;
    }
    result.track.pose(f).setIdentity();
    result.track.pose(f).topLeftCorner<3, 3>() = r_cw;
    result.track.pose(f).topRightCorner<3, 1>() = t_cw;
    result.track.intrinsics(f) = {focal, focal, cx, cy};

    // Depth: z of the world points in the recovered (rigid) camera.
    const Eigen::Matrix3d r_wc = r_cw.transpose();
    for (int y = 0; y < graph.height; ++y) {
      for (int x = 0; x < graph.width; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * graph.width + x;
        const double z = (r_wc * (frames[f].world_points[p] - t_cw)).z();
        if (std::isfinite(z) && z > 0) {
          result.depth.set(f, y, x, static_cast<float>(z));
        } else {
          result.depth.invalidate(f, y, x);
        }
      }
    }
  }
  return result;
}

}  // namespace vdtk

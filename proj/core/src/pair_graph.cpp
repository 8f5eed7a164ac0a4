#include "vdtk/pair_graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numeric>

namespace vdtk {

namespace fs = std::filesystem;

void PairwisePrediction::recompute_mean_confidence() {
  long double acc = 0;
  for (double c : confidence_i) acc += c;
  for (double c : confidence_j) acc += c;
  const std::size_t n = confidence_i.size() + confidence_j.size();
  mean_confidence = n == 0 ? 0.0 : static_cast<double>(acc / n);
}

double PairGraph::edge_weight(std::size_t e, EdgeWeight kind) const {
  const PairwisePrediction& pred = edges[e];
  switch (kind) {
    case EdgeWeight::kMeanConfidence:
      return pred.mean_confidence;
    case EdgeWeight::kSumConfidence: {
      long double acc = 0;
      for (double c : pred.confidence_i) acc += c;
      for (double c : pred.confidence_j) acc += c;
      return static_cast<double>(acc);
    }
    case EdgeWeight::kMedianConfidence: {
      std::vector<double> all;
      all.reserve(pred.confidence_i.size() + pred.confidence_j.size());
      all.insert(all.end(), pred.confidence_i.begin(), pred.confidence_i.end());
      all.insert(all.end(), pred.confidence_j.begin(), pred.confidence_j.end());
      std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
      return all[all.size() / 2];
    }
  }
  return 0;
}

void PairGraph::validate() const {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (const PairwisePrediction& e : edges) {
    if (e.frame_i < 0 || e.frame_j <= e.frame_i || e.frame_j >= frame_count) {
      throw DataError("pair graph: bad edge (" + std::to_string(e.frame_i) +
                      ", " + std::to_string(e.frame_j) + ")");
    }
    if (e.pointmap_i.size() != n || e.pointmap_j.size() != n ||
        e.confidence_i.size() != n || e.confidence_j.size() != n) {
      throw DataError("pair graph: edge payload size mismatch");
    }
  }
}

std::vector<std::pair<int, int>> enumerate_pairs(int frame_count, int n) {
  if (n < 1 || n >= frame_count) {
    throw DataError("enumerate_pairs: need 1 <= n < frame_count");
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < frame_count; ++i) {
    const int last = std::min(i + n, frame_count - 1);
    for (int j = i + 1; j <= last; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

std::vector<std::size_t> max_confidence_spanning_tree(const PairGraph& graph,
                                                      EdgeWeight weight) {
  if (graph.frame_count <= 0) throw DataError("spanning tree: empty graph");
  std::vector<std::size_t> order(graph.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> w(graph.edges.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    w[e] = graph.edge_weight(e, weight);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (w[a] != w[b]) return w[a] > w[b];
    // lexicographic edge-id tie-break
    const auto& ea = graph.edges[a];
    const auto& eb = graph.edges[b];
    return std::pair(ea.frame_i, ea.frame_j) < std::pair(eb.frame_i, eb.frame_j);
  });
  UnionFind uf(graph.frame_count);
  std::vector<std::size_t> tree;
  tree.reserve(graph.frame_count - 1);
  for (std::size_t e : order) {
    if (uf.unite(graph.edges[e].frame_i, graph.edges[e].frame_j)) {
      tree.push_back(e);
    }
  }
  if (static_cast<int>(tree.size()) != graph.frame_count - 1) {
    std::vector<int> component(graph.frame_count);
    for (int v = 0; v < graph.frame_count; ++v) component[v] = uf.find(v);
    std::string msg = "spanning tree: graph disconnected; components:";
    int previous = -1;
    std::sort(component.begin(), component.end());
    for (int c : component) {
      if (c != previous) {
        msg += " " + std::to_string(c);
        previous = c;
      }
    }
    throw DataError(msg);
  }
  return tree;
}

namespace {

std::string pair_file(int i, int j, const char* kind) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "pair_%06d_%06d_%s.f32", i, j, kind);
  return buf;
}

void write_floats(const fs::path& path, const std::vector<float>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write: " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
}

std::vector<float> read_floats(const fs::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open: " + path.string());
  if (static_cast<std::size_t>(in.tellg()) != count * sizeof(float)) {
    throw DataError("payload size mismatch: " + path.string());
  }
  std::vector<float> data(count);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  return data;
}

std::vector<float> pack_points(const std::vector<Eigen::Vector3d>& pts) {
  std::vector<float> out(pts.size() * 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[3 * i + 0] = static_cast<float>(pts[i].x());
    out[3 * i + 1] = static_cast<float>(pts[i].y());
    out[3 * i + 2] = static_cast<float>(pts[i].z());
  }
  return out;
}

std::vector<Eigen::Vector3d> unpack_points(const std::vector<float>& data) {
  std::vector<Eigen::Vector3d> out(data.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {data[3 * i + 0], data[3 * i + 1], data[3 * i + 2]};
  }
  return out;
}

std::vector<float> pack_scalars(const std::vector<double>& v) {
  return std::vector<float>(v.begin(), v.end());
}

}  // namespace

void write_pair_graph(const PairGraph& graph, const fs::path& dir) {
  graph.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir.string());

  nlohmann::ordered_json j;
  j["format_version"] = "1.0";
  j["frame_count"] = graph.frame_count;
  j["width"] = graph.width;
  j["height"] = graph.height;
  j["neighbor_span"] = graph.neighbor_span;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const PairwisePrediction& e : graph.edges) {
    edges.push_back({{"i", e.frame_i},
                     {"j", e.frame_j},
                     {"mean_confidence", e.mean_confidence}});
    write_floats(dir / pair_file(e.frame_i, e.frame_j, "pm0"),
                 pack_points(e.pointmap_i));
    write_floats(dir / pair_file(e.frame_i, e.frame_j, "pm1"),
                 pack_points(e.pointmap_j));
    write_floats(dir / pair_file(e.frame_i, e.frame_j, "conf0"),
                 pack_scalars(e.confidence_i));
    write_floats(dir / pair_file(e.frame_i, e.frame_j, "conf1"),
                 pack_scalars(e.confidence_j));
  }
  j["edges"] = std::move(edges);
  std::ofstream out(dir / "graph.json", std::ios::trunc);
  if (!out) throw IoError("cannot write graph.json in " + dir.string());
  out << j.dump(2) << "\n";
}

PairGraph read_pair_graph(const fs::path& dir) {
  std::ifstream in(dir / "graph.json");
  if (!in) throw IoError("cannot open: " + (dir / "graph.json").string());
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError(std::string("malformed graph.json: ") + e.what());
  }
  PairGraph graph;
  graph.frame_count = j.at("frame_count").get<int>();
  graph.width = j.at("width").get<int>();
  graph.height = j.at("height").get<int>();
  graph.neighbor_span = j.value("neighbor_span", 1);
  const std::size_t n = static_cast<std::size_t>(graph.width) * graph.height;
  for (const auto& je : j.at("edges")) {
    PairwisePrediction e;
    e.frame_i = je.at("i").get<int>();
    e.frame_j = je.at("j").get<int>();
    e.pointmap_i = unpack_points(
        read_floats(dir / pair_file(e.frame_i, e.frame_j, "pm0"), n * 3));
    e.pointmap_j = unpack_points(
        read_floats(dir / pair_file(e.frame_i, e.frame_j, "pm1"), n * 3));
    auto c0 = read_floats(dir / pair_file(e.frame_i, e.frame_j, "conf0"), n);
    auto c1 = read_floats(dir / pair_file(e.frame_i, e.frame_j, "conf1"), n);
    e.confidence_i.assign(c0.begin(), c0.end());
    e.confidence_j.assign(c1.begin(), c1.end());
    e.recompute_mean_confidence();
    graph.edges.push_back(std::move(e));
  }
  graph.validate();
  return graph;
}

std::string pair_graph_summary_json(const PairGraph& graph,
                                    std::span<const std::size_t> tree_edges) {
  std::vector<bool> in_tree(graph.edges.size(), false);
  for (std::size_t e : tree_edges) in_tree[e] = true;
  nlohmann::ordered_json j;
  j["frame_count"] = graph.frame_count;
  j["neighbor_span"] = graph.neighbor_span;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    edges.push_back({{"i", graph.edges[e].frame_i},
                     {"j", graph.edges[e].frame_j},
                     {"weight", graph.edges[e].mean_confidence},
                     {"in_tree", static_cast<bool>(in_tree[e])}});
  }
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

}  // namespace vdtk

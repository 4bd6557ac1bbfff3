#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vom/face/hog.hpp"

namespace vom::face {

struct CellLoc {
  int x = 0, y = 0;
  bool operator==(const CellLoc&) const = default;
};

// Quadratic spring between a child part and its parent, evaluated on the
// displacement (child - parent) in cells.
struct Spring {
  double coef_xx = 0, coef_x = 0, coef_yy = 0, coef_y = 0;

  double score(int dx, int dy) const {
    return coef_xx * dx * dx + coef_x * dx + coef_yy * dy * dy + coef_y * dy;
  }
};

struct Edge {
  int child = 0, parent = 0;
  Spring spring;
};

// One viewpoint mixture: the parts it uses (subset of the shared pool),
// its tree, bias, and viewpoint angle.
struct Mixture {
  std::vector<int> parts;     // ids into the shared pool
  std::vector<Edge> edges;    // tree over positions within `parts`
  double bias = 0;
  double viewpoint_deg = 0;
};

struct PartModel {
  int pool_size = 0;                       // shared part pool B
  int template_groups = 0;                 // M'
  std::vector<int> template_map;           // f(m), one entry per mixture
  // templates[group * pool_size + part], each kHogDims long
  std::vector<std::array<double, kHogDims>> templates;
  std::vector<Mixture> mixtures;

  const std::array<double, kHogDims>& tpl(int mixture, int part) const {
    int g = template_map[static_cast<std::size_t>(mixture)];
    return templates[static_cast<std::size_t>(g) * pool_size + part];
  }

  void validate() const {
    if (static_cast<int>(template_map.size()) != static_cast<int>(mixtures.size()))
      throw std::invalid_argument("part model: template map must cover every mixture");
    for (int g : template_map)
      if (g < 0 || g >= template_groups)
        throw std::invalid_argument("part model: template map entry out of range");
    for (const auto& m : mixtures) {
      if (m.parts.empty()) throw std::invalid_argument("part model: empty mixture");
      if (m.edges.size() != m.parts.size() - 1)
        throw std::invalid_argument("part model: mixture tree must have #parts-1 edges");
    }
  }
};

struct FaceDetection {
  std::vector<CellLoc> locations;  // per part of the winning mixture
  int mixture = 0;
  double score = -std::numeric_limits<double>::infinity();
  std::vector<double> mixture_scores;  // best score per mixture
  double center_x = 0, center_y = 0;   // pixels
  double area = 0;                     // pixels^2
  double pose_angle = 0;               // degrees
};

// Appearance + shape + bias for one fixed configuration (Eqs. 6-8 scoring
// order: templates dotted with local features, springs over the tree).
inline double score_config(const PartModel& model, const HogGrid& grid,
                           const std::vector<CellLoc>& locations, int mixture) {
  const Mixture& mix = model.mixtures[static_cast<std::size_t>(mixture)];
  if (locations.size() != mix.parts.size())
    throw std::invalid_argument("score_config: one location per mixture part required");
  double app = 0;
  for (std::size_t i = 0; i < mix.parts.size(); ++i) {
    const CellLoc& l = locations[i];
    if (!grid.in_bounds(l.x, l.y))
      throw std::invalid_argument("score_config: location outside the feature grid");
    const auto& w = model.tpl(mixture, mix.parts[i]);
    const double* phi = grid.cell(l.x, l.y);
    for (int d = 0; d < kHogDims; ++d) app += w[static_cast<std::size_t>(d)] * phi[d];
  }
  double shape = 0;
  for (const auto& e : mix.edges) {
    const CellLoc& c = locations[static_cast<std::size_t>(e.child)];
    const CellLoc& p = locations[static_cast<std::size_t>(e.parent)];
    shape += e.spring.score(c.x - p.x, c.y - p.y);
  }
  return app + shape + mix.bias;
}

namespace detail {

// children[i] lists edge indices whose parent position is i; root = 0.
inline std::vector<std::vector<int>> children_of(const Mixture& mix) {
  std::vector<std::vector<int>> ch(mix.parts.size());
  for (std::size_t e = 0; e < mix.edges.size(); ++e)
    ch[static_cast<std::size_t>(mix.edges[e].parent)].push_back(static_cast<int>(e));
  return ch;
}

struct DpTables {
  // per part: score surface and, per edge, argmax child cell
  std::vector<std::vector<double>> unary;  // part -> grid scores
  std::vector<std::vector<int>> best_child;  // edge -> parent cell -> child cell index
};

}  // namespace detail

// Max-sum over each mixture's tree by leaf-to-root message passing,
// globally optimal for the given grid.
inline FaceDetection detect_best(const PartModel& model, const HogGrid& grid) {
  if (grid.cells_x < 1 || grid.cells_y < 1)
    throw std::invalid_argument("detect_best: image too small for the feature grid");
  model.validate();
  const int n_cells = grid.cells_x * grid.cells_y;

  FaceDetection det;
  det.mixture_scores.assign(model.mixtures.size(),
                            -std::numeric_limits<double>::infinity());

  for (std::size_t m = 0; m < model.mixtures.size(); ++m) {
    const Mixture& mix = model.mixtures[m];
    const std::size_t n_parts = mix.parts.size();
    auto children = detail::children_of(mix);

    // unary scores
    std::vector<std::vector<double>> unary(n_parts, std::vector<double>(n_cells));
    for (std::size_t i = 0; i < n_parts; ++i) {
      const auto& w = model.tpl(static_cast<int>(m), mix.parts[i]);
      for (int cy = 0; cy < grid.cells_y; ++cy)
        for (int cx = 0; cx < grid.cells_x; ++cx) {
          const double* phi = grid.cell(cx, cy);
          double s = 0;
          for (int d = 0; d < kHogDims; ++d) s += w[static_cast<std::size_t>(d)] * phi[d];
          unary[i][static_cast<std::size_t>(cy) * grid.cells_x + cx] = s;
        }
    }

    // messages in reverse topological order (children before parents);
    // order parts by DFS from the root
    std::vector<int> order;
    std::vector<int> stack{0};
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      order.push_back(p);
      for (int e : children[static_cast<std::size_t>(p)])
        stack.push_back(mix.edges[static_cast<std::size_t>(e)].child);
    }
    std::vector<std::vector<double>> belief = unary;
    std::vector<std::vector<int>> best_child(mix.edges.size(),
                                             std::vector<int>(static_cast<std::size_t>(n_cells)));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int p = *it;
      for (int e : children[static_cast<std::size_t>(p)]) {
        const Edge& edge = mix.edges[static_cast<std::size_t>(e)];
        const auto& child_belief = belief[static_cast<std::size_t>(edge.child)];
        auto& parent_belief = belief[static_cast<std::size_t>(p)];
        for (int py = 0; py < grid.cells_y; ++py)
          for (int px = 0; px < grid.cells_x; ++px) {
            double best = -std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int cy = 0; cy < grid.cells_y; ++cy)
              for (int cx = 0; cx < grid.cells_x; ++cx) {
                int ci = cy * grid.cells_x + cx;
                double v = child_belief[static_cast<std::size_t>(ci)] +
                           edge.spring.score(cx - px, cy - py);
                if (v > best) best = v, arg = ci;
              }
            int pi = py * grid.cells_x + px;
            parent_belief[static_cast<std::size_t>(pi)] += best;
            best_child[static_cast<std::size_t>(e)][static_cast<std::size_t>(pi)] = arg;
          }
      }
    }

    // root argmax
    double best = -std::numeric_limits<double>::infinity();
    int root_cell = 0;
    for (int ci = 0; ci < n_cells; ++ci)
      if (belief[0][static_cast<std::size_t>(ci)] > best) {
        best = belief[0][static_cast<std::size_t>(ci)];
        root_cell = ci;
      }
    best += mix.bias;
    det.mixture_scores[m] = best;
    if (best <= det.score) continue;

    det.score = best;
    det.mixture = static_cast<int>(m);
    std::vector<int> cell_of(n_parts, 0);
    cell_of[0] = root_cell;
    for (int p : order)
      for (int e : children[static_cast<std::size_t>(p)]) {
        const Edge& edge = mix.edges[static_cast<std::size_t>(e)];
        cell_of[static_cast<std::size_t>(edge.child)] =
            best_child[static_cast<std::size_t>(e)]
                      [static_cast<std::size_t>(cell_of[static_cast<std::size_t>(p)])];
      }
    det.locations.resize(n_parts);
    for (std::size_t i = 0; i < n_parts; ++i)
      det.locations[i] = {cell_of[i] % grid.cells_x, cell_of[i] / grid.cells_x};
  }

  // center of mass, area, coarse pose from the winning mixture
  double sx = 0, sy = 0;
  int min_x = 1 << 20, max_x = -1, min_y = 1 << 20, max_y = -1;
  for (const auto& l : det.locations) {
    sx += l.x * kCellSize + kCellSize / 2.0;
    sy += l.y * kCellSize + kCellSize / 2.0;
    min_x = std::min(min_x, l.x), max_x = std::max(max_x, l.x);
    min_y = std::min(min_y, l.y), max_y = std::max(max_y, l.y);
  }
  det.center_x = sx / static_cast<double>(det.locations.size());
  det.center_y = sy / static_cast<double>(det.locations.size());
  det.area = static_cast<double>((max_x - min_x + 1) * kCellSize) *
             static_cast<double>((max_y - min_y + 1) * kCellSize);
  det.pose_angle = model.mixtures[static_cast<std::size_t>(det.mixture)].viewpoint_deg;
  return det;
}

// Viewpoint of the winning mixture refined by a parabola over the scores of
// the winner and its nearest viewpoint neighbors; clamped to [-90, 90].
inline double pose_angle(const FaceDetection& det, const PartModel& model) {
  std::vector<std::pair<double, double>> by_angle;  // (viewpoint, score)
  for (std::size_t m = 0; m < model.mixtures.size(); ++m)
    by_angle.emplace_back(model.mixtures[m].viewpoint_deg, det.mixture_scores[m]);
  std::sort(by_angle.begin(), by_angle.end());
  std::size_t w = 0;
  for (std::size_t i = 0; i < by_angle.size(); ++i)
    if (by_angle[i].first == model.mixtures[static_cast<std::size_t>(det.mixture)].viewpoint_deg)
      w = i;
  if (by_angle.size() < 3 || w == 0 || w + 1 == by_angle.size())
    return std::clamp(by_angle[w].first, -90.0, 90.0);

  auto [x0, y0] = by_angle[w - 1];
  auto [x1, y1] = by_angle[w];
  auto [x2, y2] = by_angle[w + 1];
  double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
  if (std::abs(denom) < 1e-12) return std::clamp(x1, -90.0, 90.0);
  double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
  double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
  if (a >= 0) return std::clamp(x1, -90.0, 90.0);  // not a peak
  double vertex = -b / (2 * a);
  // the vertex only interpolates; never extrapolate past the neighbors
  vertex = std::clamp(vertex, x0, x2);
  return std::clamp(vertex, -90.0, 90.0);
}

// ---------------------------------------------------------------------------
// Versioned binary serialization.

inline constexpr char kPartModelMagic[8] = {'V', 'O', 'M', 'P', '0', '0', '0', '1'};

inline void save_part_model(const PartModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  out.write(kPartModelMagic, 8);
  put(static_cast<std::int32_t>(model.pool_size));
  put(static_cast<std::int32_t>(model.template_groups));
  put(static_cast<std::int32_t>(model.template_map.size()));
  for (int v : model.template_map) put(static_cast<std::int32_t>(v));
  put(static_cast<std::int32_t>(model.templates.size()));
  for (const auto& t : model.templates)
    out.write(reinterpret_cast<const char*>(t.data()), sizeof(double) * t.size());
  put(static_cast<std::int32_t>(model.mixtures.size()));
  for (const auto& m : model.mixtures) {
    put(static_cast<std::int32_t>(m.parts.size()));
    for (int p : m.parts) put(static_cast<std::int32_t>(p));
    put(static_cast<std::int32_t>(m.edges.size()));
    for (const auto& e : m.edges) {
      put(static_cast<std::int32_t>(e.child));
      put(static_cast<std::int32_t>(e.parent));
      put(e.spring);
    }
    put(m.bias);
    put(m.viewpoint_deg);
  }
}

inline PartModel load_part_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kPartModelMagic, 8) != 0)
    throw std::runtime_error("not a part-model file: " + path.string());
  auto get_i = [&] {
    std::int32_t v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  };
  auto get_d = [&] {
    double v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  };
  PartModel model;
  model.pool_size = get_i();
  model.template_groups = get_i();
  model.template_map.resize(static_cast<std::size_t>(get_i()));
  for (auto& v : model.template_map) v = get_i();
  model.templates.resize(static_cast<std::size_t>(get_i()));
  for (auto& t : model.templates)
    in.read(reinterpret_cast<char*>(t.data()), sizeof(double) * t.size());
  model.mixtures.resize(static_cast<std::size_t>(get_i()));
  for (auto& m : model.mixtures) {
    m.parts.resize(static_cast<std::size_t>(get_i()));
    for (auto& p : m.parts) p = get_i();
    m.edges.resize(static_cast<std::size_t>(get_i()));
    for (auto& e : m.edges) {
      e.child = get_i();
      e.parent = get_i();
      in.read(reinterpret_cast<char*>(&e.spring), sizeof(Spring));
    }
    m.bias = get_d();
    m.viewpoint_deg = get_d();
  }
  if (!in) throw std::runtime_error("truncated part-model file: " + path.string());
  return model;
}

}  // namespace vom::face

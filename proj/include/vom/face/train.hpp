#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vom/face/part_model.hpp"

namespace vom::face {

// One annotated training render: grayscale image plus the cell of every
// pool part, grouped under a viewpoint bin.
struct FaceExample {
  ImageF32 image;
  std::vector<CellLoc> part_cells;  // one per pool part
};

struct FaceTrainConfig {
  // edges over pool part indices, shared across mixtures
  std::vector<std::pair<int, int>> tree;  // (child, parent)
  double min_spring_var = 0.35;           // cells^2
};

// Mean-template model: each mixture's template is its bin's mean feature
// minus the all-bin mean; springs encode the per-bin displacement
// statistics. Small and honest, enough for the toy renders it trains on.
inline PartModel train_part_model(const std::vector<std::vector<FaceExample>>& bins,
                                  const std::vector<double>& viewpoints_deg,
                                  const FaceTrainConfig& cfg) {
  if (bins.empty() || bins.size() != viewpoints_deg.size())
    throw std::invalid_argument("train_part_model: one viewpoint per bin required");
  const int pool = static_cast<int>(bins[0][0].part_cells.size());
  const int n_mix = static_cast<int>(bins.size());
  if (static_cast<int>(cfg.tree.size()) != pool - 1)
    throw std::invalid_argument("train_part_model: tree must span the pool");

  PartModel model;
  model.pool_size = pool;
  model.template_groups = n_mix;
  model.templates.assign(static_cast<std::size_t>(n_mix) * pool, {});
  std::vector<std::array<double, kHogDims>> global(static_cast<std::size_t>(pool), std::array<double, kHogDims>{});
  std::vector<int> global_n(static_cast<std::size_t>(pool), 0);

  // per-bin mean features at the annotated cells
  std::vector<std::vector<std::array<double, kHogDims>>> mean(
      static_cast<std::size_t>(n_mix),
      std::vector<std::array<double, kHogDims>>(static_cast<std::size_t>(pool), std::array<double, kHogDims>{}));
  for (int m = 0; m < n_mix; ++m) {
    if (bins[static_cast<std::size_t>(m)].empty())
      throw std::invalid_argument("train_part_model: empty viewpoint bin");
    for (const auto& ex : bins[static_cast<std::size_t>(m)]) {
      auto grid = hog_cells(ex.image);
      for (int i = 0; i < pool; ++i) {
        const CellLoc& l = ex.part_cells[static_cast<std::size_t>(i)];
        if (!grid.in_bounds(l.x, l.y))
          throw std::invalid_argument("train_part_model: annotation outside grid");
        const double* phi = grid.cell(l.x, l.y);
        for (int d = 0; d < kHogDims; ++d) {
          mean[m][i][static_cast<std::size_t>(d)] += phi[d];
          global[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] += phi[d];
        }
        ++global_n[static_cast<std::size_t>(i)];
      }
    }
    double inv = 1.0 / static_cast<double>(bins[static_cast<std::size_t>(m)].size());
    for (int i = 0; i < pool; ++i)
      for (auto& v : mean[m][i]) v *= inv;
  }
  for (int i = 0; i < pool; ++i)
    for (auto& v : global[static_cast<std::size_t>(i)])
      v /= static_cast<double>(global_n[static_cast<std::size_t>(i)]);

  for (int m = 0; m < n_mix; ++m) {
    model.template_map.push_back(m);
    for (int i = 0; i < pool; ++i) {
      auto& w = model.templates[static_cast<std::size_t>(m) * pool + i];
      for (int d = 0; d < kHogDims; ++d)
        w[static_cast<std::size_t>(d)] =
            mean[m][i][static_cast<std::size_t>(d)] -
            global[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
    }

    Mixture mix;
    mix.viewpoint_deg = viewpoints_deg[static_cast<std::size_t>(m)];
    for (int i = 0; i < pool; ++i) mix.parts.push_back(i);
    double bias = 0;
    for (auto [child, parent] : cfg.tree) {
      double sx = 0, sy = 0, sxx = 0, syy = 0;
      int n = 0;
      for (const auto& ex : bins[static_cast<std::size_t>(m)]) {
        double dx = ex.part_cells[static_cast<std::size_t>(child)].x -
                    ex.part_cells[static_cast<std::size_t>(parent)].x;
        double dy = ex.part_cells[static_cast<std::size_t>(child)].y -
                    ex.part_cells[static_cast<std::size_t>(parent)].y;
        sx += dx, sy += dy, sxx += dx * dx, syy += dy * dy;
        ++n;
      }
      double mx = sx / n, my = sy / n;
      double vx = std::max(sxx / n - mx * mx, cfg.min_spring_var);
      double vy = std::max(syy / n - my * my, cfg.min_spring_var);
      double ax = 1.0 / (2.0 * vx), ay = 1.0 / (2.0 * vy);
      Edge e;
      e.child = child;
      e.parent = parent;
      e.spring.coef_xx = -ax;
      e.spring.coef_x = 2.0 * ax * mx;
      e.spring.coef_yy = -ay;
      e.spring.coef_y = 2.0 * ay * my;
      bias -= ax * mx * mx + ay * my * my;
      mix.edges.push_back(e);
    }
    mix.bias = bias;
    model.mixtures.push_back(std::move(mix));
  }
  model.validate();
  return model;
}

}  // namespace vom::face

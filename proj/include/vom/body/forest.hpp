#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "vom/body/depth_feature.hpp"
#include "vom/image.hpp"
#include "vom/util.hpp"

namespace vom::body {

enum BodyLabel : std::uint8_t {
  kBackground = 0,
  kHead,
  kTorso,
  kLeftArm,
  kRightArm,
  kLower,
  kLabelCount,
  kUnassigned = 255,
};

inline bool is_upper_body(std::uint8_t label) {
  return label == kHead || label == kTorso || label == kLeftArm || label == kRightArm;
}

struct BodyMask {
  Image<std::uint8_t> labels;  // BodyLabel or kUnassigned
  ImageF32 probability;        // winning-label probability

  ImageU8 upper_body() const {
    ImageU8 m(labels.width(), labels.height(), 1, 0);
    for (int y = 0; y < labels.height(); ++y)
      for (int x = 0; x < labels.width(); ++x)
        if (is_upper_body(labels.at(x, y))) m.at(x, y) = 1;
    return m;
  }
};

struct ForestParams {
  int tree_count = 4;
  int max_depth = 12;
  int candidate_offsets = 40;   // sampled thetas per node
  int thresholds_per_offset = 8;
  int samples_per_image = 2500;
  double offset_range = 120000; // pixel*mm, ~60 px at 2 m
  int min_samples = 8;
  double min_gain = 1e-4;
  double probability_gate = 0.5;
  std::uint64_t seed = 1;
};

struct LabeledDepthImage {
  const ImageU16* depth = nullptr;
  const ImageU8* labels = nullptr;  // BodyLabel per pixel
};

class DecisionTree {
 public:
  struct Node {
    ProbeOffsets theta;
    double tau = 0;
    std::int32_t left = -1, right = -1;  // -1 marks a leaf
    std::vector<double> dist;            // leaf label distribution
  };

  const std::vector<double>& leaf_distribution(const ImageU16& depth, int x, int y) const {
    int idx = 0;
    while (nodes_[idx].left >= 0) {
      double f = depth_feature(depth, x, y, nodes_[idx].theta);
      idx = f < nodes_[idx].tau ? nodes_[idx].left : nodes_[idx].right;
    }
    return nodes_[idx].dist;
  }

  std::vector<Node>& nodes() { return nodes_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

class Forest {
 public:
  int label_count() const { return label_count_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  std::vector<DecisionTree>& trees() { return trees_; }
  void set_label_count(int n) { label_count_ = n; }
  double probability_gate() const { return gate_; }
  void set_probability_gate(double g) { gate_ = g; }

  // Averaged leaf distributions across trees.
  std::vector<double> pixel_distribution(const ImageU16& depth, int x, int y) const {
    std::vector<double> acc(static_cast<std::size_t>(label_count_), 0.0);
    for (const auto& t : trees_) {
      const auto& d = t.leaf_distribution(depth, x, y);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i];
    }
    double inv = 1.0 / static_cast<double>(trees_.size());
    for (auto& v : acc) v *= inv;
    return acc;
  }

 private:
  std::vector<DecisionTree> trees_;
  int label_count_ = kLabelCount;
  double gate_ = 0.5;
};

namespace detail {

struct SamplePixel {
  std::uint16_t image;
  std::uint16_t x, y;
  std::uint8_t label;
};

inline double entropy(const std::vector<int>& hist, int total) {
  if (total == 0) return 0;
  double h = 0;
  for (int c : hist) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

struct NodeBuild {
  int node_index;
  int depth;
  std::vector<SamplePixel> samples;
};

}  // namespace detail

// Per-tree bootstrap over stratified pixel samples; split search maximizes
// information gain over sampled (theta, tau) pairs.
inline Forest train_forest(const std::vector<LabeledDepthImage>& images,
                           const ForestParams& params = {}) {
  if (images.empty()) throw std::invalid_argument("train_forest: no images");

  // collect candidate pixels per label
  std::vector<std::vector<detail::SamplePixel>> by_label(kLabelCount);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& img = images[i];
    for (int y = 0; y < img.depth->height(); ++y)
      for (int x = 0; x < img.depth->width(); ++x) {
        if (img.depth->at(x, y) == 0) continue;
        std::uint8_t l = img.labels->at(x, y);
        if (l >= kLabelCount) continue;
        by_label[l].push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(x),
                               static_cast<std::uint16_t>(y), l});
      }
  }
  int present = 0;
  for (const auto& v : by_label) present += v.empty() ? 0 : 1;
  if (present < 2) throw std::invalid_argument("train_forest: need at least 2 labels present");

  Forest forest;
  forest.set_label_count(kLabelCount);
  forest.set_probability_gate(params.probability_gate);
  forest.trees().resize(static_cast<std::size_t>(params.tree_count));

  std::size_t per_label_budget =
      static_cast<std::size_t>(params.samples_per_image) * images.size() / kLabelCount;

  for (int t = 0; t < params.tree_count; ++t) {
    auto rng = make_rng(params.seed, 0xF0 + static_cast<std::uint64_t>(t));
    // stratified bootstrap
    std::vector<detail::SamplePixel> sample;
    for (const auto& pool : by_label) {
      if (pool.empty()) continue;
      std::size_t want = std::min(per_label_budget, pool.size());
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      for (std::size_t k = 0; k < want; ++k) sample.push_back(pool[pick(rng)]);
    }

    auto& tree = forest.trees()[static_cast<std::size_t>(t)];
    tree.nodes().push_back({});
    std::vector<detail::NodeBuild> stack{{0, 0, std::move(sample)}};
    std::uniform_real_distribution<double> uoff(-params.offset_range, params.offset_range);

    while (!stack.empty()) {
      auto work = std::move(stack.back());
      stack.pop_back();
      auto& samples = work.samples;

      std::vector<int> hist(kLabelCount, 0);
      for (const auto& s : samples) ++hist[s.label];
      int total = static_cast<int>(samples.size());
      double node_entropy = detail::entropy(hist, total);

      auto make_leaf = [&] {
        auto& node = tree.nodes()[static_cast<std::size_t>(work.node_index)];
        node.dist.assign(kLabelCount, 0.0);
        for (int c = 0; c < kLabelCount; ++c)
          node.dist[static_cast<std::size_t>(c)] =
              total > 0 ? static_cast<double>(hist[c]) / static_cast<double>(total) : 0.0;
      };
      if (work.depth >= params.max_depth || total < params.min_samples ||
          node_entropy < 1e-12) {
        make_leaf();
        continue;
      }

      // evaluate sampled candidates
      std::vector<double> feat(samples.size());
      double best_gain = 0;
      ProbeOffsets best_theta;
      double best_tau = 0;
      for (int c = 0; c < params.candidate_offsets; ++c) {
        ProbeOffsets theta{uoff(rng), uoff(rng), uoff(rng), uoff(rng)};
        for (std::size_t i = 0; i < samples.size(); ++i)
          feat[i] = depth_feature(*images[samples[i].image].depth, samples[i].x, samples[i].y,
                                  theta);
        auto sorted = feat;
        std::sort(sorted.begin(), sorted.end());
        for (int q = 0; q < params.thresholds_per_offset; ++q) {
          double frac = (q + 1.0) / (params.thresholds_per_offset + 1.0);
          double tau = sorted[static_cast<std::size_t>(frac * (sorted.size() - 1))];
          std::vector<int> lh(kLabelCount, 0), rh(kLabelCount, 0);
          int ln = 0, rn = 0;
          for (std::size_t i = 0; i < samples.size(); ++i) {
            if (feat[i] < tau) ++lh[samples[i].label], ++ln;
            else ++rh[samples[i].label], ++rn;
          }
          if (ln == 0 || rn == 0) continue;
          double gain = node_entropy - (ln * detail::entropy(lh, ln) +
                                        rn * detail::entropy(rh, rn)) / total;
          if (gain > best_gain) {
            best_gain = gain;
            best_theta = theta;
            best_tau = tau;
          }
        }
      }
      if (best_gain < params.min_gain) {
        make_leaf();
        continue;
      }

      std::vector<detail::SamplePixel> left, right;
      for (const auto& s : samples) {
        double f = depth_feature(*images[s.image].depth, s.x, s.y, best_theta);
        (f < best_tau ? left : right).push_back(s);
      }
      auto& node = tree.nodes()[static_cast<std::size_t>(work.node_index)];
      node.theta = best_theta;
      node.tau = best_tau;
      node.left = static_cast<std::int32_t>(tree.nodes().size());
      node.right = node.left + 1;
      tree.nodes().push_back({});
      tree.nodes().push_back({});
      stack.push_back({node.left, work.depth + 1, std::move(left)});
      stack.push_back({node.right, work.depth + 1, std::move(right)});
    }
  }
  return forest;
}

// Eq.-4 style averaging; winner below the gate is left unassigned.
inline BodyMask classify_pixels(const Forest& forest, const ImageU16& depth) {
  BodyMask mask;
  mask.labels = Image<std::uint8_t>(depth.width(), depth.height(), 1, kUnassigned);
  mask.probability = ImageF32(depth.width(), depth.height(), 1, 0.0f);
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x) {
      if (depth.at(x, y) == 0) {
        mask.labels.at(x, y) = kBackground;
        mask.probability.at(x, y) = 1.0f;
        continue;
      }
      auto dist = forest.pixel_distribution(depth, x, y);
      int arg = 0;
      for (int c = 1; c < static_cast<int>(dist.size()); ++c)
        if (dist[static_cast<std::size_t>(c)] > dist[static_cast<std::size_t>(arg)]) arg = c;
      double p = dist[static_cast<std::size_t>(arg)];
      mask.probability.at(x, y) = static_cast<float>(p);
      mask.labels.at(x, y) =
          p >= forest.probability_gate() ? static_cast<std::uint8_t>(arg) : kUnassigned;
    }
  return mask;
}

// ---------------------------------------------------------------------------
// Versioned binary serialization.

inline constexpr char kForestMagic[8] = {'V', 'O', 'M', 'F', '0', '0', '0', '1'};

namespace detail {
template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace detail

inline void save_forest(const Forest& forest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kForestMagic, sizeof(kForestMagic));
  detail::put(out, static_cast<std::int32_t>(forest.label_count()));
  detail::put(out, forest.probability_gate());
  detail::put(out, static_cast<std::int32_t>(forest.trees().size()));
  for (const auto& tree : forest.trees()) {
    detail::put(out, static_cast<std::int32_t>(tree.nodes().size()));
    for (const auto& n : tree.nodes()) {
      detail::put(out, n.theta);
      detail::put(out, n.tau);
      detail::put(out, n.left);
      detail::put(out, n.right);
      detail::put(out, static_cast<std::int32_t>(n.dist.size()));
      for (double v : n.dist) detail::put(out, v);
    }
  }
}

inline Forest load_forest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kForestMagic, 8) != 0)
    throw std::runtime_error("not a forest file (bad magic): " + path.string());
  Forest forest;
  forest.set_label_count(detail::get<std::int32_t>(in));
  forest.set_probability_gate(detail::get<double>(in));
  int n_trees = detail::get<std::int32_t>(in);
  forest.trees().resize(static_cast<std::size_t>(n_trees));
  for (auto& tree : forest.trees()) {
    int n_nodes = detail::get<std::int32_t>(in);
    tree.nodes().resize(static_cast<std::size_t>(n_nodes));
    for (auto& n : tree.nodes()) {
      n.theta = detail::get<ProbeOffsets>(in);
      n.tau = detail::get<double>(in);
      n.left = detail::get<std::int32_t>(in);
      n.right = detail::get<std::int32_t>(in);
      int nd = detail::get<std::int32_t>(in);
      n.dist.resize(static_cast<std::size_t>(nd));
      for (auto& v : n.dist) v = detail::get<double>(in);
    }
  }
  if (!in) throw std::runtime_error("truncated forest file: " + path.string());
  return forest;
}

}  // namespace vom::body

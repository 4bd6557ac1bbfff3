#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vom/audio/mfcc.hpp"
#include "vom/math/gmm.hpp"
#include "vom/math/stats.hpp"

namespace vom::audio {

struct DiarizationConfig {
  double block_s = 2.5;        // GLR analysis block
  double step_s = 0.1;         // GLR evaluation stride
  double min_boundary_gap_s = 1.0;
  double bic_lambda = 1.0;
  // Absolute floor under the mean+std gate; <0 picks d*(d+3), safely above
  // the sampling noise of the ratio for identical blocks.
  double glr_floor = -1.0;
  int gmm_components = 8;
  double gmm_tol = 1e-4;
  std::uint64_t seed = 1;
  double viterbi_stay_prob = 0.98;
  double vad_drop_db = 30.0;   // speech gate relative to the loudest frame
  double vad_floor_db = -65.0;
  double min_region_s = 0.3;   // shorter speech islands are ignored
  // windows overlapping an utterance edge mix on/offset transients into
  // the statistics; drop a few frames at each region edge
  int region_edge_trim = 3;
  double frame_hop_s = 0.010;
};

struct TimeSegment {
  double t_start = 0, t_end = 0;
  int cluster = -1;
  int f_start = 0, f_end = 0;  // feature frame range [f_start, f_end)

  bool operator==(const TimeSegment&) const = default;
};

struct SpeakerTimeline {
  std::vector<TimeSegment> segments;          // sorted, non-overlapping
  std::map<int, math::DiagGmm> cluster_models;  // filled by viterbi_refine
  std::vector<std::string> notices;

  int cluster_count() const {
    std::vector<int> ids;
    for (const auto& s : segments)
      if (std::find(ids.begin(), ids.end(), s.cluster) == ids.end()) ids.push_back(s.cluster);
    return static_cast<int>(ids.size());
  }
};

// ---------------------------------------------------------------------------

inline std::vector<bool> detect_speech(const std::vector<FeatureFrame>& frames,
                                       const DiarizationConfig& cfg = {}) {
  std::vector<bool> speech(frames.size(), false);
  double max_db = -300;
  std::vector<double> db(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    db[i] = 10.0 * std::log10(frames[i].energy + 1e-12);
    max_db = std::max(max_db, db[i]);
  }
  double gate = std::max(max_db - cfg.vad_drop_db, cfg.vad_floor_db);
  for (std::size_t i = 0; i < frames.size(); ++i) speech[i] = db[i] > gate;
  // bridge sub-0.1 s dropouts
  int bridge = std::max(1, static_cast<int>(std::lround(0.1 / cfg.frame_hop_s)));
  for (std::size_t i = 0; i < speech.size(); ++i) {
    if (speech[i]) continue;
    std::size_t j = i;
    while (j < speech.size() && !speech[j]) ++j;
    bool left = i > 0 && speech[i - 1];
    bool right = j < speech.size();
    if (left && right && static_cast<int>(j - i) <= bridge)
      for (std::size_t k = i; k < j; ++k) speech[k] = true;
    i = j;
  }
  return speech;
}

// Contiguous speech runs at least min_region_s long: (first, last+1) frame pairs.
inline std::vector<std::pair<int, int>> speech_regions(const std::vector<bool>& speech,
                                                       const DiarizationConfig& cfg = {}) {
  std::vector<std::pair<int, int>> regions;
  int n = static_cast<int>(speech.size());
  int min_len = std::max(1, static_cast<int>(std::lround(cfg.min_region_s / cfg.frame_hop_s)));
  for (int i = 0; i < n;) {
    if (!speech[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && speech[j]) ++j;
    int a = i + cfg.region_edge_trim, b = j - cfg.region_edge_trim;
    if (b - a >= min_len) regions.emplace_back(a, b);
    i = j;
  }
  return regions;
}

namespace detail {
// Static cepstra only; the short BIC blocks cannot support full-covariance
// statistics over the 39-dim stacked vector.
inline Eigen::MatrixXd static_block(const std::vector<FeatureFrame>& frames,
                                    const std::vector<int>& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), FeatureFrame::kCoeffs);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (int c = 0; c < FeatureFrame::kCoeffs; ++c)
      m(i, c) = frames[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])].mfcc[c];
  return m;
}

inline Eigen::MatrixXd static_range(const std::vector<FeatureFrame>& frames, int f0, int f1) {
  Eigen::MatrixXd m(f1 - f0, FeatureFrame::kCoeffs);
  for (int i = f0; i < f1; ++i)
    for (int c = 0; c < FeatureFrame::kCoeffs; ++c) m(i - f0, c) = frames[i].mfcc[c];
  return m;
}
}  // namespace detail

// Change-point candidates: local maxima of the GLR between adjacent blocks,
// gated at mean + 1 std of the curve, at least min_boundary_gap_s apart.
// Over-segmentation is expected; clustering downstream repairs it.
inline std::vector<double> glr_segment(const std::vector<FeatureFrame>& frames,
                                       const DiarizationConfig& cfg = {}) {
  int block = static_cast<int>(std::lround(cfg.block_s / cfg.frame_hop_s));
  int step = std::max(1, static_cast<int>(std::lround(cfg.step_s / cfg.frame_hop_s)));
  if (static_cast<int>(frames.size()) < 2 * block)
    throw std::invalid_argument("glr_segment: need at least " +
                                std::to_string(2 * cfg.block_s) + " s of features");
  auto speech = detect_speech(frames, cfg);
  auto regions = speech_regions(speech, cfg);

  struct Candidate {
    int frame;
    double score;
  };
  std::vector<Candidate> curve;
  for (auto [r0, r1] : regions) {
    if (r1 - r0 < 2 * block) continue;
    for (int t = r0 + block; t + block <= r1; t += step) {
      double g = math::glr_distance(detail::static_range(frames, t - block, t),
                                    detail::static_range(frames, t, t + block));
      curve.push_back({t, g});
    }
  }
  if (curve.empty()) return {};

  double mean = 0;
  for (const auto& c : curve) mean += c.score;
  mean /= static_cast<double>(curve.size());
  double var = 0;
  for (const auto& c : curve) var += (c.score - mean) * (c.score - mean);
  double floor = cfg.glr_floor;
  if (floor < 0) {
    double d = FeatureFrame::kCoeffs;
    floor = d * (d + 3.0);
  }
  double gate = std::max(mean + std::sqrt(var / static_cast<double>(curve.size())), floor);

  std::vector<Candidate> peaks;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].score < gate) continue;
    bool left_ok = i == 0 || curve[i - 1].frame != curve[i].frame - step ||
                   curve[i - 1].score <= curve[i].score;
    bool right_ok = i + 1 == curve.size() || curve[i + 1].frame != curve[i].frame + step ||
                    curve[i + 1].score < curve[i].score;
    if (left_ok && right_ok) peaks.push_back(curve[i]);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  int min_gap = static_cast<int>(std::lround(cfg.min_boundary_gap_s / cfg.frame_hop_s));
  std::vector<int> accepted;
  for (const auto& p : peaks) {
    bool ok = true;
    for (int a : accepted)
      if (std::abs(a - p.frame) < min_gap) ok = false;
    if (ok) accepted.push_back(p.frame);
  }
  std::sort(accepted.begin(), accepted.end());
  std::vector<double> times;
  for (int f : accepted) times.push_back(f * cfg.frame_hop_s);
  return times;
}

// Speech regions split at the GLR boundaries; clusters unassigned.
inline std::vector<TimeSegment> initial_segments(const std::vector<FeatureFrame>& frames,
                                                 const std::vector<double>& boundaries,
                                                 const DiarizationConfig& cfg = {}) {
  auto speech = detect_speech(frames, cfg);
  auto regions = speech_regions(speech, cfg);
  std::vector<int> cuts;
  for (double t : boundaries) cuts.push_back(static_cast<int>(std::lround(t / cfg.frame_hop_s)));
  std::vector<TimeSegment> segs;
  for (auto [r0, r1] : regions) {
    std::vector<int> pts{r0};
    for (int c : cuts)
      if (c > r0 && c < r1) pts.push_back(c);
    pts.push_back(r1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      TimeSegment s;
      s.f_start = pts[i];
      s.f_end = pts[i + 1];
      s.t_start = s.f_start * cfg.frame_hop_s;
      s.t_end = s.f_end * cfg.frame_hop_s;
      segs.push_back(s);
    }
  }
  return segs;
}

// Agglomerative merging, closest centroids first, until merging the closest
// pair no longer lowers the penalized likelihood (full-covariance BIC with
// lambda * parameter count).
inline SpeakerTimeline bic_cluster(const std::vector<FeatureFrame>& frames,
                                   std::vector<TimeSegment> segments,
                                   const DiarizationConfig& cfg = {}) {
  if (segments.empty()) throw std::invalid_argument("bic_cluster: no segments");

  struct Cluster {
    std::vector<int> segs;   // indices into `segments`
    std::vector<int> rows;   // feature frame indices
    Eigen::VectorXd centroid;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    Cluster c;
    c.segs = {static_cast<int>(i)};
    for (int f = segments[i].f_start; f < segments[i].f_end; ++f) c.rows.push_back(f);
    Eigen::MatrixXd m = detail::static_block(frames, c.rows);
    c.centroid = m.colwise().mean();
    clusters.push_back(std::move(c));
  }

  const double dim = FeatureFrame::kCoeffs;
  const double n_params = dim + dim * (dim + 1) / 2.0;
  while (clusters.size() > 1) {
    // candidate pairs in centroid-distance order; merge the closest one
    // that improves BIC, stop when none does
    struct Pair {
      std::size_t i, j;
      double dist;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j)
        pairs.push_back({i, j, (clusters[i].centroid - clusters[j].centroid).squaredNorm()});
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
    bool merged = false;
    for (const auto& p : pairs) {
      Eigen::MatrixXd a = detail::static_block(frames, clusters[p.i].rows);
      Eigen::MatrixXd b = detail::static_block(frames, clusters[p.j].rows);
      double r = math::glr_distance(a, b);
      double n_total = static_cast<double>(a.rows() + b.rows());
      double delta_bic = r - 0.5 * cfg.bic_lambda * n_params * std::log(n_total);
      if (delta_bic >= 0) continue;
      auto& ci = clusters[p.i];
      auto& cj = clusters[p.j];
      ci.segs.insert(ci.segs.end(), cj.segs.begin(), cj.segs.end());
      ci.rows.insert(ci.rows.end(), cj.rows.begin(), cj.rows.end());
      ci.centroid = detail::static_block(frames, ci.rows).colwise().mean();
      clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(p.j));
      merged = true;
      break;
    }
    if (!merged) break;
  }

  // Stable cluster ids in order of first segment appearance.
  std::vector<int> seg_cluster(segments.size(), -1);
  for (std::size_t k = 0; k < clusters.size(); ++k)
    for (int s : clusters[k].segs) seg_cluster[static_cast<std::size_t>(s)] = static_cast<int>(k);
  std::map<int, int> remap;
  int next_id = 0;
  SpeakerTimeline tl;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    int raw = seg_cluster[i];
    if (!remap.count(raw)) remap[raw] = next_id++;
    segments[i].cluster = remap[raw];
    tl.segments.push_back(segments[i]);
  }
  return tl;
}

// Frame-level relabeling with per-cluster GMMs and a sticky transition;
// decoding restarts at every silence gap. Mergeable with the fixed-point
// property: a timeline whose labels already maximize the path likelihood
// comes back unchanged.
inline SpeakerTimeline viterbi_refine(const SpeakerTimeline& timeline,
                                      const std::vector<FeatureFrame>& frames,
                                      const DiarizationConfig& cfg = {}) {
  SpeakerTimeline out;
  out.notices = timeline.notices;
  std::map<int, std::vector<int>> cluster_rows;
  for (const auto& s : timeline.segments)
    for (int f = s.f_start; f < s.f_end; ++f) cluster_rows[s.cluster].push_back(f);

  int min_frames = std::max(2 * cfg.gmm_components, 25);
  std::vector<int> ids;
  for (auto& [id, rows] : cluster_rows) {
    if (static_cast<int>(rows.size()) < min_frames) {
      out.notices.push_back("cluster " + std::to_string(id) + " dropped: " +
                            std::to_string(rows.size()) + " frames is too few for its GMM");
      continue;
    }
    std::vector<std::vector<double>> data;
    data.reserve(rows.size());
    for (int f : rows) data.push_back(frames[static_cast<std::size_t>(f)].stacked());
    out.cluster_models.emplace(
        id, math::DiagGmm::fit(data, cfg.gmm_components, cfg.seed + static_cast<std::uint64_t>(id),
                               cfg.gmm_tol));
    ids.push_back(id);
  }
  if (ids.empty()) throw std::runtime_error("viterbi_refine: no cluster has enough frames");

  // group input segments into contiguous speech spans
  std::vector<std::pair<int, int>> spans;
  for (const auto& s : timeline.segments) {
    if (!spans.empty() && spans.back().second == s.f_start) spans.back().second = s.f_end;
    else spans.emplace_back(s.f_start, s.f_end);
  }

  int k = static_cast<int>(ids.size());
  double log_stay = std::log(cfg.viterbi_stay_prob);
  double log_switch = k > 1 ? std::log((1.0 - cfg.viterbi_stay_prob) / (k - 1)) : 0.0;

  std::vector<int> labels;  // per speech frame, aligned with span walk
  for (auto [f0, f1] : spans) {
    int n = f1 - f0;
    std::vector<std::vector<double>> dp(n, std::vector<double>(k));
    std::vector<std::vector<int>> back(n, std::vector<int>(k, 0));
    for (int j = 0; j < k; ++j)
      dp[0][j] = out.cluster_models.at(ids[j]).log_pdf(frames[f0].stacked());
    for (int t = 1; t < n; ++t) {
      auto obs = frames[f0 + t].stacked();
      for (int j = 0; j < k; ++j) {
        double best = -std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int p = 0; p < k; ++p) {
          double v = dp[t - 1][p] + (p == j ? log_stay : log_switch);
          if (v > best) best = v, arg = p;
        }
        dp[t][j] = best + out.cluster_models.at(ids[j]).log_pdf(obs);
        back[t][j] = arg;
      }
    }
    int arg = 0;
    for (int j = 1; j < k; ++j)
      if (dp[n - 1][j] > dp[n - 1][arg]) arg = j;
    std::vector<int> path(n);
    for (int t = n - 1; t >= 0; --t) {
      path[t] = ids[arg];
      arg = back[t][arg];
    }
    // emit runs as segments
    for (int t = 0; t < n;) {
      int u = t;
      while (u < n && path[u] == path[t]) ++u;
      TimeSegment s;
      s.f_start = f0 + t;
      s.f_end = f0 + u;
      s.t_start = s.f_start * cfg.frame_hop_s;
      s.t_end = s.f_end * cfg.frame_hop_s;
      s.cluster = path[t];
      out.segments.push_back(s);
      t = u;
    }
  }
  return out;
}

inline SpeakerTimeline diarize(const std::vector<FeatureFrame>& frames,
                               const DiarizationConfig& cfg = {}) {
  auto boundaries = glr_segment(frames, cfg);
  auto segs = initial_segments(frames, boundaries, cfg);
  auto tl = bic_cluster(frames, segs, cfg);
  return viterbi_refine(tl, frames, cfg);
}

// ---------------------------------------------------------------------------

inline void save_rttm(const SpeakerTimeline& tl, const std::string& session_id,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& s : tl.segments)
    out << "SPEAKER " << session_id << " " << format_double(s.t_start) << " "
        << format_double(s.t_end - s.t_start) << " " << s.cluster << "\n";
}

inline SpeakerTimeline load_rttm(const std::filesystem::path& path, double frame_hop_s = 0.010) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  SpeakerTimeline tl;
  std::string line;
  while (std::getline(in, line)) {
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    if (tok.size() != 5 || tok[0] != "SPEAKER")
      throw std::runtime_error("bad timeline line in " + path.string() + ": " + line);
    TimeSegment s;
    s.t_start = parse_double(tok[2]);
    s.t_end = s.t_start + parse_double(tok[3]);
    s.cluster = static_cast<int>(parse_long(tok[4]));
    s.f_start = static_cast<int>(std::lround(s.t_start / frame_hop_s));
    s.f_end = static_cast<int>(std::lround(s.t_end / frame_hop_s));
    tl.segments.push_back(s);
  }
  return tl;
}

}  // namespace vom::audio

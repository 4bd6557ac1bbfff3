#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "vom/indicators/vector.hpp"
#include "vom/util.hpp"

namespace vom::synth {

namespace detail {

// Noise fill for every descriptor except the planted one: plausible ranges
// per feature family, no missing entries.
inline ind::BehaviorVector noise_vector(std::mt19937_64& rng) {
  ind::BehaviorVector v;
  std::uniform_real_distribution<double> pct(0, 100), agit(0, 60), dist_mm(20, 84);
  std::uniform_int_distribution<int> twoval(1, 2), threeval(1, 3), fiveval(1, 5);
  auto pick_pct = [&] { return pct(rng); };
  v[ind::feat::role] = twoval(rng);
  v[ind::feat::looks_other] = pick_pct();
  v[ind::feat::other_looks] = pick_pct();
  v[ind::feat::looks_mediator] = pick_pct();
  v[ind::feat::mediator_looks] = pick_pct();
  v[ind::feat::posture] = threeval(rng);
  v[ind::feat::gender_mediator] = twoval(rng);
  v[ind::feat::gender_party] = twoval(rng);
  v[ind::feat::gender_other] = twoval(rng);
  v[ind::feat::age_mediator] = threeval(rng);
  v[ind::feat::age_party] = threeval(rng);
  v[ind::feat::age_other] = threeval(rng);
  v[ind::feat::session_type] = twoval(rng);
  for (int j : {ind::feat::body_agitation, ind::feat::body_agitation_at_other,
                ind::feat::body_agitation_at_mediator, ind::feat::hand_agitation,
                ind::feat::hand_agitation_at_other, ind::feat::hand_agitation_at_mediator,
                ind::feat::mediator_hand_agitation_at_party,
                ind::feat::other_hand_agitation_at_party})
    v[j] = agit(rng);
  v[ind::feat::hands_together] = pick_pct();
  v[ind::feat::hands_touch_face] = dist_mm(rng);
  v[ind::feat::hands_under_table] = pick_pct();
  v[ind::feat::speak_time_mediator] = pick_pct();
  v[ind::feat::speak_time_party] = pick_pct();
  v[ind::feat::speak_time_other] = pick_pct();
  v[ind::feat::turns_mediator] = pick_pct();
  v[ind::feat::turns_party] = pick_pct();
  v[ind::feat::turns_other] = pick_pct();
  v[ind::feat::mediator_interrupts_party] = pick_pct();
  v[ind::feat::party_interrupts_mediator] = pick_pct();
  v[ind::feat::party_interrupts_other] = pick_pct();
  v[ind::feat::other_interrupts_party] = pick_pct();
  v[ind::feat::nervous_begin] = fiveval(rng);
  v[ind::feat::nervous_end] = fiveval(rng);
  return v;
}

}  // namespace detail

// Columns that respond to the planted engagement level. The primary
// carrier is hands agitation; the rest echo it more weakly, the way a
// behavioral state shows up across several indicators at once.
struct SignalColumn {
  int feature;
  double calm, agitated;  // column value at the two ends of the behavior
  double sigma;
};

inline const std::vector<SignalColumn>& planted_signal_profile() {
  // the carrier separates almost perfectly; the echoes overlap enough
  // that no single one can stand in for it
  static const std::vector<SignalColumn> profile{
      {ind::feat::hand_agitation, 15.0, 85.0, 3.0},
      {ind::feat::body_agitation, 6.0, 26.0, 9.0},
      {ind::feat::hand_agitation_at_mediator, 18.0, 70.0, 26.0},
      {ind::feat::looks_mediator, 70.0, 30.0, 20.0},
      {ind::feat::hands_together, 55.0, 20.0, 18.0},
      {ind::feat::turns_party, 45.0, 25.0, 11.0},
      {ind::feat::speak_time_party, 50.0, 28.0, 12.0},
      {ind::feat::party_interrupts_mediator, 8.0, 38.0, 16.0},
  };
  return profile;
}

// Classification corpus shaped like the study data (28 party-samples,
// 22 individual + 3x2 joint). Engagement level drives the signal columns
// and all three responses; labels avoid degree 3 so both grouping cases
// agree on the planted split.
inline std::vector<ind::LabeledSample> make_planted_corpus(std::uint64_t seed, int n = 28) {
  auto rng = make_rng(seed, 0xC0);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> low_label(1, 2), high_label(4, 5);
  std::vector<ind::LabeledSample> out;
  for (int i = 0; i < n; ++i) {
    ind::LabeledSample s;
    s.session_id = "planted" + std::to_string(i / 2 * 2);
    s.party_id = "p" + std::to_string(i % 2 + 1);
    s.features = detail::noise_vector(rng);
    bool calm = i % 2 == 0;
    for (const auto& col : planted_signal_profile())
      s.features[col.feature] = (calm ? col.calm : col.agitated) + col.sigma * unit(rng);
    // calm, mediator-focused parties score high on every response
    s.receptivity = calm ? high_label(rng) : low_label(rng);
    s.agreement = calm ? high_label(rng) : low_label(rng);
    s.satisfaction = calm ? high_label(rng) : low_label(rng);
    bool joint = i >= n - 6;
    s.features[ind::feat::session_type] = joint ? 2 : 1;
    out.push_back(std::move(s));
  }
  return out;
}

// Regression corpus: the responses are a five-step staircase, linear in
// the engagement level that drives the same signal columns.
inline std::vector<ind::LabeledSample> make_planted_linear_corpus(std::uint64_t seed,
                                                                  int n = 28) {
  auto rng = make_rng(seed, 0xC1);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<ind::LabeledSample> out;
  for (int i = 0; i < n; ++i) {
    ind::LabeledSample s;
    s.session_id = "linear" + std::to_string(i);
    s.party_id = "p1";
    s.features = detail::noise_vector(rng);
    int level = i % 5;  // 0..4, response = level + 1, calmer is better
    double t = level / 4.0;
    for (const auto& col : planted_signal_profile())
      s.features[col.feature] =
          col.agitated + t * (col.calm - col.agitated) + 0.4 * col.sigma * unit(rng);
    s.receptivity = level + 1;
    s.agreement = level + 1;
    s.satisfaction = level + 1;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace vom::synth

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vom/indicators/vector.hpp"
#include "vom/learn/adaboost.hpp"
#include "vom/learn/binarize.hpp"
#include "vom/learn/lda.hpp"
#include "vom/learn/net.hpp"
#include "vom/learn/pnn.hpp"
#include "vom/learn/preprocess.hpp"
#include "vom/learn/svm.hpp"

namespace vom::learn {

enum class ClassifierKind { adaboost, lda, svm_rbf, pnn, ff_net, cf_net };

inline const char* classifier_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::adaboost: return "adaboost";
    case ClassifierKind::lda: return "lda";
    case ClassifierKind::svm_rbf: return "svm";
    case ClassifierKind::pnn: return "pnn";
    case ClassifierKind::ff_net: return "ff";
    case ClassifierKind::cf_net: return "cf";
  }
  return "?";
}

inline ClassifierKind classifier_from(const std::string& s) {
  if (s == "adaboost") return ClassifierKind::adaboost;
  if (s == "lda") return ClassifierKind::lda;
  if (s == "svm") return ClassifierKind::svm_rbf;
  if (s == "pnn") return ClassifierKind::pnn;
  if (s == "ff") return ClassifierKind::ff_net;
  if (s == "cf") return ClassifierKind::cf_net;
  throw std::invalid_argument("unknown classifier '" + s + "'");
}

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::adaboost;
  int stumps = 50;
  double pnn_spread = 0.1;
  int hidden_neurons = 10;
  int net_iters = 60;
  std::vector<double> svm_costs{0.1, 1.0, 10.0, 100.0};
  std::vector<double> svm_gammas{1e-3, 1e-2, 1e-1, 1.0};
  std::vector<double> svr_epsilons{0.1, 0.2, 0.5};
  std::uint64_t seed = 1;
};

enum class LabelKind { receptivity, agreement, satisfaction };

inline const char* label_name(LabelKind k) {
  switch (k) {
    case LabelKind::receptivity: return "receptivity";
    case LabelKind::agreement: return "agreement";
    case LabelKind::satisfaction: return "satisfaction";
  }
  return "?";
}

inline int label_of(const ind::LabeledSample& s, LabelKind k) {
  switch (k) {
    case LabelKind::receptivity: return s.receptivity;
    case LabelKind::agreement: return s.agreement;
    case LabelKind::satisfaction: return s.satisfaction;
  }
  return 0;
}

// Feature matrix in the fixed f1..f36 order; the nervousness pair can be
// withheld. NaN entries survive until per-fold imputation.
inline Matrix feature_matrix(const std::vector<ind::LabeledSample>& samples,
                             bool drop_nervousness) {
  Matrix x;
  for (const auto& s : samples) {
    std::vector<double> row;
    for (int j = 0; j < ind::kFeatureCount; ++j) {
      if (drop_nervousness && (j == ind::feat::nervous_begin || j == ind::feat::nervous_end))
        continue;
      row.push_back(s.features[j]);
    }
    x.push_back(std::move(row));
  }
  return x;
}

namespace detail {

struct Prepared {
  Matrix train;
  std::vector<double> test;  // single test row (imputed/standardized alike)
};

inline Prepared prepare(const Matrix& train_raw, const std::vector<double>& test_raw,
                        bool standardize) {
  Imputer imp;
  imp.fit(train_raw);
  Prepared p;
  p.train = imp.apply(train_raw);
  p.test = imp.apply(test_raw);
  if (standardize) {
    Standardizer st;
    st.fit(p.train);
    p.train = st.apply(p.train);
    p.test = st.apply(p.test);
  }
  return p;
}

inline int training_errors(const auto& model, const Matrix& x, const std::vector<int>& y) {
  int errs = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (model.predict(x[i]) != y[i]) ++errs;
  return errs;
}

// (cost, gamma) minimizing the held-out decision deviation under an inner
// leave-one-out sweep of the training block; smaller parameters win ties.
// Degenerate inner folds fall back to the fit deviation.
inline std::pair<double, double> tune_svm(const ClassifierSpec& spec, const Matrix& x,
                                          const std::vector<int>& y) {
  double best_cost = spec.svm_costs.front(), best_gamma = spec.svm_gammas.front();
  double best_dev = std::numeric_limits<double>::infinity();
  const std::size_t n = x.size();
  for (double cost : spec.svm_costs)
    for (double gamma : spec.svm_gammas) {
      double dev = 0;
      int counted = 0;
      for (std::size_t hold = 0; hold < n; ++hold) {
        Matrix tx;
        std::vector<int> ty;
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == hold) continue;
          tx.push_back(x[i]);
          ty.push_back(y[i]);
          (y[i] > 0 ? pos : neg) = true;
        }
        if (!pos || !neg) continue;
        SvmRbf svm;
        svm.fit(tx, ty, cost, gamma, spec.seed);
        dev += std::abs(svm.decision(x[hold]) - y[hold]);
        ++counted;
      }
      if (counted == 0) {
        SvmRbf svm;
        svm.fit(x, y, cost, gamma, spec.seed);
        for (std::size_t i = 0; i < n; ++i) dev += std::abs(svm.decision(x[i]) - y[i]);
        counted = static_cast<int>(n);
      }
      dev /= counted;
      if (dev < best_dev - 1e-12) {
        best_dev = dev;
        best_cost = cost;
        best_gamma = gamma;
      }
    }
  return {best_cost, best_gamma};
}

}  // namespace detail

// Fits the requested classifier on the training block and labels the test
// row. Deterministic given the spec's seed. Throws when the training block
// holds a single class.
inline int train_predict(const ClassifierSpec& spec, const Matrix& train_x,
                         const std::vector<int>& train_y, const std::vector<double>& test_x) {
  bool has_pos = false, has_neg = false;
  for (int v : train_y) (v > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw std::invalid_argument("train_predict: training block is single-class");

  switch (spec.kind) {
    case ClassifierKind::adaboost: {
      auto p = detail::prepare(train_x, test_x, /*standardize=*/false);
      AdaBoost model;
      model.fit(p.train, train_y, spec.stumps);
      return model.predict(p.test);
    }
    case ClassifierKind::lda: {
      auto p = detail::prepare(train_x, test_x, true);
      Lda model;
      model.fit(p.train, train_y);
      return model.predict(p.test);
    }
    case ClassifierKind::svm_rbf: {
      auto p = detail::prepare(train_x, test_x, true);
      auto [cost, gamma] = detail::tune_svm(spec, p.train, train_y);
      SvmRbf model;
      model.fit(p.train, train_y, cost, gamma, spec.seed);
      return model.predict(p.test);
    }
    case ClassifierKind::pnn: {
      auto p = detail::prepare(train_x, test_x, true);
      Pnn model;
      model.fit(p.train, train_y, spec.pnn_spread);
      return model.predict(p.test);
    }
    case ClassifierKind::ff_net:
    case ClassifierKind::cf_net: {
      auto p = detail::prepare(train_x, test_x, true);
      FeedForwardNet model(spec.hidden_neurons, spec.kind == ClassifierKind::cf_net);
      model.fit(p.train, train_y, spec.seed, spec.net_iters);
      return model.predict(p.test);
    }
  }
  throw std::logic_error("train_predict: unhandled classifier");
}

struct EvalResult {
  double accuracy_pct = 0;
  int correct = 0;
  int evaluated = 0;
  int skipped_folds = 0;
  std::vector<int> predictions;  // per sample, 0 when the fold was skipped
  std::vector<int> truth;
};

// Leave-one-out over the samples: n folds, each with per-fold imputation,
// scaling, and (for the SVM) hyperparameter tuning on the training side
// only.
inline EvalResult loo_evaluate(const ClassifierSpec& spec,
                               const std::vector<ind::LabeledSample>& samples, LabelKind label,
                               GroupingCase grouping, bool drop_nervousness) {
  if (samples.size() < 2) throw std::invalid_argument("loo_evaluate: need at least 2 samples");
  Matrix x = feature_matrix(samples, drop_nervousness);
  std::vector<int> y;
  for (const auto& s : samples) y.push_back(binarize(label_of(s, label), grouping));

  EvalResult r;
  r.predictions.assign(samples.size(), 0);
  r.truth = y;
  for (std::size_t hold = 0; hold < samples.size(); ++hold) {
    Matrix train_x;
    std::vector<int> train_y;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i == hold) continue;
      train_x.push_back(x[i]);
      train_y.push_back(y[i]);
    }
    ClassifierSpec fold_spec = spec;
    fold_spec.seed = mix_seed(spec.seed, hold);
    try {
      int pred = train_predict(fold_spec, train_x, train_y, x[hold]);
      r.predictions[hold] = pred;
      ++r.evaluated;
      if (pred == y[hold]) ++r.correct;
    } catch (const std::invalid_argument&) {
      ++r.skipped_folds;
    }
  }
  r.accuracy_pct = r.evaluated > 0 ? 100.0 * r.correct / r.evaluated : 0.0;
  return r;
}

struct SvrResult {
  double mean_deviation = 0;  // [1,5] scale
  std::vector<double> predictions;
  double cost = 0, gamma = 0, epsilon = 0;  // last fold's tuned parameters
};

// Leave-one-out epsilon-regression; per-fold tuning minimizes the training
// deviation, predictions are clamped to the label range.
inline SvrResult svr_evaluate(const ClassifierSpec& spec,
                              const std::vector<ind::LabeledSample>& samples, LabelKind label,
                              bool drop_nervousness) {
  if (samples.size() < 3) throw std::invalid_argument("svr_evaluate: need at least 3 samples");
  Matrix x = feature_matrix(samples, drop_nervousness);
  std::vector<double> y;
  for (const auto& s : samples) y.push_back(label_of(s, label));

  SvrResult r;
  r.predictions.assign(samples.size(), 0.0);
  double total_dev = 0;
  for (std::size_t hold = 0; hold < samples.size(); ++hold) {
    Matrix train_raw;
    std::vector<double> train_y;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i == hold) continue;
      train_raw.push_back(x[i]);
      train_y.push_back(y[i]);
    }
    auto p = detail::prepare(train_raw, x[hold], true);

    // inner leave-one-out deviation on the training block only
    double best_mad = std::numeric_limits<double>::infinity();
    double best_cost = spec.svm_costs.front(), best_gamma = spec.svm_gammas.front();
    double best_eps = spec.svr_epsilons.front();
    const std::size_t m = p.train.size();
    for (double cost : spec.svm_costs)
      for (double gamma : spec.svm_gammas)
        for (double eps : spec.svr_epsilons) {
          double mad = 0;
          for (std::size_t inner = 0; inner < m; ++inner) {
            Matrix ix;
            std::vector<double> iy;
            for (std::size_t i = 0; i < m; ++i) {
              if (i == inner) continue;
              ix.push_back(p.train[i]);
              iy.push_back(train_y[i]);
            }
            SvrRbf model;
            model.fit(ix, iy, cost, gamma, eps);
            mad += std::abs(std::clamp(model.predict(p.train[inner]), 1.0, 5.0) -
                            train_y[inner]);
          }
          mad /= static_cast<double>(m);
          if (mad < best_mad - 1e-12) {
            best_mad = mad;
            best_cost = cost;
            best_gamma = gamma;
            best_eps = eps;
          }
        }
    SvrRbf best_model;
    best_model.fit(p.train, train_y, best_cost, best_gamma, best_eps);
    r.cost = best_cost;
    r.gamma = best_gamma;
    r.epsilon = best_eps;
    double pred = std::clamp(best_model.predict(p.test), 1.0, 5.0);
    r.predictions[hold] = pred;
    total_dev += std::abs(pred - y[hold]);
  }
  r.mean_deviation = total_dev / static_cast<double>(samples.size());
  return r;
}

// Relative feature weights in [0,1] (max-normalized); boosting credits the
// stump alphas, the SVM uses decision-value variance under per-feature
// perturbation.
inline std::vector<double> feature_weights(const ClassifierSpec& spec,
                                           const std::vector<ind::LabeledSample>& samples,
                                           LabelKind label, GroupingCase grouping,
                                           bool drop_nervousness) {
  if (spec.kind != ClassifierKind::adaboost && spec.kind != ClassifierKind::svm_rbf)
    throw std::invalid_argument("feature_weights: defined for adaboost and svm only");
  Matrix x_raw = feature_matrix(samples, drop_nervousness);
  std::vector<int> y;
  for (const auto& s : samples) y.push_back(binarize(label_of(s, label), grouping));
  bool has_pos = false, has_neg = false;
  for (int v : y) (v > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw std::invalid_argument("feature_weights: single-class label column");

  std::size_t d = x_raw[0].size();
  std::vector<double> w(d, 0.0);
  if (spec.kind == ClassifierKind::adaboost) {
    Imputer imp;
    imp.fit(x_raw);
    Matrix x = imp.apply(x_raw);
    AdaBoost model;
    model.fit(x, y, spec.stumps);
    w = model.feature_alpha_sums(d);
  } else {
    Imputer imp;
    imp.fit(x_raw);
    Matrix x = imp.apply(x_raw);
    Standardizer st;
    st.fit(x);
    x = st.apply(x);
    auto [cost, gamma] = detail::tune_svm(spec, x, y);
    SvmRbf model;
    model.fit(x, y, cost, gamma, spec.seed);
    const double deltas[] = {-0.5, -0.25, 0.25, 0.5};
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0;
      for (const auto& xi : x) {
        double vals[5];
        vals[0] = model.decision(xi);
        auto probe = xi;
        for (int k = 0; k < 4; ++k) {
          probe[j] = xi[j] + deltas[k];
          vals[k + 1] = model.decision(probe);
        }
        double mean = 0;
        for (double v : vals) mean += v;
        mean /= 5.0;
        double var = 0;
        for (double v : vals) var += (v - mean) * (v - mean);
        acc += var / 5.0;
      }
      w[j] = acc / static_cast<double>(x.size());
    }
  }
  double top = *std::max_element(w.begin(), w.end());
  if (top > 0)
    for (auto& v : w) v /= top;
  return w;
}

}  // namespace vom::learn

#include "airfer/fusion.hpp"

#include <cmath>
#include <stdexcept>

#include "airfer/kernels.hpp"

namespace airfer::fusion {

int argmax_lowest(const std::vector<double>& v, double tol) {
  if (v.empty()) throw std::invalid_argument("argmax of empty vector");
  double best = v[0];
  for (double x : v) best = std::max(best, x);
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] >= best - tol) return static_cast<int>(i);
  }
  return 0;  // unreachable
}

BeliefVector normalize_beliefs(const std::vector<double>& raw_scores) {
  if (raw_scores.empty()) {
    throw std::invalid_argument("normalize_beliefs: empty score vector");
  }
  double total = 0.0;
  for (double s : raw_scores) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("normalize_beliefs: scores must be >= 0");
    }
    total += s;
  }
  if (total <= 0.0) {
    throw std::invalid_argument(
        "normalize_beliefs: degenerate all-zero score vector");
  }
  BeliefVector out{raw_scores};
  kern::ops().scale(1.0 / total, out.scores.data(), out.scores.size());
  return out;
}

std::vector<double> fuse_ba(const BeliefVector& r) { return r.scores; }

std::vector<double> fuse_wba(const BeliefVector& r, const ClassWeights& w) {
  if (r.scores.size() != w.weights.size()) {
    throw std::invalid_argument("fuse_wba: dimension mismatch");
  }
  std::vector<double> out(r.scores.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = w.weights[i] * r.scores[i];
  return out;
}

std::vector<double> fuse_mv(const BeliefVector& r) {
  std::vector<double> out(r.scores.size(), 0.0);
  out[argmax_lowest(r.scores, 0.0)] = 1.0;
  return out;
}

std::vector<double> fuse(Method method, const BeliefVector& r,
                         const ClassWeights& w) {
  switch (method) {
    case Method::kBa:
      return fuse_ba(r);
    case Method::kWba:
      return fuse_wba(r, w);
    case Method::kMv:
      return fuse_mv(r);
  }
  throw std::invalid_argument("unknown fusion method");
}

DecisionVector mean_center(const std::vector<double>& f_tilde) {
  for (double v : f_tilde) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("mean_center: non-finite entry");
    }
  }
  const double mean = kern::ops().sum(f_tilde.data(), f_tilde.size()) /
                      static_cast<double>(f_tilde.size());
  DecisionVector out{f_tilde};
  for (double& v : out.payload) v -= mean;
  return out;
}

ClassWeights class_weights(
    const std::vector<std::pair<BeliefVector, int>>& val_predictions, int k) {
  if (val_predictions.empty()) {
    throw std::invalid_argument("class_weights: empty validation set");
  }
  std::vector<double> correct(k, 0.0);
  std::vector<double> count(k, 0.0);
  for (const auto& [belief, label] : val_predictions) {
    if (label < 0 || label >= k) {
      throw std::invalid_argument("class_weights: label out of range");
    }
    count[label] += 1.0;
    if (argmax_lowest(belief.scores, 0.0) == label) correct[label] += 1.0;
  }
  ClassWeights out{std::vector<double>(k, 0.0)};
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    out.weights[c] = count[c] > 0.0 ? correct[c] / count[c] : 0.0;
    total += out.weights[c];
  }
  if (total <= 0.0) {
    // a uniformly wrong validation set would otherwise zero every class
    for (double& w : out.weights) w = 1.0 / static_cast<double>(k);
  } else {
    for (double& w : out.weights) w /= total;
  }
  return out;
}

}  // namespace airfer::fusion

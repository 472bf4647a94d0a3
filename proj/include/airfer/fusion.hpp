#pragma once

#include <vector>

namespace airfer::fusion {

enum class Method { kBa, kWba, kMv };

/// L1-normalized nonnegative per-class scores of one client.
struct BeliefVector {
  std::vector<double> scores;
};

/// L1-normalized per-class validation accuracies of one client.
struct ClassWeights {
  std::vector<double> weights;
};

/// Mean-centered payload a client contributes to the air sum.
struct DecisionVector {
  std::vector<double> payload;
};

/// Lowest-index argmax with an absolute tolerance: entries within tol of the
/// maximum count as tied and the smallest index wins. The tolerance absorbs
/// float jitter from the gamma/h round-trips so documented tie-breaking
/// survives the channel arithmetic.
int argmax_lowest(const std::vector<double>& v, double tol = 1e-9);

BeliefVector normalize_beliefs(const std::vector<double>& raw_scores);

std::vector<double> fuse_ba(const BeliefVector& r);
std::vector<double> fuse_wba(const BeliefVector& r, const ClassWeights& w);
std::vector<double> fuse_mv(const BeliefVector& r);

std::vector<double> fuse(Method method, const BeliefVector& r,
                         const ClassWeights& w);

DecisionVector mean_center(const std::vector<double>& f_tilde);

/// Per-class accuracy on validation pairs (belief, true label), classes never
/// seen get accuracy 0, then L1-normalized; all-zero falls back to uniform.
ClassWeights class_weights(
    const std::vector<std::pair<BeliefVector, int>>& val_predictions, int k);

}  // namespace airfer::fusion

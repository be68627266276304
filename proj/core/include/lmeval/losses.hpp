#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lmeval/types.hpp"

namespace lmeval {

/// Raw score-head activations, one logit per support value, pre-softmax.
struct ScoreHeadLogits {
  std::vector<int> support;
  std::vector<double> logits;
};

/// Throws unless lengths match, entries are finite, and the support is
/// strictly increasing.
void validate_logits(const ScoreHeadLogits& head);

/// Max-subtracted softmax over the score support.
ScoreDistribution softmax_scores(const ScoreHeadLogits& head);

struct ExpectedScoreGrad {
  double value = 0.0;
  std::vector<double> d_logits;  // dE[s]/dz_j = p_j (k_j - E[s])
};

/// Expected score under softmax(logits) with its analytic Jacobian.
ExpectedScoreGrad expected_score_from_logits(const ScoreHeadLogits& head);

/// Per-position probability assigned to the realized token, over both
/// rationale and score positions. Entries must lie in (0, 1].
struct TokenSequenceProbs {
  std::vector<double> probs;
};

void validate_token_probs(const TokenSequenceProbs& probs);

/// Negative log-likelihood of the realized sequence: -sum_t log p_t.
double sft_loss(const TokenSequenceProbs& token_probs);

struct SftGrad {
  double loss = 0.0;
  std::vector<double> d_probs;  // d/dp_t = -1/p_t
};

SftGrad sft_loss_grad(const TokenSequenceProbs& token_probs);

struct ScalarGrad {
  double loss = 0.0;
  double d_y_hat = 0.0;
};

/// Squared error against the gold score, with d(loss)/d(y_hat).
ScalarGrad mse_loss(double y, double y_hat);

/// Which side of a pair the preference label picks.
enum class PrefBranch { first, second, tie };

struct PairGrad {
  double loss = 0.0;
  double d_y_hat_1 = 0.0;
  double d_y_hat_2 = 0.0;
};

/// Preference loss: -log sigmoid(margin) toward the preferred side, or the
/// squared margin for ties. Computed via a stable softplus, safe for large
/// |y_hat_1 - y_hat_2|.
PairGrad pref_loss(double y_hat_1, double y_hat_2, PrefBranch label);

/// Mixing weights for the combined objective. Construction rejects weights
/// that are negative or all zero.
class LossWeights {
 public:
  explicit LossWeights(double alpha = 1.0, double beta = 1.0,
                       double gamma = 1.0, double rationale_multiplier = 5.0);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double rationale_multiplier() const { return rationale_multiplier_; }

  bool operator==(const LossWeights&) const = default;

 private:
  double alpha_;
  double beta_;
  double gamma_;
  double rationale_multiplier_;
};

/// m * (alpha*sft + beta*mse + gamma*pref), where m is the rationale
/// multiplier for rationale samples and 1 otherwise.
double combined_loss(double sft, double mse, double pref, const LossWeights& w,
                     bool is_rationale_sample);

struct CombinedGrad {
  double loss = 0.0;
  double d_sft = 0.0;
  double d_mse = 0.0;
  double d_pref = 0.0;
};

CombinedGrad combined_loss_grad(double sft, double mse, double pref,
                                const LossWeights& w,
                                bool is_rationale_sample);

struct ValueGrad {
  double value = 0.0;
  std::vector<double> grad;
};

using DifferentiableFn = std::function<ValueGrad(std::span<const double>)>;

/// Relative error between the analytic directional derivative and a central
/// finite difference with step h along `direction`.
double grad_check(const DifferentiableFn& fn, std::span<const double> point,
                  std::span<const double> direction, double h);

}  // namespace lmeval

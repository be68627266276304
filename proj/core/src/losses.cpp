#include "lmeval/losses.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lmeval/error.hpp"

namespace lmeval {
namespace {

// log(1 + e^x) without overflow for large |x|.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void validate_logits(const ScoreHeadLogits& head) {
  if (head.support.empty()) throw Error("score head: empty support");
  if (head.logits.size() != head.support.size()) {
    throw Error(fmt::format("score head: {} logits for {} support values",
                            head.logits.size(), head.support.size()));
  }
  for (std::size_t i = 1; i < head.support.size(); ++i) {
    if (head.support[i] <= head.support[i - 1]) {
      throw Error("score head: support must be strictly increasing");
    }
  }
  for (double z : head.logits) {
    if (!std::isfinite(z)) throw Error("score head: non-finite logit");
  }
}

ScoreDistribution softmax_scores(const ScoreHeadLogits& head) {
  validate_logits(head);
  const double zmax = *std::max_element(head.logits.begin(), head.logits.end());
  std::vector<double> probs(head.logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < head.logits.size(); ++i) {
    probs[i] = std::exp(head.logits[i] - zmax);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return ScoreDistribution(head.support, std::move(probs));
}

ExpectedScoreGrad expected_score_from_logits(const ScoreHeadLogits& head) {
  const ScoreDistribution dist = softmax_scores(head);
  double value = 0.0;
  for (std::size_t i = 0; i < dist.support().size(); ++i) {
    value += dist.support()[i] * dist.probs()[i];
  }
  ExpectedScoreGrad out;
  out.value = value;
  out.d_logits.resize(dist.probs().size());
  for (std::size_t j = 0; j < dist.probs().size(); ++j) {
    out.d_logits[j] = dist.probs()[j] * (dist.support()[j] - value);
  }
  return out;
}

void validate_token_probs(const TokenSequenceProbs& probs) {
  for (double p : probs.probs) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw Error(
          fmt::format("token probability {} outside (0, 1]", p));
    }
  }
}

double sft_loss(const TokenSequenceProbs& token_probs) {
  validate_token_probs(token_probs);
  double loss = 0.0;
  for (double p : token_probs.probs) loss -= std::log(p);
  return loss;
}

SftGrad sft_loss_grad(const TokenSequenceProbs& token_probs) {
  SftGrad out;
  out.loss = sft_loss(token_probs);
  out.d_probs.reserve(token_probs.probs.size());
  for (double p : token_probs.probs) out.d_probs.push_back(-1.0 / p);
  return out;
}

ScalarGrad mse_loss(double y, double y_hat) {
  ScalarGrad out;
  out.loss = (y - y_hat) * (y - y_hat);
  out.d_y_hat = 2.0 * (y_hat - y);
  return out;
}

PairGrad pref_loss(double y_hat_1, double y_hat_2, PrefBranch label) {
  const double delta = y_hat_1 - y_hat_2;
  PairGrad out;
  switch (label) {
    case PrefBranch::first: {
      out.loss = softplus(-delta);  // -log sigmoid(delta)
      const double g = -sigmoid(-delta);
      out.d_y_hat_1 = g;
      out.d_y_hat_2 = -g;
      return out;
    }
    case PrefBranch::second: {
      out.loss = softplus(delta);
      const double g = sigmoid(delta);
      out.d_y_hat_1 = g;
      out.d_y_hat_2 = -g;
      return out;
    }
    case PrefBranch::tie: {
      out.loss = delta * delta;
      out.d_y_hat_1 = 2.0 * delta;
      out.d_y_hat_2 = -2.0 * delta;
      return out;
    }
  }
  throw Error("pref_loss: unreachable");
}

LossWeights::LossWeights(double alpha, double beta, double gamma,
                         double rationale_multiplier)
    : alpha_(alpha),
      beta_(beta),
      gamma_(gamma),
      rationale_multiplier_(rationale_multiplier) {
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) {
    throw Error("loss weights must be non-negative");
  }
  if (alpha == 0.0 && beta == 0.0 && gamma == 0.0) {
    throw Error("at least one of alpha, beta, gamma must be positive");
  }
  if (rationale_multiplier < 0.0) {
    throw Error("rationale multiplier must be non-negative");
  }
}

double combined_loss(double sft, double mse, double pref, const LossWeights& w,
                     bool is_rationale_sample) {
  if (sft < 0.0 || mse < 0.0 || pref < 0.0) {
    throw Error("combined_loss: components must be non-negative");
  }
  const double m = is_rationale_sample ? w.rationale_multiplier() : 1.0;
  return m * (w.alpha() * sft + w.beta() * mse + w.gamma() * pref);
}

CombinedGrad combined_loss_grad(double sft, double mse, double pref,
                                const LossWeights& w,
                                bool is_rationale_sample) {
  CombinedGrad out;
  out.loss = combined_loss(sft, mse, pref, w, is_rationale_sample);
  const double m = is_rationale_sample ? w.rationale_multiplier() : 1.0;
  out.d_sft = m * w.alpha();
  out.d_mse = m * w.beta();
  out.d_pref = m * w.gamma();
  return out;
}

double grad_check(const DifferentiableFn& fn, std::span<const double> point,
                  std::span<const double> direction, double h) {
  if (point.size() != direction.size()) {
    throw Error(fmt::format("grad_check: point dim {} vs direction dim {}",
                            point.size(), direction.size()));
  }
  if (!(h > 0.0)) throw Error("grad_check: step must be positive");

  const ValueGrad at = fn(point);
  if (at.grad.size() != point.size()) {
    throw Error(fmt::format("grad_check: gradient dim {} vs point dim {}",
                            at.grad.size(), point.size()));
  }
  double analytic = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    analytic += at.grad[i] * direction[i];
  }

  std::vector<double> plus(point.begin(), point.end());
  std::vector<double> minus(point.begin(), point.end());
  for (std::size_t i = 0; i < point.size(); ++i) {
    plus[i] += h * direction[i];
    minus[i] -= h * direction[i];
  }
  const double fd = (fn(plus).value - fn(minus).value) / (2.0 * h);

  const double denom =
      std::max({std::abs(analytic), std::abs(fd), 1e-6});
  return std::abs(analytic - fd) / denom;
}

}  // namespace lmeval

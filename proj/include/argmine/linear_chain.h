#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace argmine {

// Score tables of a first-order chain over `tags` labels and `length`
// positions. Row-major: emission(i, y), transition(prev, next).
//
// score(y) = start[y0] + e(0,y0) + sum_i (trans(y_{i-1},y_i) + e(i,y_i)) + stop[y_{n-1}]
//
// Every routine here accumulates in exactly that order, so a Viterbi
// score is bit-identical to score_path() of the returned path.
struct ChainPotentials {
  std::size_t length = 0;
  std::size_t tags = 0;
  std::vector<double> emission;    // length * tags
  std::vector<double> transition;  // tags * tags
  std::vector<double> start;       // tags
  std::vector<double> stop;        // tags

  ChainPotentials() = default;
  ChainPotentials(std::size_t length, std::size_t tags);

  double& e(std::size_t i, std::size_t y) { return emission[i * tags + y]; }
  double e(std::size_t i, std::size_t y) const { return emission[i * tags + y]; }
  double& t(std::size_t prev, std::size_t next) { return transition[prev * tags + next]; }
  double t(std::size_t prev, std::size_t next) const { return transition[prev * tags + next]; }
};

// Allowed transitions for constrained decoding; absent means everything is
// allowed. A disallowed start entry forbids a tag at position 0.
struct TransitionMask {
  std::size_t tags = 0;
  std::vector<bool> transition;  // tags * tags
  std::vector<bool> start;       // tags

  bool allowed(std::size_t prev, std::size_t next) const { return transition[prev * tags + next]; }
};

double score_path(const ChainPotentials& p, std::span<const std::size_t> path);

// Highest-scoring path. Ties go to the lowest tag index, both for the final
// tag and at every backpointer; equivalently, among all optimal paths the
// one that is smallest when compared from the last position backwards.
std::vector<std::size_t> viterbi(const ChainPotentials& p, const TransitionMask* mask = nullptr);

double log_sum_exp(std::span<const double> values);

double log_partition(const ChainPotentials& p);

// Forward/backward tables in log space. alpha(i,y) includes e(i,y);
// beta(i,y) covers positions after i plus the stop score.
struct ForwardBackward {
  std::size_t length = 0;
  std::size_t tags = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  double log_z = 0.0;

  double a(std::size_t i, std::size_t y) const { return alpha[i * tags + y]; }
  double b(std::size_t i, std::size_t y) const { return beta[i * tags + y]; }
};

ForwardBackward forward_backward(const ChainPotentials& p);

// Gradient of a loss with respect to every potential.
struct PotentialGradient {
  std::vector<double> emission;
  std::vector<double> transition;
  std::vector<double> start;
  std::vector<double> stop;
};

// Token-weighted negative log-likelihood of `gold`:
//
//   L = sum_i w_i * -log p(y_i | y_0..y_{i-1}, x)
//
// where w_i = token_weights[i]. With every weight equal to 1 the chain rule
// telescopes and L = log Z - score(gold). Both L and its exact gradient are
// computed in O(n K^2).
double weighted_nll(const ChainPotentials& p, std::span<const std::size_t> gold,
                    std::span<const double> token_weights, PotentialGradient* grad);

}  // namespace argmine

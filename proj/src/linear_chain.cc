#include "argmine/linear_chain.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace argmine {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_path(const ChainPotentials& p, std::span<const std::size_t> path) {
  if (path.size() != p.length)
    throw std::invalid_argument("path length " + std::to_string(path.size()) +
                                " does not match chain length " + std::to_string(p.length));
  for (auto y : path)
    if (y >= p.tags) throw std::out_of_range("tag index out of range");
}

}  // namespace

ChainPotentials::ChainPotentials(std::size_t length, std::size_t tags)
    : length(length),
      tags(tags),
      emission(length * tags, 0.0),
      transition(tags * tags, 0.0),
      start(tags, 0.0),
      stop(tags, 0.0) {}

double score_path(const ChainPotentials& p, std::span<const std::size_t> path) {
  check_path(p, path);
  if (path.empty()) return 0.0;
  double s = p.start[path[0]] + p.e(0, path[0]);
  for (std::size_t i = 1; i < path.size(); ++i) s = (s + p.t(path[i - 1], path[i])) + p.e(i, path[i]);
  return s + p.stop[path.back()];
}

std::vector<std::size_t> viterbi(const ChainPotentials& p, const TransitionMask* mask) {
  const std::size_t n = p.length;
  const std::size_t k = p.tags;
  if (n == 0) return {};
  if (mask && mask->tags != k) throw std::invalid_argument("mask size does not match tag count");

  std::vector<double> delta(n * k, kNegInf);
  std::vector<std::size_t> back(n * k, 0);
  for (std::size_t y = 0; y < k; ++y)
    if (!mask || mask->start[y]) delta[y] = p.start[y] + p.e(0, y);

  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < k; ++y) {
      double best = kNegInf;
      std::size_t arg = 0;
      bool found = false;
      for (std::size_t prev = 0; prev < k; ++prev) {
        if (mask && !mask->allowed(prev, y)) continue;
        const double d = delta[(i - 1) * k + prev];
        if (d == kNegInf) continue;
        const double cand = d + p.t(prev, y);
        if (!found || cand > best) {
          best = cand;
          arg = prev;
          found = true;
        }
      }
      if (found) {
        delta[i * k + y] = best + p.e(i, y);
        back[i * k + y] = arg;
      }
    }
  }

  double best = kNegInf;
  std::size_t last = 0;
  bool found = false;
  for (std::size_t y = 0; y < k; ++y) {
    const double d = delta[(n - 1) * k + y];
    if (d == kNegInf) continue;
    const double cand = d + p.stop[y];
    if (!found || cand > best) {
      best = cand;
      last = y;
      found = true;
    }
  }
  if (!found) throw std::runtime_error("no admissible tag path under the transition mask");

  std::vector<std::size_t> path(n);
  path[n - 1] = last;
  for (std::size_t i = n - 1; i > 0; --i) path[i - 1] = back[i * k + path[i]];
  return path;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double m = *std::max_element(values.begin(), values.end());
  if (m == kNegInf) return kNegInf;
  if (m == std::numeric_limits<double>::infinity()) return m;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

ForwardBackward forward_backward(const ChainPotentials& p) {
  const std::size_t n = p.length;
  const std::size_t k = p.tags;
  ForwardBackward fb;
  fb.length = n;
  fb.tags = k;
  if (n == 0) return fb;
  fb.alpha.assign(n * k, 0.0);
  fb.beta.assign(n * k, 0.0);
  std::vector<double> buf(k);

  for (std::size_t y = 0; y < k; ++y) fb.alpha[y] = p.start[y] + p.e(0, y);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < k; ++y) {
      for (std::size_t prev = 0; prev < k; ++prev) buf[prev] = fb.alpha[(i - 1) * k + prev] + p.t(prev, y);
      fb.alpha[i * k + y] = log_sum_exp(buf) + p.e(i, y);
    }
  }

  for (std::size_t y = 0; y < k; ++y) fb.beta[(n - 1) * k + y] = p.stop[y];
  for (std::size_t i = n - 1; i > 0; --i) {
    for (std::size_t prev = 0; prev < k; ++prev) {
      for (std::size_t y = 0; y < k; ++y) buf[y] = p.t(prev, y) + p.e(i, y) + fb.beta[i * k + y];
      fb.beta[(i - 1) * k + prev] = log_sum_exp(buf);
    }
  }

  for (std::size_t y = 0; y < k; ++y) buf[y] = fb.alpha[(n - 1) * k + y] + p.stop[y];
  fb.log_z = log_sum_exp(buf);
  return fb;
}

double log_partition(const ChainPotentials& p) {
  if (p.length == 0) return 0.0;
  return forward_backward(p).log_z;
}

double weighted_nll(const ChainPotentials& p, std::span<const std::size_t> gold,
                    std::span<const double> token_weights, PotentialGradient* grad) {
  check_path(p, gold);
  if (token_weights.size() != gold.size())
    throw std::invalid_argument("token weight count does not match path length");
  const std::size_t n = p.length;
  const std::size_t k = p.tags;
  if (grad) {
    grad->emission.assign(n * k, 0.0);
    grad->transition.assign(k * k, 0.0);
    grad->start.assign(k, 0.0);
    grad->stop.assign(k, 0.0);
  }
  if (n == 0) return 0.0;

  const auto fb = forward_backward(p);

  // Each token contributes w_i * (D_i - g_i - beta_i(y_i)) where D_i is the
  // log-normaliser of p(y_i | y_{i-1}): log Z at i = 0, beta_{i-1}(y_{i-1})
  // afterwards.
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t y = gold[i];
    const double norm = i == 0 ? fb.log_z : fb.b(i - 1, gold[i - 1]);
    const double g = i == 0 ? p.start[y] + p.e(0, y) : p.t(gold[i - 1], y) + p.e(i, y);
    loss += token_weights[i] * (norm - g - fb.b(i, y));
  }
  if (!grad) return loss;

  // Expected-feature mass: the w_0-weighted model distribution plus, for
  // each i < n-1, a (w_{i+1} - w_i)-weighted chain started at gold y_i. All
  // of them share the transition kernel Q_i, so one forward sweep suffices.
  std::vector<double> mass(k);
  for (std::size_t y = 0; y < k; ++y)
    mass[y] = token_weights[0] * std::exp(p.start[y] + p.e(0, y) + fb.b(0, y) - fb.log_z);

  auto add_emission = [&](std::size_t i) {
    for (std::size_t y = 0; y < k; ++y) grad->emission[i * k + y] += mass[y];
    grad->emission[i * k + gold[i]] -= token_weights[i];
  };

  for (std::size_t y = 0; y < k; ++y) grad->start[y] += mass[y];
  grad->start[gold[0]] -= token_weights[0];
  add_emission(0);

  std::vector<double> next(k);
  for (std::size_t i = 1; i < n; ++i) {
    mass[gold[i - 1]] += token_weights[i] - token_weights[i - 1];
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t prev = 0; prev < k; ++prev) {
      if (mass[prev] == 0.0) continue;
      const double base = fb.b(i - 1, prev);
      for (std::size_t y = 0; y < k; ++y) {
        const double flow = mass[prev] * std::exp(p.t(prev, y) + p.e(i, y) + fb.b(i, y) - base);
        grad->transition[prev * k + y] += flow;
        next[y] += flow;
      }
    }
    grad->transition[gold[i - 1] * k + gold[i]] -= token_weights[i];
    mass.swap(next);
    add_emission(i);
  }

  for (std::size_t y = 0; y < k; ++y) grad->stop[y] += mass[y];
  grad->stop[gold[n - 1]] -= token_weights[n - 1];
  return loss;
}

}  // namespace argmine

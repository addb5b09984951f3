#include <gtest/gtest.h>

#include <cmath>

#include "argmine/linear_chain.h"
#include "argmine/tagger.h"
#include "oracles.h"

namespace argmine {
namespace {

using testing::brute_force_argmax;
using testing::enumerate_log_partition;

// Two tags A=0, B=1; emissions t1:(2,0), t2:(0,1); A->B = -2.
ChainPotentials toy() {
  ChainPotentials p(2, 2);
  p.e(0, 0) = 2;
  p.e(1, 1) = 1;
  p.t(0, 1) = -2;
  return p;
}

TEST(ScorePath, ToyPaths) {
  const auto p = toy();
  using V = std::vector<std::size_t>;
  EXPECT_EQ(score_path(p, V{0, 0}), 2.0);
  EXPECT_EQ(score_path(p, V{0, 1}), 1.0);
  EXPECT_EQ(score_path(p, V{1, 0}), 0.0);
  EXPECT_EQ(score_path(p, V{1, 1}), 1.0);
  EXPECT_EQ(viterbi(p), (V{0, 0}));
}

TEST(ScorePath, LengthMismatchThrows) {
  EXPECT_THROW(score_path(toy(), std::vector<std::size_t>{0}), std::invalid_argument);
}

TEST(Viterbi, EmissionDominatedIsPerTokenArgmax) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = testing::random_potentials(rng, 6, 7);
    std::fill(p.transition.begin(), p.transition.end(), 0.0);
    std::fill(p.start.begin(), p.start.end(), 0.0);
    std::fill(p.stop.begin(), p.stop.end(), 0.0);
    const auto path = viterbi(p);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t y = 0; y < 7; ++y) EXPECT_LE(p.e(i, y), p.e(i, path[i]));
  }
}

TEST(Viterbi, MatchesBruteForceWithTies) {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const auto k = static_cast<std::size_t>(uniform_int(rng, 2, 4));
    const auto p = trial % 2 ? testing::tied_potentials(rng, n, k) : testing::random_potentials(rng, n, k);
    const auto path = viterbi(p);
    EXPECT_EQ(path, brute_force_argmax(p));
    EXPECT_EQ(score_path(p, path), testing::naive_score(p, path));
  }
}

TEST(Viterbi, ZeroModelPicksAllZeroPath) {
  ChainPotentials p(3, 7);
  EXPECT_EQ(viterbi(p), (std::vector<std::size_t>{0, 0, 0}));
}

TEST(Viterbi, ConstrainedOutputIsWellFormed) {
  // Unconstrained argmax is [O, I-Reason].
  ChainPotentials p(2, kNumTags);
  p.e(0, index_of(Tag::O)) = 5;
  p.e(1, index_of(Tag::IReason)) = 5;
  const auto free_path = viterbi(p);
  EXPECT_EQ(free_path[1], index_of(Tag::IReason));
  const auto path = viterbi(p, &bio_transition_mask());
  TagSequence tags;
  for (auto y : path) tags.push_back(kAllTags[y]);
  EXPECT_TRUE(is_well_formed(tags));
  EXPECT_EQ(path, brute_force_argmax(p, &bio_transition_mask()));

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto q = testing::random_potentials(rng, static_cast<std::size_t>(uniform_int(rng, 1, 4)), kNumTags);
    const auto best = viterbi(q, &bio_transition_mask());
    TagSequence t;
    for (auto y : best) t.push_back(kAllTags[y]);
    EXPECT_TRUE(is_well_formed(t));
    if (trial < 40) EXPECT_EQ(best, brute_force_argmax(q, &bio_transition_mask()));
  }
}

TEST(LogPartition, ZeroModelIsNLog7) {
  for (std::size_t n = 1; n <= 6; ++n) {
    ChainPotentials p(n, 7);
    EXPECT_EQ(log_partition(p), static_cast<double>(n) * std::log(7.0));
  }
}

TEST(LogPartition, MatchesEnumeration) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testing::random_potentials(rng, static_cast<std::size_t>(uniform_int(rng, 1, 3)), 3, 3.0);
    EXPECT_NEAR(log_partition(p), enumerate_log_partition(p), 1e-9);
    const auto fb = forward_backward(p);
    EXPECT_NEAR(fb.log_z, enumerate_log_partition(p), 1e-9);
  }
}

TEST(LogPartition, BoundsEveryPathAndNormalizes) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testing::random_potentials(rng, static_cast<std::size_t>(uniform_int(rng, 1, 3)), 7);
    const double z = log_partition(p);
    double total = 0;
    testing::for_each_path(p.length, p.tags, [&](const std::vector<std::size_t>& y) {
      const double s = score_path(p, y);
      EXPECT_GE(z, s);
      total += std::exp(s - z);
    });
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(LogPartition, StableForLargeScores) {
  ChainPotentials p(3, 2);
  for (auto& v : p.emission) v = 800;
  EXPECT_TRUE(std::isfinite(log_partition(p)));
  EXPECT_NEAR(log_partition(p), 2400 + 3 * std::log(2.0), 1e-9);
}

TEST(LogSumExp, EdgeCases) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(log_sum_exp(std::vector<double>{-inf, -inf}), -inf);
  EXPECT_NEAR(log_sum_exp(std::vector<double>{0.0, 0.0}), std::log(2.0), 1e-15);
}

TEST(WeightedNll, UniformWeightsGiveLogZMinusScore) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 5));
    const auto p = testing::random_potentials(rng, n, 4);
    std::vector<std::size_t> gold(n);
    for (auto& y : gold) y = uniform_index(rng, 4);
    const std::vector<double> w(n, 1.0);
    EXPECT_NEAR(weighted_nll(p, gold, w, nullptr), log_partition(p) - score_path(p, gold), 1e-9);
  }
}

TEST(WeightedNll, MatchesPrefixEnumeration) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    const auto p = testing::random_potentials(rng, n, 3);
    std::vector<std::size_t> gold(n);
    for (auto& y : gold) y = uniform_index(rng, 3);
    std::vector<double> w(n);
    for (auto& v : w) v = 0.1 + 3 * uniform_real(rng);
    EXPECT_NEAR(weighted_nll(p, gold, w, nullptr), testing::enumerate_weighted_nll(p, gold, w), 1e-9);
  }
}

TEST(WeightedNll, ZeroPotentialsGiveWeightedLogK) {
  ChainPotentials p(3, 7);
  const std::vector<std::size_t> gold{1, 2, 0};
  const std::vector<double> w{2.0, 0.5, 1.0};
  EXPECT_NEAR(weighted_nll(p, gold, w, nullptr), 3.5 * std::log(7.0), 1e-12);
}

TEST(WeightedNll, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  const double h = 1e-5;
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const std::size_t k = 3;
    const auto p = testing::random_potentials(rng, n, k);
    std::vector<std::size_t> gold(n);
    for (auto& y : gold) y = uniform_index(rng, k);
    std::vector<double> w(n);
    for (auto& v : w) v = 0.2 + 2 * uniform_real(rng);

    PotentialGradient g;
    weighted_nll(p, gold, w, &g);

    // Flatten emission, transition, start, stop in that order.
    std::vector<double> x;
    for (auto* v : {&p.emission, &p.transition, &p.start, &p.stop}) x.insert(x.end(), v->begin(), v->end());
    std::vector<double> analytic;
    for (auto* v : {&g.emission, &g.transition, &g.start, &g.stop}) analytic.insert(analytic.end(), v->begin(), v->end());
    auto f = [&](const std::vector<double>& theta) {
      ChainPotentials q(n, k);
      std::size_t o = 0;
      for (auto* v : {&q.emission, &q.transition, &q.start, &q.stop})
        for (auto& e : *v) e = theta[o++];
      return weighted_nll(q, gold, w, nullptr);
    };
    for (std::size_t j = 0; j < x.size(); ++j)
      EXPECT_NEAR(analytic[j], testing::central_difference(f, x, j, h), 1e-6) << "coordinate " << j;
  }
}

}  // namespace
}  // namespace argmine

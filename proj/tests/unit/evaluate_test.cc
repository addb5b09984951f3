#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "argmine/aggregate.h"
#include "argmine/bio.h"
#include "argmine/evaluate.h"
#include "oracles.h"

namespace argmine {
namespace {

using T = Tag;
using L = ArgLabel;

// --- aggregate -----------------------------------------------------------------

TEST(SentenceLabel, Examples) {
  EXPECT_EQ(sentence_label(TagSequence{T::BIssue, T::IIssue, T::IIssue, T::O}), L::Issue);
  EXPECT_EQ(sentence_label(TagSequence{T::O, T::O}), L::NonIRC);
  EXPECT_EQ(sentence_label(TagSequence{T::BConclusion, T::IConclusion, T::BReason, T::IReason}),
            L::Conclusion);
  EXPECT_EQ(sentence_label(TagSequence{}), L::NonIRC);
}

TEST(SentenceLabel, MixedSentenceMajority) {
  TagSequence tags{T::BConclusion, T::IConclusion, T::IConclusion, T::BReason};
  tags.resize(10, T::IReason);
  EXPECT_EQ(sentence_label(tags), L::Reason);
}

TEST(SentenceLabel, TieRules) {
  const TagSequence tags{T::O, T::O, T::BIssue, T::IIssue};
  EXPECT_EQ(sentence_label(tags, TieRule::EarliestMention), L::NonIRC);
  EXPECT_EQ(sentence_label(tags, TieRule::PreferIrc), L::Issue);
  EXPECT_EQ(parse_tie_rule("prefer_irc"), TieRule::PreferIrc);
  EXPECT_FALSE(parse_tie_rule("latest"));
}

// Exhaustive over all 7-tag sequences up to length 4.
TEST(SentenceLabel, MajorityAndTieRuleByEnumeration) {
  for (std::size_t n = 1; n <= 4; ++n) {
    testing::for_each_path(n, kNumTags, [&](const std::vector<std::size_t>& path) {
      TagSequence tags;
      for (auto y : path) tags.push_back(kAllTags[y]);
      std::array<std::size_t, kNumLabels> count{};
      std::array<std::size_t, kNumLabels> first;
      first.fill(99);
      for (std::size_t i = 0; i < n; ++i) {
        const auto k = index_of(label_of(tags[i]));
        ++count[k];
        first[k] = std::min(first[k], i);
      }
      const auto best = *std::max_element(count.begin(), count.end());
      std::size_t expect = 0;
      std::size_t expect_first = 99;
      for (std::size_t k = 0; k < kNumLabels; ++k)
        if (count[k] == best && first[k] < expect_first) {
          expect = k;
          expect_first = first[k];
        }
      ASSERT_EQ(sentence_label(tags), kAllLabels[expect]);
    });
  }
}

TEST(SentenceLabel, SingleFamilyAndPermutationInvariance) {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 12));
    TagSequence tags(n);
    for (auto& t : tags) t = kAllTags[uniform_index(rng, kNumTags)];
    const auto counts = family_counts(tags);
    const auto best = *std::max_element(counts.begin(), counts.end());
    const auto label = sentence_label(tags);
    EXPECT_EQ(counts[index_of(label)], best);
    if (std::count(counts.begin(), counts.end(), best) == 1) {
      auto shuffled = tags;
      shuffle(std::span<Tag>(shuffled), rng);
      EXPECT_EQ(sentence_label(shuffled), label);
    }
    const auto fam = kIrcLabels[uniform_index(rng, 3)];
    TagSequence one(n, inside_tag(fam));
    one[0] = begin_tag(fam);
    EXPECT_EQ(sentence_label(one), fam);
  }
}

TEST(LabelDocument, CountsAndMissingTags) {
  Rng rng(42);
  auto doc = testing::random_document(rng, "d", 6, 10);
  for (auto& s : doc.sentences) s.predicted = Prediction{encode(s), s.spans, std::nullopt};
  const auto out = label_document(doc);
  std::size_t total = 0;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    EXPECT_EQ(out.document.sentences[s].predicted->label, gold_sentence_label(doc.sentences[s]));
    total += 1;
  }
  EXPECT_EQ(std::accumulate(out.counts.begin(), out.counts.end(), std::size_t{0}), total);
  doc.sentences.back().predicted.reset();
  try {
    label_document(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sentence " + std::to_string(doc.sentences.size() - 1)),
              std::string::npos);
  }
}

TEST(GoldSentenceLabel, ExplicitLabelWins) {
  Sentence s;
  s.tokens = {{"a", 0, 1}, {"b", 2, 3}};
  s.spans = {{L::Issue, 0, 1}};
  EXPECT_EQ(gold_sentence_label(s), L::Issue);
  s.sentence_label = L::Reason;
  EXPECT_EQ(gold_sentence_label(s), L::Reason);
}

// --- metrics -------------------------------------------------------------------

TEST(TokenMetrics, HandCountedExample) {
  const TagSequence gold{T::BIssue, T::IIssue, T::O, T::O};
  const TagSequence pred{T::BIssue, T::O, T::O, T::O};
  const auto t = token_metrics(gold, pred);
  const auto& b = t.rows[index_of(T::BIssue)];
  EXPECT_EQ(b.precision, 1.0);
  EXPECT_EQ(b.recall, 1.0);
  const auto& i = t.rows[index_of(T::IIssue)];
  EXPECT_EQ(i.precision, 0.0);
  EXPECT_EQ(i.recall, 0.0);
  EXPECT_EQ(i.f1, 0.0);
  const auto& o = t.rows[index_of(T::O)];
  EXPECT_DOUBLE_EQ(o.precision, 2.0 / 3.0);
  EXPECT_EQ(o.recall, 1.0);
  EXPECT_FALSE(t.rows[index_of(T::BReason)].present());
  EXPECT_EQ(t.rows[index_of(T::BReason)].support, 0u);
  // Macro over the three present tags.
  EXPECT_DOUBLE_EQ(*t.macro_f1(), (1.0 + 0.0 + 0.8) / 3.0);
}

TEST(TokenMetrics, PerfectPredictionAndLengthMismatch) {
  const TagSequence gold{T::BReason, T::IReason, T::O};
  const auto t = token_metrics(gold, gold);
  for (const auto& r : t.rows)
    if (r.present()) EXPECT_EQ(r.f1, 1.0);
  EXPECT_THROW(token_metrics(gold, TagSequence{T::O}), std::invalid_argument);
}

TEST(SentenceMetrics, AllNonIrcPredictions) {
  const std::vector<L> gold{L::Issue, L::Reason, L::NonIRC, L::Conclusion, L::NonIRC, L::Reason};
  const std::vector<L> pred(gold.size(), L::NonIRC);
  const auto t = sentence_metrics(gold, pred);
  for (auto l : kIrcLabels) EXPECT_EQ(t.rows[index_of(l)].recall, 0.0);
  EXPECT_DOUBLE_EQ(t.rows[index_of(L::NonIRC)].precision, 2.0 / 6.0);
}

TEST(Metrics, MatchNaiveRecount) {
  Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = trial % 2 ? kNumTags : kNumLabels;
    const auto n = static_cast<std::size_t>(uniform_int(rng, 0, 60));
    std::vector<std::size_t> g(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = uniform_index(rng, k);
      p[i] = bernoulli(rng, 0.6) ? g[i] : uniform_index(rng, k);
    }
    std::vector<std::string> names(k);
    for (std::size_t c = 0; c < k; ++c) names[c] = "c" + std::to_string(c);
    const auto t = classification_metrics(g, p, names);
    const auto m = confusion(g, p, names);
    const auto naive = testing::naive_recount(g, p, k);
    for (std::size_t c = 0; c < k; ++c) {
      EXPECT_EQ(t.rows[c].support, naive.support[c]);
      EXPECT_EQ(t.rows[c].predicted, naive.predicted[c]);
      EXPECT_EQ(t.rows[c].true_positive, naive.tp[c]);
      const double pr = naive.predicted[c] ? double(naive.tp[c]) / double(naive.predicted[c]) : 0.0;
      const double rc = naive.support[c] ? double(naive.tp[c]) / double(naive.support[c]) : 0.0;
      EXPECT_EQ(t.rows[c].precision, pr);
      EXPECT_EQ(t.rows[c].recall, rc);
      EXPECT_EQ(t.rows[c].f1, pr + rc > 0 ? 2 * pr * rc / (pr + rc) : 0.0);
      for (std::size_t d = 0; d < k; ++d) EXPECT_EQ(m.count(c, d), naive.confusion[c][d]);
      if (m.percent[c]) {
        const double sum = std::accumulate(m.percent[c]->begin(), m.percent[c]->end(), 0.0);
        EXPECT_NEAR(sum, 100.0, 1e-9);
      } else {
        EXPECT_EQ(naive.support[c], 0u);
      }
    }
    if (n > 0) EXPECT_EQ(t.accuracy(), static_cast<double>(m.trace()) / static_cast<double>(m.total()));
  }
}

TEST(Confusion, PercentRows) {
  std::vector<std::size_t> g, p;
  auto add = [&](std::size_t a, std::size_t b, int times) {
    for (int i = 0; i < times; ++i) {
      g.push_back(a);
      p.push_back(b);
    }
  };
  add(0, 0, 8);
  add(0, 1, 2);
  add(1, 0, 1);
  add(1, 1, 9);
  const auto m = confusion(g, p, {"a", "b", "c"});
  EXPECT_EQ(*m.percent[0], (std::vector<double>{80, 20, 0}));
  EXPECT_EQ(*m.percent[1], (std::vector<double>{10, 90, 0}));
  EXPECT_FALSE(m.percent[2]);
  const std::vector<std::string> sg{"a", "b"}, sp{"a", "zzz"};
  EXPECT_THROW(confusion(sg, sp, {"a", "b"}), std::invalid_argument);
}

TEST(Metrics, RelabelingPermutesRows) {
  Rng rng(44);
  std::vector<std::size_t> g(40), p(40);
  for (auto& v : g) v = uniform_index(rng, 4);
  for (auto& v : p) v = uniform_index(rng, 4);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  std::vector<std::size_t> g2, p2;
  for (auto v : g) g2.push_back(perm[v]);
  for (auto v : p) p2.push_back(perm[v]);
  const std::vector<std::string> names{"a", "b", "c", "d"};
  const auto t1 = classification_metrics(g, p, names);
  const auto t2 = classification_metrics(g2, p2, names);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(t1.rows[c].f1, t2.rows[perm[c]].f1);
  std::vector<int> a(g.begin(), g.end()), b(p.begin(), p.end()), a2(g2.begin(), g2.end()), b2(p2.begin(), p2.end());
  EXPECT_DOUBLE_EQ(cohens_kappa(a, b), cohens_kappa(a2, b2));
}

// --- kappa ---------------------------------------------------------------------

TEST(Kappa, WorkedExampleIsExactlyZero) {
  const std::vector<int> a{1, 0, 1, 0}, b{1, 1, 0, 0};
  EXPECT_EQ(cohens_kappa(a, b), 0.0);
}

TEST(Kappa, IdentitySymmetryAndOracle) {
  Rng rng(45);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 30));
    std::vector<int> a(n), b(n);
    for (auto& v : a) v = static_cast<int>(uniform_index(rng, 4));
    for (auto& v : b) v = static_cast<int>(uniform_index(rng, 4));
    EXPECT_EQ(cohens_kappa(a, a), 1.0);
    EXPECT_EQ(cohens_kappa(a, b), cohens_kappa(b, a));
    EXPECT_NEAR(cohens_kappa(a, b), testing::naive_kappa(a, b), 1e-12);
    EXPECT_GE(cohens_kappa(a, b), -1.0);
    EXPECT_LE(cohens_kappa(a, b), 1.0);
  }
}

TEST(Kappa, ErrorsAndSentenceSummary) {
  EXPECT_THROW(cohens_kappa(std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
  EXPECT_THROW(cohens_kappa(std::vector<int>{1}, std::vector<int>{1, 2}), std::invalid_argument);
  const std::vector<L> a{L::Issue, L::Reason, L::Conclusion, L::NonIRC};
  const auto k = sentence_kappa(a, a);
  EXPECT_EQ(k.overall, 1.0);
  for (double v : k.per_type) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(k.mean_per_type, 1.0);
}

// --- indicators and baseline -------------------------------------------------------

Document predicted_doc(const std::vector<std::vector<std::string>>& sentences,
                       const std::vector<TagSequence>& gold, const std::vector<TagSequence>& pred) {
  Document d{"ind", DocKind::Summary, {}};
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    Sentence x;
    for (const auto& w : sentences[s]) x.tokens.push_back({w, 0, 0});
    x.spans = decode(gold[s], RepairPolicy::Strict);
    x.predicted = Prediction{pred[s], decode(pred[s], RepairPolicy::IAsB), std::nullopt};
    d.sentences.push_back(std::move(x));
  }
  return d;
}

TEST(Indicators, RankingAndEmptyRows) {
  const TagSequence c3{T::BConclusion, T::IConclusion, T::IConclusion};
  const auto doc = predicted_doc({{"HELD", "x", "y"}, {"HELD", "z", "z"}, {"Beta", "z", "q"}, {"Alpha", "a", "b"}},
                                 {c3, c3, c3, c3}, {c3, c3, c3, {T::O, T::O, T::O}});
  const auto rows = indicator_report(Corpus{doc}, 10);
  ASSERT_EQ(rows.size(), kNumTags);
  const auto& b = rows[index_of(T::BConclusion)].top;
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0], (std::pair<std::string, std::size_t>{"HELD", 2}));
  EXPECT_EQ(b[1].first, "Beta");
  const auto& i = rows[index_of(T::IConclusion)].top;
  EXPECT_EQ(i[0], (std::pair<std::string, std::size_t>{"z", 3}));
  EXPECT_EQ(i[1].first, "q");  // count ties break lexicographically
  EXPECT_TRUE(rows[index_of(T::BIssue)].top.empty());
  EXPECT_EQ(indicator_report(Corpus{doc}, 1)[index_of(T::BConclusion)].top.size(), 1u);
}

TEST(Baseline, SingleClassTrainingPredictsThatClass) {
  std::vector<LabeledSentence> train{{{"a", "b"}, L::Reason}, {{"c"}, L::Reason}};
  std::vector<LabeledSentence> test{{{"a"}, L::Issue}, {{"zzz"}, L::NonIRC}, {{"c", "b"}, L::Reason}};
  const auto r = baseline_sentence_classifier(train, test, {});
  for (auto l : r.predictions) EXPECT_EQ(l, L::Reason);
  EXPECT_THROW(baseline_sentence_classifier({}, test, {}), Error);
}

TEST(Baseline, LearnsCueWordsAndIsDeterministic) {
  Rng rng(46);
  std::vector<LabeledSentence> train, test;
  const std::array<const char*, 4> cue{"whether", "because", "held", "filler"};
  for (int i = 0; i < 200; ++i) {
    const auto k = uniform_index(rng, 4);
    LabeledSentence s{{cue[k]}, kAllLabels[k]};
    for (int j = 0; j < 4; ++j) s.words.push_back("n-" + testing::random_word(rng));
    (i < 150 ? train : test).push_back(s);
  }
  BaselineConfig c;
  c.seed = 3;
  const auto a = baseline_sentence_classifier(train, test, c);
  const auto b = baseline_sentence_classifier(train, test, c);
  EXPECT_EQ(a.predictions, b.predictions);
  EXPECT_GT(a.table.accuracy(), 0.95);
}

// --- corpus evaluation --------------------------------------------------------------

TEST(EvaluateCorpora, PerfectAndMismatched) {
  Rng rng(47);
  const auto gold = testing::random_corpus(rng, 5, 4, 12);
  const auto r = evaluate_corpora(gold, gold, {TieRule::EarliestMention, true, 2});
  EXPECT_EQ(r.token.accuracy(), 1.0);
  EXPECT_EQ(r.spans.f1, r.spans.gold ? 1.0 : 0.0);
  EXPECT_EQ(r.kappa->overall, 1.0);
  auto shorter = gold;
  shorter.pop_back();
  EXPECT_THROW(evaluate_corpora(gold, shorter), Error);
  auto renamed = gold;
  renamed[0].sentences[0].tokens[0].text += "x";
  EXPECT_THROW(evaluate_corpora(gold, renamed), Error);
}

TEST(EvaluateCorpora, UsesPredictionsAndIsJobIndependent) {
  Rng rng(48);
  const auto gold = testing::random_corpus(rng, 8, 5, 12);
  auto pred = gold;
  for (auto& d : pred)
    for (auto& s : d.sentences) {
      TagSequence tags(s.tokens.size());
      for (auto& t : tags) t = kAllTags[uniform_index(rng, kNumTags)];
      s.predicted = Prediction{tags, decode(tags, RepairPolicy::IAsB), std::nullopt};
    }
  const auto one = evaluate_corpora(gold, pred, {TieRule::EarliestMention, true, 1});
  const auto four = evaluate_corpora(gold, pred, {TieRule::EarliestMention, true, 4});
  EXPECT_EQ(report_to_json(one), report_to_json(four));
  EXPECT_EQ(report_to_text(one), report_to_text(four));
  EXPECT_LT(one.token.accuracy(), 1.0);
  EXPECT_NE(report_to_text(one).find("corpus-level micro counts"), std::string::npos);
}

}  // namespace
}  // namespace argmine

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "argmine/aggregate.h"
#include "argmine/tagger.h"
#include "argmine/types.h"

namespace argmine {

// One-vs-rest scores of a class. Precision or recall with a zero
// denominator is reported as 0; a class with neither gold nor predicted
// occurrences is absent.
struct ClassScores {
  std::size_t support = 0;    // gold occurrences
  std::size_t predicted = 0;  // predicted occurrences
  std::size_t true_positive = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool present() const { return support > 0 || predicted > 0; }
};

struct MetricsTable {
  std::vector<std::string> classes;
  std::vector<ClassScores> rows;
  std::size_t total = 0;
  std::size_t correct = 0;

  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
  // Unweighted mean over present classes, optionally restricted to a subset
  // of class indices. Absent when no selected class is present.
  std::optional<double> macro_f1(std::span<const std::size_t> subset = {}) const;
  std::optional<double> macro_precision() const;
  std::optional<double> macro_recall() const;
};

// Labels are class indices into `classes`; throws std::out_of_range for an
// index outside it and std::invalid_argument on a length mismatch.
MetricsTable classification_metrics(std::span<const std::size_t> gold,
                                    std::span<const std::size_t> predicted,
                                    std::vector<std::string> classes);

MetricsTable token_metrics(std::span<const Tag> gold, std::span<const Tag> predicted);
MetricsTable sentence_metrics(std::span<const ArgLabel> gold, std::span<const ArgLabel> predicted);

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::size_t> counts;  // classes^2, row-major
  // Row percentages; absent for rows with no gold occurrences.
  std::vector<std::optional<std::vector<double>>> percent;

  std::size_t count(std::size_t truth, std::size_t predicted) const {
    return counts[truth * classes.size() + predicted];
  }
  std::size_t trace() const;
  std::size_t total() const;
};

ConfusionMatrix confusion(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                          std::vector<std::string> classes);
// Same, keyed by class name; an unknown name throws std::invalid_argument.
ConfusionMatrix confusion(std::span<const std::string> gold, std::span<const std::string> predicted,
                          std::vector<std::string> classes);
ConfusionMatrix token_confusion(std::span<const Tag> gold, std::span<const Tag> predicted);
ConfusionMatrix sentence_confusion(std::span<const ArgLabel> gold, std::span<const ArgLabel> predicted);

// Cohen's kappa (p_o - p_e) / (1 - p_e) with p_e from the product of the two
// raters' marginals. Returns 1 when p_e == 1 (both raters constant and equal).
template <typename T>
double cohens_kappa(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw std::invalid_argument("kappa inputs differ in length");
  if (a.empty()) throw std::invalid_argument("kappa of empty sequences");
  std::map<T, std::pair<double, double>> marginals;
  double agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) agree += 1;
    marginals[a[i]].first += 1;
    marginals[b[i]].second += 1;
  }
  const double n = static_cast<double>(a.size());
  const double p_o = agree / n;
  double p_e = 0;
  for (const auto& [label, m] : marginals) p_e += (m.first / n) * (m.second / n);
  if (p_e == 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

template <typename T>
double cohens_kappa(const std::vector<T>& a, const std::vector<T>& b) {
  return cohens_kappa(std::span<const T>(a), std::span<const T>(b));
}

// Agreement between two sentence labelings: 4-class kappa, one binary kappa
// per IRC type, and the mean of the three binary values.
struct KappaSummary {
  double overall = 0.0;
  std::array<double, 3> per_type{};
  double mean_per_type = 0.0;
};

KappaSummary sentence_kappa(std::span<const ArgLabel> a, std::span<const ArgLabel> b);

// Exact span matches (label and boundaries).
struct SpanScores {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t matched = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct IndicatorRow {
  Tag tag = Tag::O;
  // Surface form and count, count-descending then lexicographic.
  std::vector<std::pair<std::string, std::size_t>> top;
};

// For every tag, the most frequent surface forms among tokens whose
// predicted tag equals the gold tag. Documents must carry predictions.
std::vector<IndicatorRow> indicator_report(const Corpus& predicted, std::size_t k = 10);
std::vector<IndicatorRow> indicator_report(const TaggerModel& model, const Corpus& eval,
                                           const PredictOptions& options, std::size_t k = 10);

std::string format_indicators(const std::vector<IndicatorRow>& rows);
std::string indicators_to_json(const std::vector<IndicatorRow>& rows);

// Sentence-level comparator without token annotation: a multiclass
// averaged perceptron over lowercased bag-of-words plus a bias feature.
struct LabeledSentence {
  std::vector<std::string> words;
  ArgLabel label = ArgLabel::NonIRC;
};

std::vector<LabeledSentence> labeled_sentences(const Corpus& docs, TieRule rule = TieRule::EarliestMention);

struct BaselineConfig {
  int epochs = 10;
  std::uint64_t seed = 0;
};

struct BaselineResult {
  std::vector<ArgLabel> predictions;
  MetricsTable table;
};

BaselineResult baseline_sentence_classifier(const std::vector<LabeledSentence>& train,
                                            const std::vector<LabeledSentence>& test,
                                            const BaselineConfig& config = {});

struct EvalOptions {
  TieRule tie_rule = TieRule::EarliestMention;
  bool kappa = false;
  unsigned jobs = 1;
};

struct EvalReport {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  MetricsTable token;
  MetricsTable sentence;
  ConfusionMatrix token_confusion;
  ConfusionMatrix sentence_confusion;
  SpanScores spans;
  std::optional<KappaSummary> kappa;
  std::optional<MetricsTable> baseline;
};

// Gold tags come from the gold spans; predicted tags from
// Sentence::predicted when present, else from the predicted corpus' spans.
// Corpora must match document by document and token by token.
EvalReport evaluate_corpora(const Corpus& gold, const Corpus& predicted, const EvalOptions& options = {});

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);

}  // namespace argmine

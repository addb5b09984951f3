#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argmine/types.h"

namespace argmine {

enum class SimilarityMeasure { Jaccard, TfCosine };

std::optional<SimilarityMeasure> parse_measure(std::string_view text);
std::string_view to_string(SimilarityMeasure measure);

// Symmetric score in [0, 1] over lowercased tokens. Two empty sentences
// score 0.
double similarity(const std::vector<std::string>& a, const std::vector<std::string>& b,
                  SimilarityMeasure measure = SimilarityMeasure::Jaccard);
double similarity(const Sentence& a, const Sentence& b,
                  SimilarityMeasure measure = SimilarityMeasure::Jaccard);

struct AlignOptions {
  SimilarityMeasure measure = SimilarityMeasure::Jaccard;
  double threshold = 0.5;
  std::size_t top_k = 3;

  // Throws std::invalid_argument for a threshold outside [0, 1] or top_k 0.
  void validate() const;
};

// A (summary sentence, full-text sentence) pair scoring at or above the
// threshold. `accepted` marks the pair that labeled the full-text sentence.
struct AlignmentPair {
  std::size_t summary_index = 0;
  std::size_t full_index = 0;
  double score = 0.0;
  ArgLabel label = ArgLabel::NonIRC;
  bool accepted = false;
};

struct Projection {
  Document full_text;  // sentence_label set on every accepted sentence
  std::vector<AlignmentPair> trace;  // summary index, then full index
  std::size_t proposals = 0;
};

// Every summary sentence whose gold label is an IRC type proposes its label
// to its top_k full-text sentences scoring >= threshold (score descending,
// then full index). A full-text sentence with several proposals keeps the
// highest score; ties go to the earlier summary sentence.
Projection project_labels(const Document& summary, const Document& full_text,
                          const AlignOptions& options = {});

// One JSON record per trace pair, newline-terminated.
std::string trace_to_jsonl(const Projection& projection, const std::string& summary_id);

// "case-0001-summary" and "case-0001-full" share the key "case-0001".
std::string pairing_key(std::string_view doc_id);

}  // namespace argmine

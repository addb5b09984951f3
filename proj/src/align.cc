#include "argmine/align.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "argmine/aggregate.h"

namespace argmine {

std::optional<SimilarityMeasure> parse_measure(std::string_view text) {
  if (text == "jaccard") return SimilarityMeasure::Jaccard;
  if (text == "tf_cosine") return SimilarityMeasure::TfCosine;
  return std::nullopt;
}

std::string_view to_string(SimilarityMeasure measure) {
  return measure == SimilarityMeasure::Jaccard ? "jaccard" : "tf_cosine";
}

namespace {

std::map<std::string, int> term_counts(const std::vector<std::string>& words) {
  std::map<std::string, int> out;
  for (auto w : words) {
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    ++out[w];
  }
  return out;
}

std::vector<std::string> words_of(const Sentence& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const auto& t : s.tokens) out.push_back(t.text);
  return out;
}

}  // namespace

double similarity(const std::vector<std::string>& a, const std::vector<std::string>& b,
                  SimilarityMeasure measure) {
  const auto ca = term_counts(a);
  const auto cb = term_counts(b);
  if (ca.empty() && cb.empty()) return 0.0;
  if (measure == SimilarityMeasure::Jaccard) {
    std::size_t shared = 0;
    for (const auto& [w, n] : ca) shared += cb.count(w);
    const std::size_t uni = ca.size() + cb.size() - shared;
    return static_cast<double>(shared) / static_cast<double>(uni);
  }
  if (ca.empty() || cb.empty()) return 0.0;
  double dot = 0, na = 0, nb = 0;
  for (const auto& [w, n] : ca) {
    na += double(n) * n;
    if (auto it = cb.find(w); it != cb.end()) dot += double(n) * it->second;
  }
  for (const auto& [w, n] : cb) nb += double(n) * n;
  if (dot == 0) return 0.0;
  // Identical count vectors score exactly 1.
  if (ca == cb) return 1.0;
  return std::min(1.0, dot / std::sqrt(na * nb));
}

double similarity(const Sentence& a, const Sentence& b, SimilarityMeasure measure) {
  return similarity(words_of(a), words_of(b), measure);
}

void AlignOptions::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("threshold must lie in [0, 1]");
  if (top_k < 1) throw std::invalid_argument("top_k must be at least 1");
}

Projection project_labels(const Document& summary, const Document& full_text,
                          const AlignOptions& options) {
  options.validate();
  Projection out{full_text, {}, 0};

  std::vector<std::vector<std::string>> full_words;
  for (const auto& s : full_text.sentences) full_words.push_back(words_of(s));

  // Best proposal per full-text sentence, as an index into the trace.
  std::vector<std::optional<std::size_t>> winner(full_text.sentences.size());

  for (std::size_t si = 0; si < summary.sentences.size(); ++si) {
    const auto label = gold_sentence_label(summary.sentences[si]);
    if (label == ArgLabel::NonIRC) continue;
    const auto words = words_of(summary.sentences[si]);
    std::vector<AlignmentPair> candidates;
    for (std::size_t fi = 0; fi < full_words.size(); ++fi) {
      const double score = similarity(words, full_words[fi], options.measure);
      if (score >= options.threshold) candidates.push_back({si, fi, score, label, false});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const AlignmentPair& a, const AlignmentPair& b) { return a.score > b.score; });
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto at = out.trace.size();
      out.trace.push_back(candidates[c]);
      if (c >= options.top_k) continue;
      ++out.proposals;
      auto& w = winner[candidates[c].full_index];
      if (!w || out.trace[*w].score < candidates[c].score) w = at;
    }
  }

  for (std::size_t fi = 0; fi < winner.size(); ++fi) {
    if (!winner[fi]) continue;
    auto& pair = out.trace[*winner[fi]];
    pair.accepted = true;
    out.full_text.sentences[fi].sentence_label = pair.label;
  }
  std::stable_sort(out.trace.begin(), out.trace.end(), [](const AlignmentPair& a, const AlignmentPair& b) {
    return a.summary_index != b.summary_index ? a.summary_index < b.summary_index
                                              : a.full_index < b.full_index;
  });
  return out;
}

std::string trace_to_jsonl(const Projection& projection, const std::string& summary_id) {
  std::string out;
  for (const auto& p : projection.trace) {
    nlohmann::ordered_json rec = {{"summary_id", summary_id},
                                  {"full_id", projection.full_text.doc_id},
                                  {"summary_idx", p.summary_index},
                                  {"full_idx", p.full_index},
                                  {"score", p.score},
                                  {"label", to_string(p.label)},
                                  {"accepted", p.accepted}};
    out += rec.dump() + "\n";
  }
  return out;
}

std::string pairing_key(std::string_view doc_id) {
  for (std::string_view suffix : {"-summary", "-full"}) {
    if (doc_id.size() > suffix.size() && doc_id.substr(doc_id.size() - suffix.size()) == suffix)
      return std::string(doc_id.substr(0, doc_id.size() - suffix.size()));
  }
  return std::string(doc_id);
}

}  // namespace argmine

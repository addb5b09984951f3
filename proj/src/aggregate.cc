#include "argmine/aggregate.h"

#include <limits>
#include <string>

#include "argmine/bio.h"

namespace argmine {

std::optional<TieRule> parse_tie_rule(std::string_view text) {
  if (text == "earliest") return TieRule::EarliestMention;
  if (text == "prefer_irc") return TieRule::PreferIrc;
  return std::nullopt;
}

std::string_view to_string(TieRule rule) {
  return rule == TieRule::EarliestMention ? "earliest" : "prefer_irc";
}

std::array<std::size_t, kNumLabels> family_counts(std::span<const Tag> tags) {
  std::array<std::size_t, kNumLabels> counts{};
  for (auto t : tags) ++counts[index_of(label_of(t))];
  return counts;
}

ArgLabel sentence_label(std::span<const Tag> tags, TieRule rule) {
  if (tags.empty()) return ArgLabel::NonIRC;
  const auto counts = family_counts(tags);
  constexpr auto kNever = std::numeric_limits<std::size_t>::max();
  std::array<std::size_t, kNumLabels> first{kNever, kNever, kNever, kNever};
  for (std::size_t i = 0; i < tags.size(); ++i) {
    auto& f = first[index_of(label_of(tags[i]))];
    if (f == kNever) f = i;
  }

  std::size_t best = 0;
  for (std::size_t k = 0; k < kNumLabels; ++k) best = std::max(best, counts[k]);

  const bool irc_tied = counts[index_of(ArgLabel::Issue)] == best ||
                        counts[index_of(ArgLabel::Reason)] == best ||
                        counts[index_of(ArgLabel::Conclusion)] == best;
  std::optional<ArgLabel> winner;
  for (auto label : kAllLabels) {
    const auto k = index_of(label);
    if (counts[k] != best) continue;
    if (rule == TieRule::PreferIrc && label == ArgLabel::NonIRC && irc_tied) continue;
    if (!winner || first[k] < first[index_of(*winner)]) winner = label;
  }
  return *winner;
}

ArgLabel gold_sentence_label(const Sentence& sentence, TieRule rule) {
  if (sentence.sentence_label) return *sentence.sentence_label;
  return sentence_label(encode(sentence), rule);
}

LabeledDocument label_document(const Document& doc, TieRule rule) {
  LabeledDocument out{doc, {}};
  for (std::size_t s = 0; s < out.document.sentences.size(); ++s) {
    auto& sentence = out.document.sentences[s];
    if (!sentence.predicted || sentence.predicted->tags.size() != sentence.tokens.size())
      throw Error("document '" + doc.doc_id + "' sentence " + std::to_string(s) +
                  " has no predicted tags");
    const auto label = sentence_label(sentence.predicted->tags, rule);
    sentence.predicted->label = label;
    ++out.counts[index_of(label)];
  }
  return out;
}

}  // namespace argmine

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "argmine/types.h"

namespace argmine {

enum class TieRule {
  // The tied family whose first token appears earliest wins.
  EarliestMention,
  // Any tied IRC family beats NonIRC; remaining ties by earliest mention.
  PreferIrc,
};

std::optional<TieRule> parse_tie_rule(std::string_view text);
std::string_view to_string(TieRule rule);

// Token counts per label family (B/I prefixes stripped, O -> NonIRC).
std::array<std::size_t, kNumLabels> family_counts(std::span<const Tag> tags);

// Majority label family of a sentence's tags. An empty sequence is NonIRC.
ArgLabel sentence_label(std::span<const Tag> tags, TieRule rule = TieRule::EarliestMention);

// Gold sentence label: the explicit label when present, otherwise the
// majority over the encoded gold spans.
ArgLabel gold_sentence_label(const Sentence& sentence, TieRule rule = TieRule::EarliestMention);

struct LabeledDocument {
  Document document;
  std::array<std::size_t, kNumLabels> counts{};
};

// Sets predicted->label on every sentence. Throws Error naming the first
// sentence without predicted tags.
LabeledDocument label_document(const Document& doc, TieRule rule = TieRule::EarliestMention);

}  // namespace argmine

#include "argmine/types.h"

namespace argmine {

namespace {

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {"Issue", "Reason", "Conclusion",
                                                                  "NonIRC"};

constexpr std::array<std::string_view, kNumTags> kTagNames = {
    "O", "B-Issue", "I-Issue", "B-Reason", "I-Reason", "B-Conclusion", "I-Conclusion"};

}  // namespace

std::string_view to_string(ArgLabel label) { return kLabelNames[index_of(label)]; }

std::optional<ArgLabel> parse_label(std::string_view text) {
  for (auto label : kAllLabels)
    if (kLabelNames[index_of(label)] == text) return label;
  return std::nullopt;
}

std::string_view to_string(Tag tag) { return kTagNames[index_of(tag)]; }

std::optional<Tag> parse_tag(std::string_view text) {
  for (auto tag : kAllTags)
    if (kTagNames[index_of(tag)] == text) return tag;
  return std::nullopt;
}

std::string_view to_string(DocKind kind) {
  return kind == DocKind::Summary ? "summary" : "full_text";
}

std::optional<DocKind> parse_kind(std::string_view text) {
  if (text == "summary") return DocKind::Summary;
  if (text == "full_text") return DocKind::FullText;
  return std::nullopt;
}

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

}  // namespace argmine

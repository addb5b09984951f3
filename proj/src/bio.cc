#include "argmine/bio.h"

#include <stdexcept>
#include <string>

namespace argmine {

std::optional<RepairPolicy> parse_repair(std::string_view text) {
  if (text == "strict") return RepairPolicy::Strict;
  if (text == "i_as_b") return RepairPolicy::IAsB;
  if (text == "i_drop") return RepairPolicy::IDrop;
  return std::nullopt;
}

std::string_view to_string(RepairPolicy policy) {
  switch (policy) {
    case RepairPolicy::Strict: return "strict";
    case RepairPolicy::IAsB: return "i_as_b";
    case RepairPolicy::IDrop: return "i_drop";
  }
  return "?";
}

DecodeError::DecodeError(std::size_t index, Tag tag, Tag previous)
    : Error("ill-formed tag sequence at index " + std::to_string(index) + ": " +
            std::string(to_string(tag)) + " after " +
            (index == 0 ? std::string("sequence start") : std::string(to_string(previous)))),
      index_(index) {}

TagSequence encode(std::span<const LabeledSpan> spans, std::size_t length) {
  TagSequence tags(length, Tag::O);
  std::vector<bool> covered(length, false);
  for (const auto& span : spans) {
    if (span.label == ArgLabel::NonIRC)
      throw std::invalid_argument("span with NonIRC label cannot be encoded");
    if (span.start_token < 0 || span.start_token > span.end_token ||
        static_cast<std::size_t>(span.end_token) >= length)
      throw std::invalid_argument("span [" + std::to_string(span.start_token) + ", " +
                                  std::to_string(span.end_token) + "] out of range for " +
                                  std::to_string(length) + " tokens");
    for (int i = span.start_token; i <= span.end_token; ++i) {
      if (covered[i]) throw std::invalid_argument("overlapping spans at token " + std::to_string(i));
      covered[i] = true;
      tags[i] = (i == span.start_token) ? begin_tag(span.label) : inside_tag(span.label);
    }
  }
  return tags;
}

TagSequence encode(const Sentence& sentence) {
  return encode(sentence.spans, sentence.tokens.size());
}

std::vector<LabeledSpan> decode(std::span<const Tag> tags, RepairPolicy repair) {
  std::vector<LabeledSpan> spans;
  std::optional<LabeledSpan> open;
  auto close = [&](int end) {
    if (open) {
      open->end_token = end;
      spans.push_back(*open);
      open.reset();
    }
  };

  for (std::size_t i = 0; i < tags.size(); ++i) {
    const int pos = static_cast<int>(i);
    const Tag tag = tags[i];
    switch (prefix_of(tag)) {
      case TagPrefix::O:
        close(pos - 1);
        break;
      case TagPrefix::B:
        close(pos - 1);
        open = LabeledSpan{label_of(tag), pos, pos};
        break;
      case TagPrefix::I:
        if (open && open->label == label_of(tag)) break;
        switch (repair) {
          case RepairPolicy::Strict:
            throw DecodeError(i, tag, i == 0 ? Tag::O : tags[i - 1]);
          case RepairPolicy::IAsB:
            close(pos - 1);
            open = LabeledSpan{label_of(tag), pos, pos};
            break;
          case RepairPolicy::IDrop:
            close(pos - 1);
            break;
        }
        break;
    }
  }
  close(static_cast<int>(tags.size()) - 1);
  return spans;
}

bool transition_allowed(std::optional<Tag> prev, Tag next) {
  if (prefix_of(next) != TagPrefix::I) return true;
  if (!prev || *prev == Tag::O) return false;
  return label_of(*prev) == label_of(next);
}

std::optional<std::size_t> first_violation(std::span<const Tag> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    std::optional<Tag> prev;
    if (i > 0) prev = tags[i - 1];
    if (!transition_allowed(prev, tags[i])) return i;
  }
  return std::nullopt;
}

}  // namespace argmine

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "argmine/types.h"

namespace argmine {

// How decode() treats an orphan I-X tag, i.e. one that follows O, the start
// of the sequence, or a tag of a different label.
enum class RepairPolicy {
  Strict,  // throw DecodeError
  IAsB,    // the orphan opens a new span
  IDrop,   // the orphan is read as O
};

std::optional<RepairPolicy> parse_repair(std::string_view text);
std::string_view to_string(RepairPolicy policy);

class DecodeError : public Error {
 public:
  DecodeError(std::size_t index, Tag tag, Tag previous);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Span starts become B-X, the remaining span tokens I-X, everything else O.
// Throws std::invalid_argument on overlapping or out-of-range spans.
TagSequence encode(const Sentence& sentence);
TagSequence encode(std::span<const LabeledSpan> spans, std::size_t length);

std::vector<LabeledSpan> decode(std::span<const Tag> tags, RepairPolicy repair);

// Index of the first I-tag not continuing a span of the same label.
std::optional<std::size_t> first_violation(std::span<const Tag> tags);

inline bool is_well_formed(std::span<const Tag> tags) { return !first_violation(tags); }

// True when `next` may follow `prev` in a well-formed sequence. A missing
// `prev` means sequence start.
bool transition_allowed(std::optional<Tag> prev, Tag next);

}  // namespace argmine

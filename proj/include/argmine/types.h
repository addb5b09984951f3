#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace argmine {

// Base for every error raised on bad input data (as opposed to misuse of
// the API, which throws std::invalid_argument / std::out_of_range).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument role of a span or sentence. NonIRC is the default for any text
// that carries no annotation.
enum class ArgLabel : std::uint8_t { Issue = 0, Reason = 1, Conclusion = 2, NonIRC = 3 };

inline constexpr std::size_t kNumLabels = 4;
inline constexpr std::array<ArgLabel, kNumLabels> kAllLabels = {
    ArgLabel::Issue, ArgLabel::Reason, ArgLabel::Conclusion, ArgLabel::NonIRC};
inline constexpr std::array<ArgLabel, 3> kIrcLabels = {
    ArgLabel::Issue, ArgLabel::Reason, ArgLabel::Conclusion};

std::string_view to_string(ArgLabel label);
std::optional<ArgLabel> parse_label(std::string_view text);

// The seven BIO tags, in the fixed order used by models, reports and
// tie-breaking: O first, then B/I pairs for Issue, Reason, Conclusion.
enum class Tag : std::uint8_t {
  O = 0,
  BIssue = 1,
  IIssue = 2,
  BReason = 3,
  IReason = 4,
  BConclusion = 5,
  IConclusion = 6,
};

inline constexpr std::size_t kNumTags = 7;
inline constexpr std::array<Tag, kNumTags> kAllTags = {
    Tag::O,       Tag::BIssue,      Tag::IIssue,     Tag::BReason,
    Tag::IReason, Tag::BConclusion, Tag::IConclusion};

enum class TagPrefix : std::uint8_t { B, I, O };

constexpr std::size_t index_of(Tag tag) { return static_cast<std::size_t>(tag); }
constexpr std::size_t index_of(ArgLabel label) { return static_cast<std::size_t>(label); }

constexpr TagPrefix prefix_of(Tag tag) {
  if (tag == Tag::O) return TagPrefix::O;
  return (index_of(tag) % 2 == 1) ? TagPrefix::B : TagPrefix::I;
}

// Label family of a tag; O maps to NonIRC.
constexpr ArgLabel label_of(Tag tag) {
  if (tag == Tag::O) return ArgLabel::NonIRC;
  return static_cast<ArgLabel>((index_of(tag) - 1) / 2);
}

constexpr Tag begin_tag(ArgLabel label) {
  if (label == ArgLabel::NonIRC) return Tag::O;
  return static_cast<Tag>(1 + 2 * index_of(label));
}

constexpr Tag inside_tag(ArgLabel label) {
  if (label == ArgLabel::NonIRC) return Tag::O;
  return static_cast<Tag>(2 + 2 * index_of(label));
}

std::string_view to_string(Tag tag);
std::optional<Tag> parse_tag(std::string_view text);

using TagSequence = std::vector<Tag>;

struct Token {
  std::string text;
  int char_start = 0;
  int char_end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

// Inclusive token range [start_token, end_token] carrying an IRC label.
struct LabeledSpan {
  ArgLabel label = ArgLabel::Issue;
  int start_token = 0;
  int end_token = 0;

  int length() const { return end_token - start_token + 1; }
  friend bool operator==(const LabeledSpan&, const LabeledSpan&) = default;
};

// Model output attached to a sentence. Gold annotations live on Sentence
// itself and are never overwritten by prediction.
struct Prediction {
  TagSequence tags;
  std::vector<LabeledSpan> spans;
  std::optional<ArgLabel> label;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<LabeledSpan> spans;
  std::optional<ArgLabel> sentence_label;
  std::optional<Prediction> predicted;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

enum class DocKind : std::uint8_t { Summary, FullText };

std::string_view to_string(DocKind kind);
std::optional<DocKind> parse_kind(std::string_view text);

struct Document {
  std::string doc_id;
  DocKind kind = DocKind::Summary;
  std::vector<Sentence> sentences;

  std::size_t token_count() const;
  friend bool operator==(const Document&, const Document&) = default;
};

using Corpus = std::vector<Document>;

}  // namespace argmine

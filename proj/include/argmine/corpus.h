#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argmine/types.h"

namespace argmine {

// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A document that parsed but violates a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

enum class CorpusFormat { Conll, Records };

std::optional<CorpusFormat> parse_format(std::string_view text);
std::string_view to_string(CorpusFormat format);

// Throws ValidationError naming the document/sentence on the first violated
// invariant: non-empty whitespace-free tokens, ordered offsets, in-bounds
// non-overlapping spans without NonIRC labels.
void validate_sentence(const Sentence& sentence, std::string_view doc_id, std::size_t index);
void validate_document(const Document& doc);
void validate_corpus(const Corpus& docs);

Corpus read_corpus(std::istream& in, CorpusFormat format, const std::string& source = "<stream>");
Corpus read_corpus(const std::filesystem::path& path, CorpusFormat format);

void write_corpus(const Corpus& docs, std::ostream& out, CorpusFormat format);
void write_corpus(const Corpus& docs, const std::filesystem::path& path, CorpusFormat format);

// Whitespace split, then leading/trailing punctuation peeled into separate
// tokens. Offsets index into `text`.
std::vector<Token> tokenize(std::string_view text);

// Sentence boundaries after '.', '?' or '!' followed by whitespace and an
// uppercase letter. Returned views point into `text`.
std::vector<std::string_view> segment_sentences(std::string_view text);

// Raw text to an unannotated document; token offsets are sentence-relative.
Document document_from_text(std::string doc_id, DocKind kind, std::string_view text);

// Re-derive offsets as if the tokens were joined by single spaces. This is
// the layout the CoNLL reader reconstructs.
void assign_canonical_offsets(Sentence& sentence);

struct CorpusSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
};

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

// Whole-document split. Partition sizes are floor(n * ratio) with the
// remainder going to train; any partition with a positive ratio that
// would end up empty borrows one document from train.
CorpusSplit split_corpus(const Corpus& docs, SplitRatios ratios, std::uint64_t seed);

// Documents whose id is in `ids`, in corpus order.
Corpus select_documents(const Corpus& docs, const std::vector<std::string>& ids);

struct LengthRow {
  ArgLabel label = ArgLabel::Issue;
  std::size_t count = 0;
  // Absent when count == 0.
  std::optional<int> min_length;
  std::optional<int> max_length;
  std::optional<double> mean_length;
};

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::array<LengthRow, 3> rows;  // Issue, Reason, Conclusion
};

// Span lengths in tokens for every gold span, per IRC label.
CorpusStats corpus_stats(const Corpus& docs);

// Table with one row per IRC label; means printed to two decimals.
std::string format_stats(const CorpusStats& stats);

}  // namespace argmine

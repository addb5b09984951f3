#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argmine/types.h"

namespace argmine {

inline constexpr std::size_t kDefaultWindow = 1024;

// Where a chunk token came from in its document.
struct TokenPosition {
  std::size_t sentence = 0;
  std::size_t token = 0;

  friend bool operator==(const TokenPosition&, const TokenPosition&) = default;
};

// A contiguous window of a document's tokens. `doc_offset` is the index of
// the first chunk token in the flattened document; `doc_tokens` is the
// document's total token count.
struct Chunk {
  std::string doc_id;
  std::size_t chunk_index = 0;
  std::vector<Token> tokens;
  std::vector<TokenPosition> positions;
  std::optional<TagSequence> tags;
  std::size_t doc_offset = 0;
  std::size_t doc_tokens = 0;

  std::size_t size() const { return tokens.size(); }
};

struct ChunkOptions {
  std::size_t window = kDefaultWindow;
  // End each chunk at the last sentence boundary that fits the window.
  // Sentences longer than the window are hard-split and reported through
  // `on_warning`.
  bool align_sentences = false;
  std::function<void(std::string_view)> on_warning;
};

class ChunkError : public Error {
 public:
  using Error::Error;
};

// Gold tags are attached when `with_gold_tags` is set.
std::vector<Chunk> chunk_document(const Document& doc, const ChunkOptions& options = {},
                                  bool with_gold_tags = false);

// Reassemble per-sentence tag sequences from tagged chunks. Throws
// ChunkError on a gap or overlap, naming the first offending token.
std::vector<TagSequence> unchunk_tags(const Document& doc, const std::vector<Chunk>& chunks);

}  // namespace argmine

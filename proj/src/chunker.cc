#include "argmine/chunker.h"

#include <stdexcept>

#include "argmine/bio.h"

namespace argmine {

namespace {

// Half-open range of flattened token indices.
struct Range {
  std::size_t begin;
  std::size_t end;
};

std::vector<Range> hard_ranges(std::size_t begin, std::size_t end, std::size_t window) {
  std::vector<Range> out;
  for (std::size_t b = begin; b < end; b += window) out.push_back({b, std::min(end, b + window)});
  return out;
}

std::vector<Range> aligned_ranges(const Document& doc, const ChunkOptions& options) {
  std::vector<Range> out;
  std::size_t open_begin = 0;
  std::size_t open_end = 0;  // open chunk is [open_begin, open_end)
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const std::size_t len = doc.sentences[s].tokens.size();
    if (open_end - open_begin + len <= options.window) {
      open_end += len;
    } else if (len <= options.window) {
      if (open_end > open_begin) out.push_back({open_begin, open_end});
      open_begin = cursor;
      open_end = cursor + len;
    } else {
      if (options.on_warning)
        options.on_warning("document '" + doc.doc_id + "' sentence " + std::to_string(s) +
                           " has " + std::to_string(len) + " tokens, more than the window of " +
                           std::to_string(options.window) + "; splitting it");
      if (open_end > open_begin) out.push_back({open_begin, open_end});
      auto pieces = hard_ranges(cursor, cursor + len, options.window);
      // The trailing piece stays open so later sentences can join it.
      open_begin = pieces.back().begin;
      open_end = pieces.back().end;
      pieces.pop_back();
      out.insert(out.end(), pieces.begin(), pieces.end());
    }
    cursor += len;
  }
  if (open_end > open_begin) out.push_back({open_begin, open_end});
  return out;
}

}  // namespace

std::vector<Chunk> chunk_document(const Document& doc, const ChunkOptions& options,
                                  bool with_gold_tags) {
  if (options.window < 2) throw std::invalid_argument("chunk window must be at least 2");

  std::vector<TokenPosition> flat_pos;
  std::vector<const Token*> flat_tok;
  TagSequence flat_tags;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& sentence = doc.sentences[s];
    TagSequence tags;
    if (with_gold_tags) tags = encode(sentence);
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
      flat_pos.push_back({s, t});
      flat_tok.push_back(&sentence.tokens[t]);
      if (with_gold_tags) flat_tags.push_back(tags[t]);
    }
  }

  const auto ranges = options.align_sentences ? aligned_ranges(doc, options)
                                              : hard_ranges(0, flat_pos.size(), options.window);
  std::vector<Chunk> chunks;
  chunks.reserve(ranges.size());
  for (const auto& r : ranges) {
    Chunk c;
    c.doc_id = doc.doc_id;
    c.chunk_index = chunks.size();
    c.doc_offset = r.begin;
    c.doc_tokens = flat_pos.size();
    for (std::size_t i = r.begin; i < r.end; ++i) {
      c.tokens.push_back(*flat_tok[i]);
      c.positions.push_back(flat_pos[i]);
    }
    if (with_gold_tags) c.tags = TagSequence(flat_tags.begin() + r.begin, flat_tags.begin() + r.end);
    chunks.push_back(std::move(c));
  }
  return chunks;
}

std::vector<TagSequence> unchunk_tags(const Document& doc, const std::vector<Chunk>& chunks) {
  std::vector<std::vector<std::optional<Tag>>> slots(doc.sentences.size());
  for (std::size_t s = 0; s < doc.sentences.size(); ++s)
    slots[s].resize(doc.sentences[s].tokens.size());

  for (const auto& c : chunks) {
    if (!c.tags || c.tags->size() != c.positions.size())
      throw ChunkError("chunk " + std::to_string(c.chunk_index) + " of document '" + doc.doc_id +
                       "' has no complete tag sequence");
    for (std::size_t i = 0; i < c.positions.size(); ++i) {
      const auto [s, t] = c.positions[i];
      if (s >= slots.size() || t >= slots[s].size())
        throw ChunkError("chunk " + std::to_string(c.chunk_index) + " points outside document '" +
                         doc.doc_id + "'");
      if (slots[s][t])
        throw ChunkError("document '" + doc.doc_id + "' sentence " + std::to_string(s) +
                         " token " + std::to_string(t) + " is covered by more than one chunk");
      slots[s][t] = (*c.tags)[i];
    }
  }

  std::vector<TagSequence> out(slots.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    out[s].reserve(slots[s].size());
    for (std::size_t t = 0; t < slots[s].size(); ++t) {
      if (!slots[s][t])
        throw ChunkError("document '" + doc.doc_id + "' sentence " + std::to_string(s) +
                         " token " + std::to_string(t) + " is not covered by any chunk");
      out[s].push_back(*slots[s][t]);
    }
  }
  return out;
}

}  // namespace argmine

#include "argmine/features.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace argmine {

void FeatureTemplateConfig::validate() const {
  if (!word_lower) throw std::invalid_argument("the word_lower template cannot be disabled");
  if (affix_length < 1) throw std::invalid_argument("affix length must be at least 1");
  if (context_window < 0) throw std::invalid_argument("context window must be non-negative");
}

std::string to_lower(std::string_view word) {
  std::string out(word);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string word_shape(std::string_view word) {
  std::string shape;
  shape.reserve(word.size());
  for (unsigned char c : word) {
    if (std::isupper(c))
      shape.push_back('X');
    else if (std::islower(c))
      shape.push_back('x');
    else if (std::isdigit(c))
      shape.push_back('d');
    else if (std::ispunct(c))
      shape.push_back(static_cast<char>(c));
    else
      shape.push_back('o');
  }
  return shape;
}

bool is_all_caps(std::string_view word) {
  bool letter = false;
  for (unsigned char c : word) {
    if (std::islower(c)) return false;
    if (std::isupper(c)) letter = true;
  }
  return letter;
}

namespace {

std::string context_name(int offset) {
  // prev_word, prev2_word, ..., next_word, next2_word, ...
  const int d = offset < 0 ? -offset : offset;
  std::string name = offset < 0 ? "prev" : "next";
  if (d > 1) name += std::to_string(d);
  return name + "_word=";
}

}  // namespace

FeatureVector extract(const Chunk& chunk, std::size_t position, const FeatureTemplateConfig& config) {
  if (position >= chunk.tokens.size())
    throw std::out_of_range("feature position " + std::to_string(position) +
                            " outside chunk of " + std::to_string(chunk.tokens.size()));
  const std::string& word = chunk.tokens[position].text;
  const std::string lower = to_lower(word);
  FeatureVector f;
  f.reserve(24);

  if (config.bias) f.emplace_back("bias");
  f.push_back("word_lower=" + lower);
  if (config.word_case) f.push_back("word=" + word);
  if (config.affixes) {
    const auto limit = std::min<std::size_t>(static_cast<std::size_t>(config.affix_length), lower.size());
    for (std::size_t k = 1; k <= limit; ++k) {
      f.push_back("prefix" + std::to_string(k) + "=" + lower.substr(0, k));
      f.push_back("suffix" + std::to_string(k) + "=" + lower.substr(lower.size() - k));
    }
  }
  if (config.shape) f.push_back("shape=" + word_shape(word));
  if (config.all_caps && is_all_caps(word)) f.emplace_back("all_caps=true");
  if (config.sentence_initial && chunk.positions.size() > position &&
      chunk.positions[position].token == 0)
    f.emplace_back("sent_initial=true");
  if (config.context) {
    const auto n = static_cast<long>(chunk.tokens.size());
    for (int d = 1; d <= config.context_window; ++d) {
      for (int sign : {-1, 1}) {
        const long j = static_cast<long>(position) + sign * d;
        std::string value;
        if (j < 0)
          value = "<BOS>";
        else if (j >= n)
          value = "<EOS>";
        else
          value = to_lower(chunk.tokens[static_cast<std::size_t>(j)].text);
        f.push_back(context_name(sign * d) + value);
      }
    }
  }
  if (config.doc_position && chunk.doc_tokens > 0) {
    const std::size_t global = chunk.doc_offset + position;
    const std::size_t bucket = std::min<std::size_t>(9, global * 10 / chunk.doc_tokens);
    f.push_back("doc_pos=" + std::to_string(bucket));
  }
  return f;
}

std::uint32_t FeatureDictionary::add(const std::string& name) {
  const auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

std::optional<std::uint32_t> FeatureDictionary::find(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

IndexedChunk index_chunk(const Chunk& chunk, const FeatureTemplateConfig& config,
                         FeatureDictionary& dict, bool grow) {
  if (!grow) return index_chunk(chunk, config, static_cast<const FeatureDictionary&>(dict));
  IndexedChunk out(chunk.size());
  for (std::size_t i = 0; i < chunk.size(); ++i)
    for (const auto& name : extract(chunk, i, config)) out[i].push_back(dict.add(name));
  return out;
}

IndexedChunk index_chunk(const Chunk& chunk, const FeatureTemplateConfig& config,
                         const FeatureDictionary& dict) {
  IndexedChunk out(chunk.size());
  for (std::size_t i = 0; i < chunk.size(); ++i)
    for (const auto& name : extract(chunk, i, config))
      if (auto id = dict.find(name)) out[i].push_back(*id);
  return out;
}

}  // namespace argmine

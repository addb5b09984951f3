#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "argmine/chunker.h"

namespace argmine {

// Which template families the extractor emits.
struct FeatureTemplateConfig {
  bool word_lower = true;  // must stay enabled
  bool word_case = true;
  bool affixes = true;
  bool shape = true;
  bool all_caps = true;
  bool sentence_initial = true;
  bool context = true;
  bool doc_position = true;
  bool bias = true;
  int affix_length = 3;
  int context_window = 2;

  void validate() const;
  friend bool operator==(const FeatureTemplateConfig&, const FeatureTemplateConfig&) = default;
};

// Indicator feature names; every present feature has value 1.
using FeatureVector = std::vector<std::string>;

// Features of chunk token `position`. Context never crosses the chunk edge;
// positions beyond it yield the <BOS>/<EOS> boundary markers.
FeatureVector extract(const Chunk& chunk, std::size_t position, const FeatureTemplateConfig& config);

std::string word_shape(std::string_view word);
bool is_all_caps(std::string_view word);
std::string to_lower(std::string_view word);

// Feature name -> dense index. Built on training data and then frozen;
// lookups of unseen names return nothing.
class FeatureDictionary {
 public:
  std::uint32_t add(const std::string& name);
  std::optional<std::uint32_t> find(const std::string& name) const;
  const std::string& name(std::uint32_t index) const { return names_[index]; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Per-token feature indices of a chunk, ready for scoring.
using IndexedChunk = std::vector<std::vector<std::uint32_t>>;

// Extract and index a chunk. With `grow` set unseen names are added to the
// dictionary; otherwise they are dropped.
IndexedChunk index_chunk(const Chunk& chunk, const FeatureTemplateConfig& config,
                         FeatureDictionary& dict, bool grow);
IndexedChunk index_chunk(const Chunk& chunk, const FeatureTemplateConfig& config,
                         const FeatureDictionary& dict);

}  // namespace argmine

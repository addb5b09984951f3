#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "argmine/types.h"

namespace argmine {

// Generator settings. Span lengths count tokens, including the closing
// period of the sentence; every labeled sentence is one whole-sentence span.
struct SynthConfig {
  int n_docs = 100;
  std::uint64_t seed = 0;
  int sentences_min = 6;
  int sentences_max = 12;
  // Per-sentence label probabilities, indexed Issue, Reason, Conclusion, NonIRC.
  std::array<double, kNumLabels> proportions{0.15, 0.25, 0.15, 0.45};
  // Allowed lengths per label (Issue, Reason, Conclusion) and for filler
  // sentences. Each value is used equally often: lengths are dealt from
  // shuffled copies of the list.
  std::array<std::vector<int>, 3> span_lengths;
  std::vector<int> filler_lengths;
  // Cue lexicons. Conclusion cues open the sentence; Issue and Reason cues
  // appear at a random position.
  std::array<std::vector<std::string>, 3> cues{
      {{"whether"}, {"because"}, {"HELD"}}};
  // Fraction of cue tokens replaced by general vocabulary.
  double noise = 0.0;
  // Fraction of labeled sentences generated as a Conclusion clause opened by
  // `mixed_cue` followed by a Reason clause in the same sentence.
  double mixed_label_rate = 0.0;
  std::string mixed_cue = "Allowing";
  // Fraction of content tokens in labeled sentences drawn from the general
  // vocabulary instead of the label's lexicon.
  double shared_vocab_rate = 0.3;
  // Without pairs, this fraction of cases is emitted as a full text only.
  double full_text_fraction = 0.0;
  // Emit both the summary and its full text for every case.
  bool emit_pairs = false;
  // Full texts: per-token dropout of content words, and up to this many
  // filler sentences before each summary sentence.
  double paraphrase_rate = 0.15;
  int filler_between = 2;

  SynthConfig();
  // Throws std::invalid_argument describing the first bad setting.
  void validate() const;
};

// Reads "key = value" lines; '#' starts a comment. Lists are comma
// separated; length lists also accept "lo-hi" ranges. Unknown keys and bad
// values throw ParseError with the line number.
SynthConfig parse_synth_config(std::istream& in, const std::string& source = "<config>");
SynthConfig read_synth_config(const std::filesystem::path& path);
// Inverse of parse_synth_config.
std::string format_synth_config(const SynthConfig& config);

// Document ids are case-NNNN-summary and case-NNNN-full. Deterministic for a
// fixed config.
Corpus generate(const SynthConfig& config);

}  // namespace argmine

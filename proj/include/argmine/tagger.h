#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argmine/bio.h"
#include "argmine/chunker.h"
#include "argmine/features.h"
#include "argmine/linear_chain.h"
#include "argmine/types.h"

namespace argmine {

enum class Algorithm { Perceptron, Crf };

std::optional<Algorithm> parse_algorithm(std::string_view text);
std::string_view to_string(Algorithm algo);

enum class ClassWeighting {
  Uniform,           // every tag weighs 1
  InverseFrequency,  // N_total / (7 * N_t) on the training tags
  Explicit,          // TrainConfig::class_weights as given
};

std::optional<ClassWeighting> parse_weighting(std::string_view text);
std::string_view to_string(ClassWeighting weighting);

using ClassWeights = std::array<double, kNumTags>;

struct TrainConfig {
  Algorithm algorithm = Algorithm::Perceptron;
  int epochs = 10;
  double learning_rate = 0.1;  // crf only
  double l2 = 1e-4;            // crf only
  std::size_t batch_size = 8;  // crf only
  ClassWeighting weighting = ClassWeighting::InverseFrequency;
  // Resolved per-tag weights; on input only read for Explicit.
  ClassWeights class_weights{1, 1, 1, 1, 1, 1, 1};
  std::uint64_t seed = 0;
  bool constrain_transitions = true;

  void validate() const;
};

// A trained first-order model over the seven BIO tags (kAllTags order).
struct TaggerModel {
  FeatureTemplateConfig templates;
  TrainConfig config;
  FeatureDictionary features;
  std::vector<double> emission;  // features.size() * kNumTags, row-major (feature, tag)
  std::array<double, kNumTags * kNumTags> transition{};  // (prev, next)
  std::array<double, kNumTags> start{};
  std::array<double, kNumTags> stop{};
  std::size_t train_chunks = 0;

  std::size_t feature_count() const { return features.size(); }
  bool all_finite() const;
};

// A chunk prepared for training: frozen feature indices and gold tags.
struct TrainingChunk {
  std::string id;
  IndexedChunk features;
  TagSequence gold;
};

ChainPotentials potentials(const TaggerModel& model, const IndexedChunk& chunk);

// Mask that admits only well-formed BIO sequences.
const TransitionMask& bio_transition_mask();

double score_path(const TaggerModel& model, const Chunk& chunk, std::span<const Tag> tags);
TagSequence viterbi(const TaggerModel& model, const Chunk& chunk, bool constrain);
double log_partition(const TaggerModel& model, const Chunk& chunk);

ClassWeights inverse_frequency_weights(std::span<const TrainingChunk> chunks);

// Builds the feature dictionary from `chunks` (which must carry
// well-formed gold tags) and returns the model shell with zero weights.
TaggerModel prepare_model(std::span<const Chunk> chunks, const FeatureTemplateConfig& templates,
                          const TrainConfig& config, std::vector<TrainingChunk>& prepared);

TaggerModel train_perceptron(std::span<const Chunk> chunks, const TrainConfig& config,
                             const FeatureTemplateConfig& templates = {});
TaggerModel train_crf(std::span<const Chunk> chunks, const TrainConfig& config,
                      const FeatureTemplateConfig& templates = {});

// Chunks the documents with gold tags and dispatches on config.algorithm.
TaggerModel train(const Corpus& docs, const TrainConfig& config,
                  const FeatureTemplateConfig& templates = {}, const ChunkOptions& chunking = {});

// Flat parameter view used by the CRF objective: emission, transition,
// start, stop in that order.
std::vector<double> flatten_parameters(const TaggerModel& model);
void assign_parameters(TaggerModel& model, std::span<const double> params);

// Class-weighted NLL of one chunk (see weighted_nll) and, optionally, its
// gradient accumulated into `grad` (flat parameter layout) times `scale`.
double chunk_nll(const TaggerModel& model, const TrainingChunk& chunk, const ClassWeights& weights,
                 std::vector<double>* grad, double scale = 1.0);

// J(w) = (1/N) sum_c NLL_c(w) + (l2/2) ||w||^2 over the given chunks.
double crf_objective(const TaggerModel& model, std::span<const TrainingChunk> chunks,
                     const ClassWeights& weights, double l2, std::vector<double>* grad);

struct PredictOptions {
  ChunkOptions chunking;
  RepairPolicy repair = RepairPolicy::IAsB;
  bool constrain = true;
};

// Chunk, decode every chunk, reassemble, and repair into spans. The result
// is a copy of `doc` with Sentence::predicted filled in.
Document predict(const TaggerModel& model, const Document& doc, const PredictOptions& options = {});
Corpus predict(const TaggerModel& model, const Corpus& docs, const PredictOptions& options,
               unsigned jobs);

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const TaggerModel& model, std::ostream& out);
void save_model(const TaggerModel& model, const std::filesystem::path& path);
TaggerModel load_model(std::istream& in);
TaggerModel load_model(const std::filesystem::path& path);

}  // namespace argmine

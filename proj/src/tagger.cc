#include "argmine/tagger.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "argmine/parallel.h"
#include "argmine/random.h"

namespace argmine {

using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t K = kNumTags;

std::vector<std::size_t> to_indices(std::span<const Tag> tags) {
  std::vector<std::size_t> out(tags.size());
  for (std::size_t i = 0; i < tags.size(); ++i) out[i] = index_of(tags[i]);
  return out;
}

TagSequence to_tags(std::span<const std::size_t> path) {
  TagSequence out(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) out[i] = kAllTags[path[i]];
  return out;
}

TransitionMask make_bio_mask() {
  TransitionMask m;
  m.tags = K;
  m.transition.assign(K * K, false);
  m.start.assign(K, false);
  for (std::size_t next = 0; next < K; ++next) {
    m.start[next] = transition_allowed(std::nullopt, kAllTags[next]);
    for (std::size_t prev = 0; prev < K; ++prev)
      m.transition[prev * K + next] = transition_allowed(kAllTags[prev], kAllTags[next]);
  }
  return m;
}

}  // namespace

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  if (text == "perceptron") return Algorithm::Perceptron;
  if (text == "crf") return Algorithm::Crf;
  return std::nullopt;
}

std::string_view to_string(Algorithm algo) {
  return algo == Algorithm::Perceptron ? "perceptron" : "crf";
}

std::optional<ClassWeighting> parse_weighting(std::string_view text) {
  if (text == "uniform") return ClassWeighting::Uniform;
  if (text == "inverse") return ClassWeighting::InverseFrequency;
  if (text == "explicit") return ClassWeighting::Explicit;
  return std::nullopt;
}

std::string_view to_string(ClassWeighting weighting) {
  switch (weighting) {
    case ClassWeighting::Uniform: return "uniform";
    case ClassWeighting::InverseFrequency: return "inverse";
    case ClassWeighting::Explicit: return "explicit";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning rate must be positive");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw std::invalid_argument("l2 must be non-negative");
  if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  for (double w : class_weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("class weights must be positive and finite");
}

bool TaggerModel::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(emission.begin(), emission.end(), finite) &&
         std::all_of(transition.begin(), transition.end(), finite) &&
         std::all_of(start.begin(), start.end(), finite) &&
         std::all_of(stop.begin(), stop.end(), finite);
}

const TransitionMask& bio_transition_mask() {
  static const TransitionMask mask = make_bio_mask();
  return mask;
}

ChainPotentials potentials(const TaggerModel& model, const IndexedChunk& chunk) {
  ChainPotentials p(chunk.size(), K);
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    for (auto f : chunk[i]) {
      const double* row = &model.emission[static_cast<std::size_t>(f) * K];
      for (std::size_t y = 0; y < K; ++y) p.e(i, y) += row[y];
    }
  }
  std::copy(model.transition.begin(), model.transition.end(), p.transition.begin());
  std::copy(model.start.begin(), model.start.end(), p.start.begin());
  std::copy(model.stop.begin(), model.stop.end(), p.stop.begin());
  return p;
}

double score_path(const TaggerModel& model, const Chunk& chunk, std::span<const Tag> tags) {
  if (tags.size() != chunk.size())
    throw std::invalid_argument("tag sequence length does not match chunk length");
  const auto p = potentials(model, index_chunk(chunk, model.templates, model.features));
  const auto path = to_indices(tags);
  return score_path(p, path);
}

TagSequence viterbi(const TaggerModel& model, const Chunk& chunk, bool constrain) {
  if (chunk.size() == 0) throw std::invalid_argument("cannot decode an empty chunk");
  const auto p = potentials(model, index_chunk(chunk, model.templates, model.features));
  return to_tags(viterbi(p, constrain ? &bio_transition_mask() : nullptr));
}

double log_partition(const TaggerModel& model, const Chunk& chunk) {
  return log_partition(potentials(model, index_chunk(chunk, model.templates, model.features)));
}

ClassWeights inverse_frequency_weights(std::span<const TrainingChunk> chunks) {
  std::array<double, K> counts{};
  double total = 0;
  for (const auto& c : chunks)
    for (auto t : c.gold) {
      counts[index_of(t)] += 1;
      total += 1;
    }
  ClassWeights w{};
  for (std::size_t y = 0; y < K; ++y)
    w[y] = counts[y] > 0 ? total / (static_cast<double>(K) * counts[y]) : 1.0;
  return w;
}

TaggerModel prepare_model(std::span<const Chunk> chunks, const FeatureTemplateConfig& templates,
                          const TrainConfig& config, std::vector<TrainingChunk>& prepared) {
  templates.validate();
  config.validate();
  if (chunks.empty()) throw Error("training corpus is empty");

  TaggerModel model;
  model.templates = templates;
  model.config = config;
  prepared.clear();
  prepared.reserve(chunks.size());
  for (const auto& c : chunks) {
    const std::string id = c.doc_id + "#" + std::to_string(c.chunk_index);
    if (!c.tags || c.tags->size() != c.size())
      throw Error("training chunk " + id + " has no gold tags");
    // A chunk may open inside a span, so only interior transitions are checked.
    for (std::size_t i = 1; i < c.tags->size(); ++i)
      if (!transition_allowed((*c.tags)[i - 1], (*c.tags)[i]))
        throw Error("training chunk " + id + " has ill-formed gold tags at token " + std::to_string(i));
    if (c.size() == 0) continue;
    prepared.push_back({id, index_chunk(c, templates, model.features, true), *c.tags});
  }
  if (prepared.empty()) throw Error("training corpus has no tokens");

  switch (config.weighting) {
    case ClassWeighting::Uniform: model.config.class_weights.fill(1.0); break;
    case ClassWeighting::InverseFrequency:
      model.config.class_weights = inverse_frequency_weights(prepared);
      break;
    case ClassWeighting::Explicit: break;
  }
  model.emission.assign(model.features.size() * K, 0.0);
  model.train_chunks = prepared.size();
  return model;
}

TaggerModel train_perceptron(std::span<const Chunk> chunks, const TrainConfig& config,
                             const FeatureTemplateConfig& templates) {
  std::vector<TrainingChunk> data;
  TaggerModel model = prepare_model(chunks, templates, config, data);
  model.config.algorithm = Algorithm::Perceptron;
  const auto& cw = model.config.class_weights;

  // Averaging via the w - u/c identity: u accumulates c * delta.
  std::vector<double> u_emission(model.emission.size(), 0.0);
  std::array<double, K * K> u_transition{};
  std::array<double, K> u_start{};
  std::array<double, K> u_stop{};
  double c = 1.0;
  auto bump = [&c](double& w, double& u, double delta) {
    w += delta;
    u += c * delta;
  };

  Rng rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (auto idx : order) {
      const auto& tc = data[idx];
      const auto gold = to_indices(tc.gold);
      const auto pred = viterbi(potentials(model, tc.features));
      if (pred != gold) {
        const std::size_t n = gold.size();
        for (std::size_t i = 0; i < n; ++i) {
          const double w = cw[gold[i]];
          if (gold[i] != pred[i]) {
            for (auto f : tc.features[i]) {
              const std::size_t row = static_cast<std::size_t>(f) * K;
              bump(model.emission[row + gold[i]], u_emission[row + gold[i]], w);
              bump(model.emission[row + pred[i]], u_emission[row + pred[i]], -w);
            }
          }
          if (i == 0) {
            bump(model.start[gold[0]], u_start[gold[0]], w);
            bump(model.start[pred[0]], u_start[pred[0]], -w);
          } else {
            const std::size_t g = gold[i - 1] * K + gold[i];
            const std::size_t p = pred[i - 1] * K + pred[i];
            bump(model.transition[g], u_transition[g], w);
            bump(model.transition[p], u_transition[p], -w);
          }
        }
        const double w = cw[gold[n - 1]];
        bump(model.stop[gold[n - 1]], u_stop[gold[n - 1]], w);
        bump(model.stop[pred[n - 1]], u_stop[pred[n - 1]], -w);
      }
      c += 1.0;
    }
  }

  for (std::size_t j = 0; j < model.emission.size(); ++j) model.emission[j] -= u_emission[j] / c;
  for (std::size_t j = 0; j < K * K; ++j) model.transition[j] -= u_transition[j] / c;
  for (std::size_t j = 0; j < K; ++j) {
    model.start[j] -= u_start[j] / c;
    model.stop[j] -= u_stop[j] / c;
  }
  return model;
}

std::vector<double> flatten_parameters(const TaggerModel& model) {
  std::vector<double> out;
  out.reserve(model.emission.size() + K * K + 2 * K);
  out.insert(out.end(), model.emission.begin(), model.emission.end());
  out.insert(out.end(), model.transition.begin(), model.transition.end());
  out.insert(out.end(), model.start.begin(), model.start.end());
  out.insert(out.end(), model.stop.begin(), model.stop.end());
  return out;
}

void assign_parameters(TaggerModel& model, std::span<const double> params) {
  const std::size_t e = model.emission.size();
  if (params.size() != e + K * K + 2 * K)
    throw std::invalid_argument("parameter vector has the wrong size");
  std::copy(params.begin(), params.begin() + e, model.emission.begin());
  std::copy(params.begin() + e, params.begin() + e + K * K, model.transition.begin());
  std::copy(params.begin() + e + K * K, params.begin() + e + K * K + K, model.start.begin());
  std::copy(params.begin() + e + K * K + K, params.end(), model.stop.begin());
}

double chunk_nll(const TaggerModel& model, const TrainingChunk& chunk, const ClassWeights& weights,
                 std::vector<double>* grad, double scale) {
  const auto p = potentials(model, chunk.features);
  const auto gold = to_indices(chunk.gold);
  std::vector<double> token_weights(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) token_weights[i] = weights[gold[i]];

  PotentialGradient pg;
  const double loss = weighted_nll(p, gold, token_weights, grad ? &pg : nullptr);
  if (!grad) return loss;

  const std::size_t e = model.emission.size();
  if (grad->size() != e + K * K + 2 * K) grad->assign(e + K * K + 2 * K, 0.0);
  auto& g = *grad;
  for (std::size_t i = 0; i < chunk.features.size(); ++i)
    for (auto f : chunk.features[i])
      for (std::size_t y = 0; y < K; ++y)
        g[static_cast<std::size_t>(f) * K + y] += scale * pg.emission[i * K + y];
  for (std::size_t j = 0; j < K * K; ++j) g[e + j] += scale * pg.transition[j];
  for (std::size_t j = 0; j < K; ++j) {
    g[e + K * K + j] += scale * pg.start[j];
    g[e + K * K + K + j] += scale * pg.stop[j];
  }
  return loss;
}

double crf_objective(const TaggerModel& model, std::span<const TrainingChunk> chunks,
                     const ClassWeights& weights, double l2, std::vector<double>* grad) {
  if (chunks.empty()) throw std::invalid_argument("objective over zero chunks");
  const double scale = 1.0 / static_cast<double>(chunks.size());
  const auto params = flatten_parameters(model);
  if (grad) grad->assign(params.size(), 0.0);
  double loss = 0.0;
  for (const auto& c : chunks) loss += scale * chunk_nll(model, c, weights, grad, scale);
  double norm = 0.0;
  for (std::size_t j = 0; j < params.size(); ++j) {
    norm += params[j] * params[j];
    if (grad) (*grad)[j] += l2 * params[j];
  }
  return loss + 0.5 * l2 * norm;
}

TaggerModel train_crf(std::span<const Chunk> chunks, const TrainConfig& config,
                      const FeatureTemplateConfig& templates) {
  std::vector<TrainingChunk> data;
  TaggerModel model = prepare_model(chunks, templates, config, data);
  model.config.algorithm = Algorithm::Crf;
  const auto weights = model.config.class_weights;

  Rng rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  auto params = flatten_parameters(model);
  std::vector<double> grad(params.size(), 0.0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const double scale = 1.0 / static_cast<double>(e - b);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = b; k < e; ++k) {
        const auto& tc = data[order[k]];
        const double loss = chunk_nll(model, tc, weights, &grad, scale);
        if (!std::isfinite(loss))
          throw Error("non-finite CRF loss on chunk " + tc.id + " in epoch " +
                      std::to_string(epoch + 1));
      }
      for (std::size_t j = 0; j < params.size(); ++j)
        params[j] -= config.learning_rate * (grad[j] + config.l2 * params[j]);
      assign_parameters(model, params);
    }
  }
  if (!model.all_finite()) throw Error("CRF training produced non-finite weights");
  return model;
}

TaggerModel train(const Corpus& docs, const TrainConfig& config,
                  const FeatureTemplateConfig& templates, const ChunkOptions& chunking) {
  std::vector<Chunk> chunks;
  for (const auto& doc : docs) {
    auto cs = chunk_document(doc, chunking, true);
    for (auto& c : cs)
      if (c.size() > 0) chunks.push_back(std::move(c));
  }
  return config.algorithm == Algorithm::Crf ? train_crf(chunks, config, templates)
                                            : train_perceptron(chunks, config, templates);
}

// --- Prediction ------------------------------------------------------------

Document predict(const TaggerModel& model, const Document& doc, const PredictOptions& options) {
  Document out = doc;
  auto chunks = chunk_document(doc, options.chunking, false);
  for (auto& c : chunks) c.tags = viterbi(model, c, options.constrain);
  const auto tags = unchunk_tags(doc, chunks);
  for (std::size_t s = 0; s < out.sentences.size(); ++s) {
    Prediction p;
    p.tags = tags[s];
    p.spans = decode(p.tags, options.repair);
    out.sentences[s].predicted = std::move(p);
  }
  return out;
}

Corpus predict(const TaggerModel& model, const Corpus& docs, const PredictOptions& options,
               unsigned jobs) {
  Corpus out(docs.size());
  parallel_for(docs.size(), jobs, [&](std::size_t i) { out[i] = predict(model, docs[i], options); });
  return out;
}

// --- Model file ------------------------------------------------------------
//
// Layout (all integers little-endian, doubles IEEE-754 binary64 little-endian):
//   magic      8 bytes  "ARGMTAG\0"
//   version    u32
//   header     u64 byte length, then UTF-8 JSON (tag order, templates, config)
//   features   u32 count, then per feature: u32 byte length + bytes
//   weights    f64 emission[count x 7], transition[7 x 7], start[7], stop[7]

namespace {

constexpr char kMagic[8] = {'A', 'R', 'G', 'M', 'T', 'A', 'G', '\0'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void read_exact(std::istream& in, char* buf, std::size_t n) {
  in.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw ModelFormatError("truncated model file");
}

std::uint64_t get_uint(std::istream& in, int bytes) {
  char b[8];
  read_exact(in, b, static_cast<std::size_t>(bytes));
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_uint(in, 8)); }

json templates_to_json(const FeatureTemplateConfig& t) {
  return {{"word_lower", t.word_lower}, {"word_case", t.word_case},
          {"affixes", t.affixes},       {"shape", t.shape},
          {"all_caps", t.all_caps},     {"sentence_initial", t.sentence_initial},
          {"context", t.context},       {"doc_position", t.doc_position},
          {"bias", t.bias},             {"affix_length", t.affix_length},
          {"context_window", t.context_window}};
}

FeatureTemplateConfig templates_from_json(const json& j) {
  FeatureTemplateConfig t;
  t.word_lower = j.at("word_lower").get<bool>();
  t.word_case = j.at("word_case").get<bool>();
  t.affixes = j.at("affixes").get<bool>();
  t.shape = j.at("shape").get<bool>();
  t.all_caps = j.at("all_caps").get<bool>();
  t.sentence_initial = j.at("sentence_initial").get<bool>();
  t.context = j.at("context").get<bool>();
  t.doc_position = j.at("doc_position").get<bool>();
  t.bias = j.at("bias").get<bool>();
  t.affix_length = j.at("affix_length").get<int>();
  t.context_window = j.at("context_window").get<int>();
  return t;
}

json config_to_json(const TrainConfig& c) {
  json weights = json::object();
  for (auto tag : kAllTags) weights[std::string(to_string(tag))] = c.class_weights[index_of(tag)];
  return {{"algorithm", to_string(c.algorithm)},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"l2", c.l2},
          {"batch_size", c.batch_size},
          {"weighting", to_string(c.weighting)},
          {"class_weights", weights},
          {"seed", c.seed},
          {"constrain_transitions", c.constrain_transitions}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  const auto algo = parse_algorithm(j.at("algorithm").get<std::string>());
  const auto weighting = parse_weighting(j.at("weighting").get<std::string>());
  if (!algo || !weighting) throw ModelFormatError("unknown algorithm or weighting in model header");
  c.algorithm = *algo;
  c.weighting = *weighting;
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.l2 = j.at("l2").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  for (auto tag : kAllTags)
    c.class_weights[index_of(tag)] = j.at("class_weights").at(std::string(to_string(tag))).get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.constrain_transitions = j.at("constrain_transitions").get<bool>();
  return c;
}

}  // namespace

void save_model(const TaggerModel& model, std::ostream& out) {
  if (!model.all_finite()) throw Error("refusing to save a model with non-finite weights");
  json tags = json::array();
  for (auto t : kAllTags) tags.push_back(to_string(t));
  const json header = {{"tags", tags},
                       {"templates", templates_to_json(model.templates)},
                       {"train_config", config_to_json(model.config)},
                       {"train_chunks", model.train_chunks},
                       {"features", model.features.size()}};
  const std::string text = header.dump();

  out.write(kMagic, sizeof kMagic);
  put_u32(out, kModelFormatVersion);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_u32(out, static_cast<std::uint32_t>(model.features.size()));
  for (const auto& name : model.features.names()) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (double w : model.emission) put_f64(out, w);
  for (double w : model.transition) put_f64(out, w);
  for (double w : model.start) put_f64(out, w);
  for (double w : model.stop) put_f64(out, w);
}

void save_model(const TaggerModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  save_model(model, out);
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

TaggerModel load_model(std::istream& in) {
  char magic[8];
  read_exact(in, magic, 8);
  if (!std::equal(magic, magic + 8, kMagic)) throw ModelFormatError("not a tagger model file");
  const auto version = get_uint(in, 4);
  if (version != kModelFormatVersion)
    throw ModelFormatError("unsupported model format version " + std::to_string(version));
  const auto header_len = get_uint(in, 8);
  if (header_len > (1u << 24)) throw ModelFormatError("model header too large");
  std::string text(header_len, '\0');
  read_exact(in, text.data(), text.size());

  TaggerModel model;
  std::uint64_t declared_features = 0;
  try {
    const auto header = json::parse(text);
    const auto& tags = header.at("tags");
    if (tags.size() != K) throw ModelFormatError("model tag inventory has the wrong size");
    for (std::size_t y = 0; y < K; ++y)
      if (tags[y].get<std::string>() != to_string(kAllTags[y]))
        throw ModelFormatError("model tag order differs from this build");
    model.templates = templates_from_json(header.at("templates"));
    model.config = config_from_json(header.at("train_config"));
    model.train_chunks = header.at("train_chunks").get<std::size_t>();
    declared_features = header.at("features").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("bad model header: ") + e.what());
  }

  const auto count = get_uint(in, 4);
  if (count != declared_features) throw ModelFormatError("feature count mismatch");
  for (std::uint64_t f = 0; f < count; ++f) {
    const auto len = get_uint(in, 4);
    std::string name(len, '\0');
    read_exact(in, name.data(), name.size());
    if (model.features.add(name) != f) throw ModelFormatError("duplicate feature name in model");
  }
  model.emission.resize(count * K);
  for (auto& w : model.emission) w = get_f64(in);
  for (auto& w : model.transition) w = get_f64(in);
  for (auto& w : model.start) w = get_f64(in);
  for (auto& w : model.stop) w = get_f64(in);
  if (!model.all_finite()) throw ModelFormatError("model contains non-finite weights");
  return model;
}

TaggerModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return load_model(in);
}

}  // namespace argmine

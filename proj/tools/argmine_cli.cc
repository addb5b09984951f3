// argmine: corpus conversion, synthetic data, tagger training, prediction,
// evaluation, alignment and indicator reports.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "argmine/aggregate.h"
#include "argmine/align.h"
#include "argmine/corpus.h"
#include "argmine/evaluate.h"
#include "argmine/synth.h"
#include "argmine/tagger.h"

namespace fs = std::filesystem;
using namespace argmine;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flag values that fail a library precondition are usage errors, not data errors.
template <typename F>
void check_usage(F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

CorpusFormat resolve_format(const std::string& flag, const fs::path& path) {
  if (flag != "auto") {
    auto f = parse_format(flag);
    if (!f) throw UsageError("unknown format '" + flag + "' (expected conll or records)");
    return *f;
  }
  const auto ext = path.extension().string();
  if (ext == ".conll" || ext == ".tsv") return CorpusFormat::Conll;
  if (ext == ".jsonl" || ext == ".json") return CorpusFormat::Records;
  throw UsageError("cannot infer the format of '" + path.string() +
                   "'; use .conll or .jsonl or pass a format flag");
}

Corpus load(const fs::path& path, const std::string& format) {
  const auto f = resolve_format(format, path);
  if (!fs::exists(path)) throw Error("input file '" + path.string() + "' does not exist");
  return read_corpus(path, f);
}

void store(const Corpus& docs, const fs::path& path, const std::string& format) {
  write_corpus(docs, path, resolve_format(format, path));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::vector<std::string> read_ids(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open id list '" + path.string() + "'");
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ids.push_back(line);
  return ids;
}

ChunkOptions chunk_options(std::size_t window, bool align) {
  ChunkOptions o;
  o.window = window;
  o.align_sentences = align;
  o.on_warning = [](std::string_view msg) { std::cerr << "argmine: warning: " << msg << '\n'; };
  return o;
}

TieRule tie_rule_flag(const std::string& text) {
  auto r = parse_tie_rule(text);
  if (!r) throw UsageError("unknown tie rule '" + text + "'");
  return *r;
}

struct Options {
  // shared
  std::string format = "auto";
  std::string out_format = "auto";
  std::string input, output;
  std::uint64_t seed = 0;
  std::size_t window = kDefaultWindow;
  bool align_sentences = false;
  unsigned jobs = 1;
  std::string tie_rule = "earliest";

  // convert
  std::string from = "auto";
  std::string kind = "summary";

  // split
  std::string out_dir;
  std::vector<double> ratios{0.8, 0.1, 0.1};
  bool write_corpora = false;

  // synth
  std::string config;
  std::optional<int> n_docs;
  std::optional<double> noise;
  std::optional<double> mixed_rate;
  bool emit_pairs = false;
  bool print_config = false;

  // train / predict
  std::string ids;
  std::string model;
  std::string algo = "perceptron";
  int epochs = 10;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::size_t batch_size = 8;
  std::string class_weights = "inverse";
  std::string repair = "i_as_b";
  bool unconstrained = false;

  // evaluate
  std::string gold, pred, prefix;
  bool kappa = false;
  std::string baseline_train;
  int baseline_epochs = 10;
  std::uint64_t baseline_seed = 0;

  // align
  std::string summary, full, trace;
  std::string measure = "jaccard";
  double threshold = 0.5;
  std::size_t top_k = 3;

  // indicators
  std::size_t top = 10;
  std::string json_out;
};

int run_convert(const Options& o) {
  Corpus docs;
  if (o.from == "text") {
    auto kind = parse_kind(o.kind);
    if (!kind) throw UsageError("unknown document kind '" + o.kind + "'");
    std::ifstream in(o.input, std::ios::binary);
    if (!in) throw Error("cannot open '" + o.input + "'");
    std::stringstream text;
    text << in.rdbuf();
    docs.push_back(document_from_text(fs::path(o.input).stem().string(), *kind, text.str()));
  } else {
    docs = load(o.input, o.from);
  }
  store(docs, o.output, o.out_format);
  std::cerr << "argmine: converted " << docs.size() << " documents\n";
  return 0;
}

int run_stats(const Options& o) {
  std::cout << format_stats(corpus_stats(load(o.input, o.format)));
  return 0;
}

int run_split(const Options& o) {
  if (o.ratios.size() != 3) throw UsageError("--ratios takes three values");
  const auto docs = load(o.input, o.format);
  CorpusSplit split;
  try {
    split = split_corpus(docs, {o.ratios[0], o.ratios[1], o.ratios[2]}, o.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  const std::pair<const char*, const std::vector<std::string>*> parts[] = {
      {"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}};
  const auto ext = resolve_format(o.format, o.input) == CorpusFormat::Conll ? ".conll" : ".jsonl";
  for (const auto& [name, ids] : parts) {
    std::string text;
    for (const auto& id : *ids) text += id + "\n";
    write_text(dir / (std::string(name) + ".ids"), text);
    if (o.write_corpora)
      write_corpus(select_documents(docs, *ids), dir / (std::string(name) + ext),
                   resolve_format(o.format, o.input));
  }
  std::cerr << "argmine: split " << docs.size() << " documents into " << split.train.size() << "/"
            << split.validation.size() << "/" << split.test.size() << '\n';
  return 0;
}

int run_synth(const Options& o) {
  SynthConfig c = o.config.empty() ? SynthConfig{} : read_synth_config(o.config);
  c.seed = o.seed;
  if (o.n_docs) c.n_docs = *o.n_docs;
  if (o.noise) c.noise = *o.noise;
  if (o.mixed_rate) c.mixed_label_rate = *o.mixed_rate;
  if (o.emit_pairs) c.emit_pairs = true;
  check_usage([&] { c.validate(); });
  if (o.print_config) {
    std::cout << format_synth_config(c);
    if (o.output.empty()) return 0;
  }
  if (o.output.empty()) throw UsageError("--out is required");
  const auto docs = generate(c);
  store(docs, o.output, o.out_format);
  std::cerr << "argmine: generated " << docs.size() << " documents\n";
  return 0;
}

Corpus load_selected(const Options& o) {
  auto docs = load(o.input, o.format);
  if (!o.ids.empty()) docs = select_documents(docs, read_ids(o.ids));
  return docs;
}

int run_train(const Options& o) {
  TrainConfig c;
  auto algo = parse_algorithm(o.algo);
  if (!algo) throw UsageError("unknown algorithm '" + o.algo + "'");
  auto weighting = parse_weighting(o.class_weights);
  if (!weighting || *weighting == ClassWeighting::Explicit)
    throw UsageError("--class-weights must be inverse or uniform");
  c.algorithm = *algo;
  c.epochs = o.epochs;
  c.learning_rate = o.learning_rate;
  c.l2 = o.l2;
  c.batch_size = o.batch_size;
  c.weighting = *weighting;
  c.seed = o.seed;
  c.constrain_transitions = !o.unconstrained;
  check_usage([&] { c.validate(); });
  if (o.window < 2) throw UsageError("--window must be at least 2");

  const auto docs = load_selected(o);
  const auto model = train(docs, c, {}, chunk_options(o.window, o.align_sentences));
  save_model(model, fs::path(o.model));
  std::cerr << "argmine: trained " << to_string(c.algorithm) << " on " << model.train_chunks
            << " chunks, " << model.feature_count() << " features\n";
  return 0;
}

int run_predict(const Options& o) {
  PredictOptions p;
  auto repair = parse_repair(o.repair);
  if (!repair) throw UsageError("unknown repair policy '" + o.repair + "'");
  if (o.window < 2) throw UsageError("--window must be at least 2");
  p.repair = *repair;
  p.constrain = !o.unconstrained;
  p.chunking = chunk_options(o.window, o.align_sentences);
  const auto rule = tie_rule_flag(o.tie_rule);

  const auto model = load_model(fs::path(o.model));
  auto predicted = predict(model, load_selected(o), p, o.jobs);
  for (auto& doc : predicted) doc = label_document(doc, rule).document;
  store(predicted, o.output, o.out_format);
  return 0;
}

int run_evaluate(const Options& o) {
  EvalOptions e;
  e.tie_rule = tie_rule_flag(o.tie_rule);
  e.kappa = o.kappa;
  e.jobs = o.jobs;
  const auto gold = load(o.gold, o.format);
  const auto pred = load(o.pred, o.format);
  auto report = evaluate_corpora(gold, pred, e);
  if (!o.baseline_train.empty()) {
    BaselineConfig b;
    b.epochs = o.baseline_epochs;
    b.seed = o.baseline_seed;
    if (b.epochs < 1) throw UsageError("--baseline-epochs must be at least 1");
    const auto train = load(o.baseline_train, o.format);
    report.baseline = baseline_sentence_classifier(labeled_sentences(train, e.tie_rule),
                                                    labeled_sentences(gold, e.tie_rule), b)
                          .table;
  }
  write_text(o.prefix + ".json", report_to_json(report));
  const auto text = report_to_text(report);
  write_text(o.prefix + ".txt", text);
  std::cout << text;
  return 0;
}

int run_align(const Options& o) {
  AlignOptions a;
  auto measure = parse_measure(o.measure);
  if (!measure) throw UsageError("unknown measure '" + o.measure + "'");
  a.measure = *measure;
  a.threshold = o.threshold;
  a.top_k = o.top_k;
  check_usage([&] { a.validate(); });

  const auto summaries = load(o.summary, o.format);
  const auto fulls = load(o.full, o.format);
  std::map<std::string, const Document*> by_key;
  for (const auto& d : summaries)
    if (d.kind == DocKind::Summary) by_key.emplace(pairing_key(d.doc_id), &d);

  Corpus projected;
  std::string trace;
  std::size_t unmatched = 0, proposals = 0;
  for (const auto& full : fulls) {
    if (full.kind != DocKind::FullText) continue;
    const auto it = by_key.find(pairing_key(full.doc_id));
    if (it == by_key.end()) {
      ++unmatched;
      projected.push_back(full);
      continue;
    }
    auto p = project_labels(*it->second, full, a);
    proposals += p.proposals;
    trace += trace_to_jsonl(p, it->second->doc_id);
    projected.push_back(std::move(p.full_text));
  }
  store(projected, o.output, o.out_format);
  if (!o.trace.empty()) write_text(o.trace, trace);
  std::cerr << "argmine: aligned " << projected.size() - unmatched << " full texts, " << proposals
            << " proposals";
  if (unmatched) std::cerr << ", " << unmatched << " without a summary";
  std::cerr << '\n';
  return 0;
}

int run_indicators(const Options& o) {
  std::vector<IndicatorRow> rows;
  if (!o.pred.empty()) {
    rows = indicator_report(load(o.pred, o.format), o.top);
  } else {
    if (o.model.empty() || o.input.empty())
      throw UsageError("indicators needs --pred, or --model with --in");
    PredictOptions p;
    auto repair = parse_repair(o.repair);
    if (!repair) throw UsageError("unknown repair policy '" + o.repair + "'");
    p.repair = *repair;
    p.chunking = chunk_options(o.window, o.align_sentences);
    rows = indicator_report(load_model(fs::path(o.model)), load(o.input, o.format), p, o.top);
  }
  if (!o.json_out.empty()) write_text(o.json_out, indicators_to_json(rows));
  std::cout << format_indicators(rows);
  return 0;
}

void add_window_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--window", o.window, "Chunk length in tokens")->capture_default_str();
  cmd->add_flag("--align-sentences", o.align_sentences,
                "End chunks at sentence boundaries that fit the window");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"argmine: token-level argument role tagging for legal case summaries"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");
  Options o;
  const std::vector<std::string> formats{"auto", "conll", "records"};

  auto* convert = app.add_subcommand("convert", "Convert between corpus formats");
  convert->add_option("--in", o.input, "Input file")->required();
  convert->add_option("--out", o.output, "Output file")->required();
  convert->add_option("--from", o.from, "Input format: auto, conll, records or text")
      ->check(CLI::IsMember({"auto", "conll", "records", "text"}))
      ->capture_default_str();
  convert->add_option("--to", o.out_format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
  convert->add_option("--kind", o.kind, "Document kind for --from text")
      ->check(CLI::IsMember({"summary", "full_text"}))
      ->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Span length statistics per IRC type");
  stats->add_option("--in", o.input, "Corpus file")->required();
  stats->add_option("--format", o.format, "Corpus format")->check(CLI::IsMember(formats))->capture_default_str();

  auto* split = app.add_subcommand("split", "Split a corpus by document into train/validation/test");
  split->add_option("--in", o.input, "Corpus file")->required();
  split->add_option("--seed", o.seed, "Shuffle seed")->required();
  split->add_option("--out-dir", o.out_dir, "Directory for train.ids, validation.ids, test.ids")->required();
  split->add_option("--ratios", o.ratios, "Train, validation and test fractions")
      ->expected(3)
      ->delimiter(',')
      ->capture_default_str();
  split->add_flag("--write-corpora", o.write_corpora, "Also write each partition as a corpus file");
  split->add_option("--format", o.format, "Corpus format")->check(CLI::IsMember(formats))->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  synth->add_option("--seed", o.seed, "Generator seed")->required();
  synth->add_option("--out", o.output, "Output corpus file");
  synth->add_option("--config", o.config, "key = value configuration file");
  synth->add_option("--n-docs", o.n_docs, "Number of cases (overrides the config)");
  synth->add_option("--noise", o.noise, "Cue noise rate (overrides the config)");
  synth->add_option("--mixed-label-rate", o.mixed_rate, "Mixed Conclusion/Reason sentence rate");
  synth->add_flag("--emit-pairs", o.emit_pairs, "Emit a summary and a full text per case");
  synth->add_flag("--print-config", o.print_config, "Print the effective configuration");
  synth->add_option("--format", o.out_format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();

  auto* train = app.add_subcommand("train", "Train a tagger and write a model file");
  train->add_option("--in", o.input, "Training corpus")->required();
  train->add_option("--ids", o.ids, "Restrict to the document ids listed in this file");
  train->add_option("--model", o.model, "Output model file")->required();
  train->add_option("--seed", o.seed, "Training seed")->required();
  train->add_option("--algo", o.algo, "perceptron or crf")
      ->check(CLI::IsMember({"perceptron", "crf"}))
      ->capture_default_str();
  train->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
  train->add_option("--learning-rate", o.learning_rate, "CRF step size")->capture_default_str();
  train->add_option("--l2", o.l2, "CRF L2 penalty")->capture_default_str();
  train->add_option("--batch-size", o.batch_size, "CRF chunks per gradient step")->capture_default_str();
  train->add_option("--class-weights", o.class_weights, "inverse or uniform")
      ->check(CLI::IsMember({"inverse", "uniform"}))
      ->capture_default_str();
  train->add_flag("--unconstrained", o.unconstrained, "Drop the BIO transition constraint");
  train->add_option("--format", o.format, "Corpus format")->check(CLI::IsMember(formats))->capture_default_str();
  add_window_flags(train, o);

  auto* pred = app.add_subcommand("predict", "Tag a corpus with a trained model");
  pred->add_option("--model", o.model, "Model file")->required();
  pred->add_option("--in", o.input, "Input corpus")->required();
  pred->add_option("--ids", o.ids, "Restrict to the document ids listed in this file");
  pred->add_option("--out", o.output, "Output corpus with predictions")->required();
  pred->add_option("--repair", o.repair, "BIO repair policy: strict, i_as_b or i_drop")
      ->check(CLI::IsMember({"strict", "i_as_b", "i_drop"}))
      ->capture_default_str();
  pred->add_flag("--unconstrained", o.unconstrained, "Decode without the BIO transition constraint");
  pred->add_option("--tie-rule", o.tie_rule, "Sentence label tie rule: earliest or prefer_irc")
      ->check(CLI::IsMember({"earliest", "prefer_irc"}))
      ->capture_default_str();
  pred->add_option("--jobs", o.jobs, "Documents tagged in parallel")->capture_default_str();
  pred->add_option("--format", o.format, "Input format")->check(CLI::IsMember(formats))->capture_default_str();
  pred->add_option("--out-format", o.out_format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
  add_window_flags(pred, o);

  auto* eval = app.add_subcommand("evaluate", "Score predictions against gold annotations");
  eval->add_option("--gold", o.gold, "Gold corpus")->required();
  eval->add_option("--pred", o.pred, "Predicted corpus")->required();
  eval->add_option("--out", o.prefix, "Report prefix; writes <prefix>.json and <prefix>.txt")->required();
  eval->add_flag("--kappa", o.kappa, "Add Cohen's kappa between gold and predicted sentence labels");
  eval->add_option("--compare-baseline", o.baseline_train,
                   "Training corpus for the bag-of-words sentence baseline");
  eval->add_option("--baseline-epochs", o.baseline_epochs, "Baseline perceptron epochs")->capture_default_str();
  eval->add_option("--baseline-seed", o.baseline_seed, "Baseline shuffle seed")->capture_default_str();
  eval->add_option("--tie-rule", o.tie_rule, "Sentence label tie rule: earliest or prefer_irc")
      ->check(CLI::IsMember({"earliest", "prefer_irc"}))
      ->capture_default_str();
  eval->add_option("--jobs", o.jobs, "Documents scored in parallel")->capture_default_str();
  eval->add_option("--format", o.format, "Corpus format")->check(CLI::IsMember(formats))->capture_default_str();

  auto* align = app.add_subcommand("align", "Project summary sentence labels onto full texts");
  align->add_option("--summary", o.summary, "Corpus holding the summaries")->required();
  align->add_option("--full", o.full, "Corpus holding the full texts")->required();
  align->add_option("--out", o.output, "Full texts with projected sentence labels")->required();
  align->add_option("--trace", o.trace, "Alignment trace (JSON lines)");
  align->add_option("--measure", o.measure, "jaccard or tf_cosine")
      ->check(CLI::IsMember({"jaccard", "tf_cosine"}))
      ->capture_default_str();
  align->add_option("--threshold", o.threshold, "Minimum similarity")->capture_default_str();
  align->add_option("--top-k", o.top_k, "Full-text sentences per summary sentence")->capture_default_str();
  align->add_option("--format", o.format, "Input format")->check(CLI::IsMember(formats))->capture_default_str();
  align->add_option("--out-format", o.out_format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();

  auto* ind = app.add_subcommand("indicators", "Most frequent correctly tagged tokens per tag");
  ind->add_option("--pred", o.pred, "Predicted corpus (records with predictions)");
  ind->add_option("--model", o.model, "Model file, used with --in");
  ind->add_option("--in", o.input, "Gold corpus to tag with --model");
  ind->add_option("--top", o.top, "Tokens per tag")->capture_default_str();
  ind->add_option("--json", o.json_out, "Also write the report as JSON");
  ind->add_option("--repair", o.repair, "BIO repair policy")
      ->check(CLI::IsMember({"strict", "i_as_b", "i_drop"}))
      ->capture_default_str();
  ind->add_option("--format", o.format, "Corpus format")->check(CLI::IsMember(formats))->capture_default_str();
  add_window_flags(ind, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*convert) return run_convert(o);
    if (*stats) return run_stats(o);
    if (*split) return run_split(o);
    if (*synth) return run_synth(o);
    if (*train) return run_train(o);
    if (*pred) return run_predict(o);
    if (*eval) return run_evaluate(o);
    if (*align) return run_align(o);
    if (*ind) return run_indicators(o);
  } catch (const UsageError& e) {
    std::cerr << "argmine: usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "argmine: error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

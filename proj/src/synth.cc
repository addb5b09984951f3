#include "argmine/synth.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "argmine/corpus.h"
#include "argmine/random.h"

namespace argmine {

namespace {

constexpr std::array<const char*, 60> kGeneral = {
    "the",       "a",         "of",        "to",        "in",        "and",       "on",
    "by",        "with",      "for",       "from",      "at",        "as",        "that",
    "this",      "it",        "its",       "was",       "were",      "has",       "had",
    "party",     "parties",   "plaintiff", "defendant", "respondent", "appellant", "counsel",
    "motion",    "claim",     "contract",  "agreement", "property",  "tenant",    "landlord",
    "employer",  "employee",  "company",   "hearing",   "date",      "notice",    "letter",
    "payment",   "amount",    "period",    "section",   "act",       "application", "filed",
    "dated",     "signed",    "received",  "between",   "after",     "before",    "during",
    "meeting",   "report",    "manager",   "office"};

constexpr std::array<const char*, 24> kIssue = {
    "issue",     "question",  "erred",        "jurisdiction", "interpretation", "standard",
    "review",    "contends",  "applicable",   "meaning",      "determine",      "proper",
    "test",      "raised",    "challenge",    "arguable",     "ground",         "asks",
    "properly",  "misapplied", "considered", "entitled",     "ambiguous",      "scope"};

constexpr std::array<const char*, 24> kReason = {
    "evidence",  "established", "record",    "finding",    "demonstrated", "credibility",
    "testimony", "failed",      "principle", "reasonable", "inference",    "supports",
    "shows",     "since",       "relied",    "precedent",  "consistent",   "weight",
    "factor",    "analysis",    "accepted",  "rejected",   "facts",        "therefore"};

constexpr std::array<const char*, 24> kConclusion = {
    "appeal",   "allowed",   "dismissed", "granted",  "order",     "costs",
    "remitted", "new",       "trial",     "set",      "aside",     "restored",
    "quashed",  "declared",  "judgment",  "varied",   "affirmed",  "substituted",
    "awarded",  "damages",   "stay",      "refused",  "upheld",    "ordered"};

template <std::size_t N>
std::string pick(const std::array<const char*, N>& words, Rng& rng) {
  return words[uniform_index(rng, N)];
}

std::string pick(const std::vector<std::string>& words, Rng& rng) {
  return words[uniform_index(rng, words.size())];
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

// Deals lengths so that every listed value occurs equally often.
class LengthDealer {
 public:
  explicit LengthDealer(std::vector<int> values) : values_(std::move(values)) {}
  int next(Rng& rng) {
    if (pos_ == deck_.size()) {
      deck_ = values_;
      shuffle(std::span<int>(deck_), rng);
      pos_ = 0;
    }
    return deck_[pos_++];
  }

 private:
  std::vector<int> values_;
  std::vector<int> deck_;
  std::size_t pos_ = 0;
};

struct Word {
  std::string text;
  bool keep = false;  // cue or terminal period; survives paraphrase
};

struct Segment {
  ArgLabel label = ArgLabel::NonIRC;
  std::vector<Word> words;
};

using Plan = std::vector<Segment>;

class Generator {
 public:
  explicit Generator(const SynthConfig& c)
      : c_(c),
        rng_(c.seed),
        dealers_{LengthDealer(c.span_lengths[0]), LengthDealer(c.span_lengths[1]),
                 LengthDealer(c.span_lengths[2])},
        filler_(c.filler_lengths) {}

  Corpus run() {
    Corpus out;
    for (int i = 1; i <= c_.n_docs; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "case-%04d", i);
      const auto plans = summary_plans();
      if (c_.emit_pairs) {
        out.push_back(build(std::string(id) + "-summary", DocKind::Summary, plans));
        out.push_back(build(std::string(id) + "-full", DocKind::FullText, full_text(plans)));
      } else if (bernoulli(rng_, c_.full_text_fraction)) {
        out.push_back(build(std::string(id) + "-full", DocKind::FullText, full_text(plans)));
      } else {
        out.push_back(build(std::string(id) + "-summary", DocKind::Summary, plans));
      }
    }
    return out;
  }

 private:
  std::string content(ArgLabel label) {
    if (bernoulli(rng_, c_.shared_vocab_rate)) return pick(kGeneral, rng_);
    switch (label) {
      case ArgLabel::Issue: return pick(kIssue, rng_);
      case ArgLabel::Reason: return pick(kReason, rng_);
      case ArgLabel::Conclusion: return pick(kConclusion, rng_);
      case ArgLabel::NonIRC: break;
    }
    return pick(kGeneral, rng_);
  }

  Word cue(const std::string& text) {
    if (bernoulli(rng_, c_.noise)) return {pick(kGeneral, rng_), false};
    return {text, true};
  }

  ArgLabel draw_label() {
    const double u = uniform_real(rng_);
    double acc = 0;
    for (std::size_t k = 0; k + 1 < kNumLabels; ++k) {
      acc += c_.proportions[k];
      if (u < acc) return kAllLabels[k];
    }
    return ArgLabel::NonIRC;
  }

  Plan labeled(ArgLabel label) {
    const auto k = index_of(label);
    const int length = dealers_[k].next(rng_);
    Segment seg{label, {}};
    if (label == ArgLabel::Conclusion) {
      seg.words.push_back(cue(pick(c_.cues[k], rng_)));
      for (int i = 1; i + 1 < length; ++i) seg.words.push_back({content(label), false});
    } else {
      const auto at = static_cast<int>(uniform_index(rng_, static_cast<std::uint64_t>(length - 1)));
      for (int i = 0; i + 1 < length; ++i)
        seg.words.push_back(i == at ? cue(pick(c_.cues[k], rng_)) : Word{content(label), false});
    }
    seg.words.push_back({".", true});
    return {seg};
  }

  Plan mixed() {
    const int lc = dealers_[index_of(ArgLabel::Conclusion)].next(rng_);
    const int lr = dealers_[index_of(ArgLabel::Reason)].next(rng_);
    Segment conclusion{ArgLabel::Conclusion, {cue(c_.mixed_cue)}};
    for (int i = 1; i < lc; ++i) conclusion.words.push_back({content(ArgLabel::Conclusion), false});
    Segment reason{ArgLabel::Reason, {cue(pick(c_.cues[index_of(ArgLabel::Reason)], rng_))}};
    for (int i = 1; i + 1 < lr; ++i) reason.words.push_back({content(ArgLabel::Reason), false});
    reason.words.push_back({".", true});
    return {conclusion, reason};
  }

  Plan filler() {
    const int length = filler_.next(rng_);
    Segment seg{ArgLabel::NonIRC, {}};
    for (int i = 0; i + 1 < length; ++i) seg.words.push_back({pick(kGeneral, rng_), false});
    seg.words.push_back({".", true});
    return {seg};
  }

  std::vector<Plan> summary_plans() {
    std::vector<Plan> plans;
    const int n = uniform_int(rng_, c_.sentences_min, c_.sentences_max);
    for (int s = 0; s < n; ++s) {
      const auto label = draw_label();
      if (label == ArgLabel::NonIRC)
        plans.push_back(filler());
      else if (bernoulli(rng_, c_.mixed_label_rate))
        plans.push_back(mixed());
      else
        plans.push_back(labeled(label));
    }
    return plans;
  }

  std::vector<Plan> full_text(const std::vector<Plan>& summary) {
    std::vector<Plan> out;
    for (const auto& plan : summary) {
      const int fillers = uniform_int(rng_, 0, c_.filler_between);
      for (int f = 0; f < fillers; ++f) out.push_back(filler());
      Plan copy;
      for (const auto& seg : plan) {
        Segment kept{seg.label, {}};
        for (const auto& w : seg.words)
          if (w.keep || !bernoulli(rng_, c_.paraphrase_rate)) kept.words.push_back(w);
        if (kept.words.empty()) kept.words.push_back(seg.words.front());
        copy.push_back(std::move(kept));
      }
      out.push_back(std::move(copy));
    }
    return out;
  }

  static Document build(std::string id, DocKind kind, const std::vector<Plan>& plans) {
    Document doc{std::move(id), kind, {}};
    for (const auto& plan : plans) {
      Sentence s;
      for (const auto& seg : plan) {
        const int start = static_cast<int>(s.tokens.size());
        for (const auto& w : seg.words) s.tokens.push_back({w.text, 0, 0});
        if (seg.label != ArgLabel::NonIRC)
          s.spans.push_back({seg.label, start, static_cast<int>(s.tokens.size()) - 1});
      }
      auto& first = s.tokens.front().text;
      first[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(first[0])));
      assign_canonical_offsets(s);
      doc.sentences.push_back(std::move(s));
    }
    return doc;
  }

  const SynthConfig& c_;
  Rng rng_;
  std::array<LengthDealer, 3> dealers_;
  LengthDealer filler_;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<int> to_lengths(const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(to_int(item));
    } else {
      const int lo = to_int(trim(item.substr(0, dash)));
      const int hi = to_int(trim(item.substr(dash + 1)));
      if (hi < lo) throw std::invalid_argument("empty length range '" + item + "'");
      for (int v : range(lo, hi)) out.push_back(v);
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string join(const std::vector<int>& items) {
  std::vector<std::string> s;
  for (int v : items) s.push_back(std::to_string(v));
  return join(s);
}

// Shortest text that parses back to the same double.
std::string number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

constexpr std::array<const char*, 3> kLabelKeys = {"issue", "reason", "conclusion"};

}  // namespace

SynthConfig::SynthConfig()
    : span_lengths{range(6, 14), range(8, 20), range(3, 10)}, filler_lengths(range(5, 16)) {}

void SynthConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (n_docs < 0) fail("n_docs must be non-negative");
  if (sentences_min < 1 || sentences_max < sentences_min)
    fail("need 1 <= sentences_min <= sentences_max");
  double sum = 0;
  for (double p : proportions) {
    if (!(p >= 0.0)) fail("label proportions must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail("label proportions must sum to 1 (got " + number(sum) + ")");
  for (std::size_t k = 0; k < 3; ++k) {
    if (span_lengths[k].empty()) fail(std::string(kLabelKeys[k]) + "_lengths is empty");
    for (int v : span_lengths[k])
      if (v < 2) fail(std::string(kLabelKeys[k]) + "_lengths values must be at least 2");
    if (cues[k].empty()) fail(std::string(kLabelKeys[k]) + "_cues is empty");
    for (const auto& c : cues[k])
      if (c.empty() || c.find_first_of(" \t\n") != std::string::npos)
        fail(std::string(kLabelKeys[k]) + "_cues entries must be single tokens");
  }
  if (filler_lengths.empty()) fail("filler_lengths is empty");
  for (int v : filler_lengths)
    if (v < 2) fail("filler_lengths values must be at least 2");
  if (mixed_cue.empty() || mixed_cue.find_first_of(" \t\n") != std::string::npos)
    fail("mixed_cue must be a single token");
  for (auto [name, v] : {std::pair{"noise", noise}, {"mixed_label_rate", mixed_label_rate},
                         {"shared_vocab_rate", shared_vocab_rate},
                         {"full_text_fraction", full_text_fraction},
                         {"paraphrase_rate", paraphrase_rate}})
    if (!(v >= 0.0 && v <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
  if (filler_between < 0) fail("filler_between must be non-negative");
}

SynthConfig parse_synth_config(std::istream& in, const std::string& source) {
  SynthConfig c;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    try {
      if (key == "n_docs") c.n_docs = to_int(value);
      else if (key == "seed") c.seed = std::stoull(value);
      else if (key == "sentences_min") c.sentences_min = to_int(value);
      else if (key == "sentences_max") c.sentences_max = to_int(value);
      else if (key == "p_issue") c.proportions[0] = to_double(value);
      else if (key == "p_reason") c.proportions[1] = to_double(value);
      else if (key == "p_conclusion") c.proportions[2] = to_double(value);
      else if (key == "p_nonirc") c.proportions[3] = to_double(value);
      else if (key == "issue_lengths") c.span_lengths[0] = to_lengths(value);
      else if (key == "reason_lengths") c.span_lengths[1] = to_lengths(value);
      else if (key == "conclusion_lengths") c.span_lengths[2] = to_lengths(value);
      else if (key == "filler_lengths") c.filler_lengths = to_lengths(value);
      else if (key == "issue_cues") c.cues[0] = split_list(value);
      else if (key == "reason_cues") c.cues[1] = split_list(value);
      else if (key == "conclusion_cues") c.cues[2] = split_list(value);
      else if (key == "mixed_cue") c.mixed_cue = value;
      else if (key == "noise") c.noise = to_double(value);
      else if (key == "mixed_label_rate") c.mixed_label_rate = to_double(value);
      else if (key == "shared_vocab_rate") c.shared_vocab_rate = to_double(value);
      else if (key == "full_text_fraction") c.full_text_fraction = to_double(value);
      else if (key == "emit_pairs") c.emit_pairs = to_bool(value);
      else if (key == "paraphrase_rate") c.paraphrase_rate = to_double(value);
      else if (key == "filler_between") c.filler_between = to_int(value);
      else throw ParseError(source, line_no, "unknown key '" + key + "'");
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source, line_no, "bad value for '" + key + "': " + e.what());
    }
  }
  return c;
}

SynthConfig read_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path.string() + "'");
  return parse_synth_config(in, path.string());
}

std::string format_synth_config(const SynthConfig& c) {
  std::ostringstream os;
  os << "n_docs = " << c.n_docs << '\n'
     << "seed = " << c.seed << '\n'
     << "sentences_min = " << c.sentences_min << '\n'
     << "sentences_max = " << c.sentences_max << '\n'
     << "p_issue = " << number(c.proportions[0]) << '\n'
     << "p_reason = " << number(c.proportions[1]) << '\n'
     << "p_conclusion = " << number(c.proportions[2]) << '\n'
     << "p_nonirc = " << number(c.proportions[3]) << '\n';
  for (std::size_t k = 0; k < 3; ++k) os << kLabelKeys[k] << "_lengths = " << join(c.span_lengths[k]) << '\n';
  os << "filler_lengths = " << join(c.filler_lengths) << '\n';
  for (std::size_t k = 0; k < 3; ++k) os << kLabelKeys[k] << "_cues = " << join(c.cues[k]) << '\n';
  os << "mixed_cue = " << c.mixed_cue << '\n'
     << "noise = " << number(c.noise) << '\n'
     << "mixed_label_rate = " << number(c.mixed_label_rate) << '\n'
     << "shared_vocab_rate = " << number(c.shared_vocab_rate) << '\n'
     << "full_text_fraction = " << number(c.full_text_fraction) << '\n'
     << "emit_pairs = " << (c.emit_pairs ? "true" : "false") << '\n'
     << "paraphrase_rate = " << number(c.paraphrase_rate) << '\n'
     << "filler_between = " << c.filler_between << '\n';
  return os.str();
}

Corpus generate(const SynthConfig& config) {
  config.validate();
  return Generator(config).run();
}

}  // namespace argmine

#include "argmine/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "argmine/bio.h"
#include "argmine/random.h"

namespace argmine {

using json = nlohmann::ordered_json;

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
      line_(line) {}

std::optional<CorpusFormat> parse_format(std::string_view text) {
  if (text == "conll") return CorpusFormat::Conll;
  if (text == "records") return CorpusFormat::Records;
  return std::nullopt;
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::Conll ? "conll" : "records";
}

namespace {

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string where(std::string_view doc_id, std::size_t sentence) {
  return "document '" + std::string(doc_id) + "' sentence " + std::to_string(sentence);
}

}  // namespace

void validate_sentence(const Sentence& sentence, std::string_view doc_id, std::size_t index) {
  if (sentence.tokens.empty()) throw ValidationError(where(doc_id, index) + ": no tokens");
  int prev_start = 0;
  for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
    const auto& tok = sentence.tokens[t];
    if (tok.text.empty() || has_space(tok.text))
      throw ValidationError(where(doc_id, index) + ": token " + std::to_string(t) +
                            " is empty or contains whitespace");
    if (tok.char_start >= tok.char_end || tok.char_start < prev_start)
      throw ValidationError(where(doc_id, index) + ": token " + std::to_string(t) +
                            " has invalid offsets");
    prev_start = tok.char_start;
  }
  const int n = static_cast<int>(sentence.tokens.size());
  std::vector<LabeledSpan> spans = sentence.spans;
  std::sort(spans.begin(), spans.end(),
            [](const auto& a, const auto& b) { return a.start_token < b.start_token; });
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto& s = spans[k];
    if (s.label == ArgLabel::NonIRC)
      throw ValidationError(where(doc_id, index) + ": span labeled NonIRC");
    if (s.start_token < 0 || s.start_token > s.end_token || s.end_token >= n)
      throw ValidationError(where(doc_id, index) + ": span [" + std::to_string(s.start_token) +
                            ", " + std::to_string(s.end_token) + "] out of bounds");
    if (k > 0 && spans[k - 1].end_token >= s.start_token)
      throw ValidationError(where(doc_id, index) + ": overlapping spans at token " +
                            std::to_string(s.start_token));
  }
  if (sentence.predicted && !sentence.predicted->tags.empty() &&
      sentence.predicted->tags.size() != sentence.tokens.size())
    throw ValidationError(where(doc_id, index) + ": predicted tag count does not match tokens");
}

void validate_document(const Document& doc) {
  if (doc.doc_id.empty() || has_space(doc.doc_id))
    throw ValidationError("document id '" + doc.doc_id + "' is empty or contains whitespace");
  for (std::size_t i = 0; i < doc.sentences.size(); ++i)
    validate_sentence(doc.sentences[i], doc.doc_id, i);
}

void validate_corpus(const Corpus& docs) {
  std::unordered_set<std::string> seen;
  for (const auto& doc : docs) {
    validate_document(doc);
    if (!seen.insert(doc.doc_id).second)
      throw ValidationError("duplicate document id '" + doc.doc_id + "'");
  }
}

void assign_canonical_offsets(Sentence& sentence) {
  int pos = 0;
  for (auto& tok : sentence.tokens) {
    tok.char_start = pos;
    tok.char_end = pos + static_cast<int>(tok.text.size());
    pos = tok.char_end + 1;
  }
}

// --- CoNLL -----------------------------------------------------------------

namespace {

constexpr std::string_view kDocHeader = "# doc_id = ";

struct PendingSentence {
  Sentence sentence;
  TagSequence tags;
  std::size_t first_line = 0;
};

Corpus read_conll(std::istream& in, const std::string& source) {
  Corpus docs;
  std::unordered_set<std::string> seen;
  PendingSentence pending;
  std::string line;
  std::size_t lineno = 0;

  auto flush = [&]() {
    if (pending.sentence.tokens.empty()) return;
    auto& doc = docs.back();
    const std::size_t index = doc.sentences.size();
    try {
      pending.sentence.spans = decode(pending.tags, RepairPolicy::Strict);
    } catch (const DecodeError& e) {
      throw ParseError(source, pending.first_line + e.index(),
                       where(doc.doc_id, index) + ": " + e.what());
    }
    assign_canonical_offsets(pending.sentence);
    try {
      validate_sentence(pending.sentence, doc.doc_id, index);
    } catch (const ValidationError& e) {
      throw ParseError(source, pending.first_line, e.what());
    }
    doc.sentences.push_back(std::move(pending.sentence));
    pending = PendingSentence{};
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.starts_with(kDocHeader)) {
      flush();
      const std::string_view rest = std::string_view(line).substr(kDocHeader.size());
      const auto tab = rest.find('\t');
      if (tab == std::string_view::npos)
        throw ParseError(source, lineno, "document header needs '<id>\\t<kind>'");
      Document doc;
      doc.doc_id = std::string(rest.substr(0, tab));
      const auto kind = parse_kind(rest.substr(tab + 1));
      if (!kind) throw ParseError(source, lineno, "unknown document kind '" +
                                                      std::string(rest.substr(tab + 1)) + "'");
      if (doc.doc_id.empty() || has_space(doc.doc_id))
        throw ParseError(source, lineno, "invalid document id '" + doc.doc_id + "'");
      if (!seen.insert(doc.doc_id).second)
        throw ParseError(source, lineno, "duplicate document id '" + doc.doc_id + "'");
      doc.kind = *kind;
      docs.push_back(std::move(doc));
      continue;
    }
    if (docs.empty()) throw ParseError(source, lineno, "token line before any document header");
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(source, lineno, "expected '<token>\\t<tag>'");
    const std::string_view text = std::string_view(line).substr(0, tab);
    const auto tag = parse_tag(std::string_view(line).substr(tab + 1));
    if (text.empty() || has_space(text)) throw ParseError(source, lineno, "invalid token");
    if (!tag)
      throw ParseError(source, lineno, "unknown tag '" + line.substr(tab + 1) + "'");
    if (pending.sentence.tokens.empty()) pending.first_line = lineno;
    pending.sentence.tokens.push_back(Token{std::string(text), 0, 0});
    pending.tags.push_back(*tag);
  }
  flush();
  return docs;
}

void write_conll(const Corpus& docs, std::ostream& out) {
  for (const auto& doc : docs) {
    out << kDocHeader << doc.doc_id << '\t' << to_string(doc.kind) << '\n';
    for (const auto& sentence : doc.sentences) {
      const auto tags = encode(sentence);
      for (std::size_t i = 0; i < sentence.tokens.size(); ++i)
        out << sentence.tokens[i].text << '\t' << to_string(tags[i]) << '\n';
      out << '\n';
    }
  }
}

// --- Records (JSON lines) --------------------------------------------------

json spans_to_json(const std::vector<LabeledSpan>& spans) {
  json arr = json::array();
  for (const auto& s : spans)
    arr.push_back({{"label", to_string(s.label)}, {"start", s.start_token}, {"end", s.end_token}});
  return arr;
}

json document_to_json(const Document& doc) {
  json sentences = json::array();
  for (const auto& s : doc.sentences) {
    json tokens = json::array();
    json offsets = json::array();
    for (const auto& t : s.tokens) {
      tokens.push_back(t.text);
      offsets.push_back({t.char_start, t.char_end});
    }
    json js = {{"tokens", tokens}, {"offsets", offsets}, {"spans", spans_to_json(s.spans)}};
    if (s.sentence_label) js["label"] = to_string(*s.sentence_label);
    if (s.predicted) {
      json tags = json::array();
      for (auto t : s.predicted->tags) tags.push_back(to_string(t));
      json pred = {{"tags", tags}, {"spans", spans_to_json(s.predicted->spans)}};
      if (s.predicted->label) pred["label"] = to_string(*s.predicted->label);
      js["predicted"] = pred;
    }
    sentences.push_back(std::move(js));
  }
  return {{"doc_id", doc.doc_id}, {"kind", to_string(doc.kind)}, {"sentences", sentences}};
}

ArgLabel label_from_json(const json& j) {
  const auto label = parse_label(j.get<std::string>());
  if (!label) throw Error("unknown label '" + j.get<std::string>() + "'");
  return *label;
}

std::vector<LabeledSpan> spans_from_json(const json& arr) {
  std::vector<LabeledSpan> spans;
  for (const auto& js : arr.get_ref<const json::array_t&>())
    spans.push_back(LabeledSpan{label_from_json(js.at("label")), js.at("start").get<int>(),
                                js.at("end").get<int>()});
  return spans;
}

Document document_from_json(const json& j) {
  Document doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  const auto kind = parse_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error("unknown document kind '" + j.at("kind").get<std::string>() + "'");
  doc.kind = *kind;
  for (const auto& js : j.at("sentences").get_ref<const json::array_t&>()) {
    Sentence s;
    const auto& tokens = js.at("tokens").get_ref<const json::array_t&>();
    const auto offsets = js.find("offsets");
    if (offsets != js.end() && offsets->size() != tokens.size())
      throw Error("offsets and tokens differ in length");
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      Token tok{tokens[i].get<std::string>(), 0, 0};
      if (offsets != js.end()) {
        tok.char_start = (*offsets)[i].at(0).get<int>();
        tok.char_end = (*offsets)[i].at(1).get<int>();
      }
      s.tokens.push_back(std::move(tok));
    }
    if (offsets == js.end()) assign_canonical_offsets(s);
    if (js.contains("spans")) s.spans = spans_from_json(js.at("spans"));
    if (js.contains("label")) s.sentence_label = label_from_json(js.at("label"));
    if (js.contains("predicted")) {
      const auto& jp = js.at("predicted");
      Prediction p;
      for (const auto& t : jp.at("tags").get_ref<const json::array_t&>()) {
        const auto tag = parse_tag(t.get<std::string>());
        if (!tag) throw Error("unknown tag '" + t.get<std::string>() + "'");
        p.tags.push_back(*tag);
      }
      if (jp.contains("spans")) p.spans = spans_from_json(jp.at("spans"));
      if (jp.contains("label")) p.label = label_from_json(jp.at("label"));
      s.predicted = std::move(p);
    }
    doc.sentences.push_back(std::move(s));
  }
  return doc;
}

Corpus read_records(std::istream& in, const std::string& source) {
  Corpus docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }))
      continue;
    Document doc;
    try {
      doc = document_from_json(json::parse(line));
      validate_document(doc);
    } catch (const json::exception& e) {
      throw ParseError(source, lineno, std::string("malformed record: ") + e.what());
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
    if (!seen.insert(doc.doc_id).second)
      throw ParseError(source, lineno, "duplicate document id '" + doc.doc_id + "'");
    docs.push_back(std::move(doc));
  }
  return docs;
}

void write_records(const Corpus& docs, std::ostream& out) {
  for (const auto& doc : docs) out << document_to_json(doc).dump() << '\n';
}

}  // namespace

Corpus read_corpus(std::istream& in, CorpusFormat format, const std::string& source) {
  return format == CorpusFormat::Conll ? read_conll(in, source) : read_records(in, source);
}

Corpus read_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return read_corpus(in, format, path.string());
}

void write_corpus(const Corpus& docs, std::ostream& out, CorpusFormat format) {
  validate_corpus(docs);
  if (format == CorpusFormat::Conll)
    write_conll(docs, out);
  else
    write_records(docs, out);
}

void write_corpus(const Corpus& docs, const std::filesystem::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_corpus(docs, out, format);
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

// --- Raw text --------------------------------------------------------------

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  auto is_punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
  auto emit = [&](std::size_t b, std::size_t e) {
    tokens.push_back(Token{std::string(text.substr(b, e - b)), static_cast<int>(b),
                           static_cast<int>(e)});
  };

  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t end = i;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;

    std::size_t core_b = i;
    while (core_b < end && is_punct(text[core_b])) ++core_b;
    std::size_t core_e = end;
    while (core_e > core_b && is_punct(text[core_e - 1])) --core_e;

    for (std::size_t p = i; p < core_b; ++p) emit(p, p + 1);
    if (core_b < core_e) emit(core_b, core_e);
    for (std::size_t p = std::max(core_e, core_b); p < end; ++p) emit(p, p + 1);
    i = end;
  }
  return tokens;
}

std::vector<std::string_view> segment_sentences(std::string_view text) {
  std::vector<std::string_view> out;
  auto push = [&](std::size_t b, std::size_t e) {
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    if (b < e) out.push_back(text.substr(b, e - b));
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    if (!std::isspace(static_cast<unsigned char>(text[i + 1]))) continue;
    std::size_t j = i + 1;
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j < text.size() && std::isupper(static_cast<unsigned char>(text[j]))) {
      push(start, i + 1);
      start = j;
      i = j - 1;
    }
  }
  push(start, text.size());
  return out;
}

Document document_from_text(std::string doc_id, DocKind kind, std::string_view text) {
  Document doc;
  doc.doc_id = std::move(doc_id);
  doc.kind = kind;
  for (auto piece : segment_sentences(text)) {
    Sentence s;
    s.tokens = tokenize(piece);
    if (!s.tokens.empty()) doc.sentences.push_back(std::move(s));
  }
  return doc;
}

// --- Splitting -------------------------------------------------------------

CorpusSplit split_corpus(const Corpus& docs, SplitRatios ratios, std::uint64_t seed) {
  const std::array<double, 3> r = {ratios.train, ratios.validation, ratios.test};
  for (double x : r)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("split ratios must be non-negative");
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must sum to 1");

  const std::size_t n = docs.size();
  const auto nonzero = static_cast<std::size_t>(std::count_if(r.begin(), r.end(),
                                                              [](double x) { return x > 0; }));
  if (n < nonzero)
    throw Error("cannot split " + std::to_string(n) + " document(s) into " +
                std::to_string(nonzero) + " non-empty partitions");

  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& d : docs) ids.push_back(d.doc_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw ValidationError("duplicate document ids in corpus");
  Rng rng(seed);
  shuffle(std::span<std::string>(ids), rng);

  // Sizes for validation and test; train takes the rest.
  std::array<std::size_t, 3> size{};
  for (int k = 1; k < 3; ++k) {
    size[k] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * r[k] + 1e-9));
  }
  size[0] = n - size[1] - size[2];
  for (int k = 1; k < 3; ++k) {
    if (r[k] > 0 && size[k] == 0) {
      ++size[k];
      --size[0];
    }
  }

  CorpusSplit split;
  split.seed = seed;
  auto it = ids.begin();
  split.train.assign(it, it + static_cast<std::ptrdiff_t>(size[0]));
  it += static_cast<std::ptrdiff_t>(size[0]);
  split.validation.assign(it, it + static_cast<std::ptrdiff_t>(size[1]));
  it += static_cast<std::ptrdiff_t>(size[1]);
  split.test.assign(it, ids.end());
  return split;
}

Corpus select_documents(const Corpus& docs, const std::vector<std::string>& ids) {
  const std::set<std::string> wanted(ids.begin(), ids.end());
  Corpus out;
  for (const auto& d : docs)
    if (wanted.count(d.doc_id)) out.push_back(d);
  return out;
}

// --- Statistics ------------------------------------------------------------

CorpusStats corpus_stats(const Corpus& docs) {
  CorpusStats stats;
  std::array<std::vector<int>, 3> lengths;
  for (const auto& doc : docs) {
    ++stats.documents;
    for (const auto& s : doc.sentences) {
      ++stats.sentences;
      stats.tokens += s.tokens.size();
      for (const auto& span : s.spans)
        if (span.label != ArgLabel::NonIRC) lengths[index_of(span.label)].push_back(span.length());
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    auto& row = stats.rows[k];
    row.label = kIrcLabels[k];
    row.count = lengths[k].size();
    if (row.count == 0) continue;
    row.min_length = *std::min_element(lengths[k].begin(), lengths[k].end());
    row.max_length = *std::max_element(lengths[k].begin(), lengths[k].end());
    const double sum = std::accumulate(lengths[k].begin(), lengths[k].end(), 0.0);
    row.mean_length = sum / static_cast<double>(row.count);
  }
  return stats;
}

std::string format_stats(const CorpusStats& stats) {
  std::ostringstream os;
  os << "documents " << stats.documents << "  sentences " << stats.sentences << "  tokens "
     << stats.tokens << '\n';
  os << std::left << std::setw(12) << "label" << std::right << std::setw(8) << "count"
     << std::setw(8) << "min" << std::setw(8) << "max" << std::setw(10) << "mean" << '\n';
  for (const auto& row : stats.rows) {
    os << std::left << std::setw(12) << to_string(row.label) << std::right << std::setw(8)
       << row.count;
    if (row.count == 0) {
      os << std::setw(8) << "-" << std::setw(8) << "-" << std::setw(10) << "-";
    } else {
      os << std::setw(8) << *row.min_length << std::setw(8) << *row.max_length << std::setw(10)
         << std::fixed << std::setprecision(2) << *row.mean_length;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace argmine

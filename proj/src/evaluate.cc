#include "argmine/evaluate.h"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "argmine/bio.h"
#include "argmine/parallel.h"
#include "argmine/random.h"

namespace argmine {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> tag_names() {
  std::vector<std::string> out;
  for (auto t : kAllTags) out.emplace_back(to_string(t));
  return out;
}

std::vector<std::string> label_names() {
  std::vector<std::string> out;
  for (auto l : kAllLabels) out.emplace_back(to_string(l));
  return out;
}

std::vector<std::size_t> tag_indices(std::span<const Tag> tags) {
  std::vector<std::size_t> out(tags.size());
  std::transform(tags.begin(), tags.end(), out.begin(), [](Tag t) { return index_of(t); });
  return out;
}

std::vector<std::size_t> label_indices(std::span<const ArgLabel> labels) {
  std::vector<std::size_t> out(labels.size());
  std::transform(labels.begin(), labels.end(), out.begin(), [](ArgLabel l) { return index_of(l); });
  return out;
}

double ratio(std::size_t num, std::size_t den) {
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

double f1_of(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

template <typename Get>
std::optional<double> macro_over(const MetricsTable& t, std::span<const std::size_t> subset, Get get) {
  std::vector<std::size_t> idx(subset.begin(), subset.end());
  if (idx.empty()) {
    idx.resize(t.rows.size());
    std::iota(idx.begin(), idx.end(), 0);
  }
  double sum = 0;
  std::size_t n = 0;
  for (auto k : idx) {
    if (!t.rows.at(k).present()) continue;
    sum += get(t.rows[k]);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

std::optional<double> MetricsTable::macro_f1(std::span<const std::size_t> subset) const {
  return macro_over(*this, subset, [](const ClassScores& c) { return c.f1; });
}

std::optional<double> MetricsTable::macro_precision() const {
  return macro_over(*this, {}, [](const ClassScores& c) { return c.precision; });
}

std::optional<double> MetricsTable::macro_recall() const {
  return macro_over(*this, {}, [](const ClassScores& c) { return c.recall; });
}

MetricsTable classification_metrics(std::span<const std::size_t> gold,
                                    std::span<const std::size_t> predicted,
                                    std::vector<std::string> classes) {
  if (gold.size() != predicted.size())
    throw std::invalid_argument("gold and predicted sequences differ in length (" +
                                std::to_string(gold.size()) + " vs " +
                                std::to_string(predicted.size()) + ")");
  MetricsTable t;
  t.classes = std::move(classes);
  const std::size_t n = t.classes.size();
  t.rows.assign(n, ClassScores{});
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= n || predicted[i] >= n) throw std::out_of_range("class index out of range");
    ++t.rows[gold[i]].support;
    ++t.rows[predicted[i]].predicted;
    if (gold[i] == predicted[i]) {
      ++t.rows[gold[i]].true_positive;
      ++t.correct;
    }
  }
  t.total = gold.size();
  for (auto& r : t.rows) {
    r.precision = ratio(r.true_positive, r.predicted);
    r.recall = ratio(r.true_positive, r.support);
    r.f1 = f1_of(r.precision, r.recall);
  }
  return t;
}

MetricsTable token_metrics(std::span<const Tag> gold, std::span<const Tag> predicted) {
  return classification_metrics(tag_indices(gold), tag_indices(predicted), tag_names());
}

MetricsTable sentence_metrics(std::span<const ArgLabel> gold, std::span<const ArgLabel> predicted) {
  return classification_metrics(label_indices(gold), label_indices(predicted), label_names());
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) s += count(i, i);
  return s;
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

ConfusionMatrix confusion(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                          std::vector<std::string> classes) {
  if (gold.size() != predicted.size())
    throw std::invalid_argument("gold and predicted sequences differ in length");
  ConfusionMatrix m;
  m.classes = std::move(classes);
  const std::size_t n = m.classes.size();
  m.counts.assign(n * n, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= n || predicted[i] >= n) throw std::out_of_range("class index out of range");
    ++m.counts[gold[i] * n + predicted[i]];
  }
  m.percent.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t row_total = 0;
    for (std::size_t c = 0; c < n; ++c) row_total += m.count(r, c);
    if (row_total == 0) continue;
    std::vector<double> pct(n);
    for (std::size_t c = 0; c < n; ++c)
      pct[c] = 100.0 * static_cast<double>(m.count(r, c)) / static_cast<double>(row_total);
    m.percent[r] = std::move(pct);
  }
  return m;
}

ConfusionMatrix confusion(std::span<const std::string> gold, std::span<const std::string> predicted,
                          std::vector<std::string> classes) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index.emplace(classes[i], i);
  auto lookup = [&](const std::string& name) {
    const auto it = index.find(name);
    if (it == index.end()) throw std::invalid_argument("unknown class label '" + name + "'");
    return it->second;
  };
  std::vector<std::size_t> g, p;
  for (const auto& s : gold) g.push_back(lookup(s));
  for (const auto& s : predicted) p.push_back(lookup(s));
  return confusion(g, p, std::move(classes));
}

ConfusionMatrix token_confusion(std::span<const Tag> gold, std::span<const Tag> predicted) {
  return confusion(tag_indices(gold), tag_indices(predicted), tag_names());
}

ConfusionMatrix sentence_confusion(std::span<const ArgLabel> gold, std::span<const ArgLabel> predicted) {
  return confusion(label_indices(gold), label_indices(predicted), label_names());
}

KappaSummary sentence_kappa(std::span<const ArgLabel> a, std::span<const ArgLabel> b) {
  KappaSummary k;
  k.overall = cohens_kappa(a, b);
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<bool> ba(a.size()), bb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) ba[i] = a[i] == kIrcLabels[t];
    for (std::size_t i = 0; i < b.size(); ++i) bb[i] = b[i] == kIrcLabels[t];
    std::vector<int> ia(ba.begin(), ba.end()), ib(bb.begin(), bb.end());
    k.per_type[t] = cohens_kappa(ia, ib);
  }
  k.mean_per_type = (k.per_type[0] + k.per_type[1] + k.per_type[2]) / 3.0;
  return k;
}

// --- Indicator tokens -------------------------------------------------------

std::vector<IndicatorRow> indicator_report(const Corpus& predicted, std::size_t k) {
  std::array<std::map<std::string, std::size_t>, kNumTags> counts;
  for (const auto& doc : predicted) {
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto& sentence = doc.sentences[s];
      if (!sentence.predicted || sentence.predicted->tags.size() != sentence.tokens.size())
        throw Error("document '" + doc.doc_id + "' sentence " + std::to_string(s) +
                    " has no predicted tags");
      const auto gold = encode(sentence);
      for (std::size_t i = 0; i < gold.size(); ++i)
        if (gold[i] == sentence.predicted->tags[i]) ++counts[index_of(gold[i])][sentence.tokens[i].text];
    }
  }
  std::vector<IndicatorRow> rows;
  for (auto tag : kAllTags) {
    IndicatorRow row{tag, {}};
    const auto& m = counts[index_of(tag)];
    row.top.assign(m.begin(), m.end());
    std::stable_sort(row.top.begin(), row.top.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (row.top.size() > k) row.top.resize(k);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<IndicatorRow> indicator_report(const TaggerModel& model, const Corpus& eval,
                                           const PredictOptions& options, std::size_t k) {
  return indicator_report(predict(model, eval, options, 1), k);
}

std::string format_indicators(const std::vector<IndicatorRow>& rows) {
  std::ostringstream os;
  for (const auto& row : rows) {
    os << std::left << std::setw(14) << to_string(row.tag);
    if (row.top.empty()) os << "-";
    for (std::size_t i = 0; i < row.top.size(); ++i)
      os << (i ? "  " : "") << row.top[i].first << " (" << row.top[i].second << ")";
    os << '\n';
  }
  return os.str();
}

std::string indicators_to_json(const std::vector<IndicatorRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json top = json::array();
    for (const auto& [word, n] : row.top) top.push_back({{"token", word}, {"count", n}});
    out.push_back({{"tag", to_string(row.tag)}, {"top", top}});
  }
  return out.dump(2) + "\n";
}

// --- Sentence-level baseline -------------------------------------------------

std::vector<LabeledSentence> labeled_sentences(const Corpus& docs, TieRule rule) {
  std::vector<LabeledSentence> out;
  for (const auto& doc : docs)
    for (const auto& s : doc.sentences) {
      LabeledSentence ls;
      for (const auto& t : s.tokens) ls.words.push_back(t.text);
      ls.label = gold_sentence_label(s, rule);
      out.push_back(std::move(ls));
    }
  return out;
}

namespace {

std::vector<std::string> bag_of_words(const LabeledSentence& s) {
  std::set<std::string> words;
  for (const auto& w : s.words) {
    std::string lower = w;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    words.insert("w=" + lower);
  }
  std::vector<std::string> out{"bias"};
  out.insert(out.end(), words.begin(), words.end());
  return out;
}

}  // namespace

BaselineResult baseline_sentence_classifier(const std::vector<LabeledSentence>& train,
                                            const std::vector<LabeledSentence>& test,
                                            const BaselineConfig& config) {
  if (train.empty()) throw Error("baseline training set is empty");
  if (config.epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  constexpr std::size_t C = kNumLabels;

  FeatureDictionary dict;
  std::vector<std::vector<std::uint32_t>> train_x;
  for (const auto& s : train) {
    std::vector<std::uint32_t> x;
    for (const auto& f : bag_of_words(s)) x.push_back(dict.add(f));
    train_x.push_back(std::move(x));
  }
  std::vector<double> w(dict.size() * C, 0.0), u(dict.size() * C, 0.0);
  double c = 1.0;

  auto argmax = [&](const std::vector<std::uint32_t>& x, const std::vector<double>& weights) {
    std::array<double, C> score{};
    for (auto f : x)
      for (std::size_t k = 0; k < C; ++k) score[k] += weights[f * C + k];
    std::size_t best = 0;
    for (std::size_t k = 1; k < C; ++k)
      if (score[k] > score[best]) best = k;
    return best;
  };

  Rng rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (auto i : order) {
      const auto gold = index_of(train[i].label);
      const auto pred = argmax(train_x[i], w);
      if (pred != gold) {
        for (auto f : train_x[i]) {
          w[f * C + gold] += 1.0;
          u[f * C + gold] += c;
          w[f * C + pred] -= 1.0;
          u[f * C + pred] -= c;
        }
      }
      c += 1.0;
    }
  }
  for (std::size_t j = 0; j < w.size(); ++j) w[j] -= u[j] / c;

  BaselineResult result;
  std::vector<ArgLabel> gold;
  for (const auto& s : test) {
    std::vector<std::uint32_t> x;
    for (const auto& f : bag_of_words(s))
      if (auto id = dict.find(f)) x.push_back(*id);
    result.predictions.push_back(kAllLabels[argmax(x, w)]);
    gold.push_back(s.label);
  }
  result.table = sentence_metrics(gold, result.predictions);
  return result;
}

// --- Corpus evaluation ---------------------------------------------------------

namespace {

struct DocCounts {
  TagSequence gold_tags, pred_tags;
  std::vector<ArgLabel> gold_labels, pred_labels;
  std::size_t gold_spans = 0, pred_spans = 0, matched_spans = 0;
};

DocCounts count_document(const Document& g, const Document& p, TieRule rule) {
  if (g.doc_id != p.doc_id)
    throw Error("document mismatch: gold '" + g.doc_id + "' vs predicted '" + p.doc_id + "'");
  if (g.sentences.size() != p.sentences.size())
    throw Error("document '" + g.doc_id + "' has " + std::to_string(g.sentences.size()) +
                " gold sentences but " + std::to_string(p.sentences.size()) + " predicted");
  DocCounts out;
  for (std::size_t s = 0; s < g.sentences.size(); ++s) {
    const auto& gs = g.sentences[s];
    const auto& ps = p.sentences[s];
    if (gs.tokens.size() != ps.tokens.size())
      throw Error("document '" + g.doc_id + "' sentence " + std::to_string(s) +
                  " differs in token count");
    for (std::size_t t = 0; t < gs.tokens.size(); ++t)
      if (gs.tokens[t].text != ps.tokens[t].text)
        throw Error("document '" + g.doc_id + "' sentence " + std::to_string(s) + " token " +
                    std::to_string(t) + " differs between gold and prediction");

    const auto gold = encode(gs);
    TagSequence pred;
    std::vector<LabeledSpan> pred_spans;
    std::optional<ArgLabel> pred_label;
    if (ps.predicted && ps.predicted->tags.size() == ps.tokens.size()) {
      pred = ps.predicted->tags;
      pred_spans = ps.predicted->spans;
      pred_label = ps.predicted->label;
    } else {
      pred = encode(ps);
      pred_spans = ps.spans;
    }
    out.gold_tags.insert(out.gold_tags.end(), gold.begin(), gold.end());
    out.pred_tags.insert(out.pred_tags.end(), pred.begin(), pred.end());
    out.gold_labels.push_back(gold_sentence_label(gs, rule));
    out.pred_labels.push_back(pred_label ? *pred_label : sentence_label(pred, rule));

    out.gold_spans += gs.spans.size();
    out.pred_spans += pred_spans.size();
    for (const auto& sp : pred_spans)
      if (std::find(gs.spans.begin(), gs.spans.end(), sp) != gs.spans.end()) ++out.matched_spans;
  }
  return out;
}

}  // namespace

EvalReport evaluate_corpora(const Corpus& gold, const Corpus& predicted, const EvalOptions& options) {
  if (gold.size() != predicted.size())
    throw Error("gold corpus has " + std::to_string(gold.size()) + " documents but prediction has " +
                std::to_string(predicted.size()));
  std::vector<DocCounts> per_doc(gold.size());
  parallel_for(gold.size(), options.jobs, [&](std::size_t i) {
    per_doc[i] = count_document(gold[i], predicted[i], options.tie_rule);
  });

  DocCounts all;
  for (const auto& d : per_doc) {
    all.gold_tags.insert(all.gold_tags.end(), d.gold_tags.begin(), d.gold_tags.end());
    all.pred_tags.insert(all.pred_tags.end(), d.pred_tags.begin(), d.pred_tags.end());
    all.gold_labels.insert(all.gold_labels.end(), d.gold_labels.begin(), d.gold_labels.end());
    all.pred_labels.insert(all.pred_labels.end(), d.pred_labels.begin(), d.pred_labels.end());
    all.gold_spans += d.gold_spans;
    all.pred_spans += d.pred_spans;
    all.matched_spans += d.matched_spans;
  }

  EvalReport r;
  r.documents = gold.size();
  r.sentences = all.gold_labels.size();
  r.tokens = all.gold_tags.size();
  r.token = token_metrics(all.gold_tags, all.pred_tags);
  r.sentence = sentence_metrics(all.gold_labels, all.pred_labels);
  r.token_confusion = token_confusion(all.gold_tags, all.pred_tags);
  r.sentence_confusion = sentence_confusion(all.gold_labels, all.pred_labels);
  r.spans.gold = all.gold_spans;
  r.spans.predicted = all.pred_spans;
  r.spans.matched = all.matched_spans;
  r.spans.precision = ratio(all.matched_spans, all.pred_spans);
  r.spans.recall = ratio(all.matched_spans, all.gold_spans);
  r.spans.f1 = f1_of(r.spans.precision, r.spans.recall);
  if (options.kappa && !all.gold_labels.empty())
    r.kappa = sentence_kappa(all.gold_labels, all.pred_labels);
  return r;
}

// --- Report output ---------------------------------------------------------------

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json table_to_json(const MetricsTable& t) {
  json rows = json::array();
  for (std::size_t k = 0; k < t.classes.size(); ++k) {
    const auto& r = t.rows[k];
    json row = {{"class", t.classes[k]}, {"support", r.support}, {"predicted", r.predicted}};
    if (r.present()) {
      row["precision"] = r.precision;
      row["recall"] = r.recall;
      row["f1"] = r.f1;
    } else {
      row["precision"] = nullptr;
      row["recall"] = nullptr;
      row["f1"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  return {{"rows", rows},
          {"macro", {{"precision", optional_number(t.macro_precision())},
                     {"recall", optional_number(t.macro_recall())},
                     {"f1", optional_number(t.macro_f1())}}},
          {"accuracy", t.accuracy()},
          {"total", t.total}};
}

json confusion_to_json(const ConfusionMatrix& m) {
  const std::size_t n = m.classes.size();
  json counts = json::array();
  json percent = json::array();
  for (std::size_t r = 0; r < n; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < n; ++c) row.push_back(m.count(r, c));
    counts.push_back(row);
    percent.push_back(m.percent[r] ? json(*m.percent[r]) : json(nullptr));
  }
  return {{"classes", m.classes}, {"counts", counts}, {"row_percent", percent}};
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void write_table(std::ostream& os, const MetricsTable& t, const std::string& heading) {
  os << std::left << std::setw(14) << heading << std::right << std::setw(10) << "precision"
     << std::setw(10) << "recall" << std::setw(10) << "f1" << std::setw(10) << "support"
     << std::setw(10) << "predicted" << '\n';
  for (std::size_t k = 0; k < t.classes.size(); ++k) {
    const auto& r = t.rows[k];
    os << std::left << std::setw(14) << t.classes[k] << std::right;
    if (r.present())
      os << std::setw(10) << fixed(r.precision) << std::setw(10) << fixed(r.recall) << std::setw(10)
         << fixed(r.f1);
    else
      os << std::setw(10) << "-" << std::setw(10) << "-" << std::setw(10) << "-";
    os << std::setw(10) << r.support << std::setw(10) << r.predicted << '\n';
  }
  auto opt = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string("-"); };
  os << std::left << std::setw(14) << "macro" << std::right << std::setw(10)
     << opt(t.macro_precision()) << std::setw(10) << opt(t.macro_recall()) << std::setw(10)
     << opt(t.macro_f1()) << '\n';
  os << "accuracy " << fixed(t.accuracy()) << " over " << t.total << '\n';
}

void write_confusion(std::ostream& os, const ConfusionMatrix& m) {
  const std::size_t n = m.classes.size();
  os << std::left << std::setw(14) << "true\\pred" << std::right;
  for (const auto& c : m.classes) os << std::setw(14) << c;
  os << '\n';
  for (std::size_t r = 0; r < n; ++r) {
    os << std::left << std::setw(14) << m.classes[r] << std::right;
    for (std::size_t c = 0; c < n; ++c) {
      std::string cell = std::to_string(m.count(r, c));
      if (m.percent[r]) cell += " (" + fixed((*m.percent[r])[c], 1) + ")";
      os << std::setw(14) << cell;
    }
    os << '\n';
  }
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
  json out = {{"averaging", "corpus-level micro counts"},
              {"documents", r.documents},
              {"sentences", r.sentences},
              {"tokens", r.tokens},
              {"token", table_to_json(r.token)},
              {"sentence", table_to_json(r.sentence)},
              {"span_exact_match",
               {{"gold", r.spans.gold},
                {"predicted", r.spans.predicted},
                {"matched", r.spans.matched},
                {"precision", r.spans.precision},
                {"recall", r.spans.recall},
                {"f1", r.spans.f1}}},
              {"token_confusion", confusion_to_json(r.token_confusion)},
              {"sentence_confusion", confusion_to_json(r.sentence_confusion)}};
  if (r.kappa) {
    json per = json::object();
    for (std::size_t t = 0; t < 3; ++t) per[std::string(to_string(kIrcLabels[t]))] = r.kappa->per_type[t];
    out["kappa"] = {{"overall", r.kappa->overall}, {"per_type", per}, {"mean_per_type", r.kappa->mean_per_type}};
  }
  if (r.baseline) out["baseline_sentence"] = table_to_json(*r.baseline);
  return out.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& r) {
  std::ostringstream os;
  os << "# evaluation: " << r.documents << " documents, " << r.sentences << " sentences, "
     << r.tokens << " tokens (corpus-level micro counts)\n\n";
  os << "## token level\n";
  write_table(os, r.token, "tag");
  os << "\n## sentence level (majority of token labels)\n";
  write_table(os, r.sentence, "type");
  if (r.baseline) {
    os << "\n## sentence level, bag-of-words baseline\n";
    write_table(os, *r.baseline, "type");
  }
  os << "\n## spans (exact match)\n";
  os << "precision " << fixed(r.spans.precision) << "  recall " << fixed(r.spans.recall) << "  f1 "
     << fixed(r.spans.f1) << "  gold " << r.spans.gold << "  predicted " << r.spans.predicted
     << "  matched " << r.spans.matched << '\n';
  if (r.kappa) {
    os << "\n## agreement (Cohen's kappa, gold vs predicted sentence labels)\n";
    os << "overall " << fixed(r.kappa->overall);
    for (std::size_t t = 0; t < 3; ++t)
      os << "  " << to_string(kIrcLabels[t]) << ' ' << fixed(r.kappa->per_type[t]);
    os << "  mean " << fixed(r.kappa->mean_per_type) << '\n';
  }
  os << "\n## token confusion (rows true, columns predicted; row %)\n";
  write_confusion(os, r.token_confusion);
  os << "\n## sentence confusion (rows true, columns predicted; row %)\n";
  write_confusion(os, r.sentence_confusion);
  return os.str();
}

}  // namespace argmine

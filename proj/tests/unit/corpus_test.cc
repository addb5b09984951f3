#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "argmine/corpus.h"
#include "oracles.h"

namespace argmine {
namespace {

Corpus read_string(const std::string& text, CorpusFormat format) {
  std::istringstream in(text);
  return read_corpus(in, format, "test");
}

std::string write_string(const Corpus& docs, CorpusFormat format) {
  std::ostringstream out;
  write_corpus(docs, out, format);
  return out.str();
}

Document one_sentence_doc() {
  Sentence s;
  for (const char* w : {"HELD", ",", "appeal", "allowed"}) s.tokens.push_back({w, 0, 0});
  s.spans = {{ArgLabel::Conclusion, 0, 3}};
  assign_canonical_offsets(s);
  return {"case-1", DocKind::Summary, {s}};
}

TEST(Conll, ReadsOneSentence) {
  const auto docs = read_string(
      "# doc_id = case-1\tsummary\nHELD\tB-Conclusion\n,\tI-Conclusion\nappeal\tI-Conclusion\n"
      "allowed\tI-Conclusion\n\n",
      CorpusFormat::Conll);
  ASSERT_EQ(docs.size(), 1u);
  ASSERT_EQ(docs[0].sentences.size(), 1u);
  EXPECT_EQ(docs[0].sentences[0].spans, (std::vector<LabeledSpan>{{ArgLabel::Conclusion, 0, 3}}));
  EXPECT_EQ(docs[0], one_sentence_doc());
}

TEST(Conll, EmptyFileIsEmptyCorpus) {
  EXPECT_TRUE(read_string("", CorpusFormat::Conll).empty());
  EXPECT_TRUE(read_string("", CorpusFormat::Records).empty());
}

TEST(Conll, IllFormedTagsNameTheSentence) {
  const std::string text =
      "# doc_id = d1\tsummary\nA\tO\n\nB\tB-Issue\nC\tI-Reason\n\n";
  try {
    read_string(text, CorpusFormat::Conll);
    FAIL() << "ill-formed sequence accepted";
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("d1"), std::string::npos) << what;
    EXPECT_NE(what.find("sentence 1"), std::string::npos) << what;
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(Conll, MalformedLinesCarryLineNumbers) {
  try {
    read_string("# doc_id = d1\tsummary\nA\tO\nB B-Issue\n", CorpusFormat::Conll);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(read_string("A\tO\n", CorpusFormat::Conll), ParseError);
  EXPECT_THROW(read_string("# doc_id = d1\tsummary\nA\tB-Foo\n", CorpusFormat::Conll), ParseError);
}

TEST(Conll, ZeroSpanSentenceWritesAllO) {
  Document d = one_sentence_doc();
  d.sentences[0].spans.clear();
  const auto text = write_string({d}, CorpusFormat::Conll);
  EXPECT_EQ(text, "# doc_id = case-1\tsummary\nHELD\tO\n,\tO\nappeal\tO\nallowed\tO\n\n");
}

TEST(Records, RejectsOverlappingSpans) {
  const std::string line =
      R"({"doc_id":"d1","kind":"summary","sentences":[{"tokens":["a","b","c"],)"
      R"("offsets":[[0,1],[2,3],[4,5]],"spans":[{"label":"Issue","start":0,"end":1},)"
      R"({"label":"Reason","start":1,"end":2}]}]})";
  try {
    read_string(line + "\n", CorpusFormat::Records);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("d1"), std::string::npos);
  }
}

TEST(Records, KeepsSentenceLabelAndPrediction) {
  Document d = one_sentence_doc();
  d.sentences[0].sentence_label = ArgLabel::Conclusion;
  Prediction p;
  p.tags = {Tag::BConclusion, Tag::IConclusion, Tag::O, Tag::O};
  p.spans = {{ArgLabel::Conclusion, 0, 1}};
  p.label = ArgLabel::NonIRC;
  d.sentences[0].predicted = p;
  const auto back = read_string(write_string({d}, CorpusFormat::Records), CorpusFormat::Records);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], d);
}

TEST(RoundTrip, BothFormatsOnRandomCorpora) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto docs = testing::random_corpus(rng, 50);
    for (auto f : {CorpusFormat::Conll, CorpusFormat::Records}) {
      const auto first = write_string(docs, f);
      const auto back = read_string(first, f);
      EXPECT_EQ(back, docs);
      EXPECT_EQ(write_string(back, f), first);
    }
  }
}

TEST(Validate, RejectsBadDocuments) {
  Document d = one_sentence_doc();
  d.sentences[0].spans.push_back({ArgLabel::Issue, 3, 3});
  EXPECT_THROW(validate_document(d), ValidationError);
  d = one_sentence_doc();
  d.sentences[0].spans[0].label = ArgLabel::NonIRC;
  EXPECT_THROW(validate_document(d), ValidationError);
  d = one_sentence_doc();
  d.sentences[0].tokens[1].text = "a b";
  EXPECT_THROW(validate_document(d), ValidationError);
  EXPECT_THROW(validate_corpus({one_sentence_doc(), one_sentence_doc()}), ValidationError);
  std::ostringstream out;
  EXPECT_THROW(write_corpus({d}, out, CorpusFormat::Records), ValidationError);
}

Corpus numbered(int n) {
  Corpus docs;
  for (int i = 0; i < n; ++i) {
    Document d = one_sentence_doc();
    d.doc_id = "d" + std::to_string(i);
    docs.push_back(d);
  }
  return docs;
}

TEST(Split, SizesAndErrors) {
  const auto s = split_corpus(numbered(10), {}, 7);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.validation.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
  EXPECT_THROW(split_corpus(numbered(1), {}, 7), Error);
  EXPECT_THROW(split_corpus(numbered(5), {0.5, 0.2, 0.2}, 7), std::invalid_argument);
  EXPECT_THROW(split_corpus(numbered(5), {1.2, -0.1, -0.1}, 7), std::invalid_argument);
}

TEST(Split, SmallCorpusBorrowsFromTrain) {
  const auto s = split_corpus(numbered(3), {}, 1);
  EXPECT_EQ(s.train.size(), 1u);
  EXPECT_EQ(s.validation.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(Split, PartitionAndDeterminism) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = uniform_int(rng, 3, 120);
    const auto docs = numbered(n);
    const auto seed = rng();
    const auto a = split_corpus(docs, {}, seed);
    const auto b = split_corpus(docs, {}, seed);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.validation, b.validation);
    EXPECT_EQ(a.test, b.test);
    std::set<std::string> all;
    for (const auto* part : {&a.train, &a.validation, &a.test}) all.insert(part->begin(), part->end());
    EXPECT_EQ(all.size(), static_cast<std::size_t>(n));
    EXPECT_EQ(a.train.size() + a.validation.size() + a.test.size(), static_cast<std::size_t>(n));
    EXPECT_EQ(a.test.size(), std::max<std::size_t>(1, static_cast<std::size_t>(n / 10)));
  }
}

TEST(Split, SelectKeepsCorpusOrder) {
  const auto docs = numbered(5);
  const auto picked = select_documents(docs, {"d3", "d1"});
  ASSERT_EQ(picked.size(), 2u);
  EXPECT_EQ(picked[0].doc_id, "d1");
  EXPECT_EQ(picked[1].doc_id, "d3");
}

TEST(Stats, SingleConclusionSpan) {
  const auto stats = corpus_stats({one_sentence_doc()});
  const auto& c = stats.rows[2];
  EXPECT_EQ(c.label, ArgLabel::Conclusion);
  EXPECT_EQ(c.count, 1u);
  EXPECT_EQ(c.min_length, 4);
  EXPECT_EQ(c.max_length, 4);
  EXPECT_DOUBLE_EQ(*c.mean_length, 4.0);
  EXPECT_EQ(stats.rows[0].count, 0u);
  EXPECT_FALSE(stats.rows[0].min_length);
  const auto text = format_stats(stats);
  EXPECT_NE(text.find("4.00"), std::string::npos) << text;
}

TEST(Stats, MeanWithinRange) {
  Rng rng(8);
  const auto stats = corpus_stats(testing::random_corpus(rng, 30));
  for (const auto& row : stats.rows) {
    if (row.count == 0) continue;
    EXPECT_LE(*row.min_length, *row.mean_length);
    EXPECT_LE(*row.mean_length, *row.max_length);
  }
}

TEST(RawText, TokenizePeelsPunctuation) {
  const auto toks = tokenize("  (HELD): appeal allowed.");
  std::vector<std::string> words;
  for (const auto& t : toks) words.push_back(t.text);
  EXPECT_EQ(words, (std::vector<std::string>{"(", "HELD", ")", ":", "appeal", "allowed", "."}));
  EXPECT_EQ(toks[1].char_start, 3);
  EXPECT_EQ(toks[1].char_end, 7);
}

TEST(RawText, SegmentsOnTerminalPunctuationBeforeUppercase) {
  const auto parts = segment_sentences("The appeal is allowed. Costs follow. see s. 12 here? No.");
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0], "The appeal is allowed.");
  EXPECT_EQ(parts[1], "Costs follow. see s. 12 here?");
  EXPECT_EQ(parts[2], "No.");
  const auto doc = document_from_text("t", DocKind::FullText, "One two. Three four.");
  EXPECT_EQ(doc.sentences.size(), 2u);
  EXPECT_TRUE(doc.sentences[1].spans.empty());
}

}  // namespace
}  // namespace argmine

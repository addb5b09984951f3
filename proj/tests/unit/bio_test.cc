#include <gtest/gtest.h>

#include "argmine/bio.h"
#include "oracles.h"

namespace argmine {
namespace {

using T = Tag;

TEST(TagHelpers, OrderAndFamilies) {
  EXPECT_EQ(index_of(T::O), 0u);
  EXPECT_EQ(index_of(T::BIssue), 1u);
  EXPECT_EQ(index_of(T::IConclusion), 6u);
  EXPECT_EQ(label_of(T::IReason), ArgLabel::Reason);
  EXPECT_EQ(label_of(T::O), ArgLabel::NonIRC);
  EXPECT_EQ(begin_tag(ArgLabel::Conclusion), T::BConclusion);
  EXPECT_EQ(inside_tag(ArgLabel::Issue), T::IIssue);
  for (auto t : kAllTags) EXPECT_EQ(parse_tag(to_string(t)), t);
  EXPECT_FALSE(parse_tag("B-Foo"));
}

TEST(Encode, WholeSentenceConclusion) {
  const std::vector<LabeledSpan> spans{{ArgLabel::Conclusion, 0, 4}};
  EXPECT_EQ(encode(spans, 5), (TagSequence{T::BConclusion, T::IConclusion, T::IConclusion,
                                           T::IConclusion, T::IConclusion}));
}

TEST(Encode, NoSpansIsAllO) { EXPECT_EQ(encode({}, 3), (TagSequence{T::O, T::O, T::O})); }

TEST(Encode, MixedSentence) {
  const std::vector<LabeledSpan> spans{{ArgLabel::Conclusion, 0, 2}, {ArgLabel::Reason, 3, 9}};
  TagSequence want{T::BConclusion, T::IConclusion, T::IConclusion, T::BReason};
  want.resize(10, T::IReason);
  EXPECT_EQ(encode(spans, 10), want);
}

TEST(Encode, RejectsOverlapAndOutOfRange) {
  const std::vector<LabeledSpan> overlap{{ArgLabel::Issue, 0, 2}, {ArgLabel::Reason, 2, 3}};
  EXPECT_THROW(encode(overlap, 4), std::invalid_argument);
  const std::vector<LabeledSpan> outside{{ArgLabel::Issue, 2, 4}};
  EXPECT_THROW(encode(outside, 4), std::invalid_argument);
}

TEST(Encode, AbuttingSameLabelSpansStayDistinct) {
  const std::vector<LabeledSpan> spans{{ArgLabel::Issue, 0, 1}, {ArgLabel::Issue, 2, 3}};
  const auto tags = encode(spans, 4);
  EXPECT_EQ(tags, (TagSequence{T::BIssue, T::IIssue, T::BIssue, T::IIssue}));
  EXPECT_EQ(decode(tags, RepairPolicy::Strict), spans);
}

TEST(Decode, DirectReading) {
  const TagSequence tags{T::BIssue, T::IIssue, T::O, T::BReason};
  EXPECT_EQ(decode(tags, RepairPolicy::Strict),
            (std::vector<LabeledSpan>{{ArgLabel::Issue, 0, 1}, {ArgLabel::Reason, 3, 3}}));
}

TEST(Decode, RepairPolicies) {
  const TagSequence tags{T::O, T::IReason, T::IReason};
  EXPECT_EQ(decode(tags, RepairPolicy::IAsB), (std::vector<LabeledSpan>{{ArgLabel::Reason, 1, 2}}));
  EXPECT_TRUE(decode(tags, RepairPolicy::IDrop).empty());
  try {
    decode(tags, RepairPolicy::Strict);
    FAIL() << "strict decode accepted an orphan I-tag";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.index(), 1u);
  }
}

TEST(Decode, LabelSwitchUnderIAsB) {
  const TagSequence tags{T::BIssue, T::IReason, T::IReason};
  EXPECT_EQ(decode(tags, RepairPolicy::IAsB),
            (std::vector<LabeledSpan>{{ArgLabel::Issue, 0, 0}, {ArgLabel::Reason, 1, 2}}));
}

TEST(Decode, EmptyInput) { EXPECT_TRUE(decode(TagSequence{}, RepairPolicy::Strict).empty()); }

TEST(WellFormed, Examples) {
  EXPECT_TRUE(is_well_formed(TagSequence{T::BIssue, T::IIssue}));
  EXPECT_EQ(first_violation(TagSequence{T::O, T::IIssue}), 1u);
  EXPECT_EQ(first_violation(TagSequence{T::BIssue, T::IReason}), 1u);
  EXPECT_EQ(first_violation(TagSequence{T::IIssue}), 0u);
}

TEST(WellFormed, TransitionTableMatchesDefinition) {
  for (auto next : kAllTags) {
    const bool inside = next == T::IIssue || next == T::IReason || next == T::IConclusion;
    EXPECT_EQ(transition_allowed(std::nullopt, next), !inside);
    for (auto prev : kAllTags) {
      const bool expect = !inside || (prev != T::O && label_of(prev) == label_of(next));
      EXPECT_EQ(transition_allowed(prev, next), expect) << to_string(prev) << "->" << to_string(next);
    }
  }
}

TEST(BioProperty, RoundTripAndBCount) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = uniform_int(rng, 0, 40);
    const auto spans = testing::random_spans(rng, n);
    const auto tags = encode(spans, static_cast<std::size_t>(n));
    EXPECT_TRUE(is_well_formed(tags));
    EXPECT_EQ(decode(tags, RepairPolicy::Strict), spans);
    const auto b = std::count_if(tags.begin(), tags.end(), [](Tag t) {
      return t == T::BIssue || t == T::BReason || t == T::BConclusion;
    });
    EXPECT_EQ(static_cast<std::size_t>(b), spans.size());
  }
}

TEST(BioProperty, AnyInputDecodesToValidSpans) {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 0, 20));
    TagSequence tags(n);
    for (auto& t : tags) t = kAllTags[uniform_index(rng, kNumTags)];
    for (auto policy : {RepairPolicy::IAsB, RepairPolicy::IDrop}) {
      const auto spans = decode(tags, policy);
      // encode rejects overlap and out-of-range spans
      const auto again = encode(spans, n);
      EXPECT_EQ(decode(again, RepairPolicy::Strict), spans);
      EXPECT_EQ(decode(encode(decode(again, policy), n), policy), decode(again, policy));
    }
  }
}

TEST(RepairPolicy, ParseAndPrint) {
  for (auto p : {RepairPolicy::Strict, RepairPolicy::IAsB, RepairPolicy::IDrop})
    EXPECT_EQ(parse_repair(to_string(p)), p);
  EXPECT_EQ(parse_repair("i_as_b"), RepairPolicy::IAsB);
  EXPECT_FALSE(parse_repair("lenient"));
}

}  // namespace
}  // namespace argmine

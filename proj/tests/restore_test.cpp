#include "oiekit/restore.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "oiekit/treebank.hpp"
#include "test_util.hpp"

using namespace oiekit;
using namespace oiekit::restore;

namespace {

EmbeddingMatrix one_hot(const std::string& id, const std::vector<std::size_t>& token_ids,
                        std::size_t dim) {
  EmbeddingMatrix m;
  m.sentence_id = id;
  m.dim = dim;
  m.data.assign(token_ids.size() * dim, 0.0f);
  for (std::size_t i = 0; i < token_ids.size(); ++i) m.data[i * dim + token_ids[i]] = 1.0f;
  return m;
}

}  // namespace

TEST(SimilarityProfile, IdenticalVectorScoresOne) {
  EmbeddingMatrix src = one_hot("s", {0, 1}, 4);
  EmbeddingMatrix tgt = one_hot("t", {2, 1, 3}, 4);
  auto profile = similarity_profile(src, tgt, TokenSpan{1, 2});
  ASSERT_EQ(profile.size(), 3u);
  EXPECT_EQ(profile[0], 0.0);
  EXPECT_EQ(profile[1], 1.0);
  EXPECT_EQ(profile[2], 0.0);
}

TEST(SimilarityProfile, OneHotProfileCountsMatches) {
  // span tokens {0, 1, 0}; target j scores the number of span tokens with
  // the same id
  EmbeddingMatrix src = one_hot("s", {0, 1, 0, 2}, 4);
  EmbeddingMatrix tgt = one_hot("t", {0, 1, 3}, 4);
  auto profile = similarity_profile(src, tgt, TokenSpan{0, 3});
  std::vector<std::size_t> src_ids{0, 1, 0};
  std::vector<std::size_t> tgt_ids{0, 1, 3};
  for (std::size_t j = 0; j < tgt_ids.size(); ++j) {
    double expected = 0.0;
    for (std::size_t i : src_ids) {
      if (i == tgt_ids[j]) expected += 1.0;
    }
    EXPECT_EQ(profile[j], expected);
  }
}

TEST(SimilarityProfile, ZeroRowContributesZero) {
  EmbeddingMatrix src = one_hot("s", {0}, 3);
  EmbeddingMatrix tgt = one_hot("t", {1, 2}, 3);
  tgt.data.assign(tgt.data.size(), 0.0f);  // all-zero target rows
  auto profile = similarity_profile(src, tgt, TokenSpan{0, 1});
  EXPECT_EQ(profile, (std::vector<double>{0.0, 0.0}));
}

TEST(SimilarityProfile, IsLinearInTheSourceSpan) {
  EmbeddingMatrix src = one_hot("s", {0, 1, 2, 1}, 5);
  EmbeddingMatrix tgt = one_hot("t", {1, 2, 4, 0}, 5);
  auto whole = similarity_profile(src, tgt, TokenSpan{0, 4});
  auto left = similarity_profile(src, tgt, TokenSpan{0, 2});
  auto right = similarity_profile(src, tgt, TokenSpan{2, 4});
  for (std::size_t j = 0; j < whole.size(); ++j) EXPECT_EQ(whole[j], left[j] + right[j]);
}

TEST(SimilarityProfile, ValidatesInputs) {
  EmbeddingMatrix src = one_hot("s", {0}, 3);
  EmbeddingMatrix tgt = one_hot("t", {1}, 4);
  EXPECT_THROW(similarity_profile(src, tgt, TokenSpan{0, 1}), DimMismatchError);
  EmbeddingMatrix tgt2 = one_hot("t", {1}, 3);
  EXPECT_THROW(similarity_profile(src, tgt2, TokenSpan{0, 2}), SpanOutOfRangeError);
}

TEST(MergeThresholdSpans, SplitsRunsAtThreshold) {
  std::vector<double> profile{0.1, 0.8, 0.9, 0.3, 0.75};
  auto spans = merge_threshold_spans(profile, 0.7);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].span, (TokenSpan{1, 3}));
  EXPECT_DOUBLE_EQ(spans[0].score, 0.8 + 0.9);
  EXPECT_EQ(spans[0].provenance, SpanProvenance::similarity);
  EXPECT_EQ(spans[1].span, (TokenSpan{4, 5}));
  EXPECT_DOUBLE_EQ(spans[1].score, 0.75);
}

TEST(MergeThresholdSpans, ThresholdIsStrict) {
  std::vector<double> profile{0.7, 0.7};
  EXPECT_TRUE(merge_threshold_spans(profile, 0.7).empty());
}

TEST(MergeThresholdSpans, AllAboveMakesOneSpan) {
  std::vector<double> profile{0.8, 0.9, 0.71};
  auto spans = merge_threshold_spans(profile, 0.7);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].span, (TokenSpan{0, 3}));
}

namespace {

// "he gave him the name of the planet" with a flat NP over tokens [3, 8)
const char* planet_tree() {
  return "(S (NP (PRP he)) (VP (VBD gave) (NP (PRP him)) "
         "(NP (DT the) (NN name) (PP (IN of) (NP (DT the) (NN planet))))))";
}

}  // namespace

TEST(CompleteSpans, WidensToCoveringPhrase) {
  tree::ParseTree t = tree::parse_bracketed(planet_tree());
  std::vector<ScoredSpan> spans{{TokenSpan{4, 5}, 1.0, SpanProvenance::similarity, {}}};
  auto completed = complete_spans(t, spans);
  ASSERT_EQ(completed.size(), 1u);
  EXPECT_EQ(completed[0].span, (TokenSpan{3, 8}));
  EXPECT_EQ(completed[0].provenance, SpanProvenance::tree_completed);
  EXPECT_EQ(completed[0].score, 1.0);
  ASSERT_TRUE(completed[0].origin.has_value());
  EXPECT_EQ(*completed[0].origin, (TokenSpan{4, 5}));
}

TEST(CompleteSpans, FixedPointWhenSpanEqualsPhrase) {
  tree::ParseTree t = tree::parse_bracketed(planet_tree());
  std::vector<ScoredSpan> spans{{TokenSpan{3, 8}, 2.0, SpanProvenance::similarity, {}}};
  auto completed = complete_spans(t, spans);
  ASSERT_EQ(completed.size(), 1u);
  EXPECT_EQ(completed[0].span, (TokenSpan{3, 8}));
  EXPECT_EQ(completed[0].provenance, SpanProvenance::similarity);
}

TEST(CompleteSpans, RetainsSpanWithoutQualifyingAncestor) {
  tree::ParseTree t = tree::parse_bracketed(planet_tree());
  std::vector<ScoredSpan> spans{{TokenSpan{1, 2}, 0.9, SpanProvenance::similarity, {}}};
  auto completed = complete_spans(t, spans);
  ASSERT_EQ(completed.size(), 1u);
  EXPECT_EQ(completed[0].span, (TokenSpan{1, 2}));
  EXPECT_EQ(completed[0].provenance, SpanProvenance::similarity);
}

TEST(CompleteSpans, DeduplicatesKeepingBestScore) {
  tree::ParseTree t = tree::parse_bracketed(planet_tree());
  // "the"(3) and "name"(4) both complete to the same flat NP
  std::vector<ScoredSpan> spans{{TokenSpan{4, 5}, 1.0, SpanProvenance::similarity, {}},
                                {TokenSpan{3, 4}, 1.5, SpanProvenance::similarity, {}}};
  auto completed = complete_spans(t, spans);
  ASSERT_EQ(completed.size(), 1u);
  EXPECT_EQ(completed[0].span, (TokenSpan{3, 8}));
  EXPECT_EQ(completed[0].score, 1.5);
}

TEST(CompleteSpans, NeverShrinks) {
  std::mt19937_64 gen(31);
  int checked = 0;
  while (checked < 200) {
    tree::ParseTree t = testutil::random_tree(gen, 4, false);
    std::size_t leaves = tree::leaf_count(t);
    if (leaves == 0) continue;
    ++checked;
    std::size_t l = testutil::pick(gen, leaves);
    std::size_t r = l + 1 + testutil::pick(gen, leaves - l);
    std::vector<ScoredSpan> spans{{TokenSpan{l, r}, 1.0, SpanProvenance::similarity, {}}};
    for (const ScoredSpan& s : complete_spans(t, spans)) {
      EXPECT_TRUE(s.span.covers(TokenSpan{l, r}));
    }
  }
}

TEST(SelectTupleSpans, MaximizesTotalScoreWithoutOverlap) {
  std::vector<std::vector<ScoredSpan>> slots{
      {{TokenSpan{0, 2}, 1.5, SpanProvenance::similarity, {}},
       {TokenSpan{3, 5}, 1.2, SpanProvenance::similarity, {}}},
      {{TokenSpan{1, 4}, 1.4, SpanProvenance::similarity, {}},
       {TokenSpan{4, 6}, 1.0, SpanProvenance::similarity, {}}}};
  auto chosen = select_tuple_spans(slots);
  ASSERT_EQ(chosen.size(), 2u);
  EXPECT_EQ(chosen[0], (TokenSpan{0, 2}));
  EXPECT_EQ(chosen[1], (TokenSpan{4, 6}));
}

TEST(SelectTupleSpans, SingleCandidatesPassThrough) {
  std::vector<std::vector<ScoredSpan>> slots{
      {{TokenSpan{0, 1}, 0.8, SpanProvenance::similarity, {}}},
      {{TokenSpan{2, 3}, 0.9, SpanProvenance::similarity, {}}}};
  auto chosen = select_tuple_spans(slots);
  EXPECT_EQ(chosen[0], (TokenSpan{0, 1}));
  EXPECT_EQ(chosen[1], (TokenSpan{2, 3}));
}

TEST(SelectTupleSpans, ThrowsWhenAllCombinationsOverlap) {
  std::vector<std::vector<ScoredSpan>> slots{
      {{TokenSpan{0, 3}, 1.0, SpanProvenance::similarity, {}}},
      {{TokenSpan{1, 2}, 1.0, SpanProvenance::similarity, {}}}};
  EXPECT_THROW(select_tuple_spans(slots), NoFeasibleSelectionError);
}

TEST(SelectTupleSpans, ThrowsOnEmptySlot) {
  std::vector<std::vector<ScoredSpan>> slots{
      {{TokenSpan{0, 1}, 1.0, SpanProvenance::similarity, {}}}, {}};
  EXPECT_THROW(select_tuple_spans(slots), NoCandidatesError);
}

namespace {

struct Toy {
  std::vector<std::size_t> src_ids;
  std::vector<std::size_t> tgt_ids;
  std::vector<TokenSpan> arg_spans;
};

Toy random_toy(std::mt19937_64& gen) {
  Toy toy;
  std::size_t src_len = 4 + testutil::pick(gen, 5);
  std::size_t tgt_len = 1 + testutil::pick(gen, 8);
  for (std::size_t i = 0; i < src_len; ++i) toy.src_ids.push_back(testutil::pick(gen, 5));
  for (std::size_t i = 0; i < tgt_len; ++i) toy.tgt_ids.push_back(testutil::pick(gen, 5));
  std::size_t args = 1 + testutil::pick(gen, 3);
  std::size_t cursor = 0;
  for (std::size_t a = 0; a < args && cursor < src_len; ++a) {
    std::size_t l = cursor + testutil::pick(gen, 2);
    if (l >= src_len) break;
    std::size_t r = std::min(src_len, l + 1 + testutil::pick(gen, 2));
    toy.arg_spans.push_back(TokenSpan{l, r});
    cursor = r;
  }
  return toy;
}

// Brute force over all non-overlapping combinations of threshold runs.
std::optional<std::vector<TokenSpan>> oracle_select(
    const std::vector<std::vector<ScoredSpan>>& slots) {
  std::optional<std::vector<TokenSpan>> best;
  double best_score = 0.0;
  std::vector<std::size_t> idx(slots.size(), 0);
  for (;;) {
    std::vector<TokenSpan> spans;
    double score = 0.0;
    bool feasible = true;
    for (std::size_t s = 0; s < slots.size() && feasible; ++s) {
      const ScoredSpan& cand = slots[s][idx[s]];
      for (const TokenSpan& prev : spans) {
        if (cand.span.overlaps(prev)) {
          feasible = false;
          break;
        }
      }
      spans.push_back(cand.span);
      score += cand.score;
    }
    if (feasible) {
      if (!best || score > best_score ||
          (score == best_score &&
           std::lexicographical_compare(spans.begin(), spans.end(), best->begin(), best->end()))) {
        best = spans;
        best_score = score;
      }
    }
    std::size_t pos = 0;
    while (pos < slots.size() && ++idx[pos] == slots[pos].size()) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == slots.size()) break;
  }
  return best;
}

}  // namespace

TEST(RestoreArguments, IdentityParaphraseKeepsSpans) {
  // all-distinct tokens; target identical to source
  EmbeddingMatrix src = one_hot("s", {0, 1, 2, 3}, 4);
  EmbeddingMatrix tgt = one_hot("t", {0, 1, 2, 3}, 4);
  Extraction tuple;
  tuple.arg_texts = {"mary", "the book"};
  tuple.arg_spans = {TokenSpan{0, 1}, TokenSpan{2, 4}};
  tuple.pred_text = "gave";
  tuple.pred_span = TokenSpan{1, 2};
  auto spans = restore_arguments(tuple, src, tgt);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0], (TokenSpan{0, 1}));
  EXPECT_EQ(spans[1], (TokenSpan{2, 4}));
}

TEST(RestoreArguments, RelocatesDeformedArgumentIntoPhrase) {
  // source: ... named it Earth .   target: ... gave him the name of the planet .
  std::map<std::string, std::size_t> ids;
  auto id_of = [&](const std::string& w) {
    auto it = ids.find(w);
    if (it != ids.end()) return it->second;
    std::size_t next = ids.size();
    ids.emplace(w, next);
    return next;
  };
  std::vector<std::string> src_tokens{"After", "five", "years", "of",  "searching", ",",
                                      "the",   "Colonials", "found", "a", "new",  "world",
                                      "and",   "named", "it",  "Earth", "."};
  std::vector<std::string> tgt_tokens{"The", "colonials", "searched", "for", "five",  "years",
                                      "until", "they", "discovered", "a",   "new",   "world",
                                      "and", "gave", "him", "the", "name", "of", "the", "planet",
                                      "."};
  std::vector<std::size_t> src_ids, tgt_ids;
  for (const std::string& w : src_tokens) src_ids.push_back(id_of(text::fold_case(w)));
  for (const std::string& w : tgt_tokens) tgt_ids.push_back(id_of(text::fold_case(w)));
  tgt_ids[16] = id_of("earth");  // "name" matches the source argument "Earth"
  std::size_t dim = ids.size();
  EmbeddingMatrix src = one_hot("s", src_ids, dim);
  EmbeddingMatrix tgt = one_hot("t", tgt_ids, dim);

  tree::ParseTree tgt_tree = tree::parse_bracketed(
      "(ROOT (S (NP (DT The) (NNS colonials)) (VP (VBD searched) (PP (IN for) "
      "(NP (CD five) (NNS years))) (SBAR (IN until) (S (NP (PRP they)) (VP (VP (VBD discovered) "
      "(NP (DT a) (JJ new) (NN world))) (CC and) (VP (VBD gave) (NP (PRP him)) "
      "(NP (DT the) (NN name) (PP (IN of) (NP (DT the) (NN planet))))))))) (. .)))");

  Extraction tuple;
  tuple.arg_texts = {"Earth"};
  tuple.arg_spans = {TokenSpan{15, 16}};
  tuple.pred_text = "named";

  auto similarity_only = restore_arguments(tuple, src, tgt);
  ASSERT_EQ(similarity_only.size(), 1u);
  EXPECT_EQ(similarity_only[0], (TokenSpan{16, 17}));

  auto completed = restore_arguments(tuple, src, tgt, tgt_tree);
  ASSERT_EQ(completed.size(), 1u);
  EXPECT_EQ(completed[0], (TokenSpan{15, 20}));
  EXPECT_TRUE(completed[0].covers(similarity_only[0]));
}

TEST(RestoreArguments, MatchesBruteForceOnRandomToys) {
  std::mt19937_64 gen(37);
  int checked = 0;
  while (checked < 200) {
    Toy toy = random_toy(gen);
    if (toy.arg_spans.empty()) continue;
    ++checked;
    EmbeddingMatrix src = one_hot("s", toy.src_ids, 5);
    EmbeddingMatrix tgt = one_hot("t", toy.tgt_ids, 5);
    Extraction tuple;
    for (const TokenSpan& span : toy.arg_spans) {
      tuple.arg_texts.push_back("arg");
      tuple.arg_spans.push_back(span);
    }
    std::vector<std::vector<ScoredSpan>> slots;
    bool empty_slot = false;
    for (const TokenSpan& span : toy.arg_spans) {
      auto runs = merge_threshold_spans(similarity_profile(src, tgt, span), 0.7);
      if (runs.empty()) empty_slot = true;
      slots.push_back(runs);
    }
    if (empty_slot) {
      EXPECT_THROW(restore_arguments(tuple, src, tgt), NoCandidatesError);
      continue;
    }
    auto expected = oracle_select(slots);
    if (!expected) {
      EXPECT_THROW(restore_arguments(tuple, src, tgt), NoFeasibleSelectionError);
      continue;
    }
    auto got = restore_arguments(tuple, src, tgt);
    EXPECT_EQ(got, *expected);
    for (std::size_t a = 0; a < got.size(); ++a) {
      for (std::size_t b = a + 1; b < got.size(); ++b) {
        EXPECT_FALSE(got[a].overlaps(got[b]));
      }
    }
  }
}

TEST(PredicateRequest, FormatsExactly) {
  EXPECT_EQ(predicate_request("The colonials searched for five years .", "the Colonials",
                              "a new world"),
            "The colonials searched for five years ., the Colonials, a new world </s>");
}

TEST(PredicateRequest, KeepsSeparatorsForEmptySlot) {
  EXPECT_EQ(predicate_request("A sentence .", "only arg", ""), "A sentence ., only arg,  </s>");
}

TEST(PredicateRequest, RejectsEmptySentence) {
  EXPECT_THROW(predicate_request("", "a", "b"), EmptySentenceError);
}

TEST(FallbackPredicate, IdenticalSentenceKeepsOriginalSpan) {
  std::vector<std::string> tokens{"the", "colonials", "searched", "for", "a", "world"};
  auto span = fallback_predicate(tokens, {"searched", "for"},
                                 {TokenSpan{0, 2}, TokenSpan{4, 6}});
  ASSERT_TRUE(span.has_value());
  EXPECT_EQ(*span, (TokenSpan{2, 4}));
}

TEST(FallbackPredicate, AbsentWithoutLemmaOverlap) {
  std::vector<std::string> tokens{"her", "friend", "received", "the", "book"};
  auto span = fallback_predicate(tokens, {"gave"}, {TokenSpan{0, 2}, TokenSpan{3, 5}});
  EXPECT_FALSE(span.has_value());
}

TEST(FallbackPredicate, FindsTenseShiftedVerbThroughLemmaTable) {
  LemmaTable table{{"searching", "search"}, {"searched", "search"}};
  std::vector<std::string> tokens{"they", "kept", "searching", "for", "food"};
  // source predicate "searched for" lemmatized: [search, for]
  auto span = fallback_predicate(tokens, {"search", "for"},
                                 {TokenSpan{0, 1}, TokenSpan{4, 5}}, &table);
  ASSERT_TRUE(span.has_value());
  EXPECT_EQ(*span, (TokenSpan{2, 4}));
}

TEST(FallbackPredicate, UsesRegionBetweenClosestArguments) {
  std::vector<std::string> tokens{"a", "x", "run", "b", "run", "c"};
  // closest pair is [3,4) and [5,6); only the "run" at 4 is eligible
  auto span = fallback_predicate(
      tokens, {"run"}, {TokenSpan{0, 1}, TokenSpan{3, 4}, TokenSpan{5, 6}});
  ASSERT_TRUE(span.has_value());
  EXPECT_EQ(*span, (TokenSpan{4, 5}));
}

TEST(FallbackPredicate, RejectsOverlappingArguments) {
  std::vector<std::string> tokens{"a", "b", "c"};
  EXPECT_THROW(fallback_predicate(tokens, {"x"}, {TokenSpan{0, 2}, TokenSpan{1, 3}}),
               std::invalid_argument);
}

TEST(ImportanceScores, TreeAddedTokensGetTupleMean) {
  // similarity tokens score 0.9 and 0.7; the token added by completion gets
  // their mean
  std::vector<ScoredSpan> selected{
      {TokenSpan{0, 3}, 1.6, SpanProvenance::tree_completed, TokenSpan{0, 2}}};
  std::vector<double> profile{0.9, 0.7, 0.1};
  auto importance = importance_scores(selected, profile);
  ASSERT_EQ(importance.size(), 3u);
  EXPECT_DOUBLE_EQ(*importance[0], 0.9);
  EXPECT_DOUBLE_EQ(*importance[1], 0.7);
  EXPECT_DOUBLE_EQ(*importance[2], 0.8);
}

TEST(ImportanceScores, SimilarityTokensKeepProfileValues) {
  std::vector<ScoredSpan> selected{{TokenSpan{1, 3}, 1.7, SpanProvenance::similarity, {}}};
  std::vector<double> profile{0.2, 0.8, 0.9, 0.4};
  auto importance = importance_scores(selected, profile);
  EXPECT_FALSE(importance[0].has_value());
  EXPECT_DOUBLE_EQ(*importance[1], 0.8);
  EXPECT_DOUBLE_EQ(*importance[2], 0.9);
  EXPECT_FALSE(importance[3].has_value());
}

TEST(ImportanceScores, DegenerateTupleDefaultsToOne) {
  std::vector<ScoredSpan> selected{
      {TokenSpan{0, 2}, 1.0, SpanProvenance::tree_completed, std::nullopt}};
  std::vector<double> profile{0.3, 0.4};
  auto importance = importance_scores(selected, profile);
  EXPECT_DOUBLE_EQ(*importance[0], 1.0);
  EXPECT_DOUBLE_EQ(*importance[1], 1.0);
}

TEST(MaskIndices, DrawsRoundedShareOfTokens) {
  std::vector<double> importances(20, 1.0);
  auto masked = mask_indices(importances, 0.15, 99);
  EXPECT_EQ(masked.size(), 3u);
  std::set<std::size_t> distinct(masked.begin(), masked.end());
  EXPECT_EQ(distinct.size(), 3u);
  EXPECT_TRUE(std::is_sorted(masked.begin(), masked.end()));
}

TEST(MaskIndices, ReciprocalWeightsFavorLowImportance) {
  std::vector<double> importances{0.5, 1.0};
  int first_count = 0;
  const int trials = 20000;
  for (int seed = 0; seed < trials; ++seed) {
    auto masked = mask_indices(importances, 0.5, static_cast<std::uint64_t>(seed));
    ASSERT_EQ(masked.size(), 1u);
    if (masked[0] == 0) ++first_count;
  }
  EXPECT_NEAR(static_cast<double>(first_count) / trials, 2.0 / 3.0, 0.02);
}

TEST(MaskIndices, RateZeroMasksNothing) {
  EXPECT_TRUE(mask_indices({1.0, 2.0}, 0.0, 1).empty());
}

TEST(MaskIndices, DeterministicGivenSeed) {
  std::vector<double> importances{0.2, 0.4, 0.6, 0.8, 1.0, 1.2};
  EXPECT_EQ(mask_indices(importances, 0.5, 1234), mask_indices(importances, 0.5, 1234));
}

TEST(MaskIndices, RejectsNonPositiveImportance) {
  EXPECT_THROW(mask_indices({1.0, 0.0}, 0.5, 1), NonPositiveImportanceError);
  EXPECT_THROW(mask_indices({-0.5}, 0.5, 1), NonPositiveImportanceError);
}

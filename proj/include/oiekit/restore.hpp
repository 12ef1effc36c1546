#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "oiekit/embedding.hpp"
#include "oiekit/extraction.hpp"
#include "oiekit/rng.hpp"
#include "oiekit/span.hpp"
#include "oiekit/text.hpp"
#include "oiekit/treebank.hpp"

namespace oiekit::restore {

class DimMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SpanOutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class RestoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument slot produced no candidate span; the tuple cannot be restored.
class NoCandidatesError : public RestoreError {
 public:
  using RestoreError::RestoreError;
};

// Every combination of candidate spans overlaps.
class NoFeasibleSelectionError : public RestoreError {
 public:
  using RestoreError::RestoreError;
};

class EmptySentenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonPositiveImportanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SpanProvenance { similarity, tree_completed };

// A candidate target span. Similarity spans carry the sum of the profile
// over their tokens; tree-completed spans retain the originating run's score
// and remember the run itself in `origin`.
struct ScoredSpan {
  TokenSpan span;
  double score = 0.0;
  SpanProvenance provenance = SpanProvenance::similarity;
  std::optional<TokenSpan> origin;
};

namespace detail {

inline double cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;  // zero-norm vectors contribute 0
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace detail

// c[j] = sum over source-span tokens i of cosine(src[i], tgt[j]).
inline std::vector<double> similarity_profile(const EmbeddingMatrix& src_emb,
                                              const EmbeddingMatrix& tgt_emb,
                                              TokenSpan src_span) {
  if (src_emb.dim != tgt_emb.dim) {
    throw DimMismatchError("embedding dimensions differ: " + std::to_string(src_emb.dim) +
                           " vs " + std::to_string(tgt_emb.dim));
  }
  if (src_span.l >= src_span.r || src_span.r > src_emb.tokens()) {
    throw SpanOutOfRangeError("source span out of range");
  }
  std::vector<double> profile(tgt_emb.tokens(), 0.0);
  for (std::size_t j = 0; j < tgt_emb.tokens(); ++j) {
    double total = 0.0;
    for (std::size_t i = src_span.l; i < src_span.r; ++i) {
      total += detail::cosine(src_emb.row(i), tgt_emb.row(j));
    }
    profile[j] = total;
  }
  return profile;
}

// Maximal runs of consecutive positions whose profile value is strictly
// greater than tau; each run scores the sum of its profile values.
inline std::vector<ScoredSpan> merge_threshold_spans(const std::vector<double>& profile,
                                                     double tau) {
  std::vector<ScoredSpan> spans;
  std::size_t i = 0;
  while (i < profile.size()) {
    if (profile[i] > tau) {
      std::size_t start = i;
      double score = 0.0;
      while (i < profile.size() && profile[i] > tau) {
        score += profile[i];
        ++i;
      }
      spans.push_back({TokenSpan{start, i}, score, SpanProvenance::similarity, std::nullopt});
    } else {
      ++i;
    }
  }
  return spans;
}

// Walks the target parse: each span is widened to the hull of the phrase
// subtrees (NP/QP/NX by default) covering its tokens. The widened span
// replaces the original only when it covers it; otherwise the original is
// retained. Duplicated output spans are merged, keeping the highest score.
inline std::vector<ScoredSpan> complete_spans(const tree::ParseTree& tgt_tree,
                                              const std::vector<ScoredSpan>& spans,
                                              const std::vector<std::string>& allowed_roots =
                                                  tree::default_phrase_roots()) {
  std::size_t leaves = tree::leaf_count(tgt_tree);
  std::vector<ScoredSpan> out;
  for (const ScoredSpan& s : spans) {
    if (s.span.l >= s.span.r || s.span.r > leaves) {
      throw SpanOutOfRangeError("span out of range for target tree");
    }
    std::optional<TokenSpan> hull;
    for (std::size_t tok = s.span.l; tok < s.span.r; ++tok) {
      std::optional<TokenSpan> phrase = tree::covering_phrase_subtree(tgt_tree, tok, allowed_roots);
      if (!phrase) continue;
      if (!hull) {
        hull = *phrase;
      } else {
        hull->l = std::min(hull->l, phrase->l);
        hull->r = std::max(hull->r, phrase->r);
      }
    }
    ScoredSpan completed = s;
    if (hull && hull->covers(s.span) && *hull != s.span) {
      completed.span = *hull;
      completed.provenance = SpanProvenance::tree_completed;
      completed.origin = s.span;
    }
    bool merged = false;
    for (ScoredSpan& existing : out) {
      if (existing.span == completed.span) {
        if (completed.score > existing.score) existing = completed;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(completed);
  }
  return out;
}

namespace detail {

inline bool lex_less(const std::vector<TokenSpan>& a, const std::vector<TokenSpan>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

// Picks one span per slot maximizing the total score subject to pairwise
// non-overlap, by exact search over the (capped) candidate lists. Score ties
// go to the lexicographically earliest selection in slot order.
inline std::vector<TokenSpan> select_tuple_spans(
    const std::vector<std::vector<ScoredSpan>>& candidates_per_slot,
    std::size_t max_candidates_per_slot = 5) {
  if (candidates_per_slot.empty()) throw std::invalid_argument("no slots to select for");
  std::vector<std::vector<ScoredSpan>> slots;
  slots.reserve(candidates_per_slot.size());
  for (std::size_t i = 0; i < candidates_per_slot.size(); ++i) {
    if (candidates_per_slot[i].empty()) {
      throw NoCandidatesError("slot " + std::to_string(i) + " has no candidate spans");
    }
    std::vector<ScoredSpan> capped = candidates_per_slot[i];
    std::sort(capped.begin(), capped.end(), [](const ScoredSpan& x, const ScoredSpan& y) {
      if (x.score != y.score) return x.score > y.score;
      return x.span < y.span;
    });
    if (capped.size() > max_candidates_per_slot) capped.resize(max_candidates_per_slot);
    slots.push_back(std::move(capped));
  }

  std::vector<TokenSpan> best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<TokenSpan> current(slots.size());
  auto search = [&](auto&& self, std::size_t slot, double score) -> void {
    if (slot == slots.size()) {
      if (best.empty() || score > best_score ||
          (score == best_score && detail::lex_less(current, best))) {
        best_score = score;
        best = current;
      }
      return;
    }
    for (const ScoredSpan& cand : slots[slot]) {
      bool clash = false;
      for (std::size_t prev = 0; prev < slot; ++prev) {
        if (cand.span.overlaps(current[prev])) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      current[slot] = cand.span;
      self(self, slot + 1, score + cand.score);
    }
  };
  search(search, 0, 0.0);
  if (best.empty()) {
    throw NoFeasibleSelectionError("no non-overlapping combination of candidate spans");
  }
  return best;
}

struct RestoreOptions {
  double tau = 0.7;
  std::size_t max_candidates_per_slot = 5;
};

// Selected span plus the evidence behind it, one entry per argument slot.
struct ArgumentRestoration {
  std::vector<ScoredSpan> selected;
  std::vector<std::vector<double>> profiles;
};

namespace detail {

inline ArgumentRestoration restore_arguments_impl(const Extraction& src_tuple,
                                                  const EmbeddingMatrix& src_emb,
                                                  const EmbeddingMatrix& tgt_emb,
                                                  const tree::ParseTree* tgt_tree,
                                                  const RestoreOptions& opts) {
  if (src_tuple.arg_spans.empty() || src_tuple.arg_spans.size() != src_tuple.arg_texts.size()) {
    throw std::invalid_argument("source tuple must carry one span per argument");
  }
  std::vector<std::vector<ScoredSpan>> slots;
  std::vector<std::vector<double>> profiles;
  for (std::size_t a = 0; a < src_tuple.arg_spans.size(); ++a) {
    std::vector<double> profile = similarity_profile(src_emb, tgt_emb, src_tuple.arg_spans[a]);
    std::vector<ScoredSpan> candidates = merge_threshold_spans(profile, opts.tau);
    if (tgt_tree != nullptr) candidates = complete_spans(*tgt_tree, candidates);
    if (candidates.empty()) {
      throw NoCandidatesError("argument " + std::to_string(a) + " has no candidate spans");
    }
    slots.push_back(std::move(candidates));
    profiles.push_back(std::move(profile));
  }
  std::vector<TokenSpan> chosen = select_tuple_spans(slots, opts.max_candidates_per_slot);
  ArgumentRestoration result;
  result.profiles = std::move(profiles);
  for (std::size_t a = 0; a < chosen.size(); ++a) {
    auto it = std::find_if(slots[a].begin(), slots[a].end(),
                           [&](const ScoredSpan& s) { return s.span == chosen[a]; });
    result.selected.push_back(*it);
  }
  return result;
}

}  // namespace detail

// Similarity-only restoration: candidate spans come from thresholded
// similarity runs alone.
inline ArgumentRestoration restore_arguments_detailed(const Extraction& src_tuple,
                                                      const EmbeddingMatrix& src_emb,
                                                      const EmbeddingMatrix& tgt_emb,
                                                      const RestoreOptions& opts = {}) {
  return detail::restore_arguments_impl(src_tuple, src_emb, tgt_emb, nullptr, opts);
}

// Full restoration: similarity runs are widened by phrase-subtree completion
// over the target parse before selection.
inline ArgumentRestoration restore_arguments_detailed(const Extraction& src_tuple,
                                                      const EmbeddingMatrix& src_emb,
                                                      const EmbeddingMatrix& tgt_emb,
                                                      const tree::ParseTree& tgt_tree,
                                                      const RestoreOptions& opts = {}) {
  return detail::restore_arguments_impl(src_tuple, src_emb, tgt_emb, &tgt_tree, opts);
}

inline std::vector<TokenSpan> restore_arguments(const Extraction& src_tuple,
                                                const EmbeddingMatrix& src_emb,
                                                const EmbeddingMatrix& tgt_emb,
                                                const RestoreOptions& opts = {}) {
  ArgumentRestoration r = restore_arguments_detailed(src_tuple, src_emb, tgt_emb, opts);
  std::vector<TokenSpan> spans;
  for (const ScoredSpan& s : r.selected) spans.push_back(s.span);
  return spans;
}

inline std::vector<TokenSpan> restore_arguments(const Extraction& src_tuple,
                                                const EmbeddingMatrix& src_emb,
                                                const EmbeddingMatrix& tgt_emb,
                                                const tree::ParseTree& tgt_tree,
                                                const RestoreOptions& opts = {}) {
  ArgumentRestoration r = restore_arguments_detailed(src_tuple, src_emb, tgt_emb, tgt_tree, opts);
  std::vector<TokenSpan> spans;
  for (const ScoredSpan& s : r.selected) spans.push_back(s.span);
  return spans;
}

// Request line for an external predicate generator:
// "<sentence>, <arg1>, <arg2> </s>". The generator's reply is ingested
// verbatim as the predicate text.
inline std::string predicate_request(const std::string& src_sentence, const std::string& a1,
                                     const std::string& a2) {
  if (src_sentence.empty()) throw EmptySentenceError("source sentence is empty");
  return src_sentence + ", " + a1 + ", " + a2 + " </s>";
}

using LemmaTable = std::map<std::string, std::string>;

// Case-folded table lookup; tokens without an entry are their own lemma.
inline std::string lemma_of(const std::string& token, const LemmaTable* table) {
  std::string folded = text::fold_case(token);
  if (table != nullptr) {
    auto it = table->find(folded);
    if (it != table->end()) return it->second;
  }
  return folded;
}

namespace detail {

// Hull of the region tokens whose lemma is in `lemmas`; empty optional when
// none match.
inline std::optional<TokenSpan> lemma_hull(const std::vector<std::string>& tokens,
                                           TokenSpan region,
                                           const std::vector<std::string>& lemmas,
                                           const LemmaTable* table) {
  std::optional<TokenSpan> hull;
  for (std::size_t j = region.l; j < region.r; ++j) {
    std::string lem = lemma_of(tokens[j], table);
    if (std::find(lemmas.begin(), lemmas.end(), lem) == lemmas.end()) continue;
    if (!hull) {
      hull = TokenSpan{j, j + 1};
    } else {
      hull->r = j + 1;
    }
  }
  return hull;
}

}  // namespace detail

// Deterministic predicate substitute used when no external generator is
// attached: the smallest contiguous target span, between the two closest
// argument spans, containing every token whose lemma intersects the source
// predicate lemmas. Absent when no lemma matches.
inline std::optional<TokenSpan> fallback_predicate(const std::vector<std::string>& tgt_tokens,
                                                   const std::vector<std::string>& src_pred_lemmas,
                                                   const std::vector<TokenSpan>& arg_spans,
                                                   const LemmaTable* lemma_table = nullptr) {
  for (std::size_t i = 0; i < arg_spans.size(); ++i) {
    for (std::size_t j = i + 1; j < arg_spans.size(); ++j) {
      if (arg_spans[i].overlaps(arg_spans[j])) {
        throw std::invalid_argument("argument spans overlap");
      }
    }
  }
  std::vector<std::string> lemmas;
  lemmas.reserve(src_pred_lemmas.size());
  for (const std::string& l : src_pred_lemmas) lemmas.push_back(text::fold_case(l));

  std::vector<TokenSpan> sorted = arg_spans;
  std::sort(sorted.begin(), sorted.end());
  std::vector<TokenSpan> regions;
  if (sorted.size() >= 2) {
    std::size_t best_gap = std::numeric_limits<std::size_t>::max();
    TokenSpan region{0, 0};
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      std::size_t gap = sorted[i + 1].l - sorted[i].r;
      if (gap < best_gap) {
        best_gap = gap;
        region = TokenSpan{sorted[i].r, sorted[i + 1].l};
      }
    }
    regions.push_back(region);
  } else if (sorted.size() == 1) {
    regions.push_back(TokenSpan{0, sorted[0].l});
    regions.push_back(TokenSpan{sorted[0].r, tgt_tokens.size()});
  } else {
    regions.push_back(TokenSpan{0, tgt_tokens.size()});
  }

  std::optional<TokenSpan> best;
  for (const TokenSpan& region : regions) {
    if (region.l >= region.r) continue;
    std::optional<TokenSpan> hull =
        detail::lemma_hull(tgt_tokens, region, lemmas, lemma_table);
    if (hull && (!best || hull->size() < best->size())) best = hull;
  }
  return best;
}

// Per-token importance over the target sentence for one restored tuple.
// Similarity-matched tokens score their profile value; tokens added by tree
// completion score the mean of the tuple's similarity-matched tokens (1.0
// when there are none); tokens outside the selected argument spans have no
// importance and are never masked.
inline std::vector<std::optional<double>> importance_scores(
    const std::vector<ScoredSpan>& selected, const std::vector<std::vector<double>>& profiles) {
  if (selected.size() != profiles.size()) {
    throw std::invalid_argument("one profile per selected span is required");
  }
  std::size_t length = 0;
  for (const auto& p : profiles) length = std::max(length, p.size());
  std::vector<std::optional<double>> importance(length);
  std::vector<std::size_t> pending;
  double sim_sum = 0.0;
  std::size_t sim_count = 0;
  for (std::size_t s = 0; s < selected.size(); ++s) {
    const ScoredSpan& span = selected[s];
    const std::vector<double>& profile = profiles[s];
    if (span.span.r > profile.size()) throw SpanOutOfRangeError("span exceeds profile length");
    for (std::size_t j = span.span.l; j < span.span.r; ++j) {
      bool from_similarity = span.provenance == SpanProvenance::similarity ||
                             (span.origin && span.origin->contains(j));
      if (from_similarity) {
        importance[j] = profile[j];
        sim_sum += profile[j];
        ++sim_count;
      } else {
        pending.push_back(j);
      }
    }
  }
  double fill = sim_count > 0 ? sim_sum / static_cast<double>(sim_count) : 1.0;
  for (std::size_t j : pending) importance[j] = fill;
  return importance;
}

inline std::vector<std::optional<double>> importance_scores(
    const std::vector<ScoredSpan>& selected, const std::vector<double>& profile) {
  return importance_scores(selected,
                           std::vector<std::vector<double>>(selected.size(), profile));
}

// Samples round(rate * N) distinct indices, each draw proportional to the
// normalized reciprocal of its importance. Returned indices are sorted.
inline std::vector<std::size_t> mask_indices(const std::vector<double>& importances, double rate,
                                             std::uint64_t seed) {
  if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("mask rate must be in [0, 1]");
  std::vector<double> weights;
  weights.reserve(importances.size());
  double total = 0.0;
  for (double imp : importances) {
    if (imp <= 0.0) throw NonPositiveImportanceError("importance values must be positive");
    weights.push_back(1.0 / imp);
    total += weights.back();
  }
  std::size_t count = static_cast<std::size_t>(
      std::floor(rate * static_cast<double>(importances.size()) + 0.5));
  std::mt19937_64 gen(seed);
  std::vector<std::size_t> picked;
  for (std::size_t d = 0; d < count; ++d) {
    std::size_t pick = rng::weighted_index(weights, total, gen);
    picked.push_back(pick);
    weights[pick] = 0.0;
    total = 0.0;
    for (double w : weights) total += w;
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace oiekit::restore

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "oiekit/extraction.hpp"
#include "oiekit/text.hpp"

namespace oiekit::score {

class NoGoldsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One (gold, prediction) comparison. Slots are compared positionally:
// predicate with predicate, arg_i with arg_i; a slot present on only one
// side contributes its tokens to that side's denominator and matches
// nothing.
struct MatchCell {
  std::vector<std::size_t> slot_common;
  double precision = 0.0;  // matched tokens / prediction tokens
  double recall = 0.0;     // matched tokens / gold tokens
};

struct MatchTable {
  std::size_t gold_count = 0;
  std::size_t pred_count = 0;
  std::vector<MatchCell> cells;  // row-major: gold * pred_count + pred

  const MatchCell& cell(std::size_t gold, std::size_t pred) const {
    return cells[gold * pred_count + pred];
  }
};

namespace detail {

// Slot token multisets: [predicate, arg1, arg2, ...], lowercased whitespace
// tokens.
inline std::vector<std::map<std::string, std::size_t>> slot_tokens(const Extraction& ex) {
  std::vector<std::map<std::string, std::size_t>> slots;
  auto add_slot = [&](const std::string& s) {
    std::map<std::string, std::size_t> counts;
    for (const std::string& tok : text::whitespace_tokens(s)) ++counts[text::fold_case(tok)];
    slots.push_back(std::move(counts));
  };
  add_slot(ex.pred_text);
  for (const std::string& arg : ex.arg_texts) add_slot(arg);
  return slots;
}

inline std::size_t total_tokens(const std::vector<std::map<std::string, std::size_t>>& slots) {
  std::size_t total = 0;
  for (const auto& slot : slots) {
    for (const auto& [tok, count] : slot) total += count;
  }
  return total;
}

inline std::size_t common_tokens(const std::map<std::string, std::size_t>& a,
                                 const std::map<std::string, std::size_t>& b) {
  std::size_t common = 0;
  for (const auto& [tok, count] : a) {
    auto it = b.find(tok);
    if (it != b.end()) common += std::min(count, it->second);
  }
  return common;
}

}  // namespace detail

// All-pair matching table: one row per gold tuple, one column per prediction.
inline MatchTable build_match_table(const std::vector<Extraction>& golds,
                                    const std::vector<Extraction>& preds) {
  MatchTable table;
  table.gold_count = golds.size();
  table.pred_count = preds.size();
  std::vector<std::vector<std::map<std::string, std::size_t>>> gold_slots, pred_slots;
  for (const Extraction& g : golds) gold_slots.push_back(detail::slot_tokens(g));
  for (const Extraction& p : preds) pred_slots.push_back(detail::slot_tokens(p));
  table.cells.reserve(golds.size() * preds.size());
  for (std::size_t g = 0; g < golds.size(); ++g) {
    std::size_t gold_total = detail::total_tokens(gold_slots[g]);
    for (std::size_t p = 0; p < preds.size(); ++p) {
      std::size_t pred_total = detail::total_tokens(pred_slots[p]);
      MatchCell cell;
      std::size_t slots = std::max(gold_slots[g].size(), pred_slots[p].size());
      std::size_t matched = 0;
      for (std::size_t s = 0; s < slots; ++s) {
        std::size_t common = 0;
        if (s < gold_slots[g].size() && s < pred_slots[p].size()) {
          common = detail::common_tokens(gold_slots[g][s], pred_slots[p][s]);
        }
        cell.slot_common.push_back(common);
        matched += common;
      }
      cell.precision =
          pred_total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(pred_total);
      cell.recall =
          gold_total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(gold_total);
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

namespace detail {

struct ThresholdTally {
  double precision_sum = 0.0;   // over kept predictions, greedy single-match
  std::size_t kept = 0;
  double gold_recall_sum = 0.0;  // over golds, best kept prediction
  std::size_t golds = 0;
};

// Single-match precision: each gold is consumed by at most one kept
// prediction, assigned greedily by descending cell precision (ties by gold
// then prediction index). Multi-match recall: every gold takes its best
// kept prediction.
inline ThresholdTally tally_at_threshold(const MatchTable& table,
                                         const std::vector<Extraction>& preds,
                                         double threshold) {
  ThresholdTally tally;
  tally.golds = table.gold_count;
  std::vector<std::size_t> kept;
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (preds[p].confidence >= threshold) kept.push_back(p);
  }
  tally.kept = kept.size();
  if (kept.empty()) return tally;

  struct Pair {
    double precision;
    std::size_t gold;
    std::size_t pred;
  };
  std::vector<Pair> pairs;
  pairs.reserve(table.gold_count * kept.size());
  for (std::size_t g = 0; g < table.gold_count; ++g) {
    for (std::size_t p : kept) pairs.push_back({table.cell(g, p).precision, g, p});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.precision != y.precision) return x.precision > y.precision;
    if (x.gold != y.gold) return x.gold < y.gold;
    return x.pred < y.pred;
  });
  std::vector<bool> gold_used(table.gold_count, false);
  std::set<std::size_t> pred_unused(kept.begin(), kept.end());
  for (const Pair& pair : pairs) {
    if (gold_used[pair.gold] || !pred_unused.count(pair.pred)) continue;
    gold_used[pair.gold] = true;
    pred_unused.erase(pair.pred);
    tally.precision_sum += pair.precision;
  }
  for (std::size_t g = 0; g < table.gold_count; ++g) {
    double best = 0.0;
    for (std::size_t p : kept) best = std::max(best, table.cell(g, p).recall);
    tally.gold_recall_sum += best;
  }
  return tally;
}

inline double f1(double precision, double recall) {
  double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

}  // namespace detail

// Precision and recall over predictions with confidence >= threshold. With
// nothing kept, precision is defined as 1 and recall as 0 (the standard
// curve anchor).
inline std::pair<double, double> score_at_threshold(const MatchTable& table,
                                                    const std::vector<Extraction>& preds,
                                                    double threshold) {
  detail::ThresholdTally tally = detail::tally_at_threshold(table, preds, threshold);
  if (tally.kept == 0) return {1.0, 0.0};
  double precision = tally.precision_sum / static_cast<double>(tally.kept);
  double recall =
      tally.golds == 0 ? 0.0 : tally.gold_recall_sum / static_cast<double>(tally.golds);
  return {precision, recall};
}

struct PRPoint {
  double confidence = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PRCurve {
  std::vector<PRPoint> points;  // ordered by descending confidence
  double auc = 0.0;
  double optimal_f1 = 0.0;
  double last_f1 = 0.0;
};

// Trapezoidal AUC over (recall, precision) with a (0, first precision)
// anchor, the best F1 along the sweep, and the F1 of the final
// (zero-confidence) point.
inline PRCurve summarize_curve(std::vector<PRPoint> points) {
  PRCurve curve;
  curve.points = std::move(points);
  if (curve.points.empty()) return curve;
  double prev_recall = 0.0;
  double prev_precision = curve.points.front().precision;
  for (const PRPoint& pt : curve.points) {
    curve.auc += (pt.recall - prev_recall) * (pt.precision + prev_precision) / 2.0;
    prev_recall = pt.recall;
    prev_precision = pt.precision;
    curve.optimal_f1 = std::max(curve.optimal_f1, detail::f1(pt.precision, pt.recall));
  }
  const PRPoint& last = curve.points.back();
  curve.last_f1 = detail::f1(last.precision, last.recall);
  return curve;
}

// Gold/prediction tuples for one sentence; scoring matches predictions only
// against golds of their own sentence.
struct SentencePair {
  std::vector<Extraction> golds;
  std::vector<Extraction> preds;
};

// Sweeps thresholds at each distinct prediction confidence, descending.
// Precision averages over all kept predictions, recall over all golds,
// across every sentence group.
inline PRCurve pr_curve_grouped(const std::vector<SentencePair>& groups) {
  std::size_t total_golds = 0;
  std::set<double, std::greater<double>> confidences;
  for (const SentencePair& group : groups) {
    total_golds += group.golds.size();
    for (const Extraction& p : group.preds) confidences.insert(p.confidence);
  }
  if (total_golds == 0) throw NoGoldsError("no gold tuples to score against");

  std::vector<MatchTable> tables;
  tables.reserve(groups.size());
  for (const SentencePair& group : groups) {
    tables.push_back(build_match_table(group.golds, group.preds));
  }

  std::vector<PRPoint> points;
  for (double threshold : confidences) {
    double precision_sum = 0.0;
    std::size_t kept = 0;
    double recall_sum = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      detail::ThresholdTally tally =
          detail::tally_at_threshold(tables[i], groups[i].preds, threshold);
      precision_sum += tally.precision_sum;
      kept += tally.kept;
      recall_sum += tally.gold_recall_sum;
    }
    PRPoint pt;
    pt.confidence = threshold;
    pt.precision = kept == 0 ? 1.0 : precision_sum / static_cast<double>(kept);
    pt.recall = recall_sum / static_cast<double>(total_golds);
    points.push_back(pt);
  }
  if (points.empty()) points.push_back({0.0, 1.0, 0.0});  // no predictions at all
  return summarize_curve(std::move(points));
}

inline PRCurve pr_curve(const std::vector<Extraction>& golds,
                        const std::vector<Extraction>& preds) {
  return pr_curve_grouped({SentencePair{golds, preds}});
}

}  // namespace oiekit::score

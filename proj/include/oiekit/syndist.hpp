#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "oiekit/rng.hpp"
#include "oiekit/treebank.hpp"

namespace oiekit::syndist {

struct DistanceParams {
  int prune_height = 3;
  double alpha = 0.9;  // per-run discount, in (0, 1]
};

// A maximal common substring of two label sequences. Runs shorter than 2 are
// never recorded.
struct MatchRun {
  std::size_t length = 0;
  std::size_t pos_a = 0;
  std::size_t pos_b = 0;

  friend bool operator==(const MatchRun&, const MatchRun&) = default;
};

class EmptyCorpusError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MalformedParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyTableError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoTargetsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KZeroError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// All maximal common substrings of length >= 2 between `a` and `b`, one run
// per occurrence pair, via the longest-common-substring DP. dp[i][j] is the
// length of the common run ending at (i, j); a run is maximal when the next
// diagonal cell does not extend it.
inline std::vector<MatchRun> maximal_common_runs(const std::vector<std::string>& a,
                                                 const std::vector<std::string>& b) {
  std::vector<MatchRun> runs;
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 || m == 0) return runs;
  std::vector<std::size_t> prev(m, 0), cur(m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (a[i] != b[j]) {
        cur[j] = 0;
        continue;
      }
      cur[j] = (i > 0 && j > 0 ? prev[j - 1] : 0) + 1;
      std::size_t len = cur[j];
      if (len >= 2) {
        bool extends = i + 1 < n && j + 1 < m && a[i + 1] == b[j + 1];
        if (!extends) runs.push_back(MatchRun{len, i + 1 - len, j + 1 - len});
      }
    }
    std::swap(prev, cur);
  }
  return runs;
}

// Discounted total matching length: runs sorted by decreasing length (ties
// by positions), the i-th run weighted by alpha^i. Sorting by length first
// makes the total independent of scan order and symmetric in the two
// sequences.
inline double discounted_total(std::vector<MatchRun> runs, double alpha) {
  std::sort(runs.begin(), runs.end(), [](const MatchRun& x, const MatchRun& y) {
    if (x.length != y.length) return x.length > y.length;
    if (x.pos_a != y.pos_a) return x.pos_a < y.pos_a;
    return x.pos_b < y.pos_b;
  });
  double total = 0.0;
  double weight = 1.0;
  for (const MatchRun& run : runs) {
    total += static_cast<double>(run.length) * weight;
    weight *= alpha;
  }
  return total;
}

inline double hw_distance_labels(const std::vector<std::string>& q1,
                                 const std::vector<std::string>& q2, double alpha) {
  if (q1 == q2) return 0.0;
  if (q1.empty() || q2.empty()) return 1.0;
  double total = discounted_total(maximal_common_runs(q1, q2), alpha);
  double denom = static_cast<double>(std::min(q1.size(), q2.size()));
  return std::clamp(1.0 - total / denom, 0.0, 1.0);
}

// Hierarchical weighted syntactic distance in [0, 1]: both trees are pruned,
// flattened to level-order label sequences, and compared by the discounted
// total length of their maximal common substrings, normalized by the shorter
// sequence. Identical sequences give exactly 0.
inline double hw_distance(const tree::ParseTree& t1, const tree::ParseTree& t2,
                          const DistanceParams& params = {}) {
  if (params.alpha <= 0.0 || params.alpha > 1.0) {
    throw std::invalid_argument("discount alpha must be in (0, 1]");
  }
  std::vector<std::string> q1 = tree::level_order_labels(tree::prune(t1, params.prune_height));
  std::vector<std::string> q2 = tree::level_order_labels(tree::prune(t2, params.prune_height));
  return hw_distance_labels(q1, q2, params.alpha);
}

// Symmetric pairwise distance matrix with zero diagonal. Rows are computed
// in parallel for large corpora; results do not depend on the thread count.
inline std::vector<std::vector<double>> distance_matrix(
    const std::vector<tree::ParseTree>& corpus, const DistanceParams& params = {}) {
  if (corpus.empty()) throw EmptyCorpusError("distance matrix needs a non-empty corpus");
  const std::size_t n = corpus.size();
  std::vector<std::vector<std::string>> seqs(n);
  for (std::size_t i = 0; i < n; ++i) {
    seqs[i] = tree::level_order_labels(tree::prune(corpus[i], params.prune_height));
  }
  std::vector<std::vector<double>> matrix(n, std::vector<double>(n, 0.0));
  auto fill_rows = [&](std::size_t first, std::size_t step) {
    for (std::size_t i = first; i < n; i += step) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double d = hw_distance_labels(seqs[i], seqs[j], params.alpha);
        matrix[i][j] = d;
        matrix[j][i] = d;
      }
    }
  };
  std::size_t workers = n >= 128 ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : 1;
  if (workers <= 1) {
    fill_rows(0, 1);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(fill_rows, t, workers);
    for (std::thread& th : threads) th.join();
  }
  return matrix;
}

inline std::vector<std::string> label_sequence(std::string_view parse_str) {
  try {
    return tree::level_order_labels(tree::parse_bracketed(parse_str));
  } catch (const tree::ParseError& e) {
    throw MalformedParseError(std::string("malformed parse string: ") + e.what());
  }
}

struct RougeWeights {
  double rouge1 = 1.0;
  double rouge2 = 1.0;
  double rougeL = 1.0;
};

namespace detail {

inline double f1(double precision, double recall) {
  double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

inline double ngram_f1(const std::vector<std::string>& a, const std::vector<std::string>& b,
                       std::size_t n) {
  if (a.size() < n || b.size() < n) return 0.0;
  auto grams = [n](const std::vector<std::string>& seq) {
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i + n <= seq.size(); ++i) {
      std::string key;
      for (std::size_t k = 0; k < n; ++k) {
        key += seq[i + k];
        key += '\x1f';
      }
      ++counts[key];
    }
    return counts;
  };
  std::map<std::string, std::size_t> ga = grams(a);
  std::map<std::string, std::size_t> gb = grams(b);
  std::size_t matched = 0;
  for (const auto& [key, count] : ga) {
    auto it = gb.find(key);
    if (it != gb.end()) matched += std::min(count, it->second);
  }
  double precision = static_cast<double>(matched) / static_cast<double>(b.size() - n + 1);
  double recall = static_cast<double>(matched) / static_cast<double>(a.size() - n + 1);
  return f1(precision, recall);
}

inline double lcs_f1(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  double lcs = static_cast<double>(prev[m]);
  return f1(lcs / static_cast<double>(m), lcs / static_cast<double>(n));
}

}  // namespace detail

// Weighted mean of ROUGE-1/2/L F1 over two label sequences; 1 exactly iff
// the sequences are identical.
inline double rouge_mean(const std::vector<std::string>& a, const std::vector<std::string>& b,
                         const RougeWeights& w = {}) {
  if (a == b) return 1.0;
  double total = w.rouge1 + w.rouge2 + w.rougeL;
  if (total <= 0.0) throw std::invalid_argument("rouge weights must sum to > 0");
  return (w.rouge1 * detail::ngram_f1(a, b, 1) + w.rouge2 * detail::ngram_f1(a, b, 2) +
          w.rougeL * detail::lcs_f1(a, b)) /
         total;
}

// Similarity of two bracketed parse strings: the sequences compared are the
// level-order label sequences of the parsed trees.
inline double parse_similarity(std::string_view p1, std::string_view p2,
                               const RougeWeights& w = {}) {
  return rouge_mean(label_sequence(p1), label_sequence(p2), w);
}

// Occurrence counts of (source parse, target parse) pairs, keyed by the
// pruned-tree serializations. Backing store is ordered so iteration (and the
// TSV round trip) is deterministic.
class ParsePairTable {
 public:
  using TargetCounts = std::map<std::string, std::uint64_t>;

  void add(const std::string& source, const std::string& target, std::uint64_t count = 1) {
    if (count == 0) throw TableError("pair count must be >= 1");
    entries_[source][target] += count;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t source_count() const { return entries_.size(); }
  const std::map<std::string, TargetCounts>& sources() const { return entries_; }

  const TargetCounts* targets(const std::string& source) const {
    auto it = entries_.find(source);
    return it == entries_.end() ? nullptr : &it->second;
  }

  // One record per line: source_parse <TAB> target_parse <TAB> count.
  static ParsePairTable load_tsv(std::istream& in) {
    ParsePairTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::size_t t1 = line.find('\t');
      std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
      if (t1 == std::string::npos || t2 == std::string::npos) {
        throw TableError("parse pair table line " + std::to_string(line_no) +
                         ": expected 3 tab-separated fields");
      }
      std::string source = line.substr(0, t1);
      std::string target = line.substr(t1 + 1, t2 - t1 - 1);
      std::string count_str = line.substr(t2 + 1);
      bool digits = !count_str.empty();
      for (char c : count_str) digits = digits && c >= '0' && c <= '9';
      std::uint64_t count = 0;
      try {
        if (!digits) throw std::invalid_argument("not a decimal integer");
        count = std::stoull(count_str);
      } catch (const std::exception&) {
        throw TableError("parse pair table line " + std::to_string(line_no) + ": bad count '" +
                         count_str + "'");
      }
      if (count == 0) {
        throw TableError("parse pair table line " + std::to_string(line_no) + ": count must be >= 1");
      }
      table.add(source, target, count);
    }
    return table;
  }

  void save_tsv(std::ostream& out) const {
    for (const auto& [source, targets] : entries_) {
      for (const auto& [target, count] : targets) {
        out << source << '\t' << target << '\t' << count << '\n';
      }
    }
  }

 private:
  std::map<std::string, TargetCounts> entries_;
};

// Ranks the table's distinct source parses by similarity to `src`, caching
// the label sequences so repeated queries stay cheap.
class SourceRanker {
 public:
  explicit SourceRanker(const ParsePairTable& table, const RougeWeights& weights = {})
      : weights_(weights) {
    for (const auto& [source, targets] : table.sources()) {
      (void)targets;
      sources_.emplace_back(&source, label_sequence(source));
    }
  }

  std::vector<std::string> rank(std::string_view src, std::size_t m) const {
    std::vector<std::string> src_seq = label_sequence(src);
    std::vector<std::pair<double, const std::string*>> scored;
    scored.reserve(sources_.size());
    for (const auto& [source, seq] : sources_) {
      scored.emplace_back(rouge_mean(src_seq, seq, weights_), source);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return *x.second < *y.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && i < m; ++i) out.push_back(*scored[i].second);
    return out;
  }

 private:
  RougeWeights weights_;
  std::vector<std::pair<const std::string*, std::vector<std::string>>> sources_;
};

// The m distinct source parses most similar to `src`; ties broken
// lexicographically. Returns fewer than m only when the table is smaller.
inline std::vector<std::string> retrieve_source_parses(std::string_view src,
                                                       const ParsePairTable& table,
                                                       std::size_t m,
                                                       const RougeWeights& weights = {}) {
  if (table.empty()) throw EmptyTableError("parse pair table is empty");
  if (m == 0) throw std::invalid_argument("m must be >= 1");
  return SourceRanker(table, weights).rank(src, m);
}

// For each retrieved source parse, samples its targets without replacement
// with probability count / total-count, then merges the per-source draws
// round-robin in draw order, deduplicates, and truncates to k.
inline std::vector<std::string> sample_target_parses(const std::vector<std::string>& src_matches,
                                                     const ParsePairTable& table, std::size_t k,
                                                     std::uint64_t seed) {
  if (k == 0) throw KZeroError("k must be >= 1");
  std::mt19937_64 gen(seed);
  std::vector<std::vector<const std::string*>> draws_per_source;
  for (const std::string& source : src_matches) {
    const ParsePairTable::TargetCounts* targets = table.targets(source);
    if (targets == nullptr || targets->empty()) {
      throw NoTargetsError("no targets recorded for source parse '" + source + "'");
    }
    std::vector<const std::string*> names;
    std::vector<double> weights;
    double total = 0.0;
    for (const auto& [target, count] : *targets) {
      names.push_back(&target);
      weights.push_back(static_cast<double>(count));
      total += static_cast<double>(count);
    }
    std::vector<const std::string*> draws;
    std::size_t wanted = std::min(k, names.size());
    for (std::size_t d = 0; d < wanted; ++d) {
      std::size_t pick = rng::weighted_index(weights, total, gen);
      draws.push_back(names[pick]);
      weights[pick] = 0.0;
      total = 0.0;
      for (double w : weights) total += w;
    }
    draws_per_source.push_back(std::move(draws));
  }
  std::vector<std::string> merged;
  std::size_t longest = 0;
  for (const auto& draws : draws_per_source) longest = std::max(longest, draws.size());
  for (std::size_t d = 0; d < longest && merged.size() < k; ++d) {
    for (const auto& draws : draws_per_source) {
      if (d >= draws.size()) continue;
      const std::string& candidate = *draws[d];
      if (std::find(merged.begin(), merged.end(), candidate) == merged.end()) {
        merged.push_back(candidate);
        if (merged.size() == k) break;
      }
    }
  }
  return merged;
}

}  // namespace oiekit::syndist

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "oiekit/rng.hpp"
#include "oiekit/syndist.hpp"
#include "oiekit/text.hpp"
#include "oiekit/treebank.hpp"

namespace oiekit::cluster {

using Matrix = std::vector<std::vector<double>>;

class KRangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class AsymmetricMatrixError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptySampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyCorpusBError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Clustering {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // per point: cluster id in [0, k)
  std::vector<std::size_t> medoids;      // per cluster: point index
  double cost = 0.0;                     // sum of distances to assigned medoids
  std::size_t iterations = 0;
  std::vector<double> cost_history;      // cost after each assignment pass
};

inline void validate_distance_matrix(const Matrix& matrix) {
  const std::size_t n = matrix.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) throw AsymmetricMatrixError("distance matrix is not square");
    if (matrix[i][i] != 0.0) throw AsymmetricMatrixError("distance matrix diagonal is not zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix[i][j] != matrix[j][i]) {
        throw AsymmetricMatrixError("distance matrix is not symmetric at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
      }
    }
  }
}

// k-medoids over a precomputed distance matrix: seeded random initial
// medoids, then alternating assign/update passes until assignments stop
// changing or max_iter passes run. Cost never increases from one recorded
// pass to the next.
inline Clustering cluster_by_distance(const Matrix& matrix, std::size_t k,
                                      std::size_t max_iter = 300, std::uint64_t seed = 0) {
  validate_distance_matrix(matrix);
  const std::size_t n = matrix.size();
  if (k < 1 || k > n) {
    throw KRangeError("k must be in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  }
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");

  std::mt19937_64 gen(seed);
  Clustering result;
  result.k = k;
  result.medoids = rng::sample_indices(n, k, gen);
  result.assignments.assign(n, 0);

  auto assign_all = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_dist = matrix[i][result.medoids[0]];
      for (std::size_t c = 1; c < k; ++c) {
        double d = matrix[i][result.medoids[c]];
        if (d < best_dist) {
          best_dist = d;
          best = c;
        }
      }
      result.assignments[i] = best;
    }
  };

  auto cluster_sizes = [&]() {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t c : result.assignments) ++sizes[c];
    return sizes;
  };

  // An empty cluster (possible only with duplicate points) is reseeded to
  // the point farthest from its own current medoid.
  auto repair_empty = [&]() {
    for (;;) {
      std::vector<std::size_t> sizes = cluster_sizes();
      std::size_t empty = k;
      for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
          empty = c;
          break;
        }
      }
      if (empty == k) return;
      std::size_t farthest = 0;
      double farthest_dist = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        double d = matrix[i][result.medoids[result.assignments[i]]];
        if (d > farthest_dist) {
          farthest_dist = d;
          farthest = i;
        }
      }
      result.medoids[empty] = farthest;
      assign_all();
    }
  };

  auto update_medoids = [&]() {
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t best = result.medoids[c];
      double best_total = std::numeric_limits<double>::infinity();
      for (std::size_t cand = 0; cand < n; ++cand) {
        if (result.assignments[cand] != c) continue;
        double total = 0.0;
        for (std::size_t other = 0; other < n; ++other) {
          if (result.assignments[other] == c) total += matrix[cand][other];
        }
        if (total < best_total) {
          best_total = total;
          best = cand;
        }
      }
      result.medoids[c] = best;
    }
  };

  std::vector<std::size_t> prev_assignments;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    result.iterations = iter;
    assign_all();
    repair_empty();
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) cost += matrix[i][result.medoids[result.assignments[i]]];
    result.cost_history.push_back(cost);
    if (result.assignments == prev_assignments) break;
    prev_assignments = result.assignments;
    update_medoids();
  }
  result.cost = result.cost_history.back();
  return result;
}

// Mean pairwise distance from a sampled set of training parses to one
// cluster medoid.
inline double train_to_cluster_distance(const std::vector<tree::ParseTree>& train_sample,
                                        const tree::ParseTree& medoid,
                                        const syndist::DistanceParams& params = {}) {
  if (train_sample.empty()) throw EmptySampleError("train sample is empty");
  std::vector<std::string> medoid_seq =
      tree::level_order_labels(tree::prune(medoid, params.prune_height));
  double total = 0.0;
  for (const tree::ParseTree& t : train_sample) {
    std::vector<std::string> seq = tree::level_order_labels(tree::prune(t, params.prune_height));
    total += syndist::hw_distance_labels(seq, medoid_seq, params.alpha);
  }
  return total / static_cast<double>(train_sample.size());
}

struct WordFrequency {
  std::string word;
  double freq_a = 0.0;
  double freq_b = 0.0;
};

// Relative frequency of each vocabulary word in two corpora, where the
// vocabulary is the distinct (case-folded) tokens of corpus_b. Rows are
// ordered by descending corpus_b frequency, ties alphabetically.
inline std::vector<WordFrequency> word_distribution_report(
    const std::vector<std::vector<std::string>>& corpus_a,
    const std::vector<std::vector<std::string>>& corpus_b) {
  std::map<std::string, std::size_t> counts_a;
  std::map<std::string, std::size_t> counts_b;
  std::size_t total_a = 0;
  std::size_t total_b = 0;
  for (const auto& sentence : corpus_a) {
    for (const std::string& token : sentence) {
      ++counts_a[text::fold_case(token)];
      ++total_a;
    }
  }
  for (const auto& sentence : corpus_b) {
    for (const std::string& token : sentence) {
      ++counts_b[text::fold_case(token)];
      ++total_b;
    }
  }
  if (total_b == 0) throw EmptyCorpusBError("corpus_b has no tokens; vocabulary is undefined");
  std::vector<WordFrequency> rows;
  rows.reserve(counts_b.size());
  for (const auto& [word, count_b] : counts_b) {
    auto it = counts_a.find(word);
    double freq_a = total_a == 0 || it == counts_a.end()
                        ? 0.0
                        : static_cast<double>(it->second) / static_cast<double>(total_a);
    rows.push_back(
        {word, freq_a, static_cast<double>(count_b) / static_cast<double>(total_b)});
  }
  std::sort(rows.begin(), rows.end(), [](const WordFrequency& x, const WordFrequency& y) {
    if (x.freq_b != y.freq_b) return x.freq_b > y.freq_b;
    return x.word < y.word;
  });
  return rows;
}

}  // namespace oiekit::cluster

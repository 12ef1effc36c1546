#pragma once

#include <random>
#include <string>
#include <vector>

#include "oiekit/rng.hpp"
#include "oiekit/treebank.hpp"

namespace testutil {

inline const std::vector<std::string>& tree_labels() {
  static const std::vector<std::string> labels{"ROOT", "S",  "NP", "VP", "PP",  "SBAR",
                                               "ADJP", "IN", "DT", "NN", "VBD", ","};
  return labels;
}

inline const std::vector<std::string>& tree_words() {
  static const std::vector<std::string> words{"the", "cat", "sat", "on", "mat", "a", "dog", "ran"};
  return words;
}

inline std::size_t pick(std::mt19937_64& gen, std::size_t n) {
  return static_cast<std::size_t>(oiekit::rng::unit_double(gen) * static_cast<double>(n)) % n;
}

inline oiekit::tree::ParseNode random_node(std::mt19937_64& gen, int depth_left,
                                           bool allow_tokenless) {
  oiekit::tree::ParseNode node;
  node.label = tree_labels()[pick(gen, tree_labels().size())];
  bool terminal = depth_left <= 0 || oiekit::rng::unit_double(gen) < 0.35;
  if (terminal) {
    if (!allow_tokenless || oiekit::rng::unit_double(gen) < 0.7) {
      node.token = tree_words()[pick(gen, tree_words().size())];
    }
    return node;
  }
  std::size_t children = 1 + pick(gen, 3);
  for (std::size_t c = 0; c < children; ++c) {
    node.children.push_back(random_node(gen, depth_left - 1, allow_tokenless));
  }
  return node;
}

inline oiekit::tree::ParseTree random_tree(std::mt19937_64& gen, int max_depth = 4,
                                           bool allow_tokenless = true) {
  // Reparse so leaf indices are assigned exactly as the parser would.
  oiekit::tree::ParseTree raw{random_node(gen, max_depth, allow_tokenless)};
  return oiekit::tree::parse_bracketed(oiekit::tree::serialize(raw));
}

inline std::vector<std::string> random_label_sequence(std::mt19937_64& gen, std::size_t min_len,
                                                      std::size_t max_len,
                                                      std::size_t alphabet) {
  std::size_t len = min_len + pick(gen, max_len - min_len + 1);
  std::vector<std::string> seq;
  seq.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    seq.push_back("L" + std::to_string(pick(gen, alphabet)));
  }
  return seq;
}

// Bracketed full parse of "In those years, he began to collaborate with some
// newspapers." with plausible lexical structure below the comparison levels.
inline const char* full_parse_c1() {
  return "(ROOT (S (PP (IN In) (NP (DT those) (NNS years))) (, ,) (NP (PRP he)) "
         "(VP (VBD began) (S (VP (TO to) (VP (VB collaborate) (PP (IN with) "
         "(NP (DT some) (NNS newspapers))))))) (. .)))";
}

inline const char* pruned_parse_c1() {
  return "(ROOT (S (PP (IN ) (NP )) (, ) (NP (PRP )) (VP (VBD ) (S )) (. )))";
}

}  // namespace testutil

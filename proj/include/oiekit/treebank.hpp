#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oiekit/span.hpp"

namespace oiekit::tree {

// One node of a constituency parse. Internal nodes carry a label and
// children; terminals carry the label and, unless the tree has been pruned,
// a word token. Token-less terminals serialize as "(NP )" with the trailing
// space.
struct ParseNode {
  std::string label;
  std::vector<ParseNode> children;
  std::optional<std::string> token;
  std::optional<std::size_t> leaf_index;

  bool terminal() const { return children.empty(); }
};

struct ParseTree {
  ParseNode root;
};

enum class ParseErrorKind {
  empty_input,
  unbalanced_parens,
  empty_label,
  stray_token,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& what)
      : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
        kind_(kind),
        offset_(offset) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

class HeightError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LeafIndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

inline ParseNode parse_node(std::string_view text, std::size_t& pos) {
  // pre: text[pos] == '('
  ++pos;
  while (pos < text.size() && is_space(text[pos])) ++pos;
  std::size_t label_start = pos;
  while (pos < text.size() && !is_space(text[pos]) && text[pos] != '(' && text[pos] != ')') ++pos;
  if (pos == label_start) {
    throw ParseError(ParseErrorKind::empty_label, label_start, "node label is empty");
  }
  ParseNode node;
  node.label = std::string(text.substr(label_start, pos - label_start));
  for (;;) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos == text.size()) {
      throw ParseError(ParseErrorKind::unbalanced_parens, text.size(),
                       "unexpected end of input inside node '" + node.label + "'");
    }
    char c = text[pos];
    if (c == ')') {
      ++pos;
      return node;
    }
    if (c == '(') {
      if (node.token) {
        throw ParseError(ParseErrorKind::stray_token, pos,
                         "child after token under node '" + node.label + "'");
      }
      node.children.push_back(parse_node(text, pos));
    } else {
      std::size_t word_start = pos;
      while (pos < text.size() && !is_space(text[pos]) && text[pos] != '(' && text[pos] != ')') ++pos;
      if (!node.children.empty() || node.token) {
        throw ParseError(ParseErrorKind::stray_token, word_start,
                         "unexpected extra token under node '" + node.label + "'");
      }
      node.token = std::string(text.substr(word_start, pos - word_start));
    }
  }
}

inline void assign_leaf_indices(ParseNode& node, std::size_t& next) {
  if (node.terminal()) {
    node.leaf_index = node.token ? std::optional<std::size_t>(next++) : std::nullopt;
    return;
  }
  node.leaf_index = std::nullopt;
  for (ParseNode& child : node.children) assign_leaf_indices(child, next);
}

inline void serialize_node(const ParseNode& node, std::string& out) {
  out += '(';
  out += node.label;
  if (node.terminal()) {
    out += ' ';
    if (node.token) out += *node.token;
  } else {
    for (const ParseNode& child : node.children) {
      out += ' ';
      serialize_node(child, out);
    }
  }
  out += ')';
}

// Keeps `levels` label levels below the node; every word token is dropped.
inline ParseNode prune_node(const ParseNode& node, int levels) {
  ParseNode out;
  out.label = node.label;
  if (levels > 0) {
    out.children.reserve(node.children.size());
    for (const ParseNode& child : node.children) {
      out.children.push_back(prune_node(child, levels - 1));
    }
  }
  return out;
}

}  // namespace detail

// Parses a balanced-parenthesis labeled tree such as "(S (NP (DT the) ...))".
// Token-less terminals ("(NP )") are accepted; leaf indices are assigned to
// token-carrying terminals left to right.
inline ParseTree parse_bracketed(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size() && detail::is_space(text[pos])) ++pos;
  if (pos == text.size()) {
    throw ParseError(ParseErrorKind::empty_input, 0, "empty parse input");
  }
  if (text[pos] != '(') {
    throw ParseError(ParseErrorKind::unbalanced_parens, pos, "expected '('");
  }
  ParseTree tree{detail::parse_node(text, pos)};
  while (pos < text.size() && detail::is_space(text[pos])) ++pos;
  if (pos != text.size()) {
    throw ParseError(ParseErrorKind::unbalanced_parens, pos, "trailing content after tree");
  }
  std::size_t next = 0;
  detail::assign_leaf_indices(tree.root, next);
  return tree;
}

// Canonical single-space form; parse_bracketed(serialize(t)) == t.
inline std::string serialize(const ParseTree& tree) {
  std::string out;
  detail::serialize_node(tree.root, out);
  return out;
}

inline std::size_t node_count(const ParseNode& node) {
  std::size_t n = 1;
  for (const ParseNode& child : node.children) n += node_count(child);
  return n;
}

inline std::size_t node_count(const ParseTree& tree) { return node_count(tree.root); }

inline void collect_leaf_tokens(const ParseNode& node, std::vector<std::string>& out) {
  if (node.terminal()) {
    if (node.token) out.push_back(*node.token);
    return;
  }
  for (const ParseNode& child : node.children) collect_leaf_tokens(child, out);
}

inline std::vector<std::string> leaf_tokens(const ParseTree& tree) {
  std::vector<std::string> out;
  collect_leaf_tokens(tree.root, out);
  return out;
}

inline std::size_t leaf_count(const ParseTree& tree) { return leaf_tokens(tree).size(); }

// Number of label levels below the root (a lone root has depth 0).
inline std::size_t label_depth(const ParseNode& node) {
  std::size_t deepest = 0;
  for (const ParseNode& child : node.children) {
    deepest = std::max(deepest, 1 + label_depth(child));
  }
  return deepest;
}

inline std::size_t label_depth(const ParseTree& tree) { return label_depth(tree.root); }

// Truncates the tree to the root label plus `height` label levels below it
// and drops all word tokens, matching the "(IN )"-style skeletons used for
// syntactic comparison. The input tree is left untouched.
inline ParseTree prune(const ParseTree& tree, int height) {
  if (height < 1) throw HeightError("prune height must be >= 1");
  return ParseTree{detail::prune_node(tree.root, height)};
}

// Breadth-first, left-to-right label sequence.
inline std::vector<std::string> level_order_labels(const ParseTree& tree) {
  std::vector<std::string> labels;
  std::deque<const ParseNode*> queue{&tree.root};
  while (!queue.empty()) {
    const ParseNode* node = queue.front();
    queue.pop_front();
    labels.push_back(node->label);
    for (const ParseNode& child : node->children) queue.push_back(&child);
  }
  return labels;
}

inline const std::vector<std::string>& default_phrase_roots() {
  static const std::vector<std::string> roots{"NP", "QP", "NX"};
  return roots;
}

namespace detail {

inline TokenSpan covering_walk(const ParseNode& node, std::size_t& next_leaf,
                               std::size_t leaf_index,
                               const std::vector<std::string>& allowed_roots,
                               std::optional<TokenSpan>& hit) {
  TokenSpan range{next_leaf, next_leaf};
  if (node.terminal()) {
    if (node.token) range.r = ++next_leaf;
  } else {
    for (const ParseNode& child : node.children) {
      range.r = covering_walk(child, next_leaf, leaf_index, allowed_roots, hit).r;
    }
  }
  // Post-order: children are finished first, so the first hit is the
  // innermost qualifying subtree.
  if (!hit && range.contains(leaf_index)) {
    for (const std::string& root : allowed_roots) {
      if (node.label == root) {
        hit = range;
        break;
      }
    }
  }
  return range;
}

}  // namespace detail

// Leaf span of the smallest subtree rooted at one of `allowed_roots` whose
// leaves include `leaf_index`; absent when no such subtree exists.
inline std::optional<TokenSpan> covering_phrase_subtree(
    const ParseTree& tree, std::size_t leaf_index,
    const std::vector<std::string>& allowed_roots = default_phrase_roots()) {
  std::size_t leaves = leaf_count(tree);
  if (leaf_index >= leaves) {
    throw LeafIndexError("leaf index " + std::to_string(leaf_index) + " out of range (" +
                         std::to_string(leaves) + " leaves)");
  }
  std::optional<TokenSpan> hit;
  std::size_t next_leaf = 0;
  detail::covering_walk(tree.root, next_leaf, leaf_index, allowed_roots, hit);
  return hit;
}

}  // namespace oiekit::tree

#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oiekit/carbscore.hpp"
#include "oiekit/cluster.hpp"
#include "oiekit/config.hpp"
#include "oiekit/corpus.hpp"
#include "oiekit/embedding.hpp"
#include "oiekit/restore.hpp"
#include "oiekit/rng.hpp"
#include "oiekit/syndist.hpp"
#include "oiekit/text.hpp"
#include "oiekit/treebank.hpp"

namespace oiekit::cli {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-invocation inputs and outputs, resolved from flags and the config
// file. `out` is the command's primary output path.
struct CommandPaths {
  std::string corpus;
  std::string paraphrases;
  std::string matrix;
  std::string table;
  std::string gold;
  std::string pred;
  std::string train_corpus;
  std::string lemmas;
  std::string replies;
  std::string restored;
  std::string corpus_a;
  std::string corpus_b;
  std::vector<std::string> embeddings;
  std::string out;
  std::string requests_out;
  std::string preds_out;
  bool tree_completion = true;
};

namespace detail {

inline std::string fmt(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  return in;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << content;
  if (!out) throw IoError("failed writing output file: " + path);
}

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required option ") + flag);
}

inline std::vector<SentenceRecord> load_corpus(const std::string& path) {
  std::ifstream in = open_input(path);
  return ingest_corpus(in);
}

inline std::vector<tree::ParseTree> corpus_trees(const std::vector<SentenceRecord>& records) {
  std::vector<tree::ParseTree> trees;
  trees.reserve(records.size());
  for (const SentenceRecord& r : records) trees.push_back(tree::parse_bracketed(r.parse));
  return trees;
}

struct MatrixFile {
  std::vector<std::string> ids;
  cluster::Matrix values;
};

// Matrix rows: id <TAB> v0 <TAB> v1 ... (one row per sentence).
inline MatrixFile read_matrix(const std::string& path) {
  std::ifstream in = open_input(path);
  MatrixFile m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id;
    if (!std::getline(row, id, '\t')) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "matrix line " + std::to_string(line_no) + ": missing id");
    }
    std::vector<double> values;
    std::string cell;
    while (std::getline(row, cell, '\t')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw CorpusError(CorpusErrorKind::bad_record, "matrix line " + std::to_string(line_no) +
                                                           ": bad value '" + cell + "'");
      }
    }
    m.ids.push_back(id);
    m.values.push_back(std::move(values));
  }
  for (const auto& row : m.values) {
    if (row.size() != m.values.size()) {
      throw CorpusError(CorpusErrorKind::bad_record, "matrix is not square");
    }
  }
  return m;
}

inline restore::LemmaTable read_lemma_table(const std::string& path) {
  std::ifstream in = open_input(path);
  restore::LemmaTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "lemma table line " + std::to_string(line_no) + ": expected word<TAB>lemma");
    }
    table[text::fold_case(line.substr(0, tab))] = text::fold_case(line.substr(tab + 1));
  }
  return table;
}

// Replies: request line number (1-based) <TAB> predicate text.
inline std::map<std::size_t, std::string> read_replies(const std::string& path) {
  std::ifstream in = open_input(path);
  std::map<std::size_t, std::string> replies;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "replies line " + std::to_string(line_no) + ": expected number<TAB>text");
    }
    std::size_t request_no = 0;
    try {
      request_no = std::stoull(line.substr(0, tab));
    } catch (const std::exception&) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "replies line " + std::to_string(line_no) + ": bad request number");
    }
    replies[request_no] = line.substr(tab + 1);
  }
  return replies;
}

inline EmbeddingBundle load_embeddings(const std::vector<std::string>& paths) {
  EmbeddingBundle merged;
  for (const std::string& path : paths) {
    std::ifstream in = open_input(path);
    EmbeddingBundle bundle = read_embedding_bundle(in);
    for (auto& [id, matrix] : bundle) {
      if (merged.count(id)) throw EmbeddingError("duplicate sentence id across bundles: " + id);
      merged.emplace(id, std::move(matrix));
    }
  }
  return merged;
}

inline const EmbeddingMatrix& embeddings_for(const EmbeddingBundle& bundle,
                                             const SentenceRecord& record) {
  auto it = bundle.find(record.id);
  if (it == bundle.end()) throw EmbeddingError("no embeddings for sentence '" + record.id + "'");
  std::size_t tokens = text::whitespace_tokens(record.text).size();
  if (it->second.tokens() != tokens) {
    throw EmbeddingError("embedding row count for '" + record.id + "' (" +
                         std::to_string(it->second.tokens()) + ") != token count (" +
                         std::to_string(tokens) + ")");
  }
  return it->second;
}

inline std::string join_tokens(const std::vector<std::string>& tokens, const TokenSpan& span) {
  std::string out;
  for (std::size_t i = span.l; i < span.r; ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

// ---------------------------------------------------------------- commands

inline void cmd_prune(const PipelineConfig& cfg, const CommandPaths& paths) {
  require(paths.corpus, "--corpus");
  require(paths.out, "--out");
  std::vector<SentenceRecord> records = load_corpus(paths.corpus);
  std::string out;
  for (const SentenceRecord& r : records) {
    tree::ParseTree pruned = tree::prune(tree::parse_bracketed(r.parse), cfg.prune_height);
    out += r.id;
    out += '\t';
    out += tree::serialize(pruned);
    out += '\n';
  }
  write_file(paths.out, out);
}

inline void cmd_distance(const PipelineConfig& cfg, const CommandPaths& paths) {
  require(paths.corpus, "--corpus");
  require(paths.out, "--out");
  std::vector<SentenceRecord> records = load_corpus(paths.corpus);
  syndist::DistanceParams params{cfg.prune_height, cfg.alpha};
  cluster::Matrix matrix = syndist::distance_matrix(corpus_trees(records), params);
  std::string out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    out += records[i].id;
    for (double v : matrix[i]) {
      out += '\t';
      out += fmt(v, 6);
    }
    out += '\n';
  }
  write_file(paths.out, out);
}

inline void cmd_cluster(const PipelineConfig& cfg, const CommandPaths& paths) {
  require(paths.matrix, "--matrix");
  require(paths.out, "--out");
  MatrixFile m = read_matrix(paths.matrix);
  cluster::Clustering clustering =
      cluster::cluster_by_distance(m.values, static_cast<std::size_t>(cfg.cluster_k),
                                   static_cast<std::size_t>(cfg.cluster_max_iter),
                                   rng::derive_seed(cfg.seed, "cluster-init"));

  // Per-cluster mean distance from a seeded sample of training parses to the
  // cluster medoid, when both corpora are supplied.
  std::vector<std::string> train_distance(clustering.k, "NA");
  if (!paths.train_corpus.empty()) {
    require(paths.corpus, "--corpus (needed with --train-corpus to look up medoid parses)");
    std::vector<SentenceRecord> corpus = load_corpus(paths.corpus);
    std::map<std::string, const SentenceRecord*> by_id;
    for (const SentenceRecord& r : corpus) by_id[r.id] = &r;
    std::vector<SentenceRecord> train = load_corpus(paths.train_corpus);
    if (train.empty()) throw cluster::EmptySampleError("train corpus is empty");
    std::mt19937_64 gen(rng::derive_seed(cfg.seed, "train-sample"));
    std::size_t wanted = std::min<std::size_t>(train.size(), static_cast<std::size_t>(cfg.train_sample));
    std::vector<std::size_t> picks = rng::sample_indices(train.size(), wanted, gen);
    std::vector<tree::ParseTree> sample;
    sample.reserve(picks.size());
    for (std::size_t p : picks) sample.push_back(tree::parse_bracketed(train[p].parse));
    syndist::DistanceParams params{cfg.prune_height, cfg.alpha};
    for (std::size_t c = 0; c < clustering.k; ++c) {
      const std::string& medoid_id = m.ids[clustering.medoids[c]];
      auto it = by_id.find(medoid_id);
      if (it == by_id.end()) {
        throw CorpusError(CorpusErrorKind::bad_record,
                          "medoid id '" + medoid_id + "' not found in --corpus");
      }
      tree::ParseTree medoid_tree = tree::parse_bracketed(it->second->parse);
      train_distance[c] = fmt(cluster::train_to_cluster_distance(sample, medoid_tree, params), 6);
    }
  }

  std::string out;
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    std::size_t c = clustering.assignments[i];
    out += m.ids[i];
    out += '\t';
    out += std::to_string(c);
    out += '\t';
    out += fmt(m.values[i][clustering.medoids[c]], 6);
    out += '\n';
  }
  out += '\n';
  out += "# cluster\tmedoid\tsize\ttrain_distance\n";
  std::vector<std::size_t> sizes(clustering.k, 0);
  for (std::size_t c : clustering.assignments) ++sizes[c];
  std::vector<std::size_t> order(clustering.k);
  for (std::size_t c = 0; c < clustering.k; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
    return a < b;
  });
  for (std::size_t c : order) {
    out += std::to_string(c);
    out += '\t';
    out += m.ids[clustering.medoids[c]];
    out += '\t';
    out += std::to_string(sizes[c]);
    out += '\t';
    out += train_distance[c];
    out += '\n';
  }
  write_file(paths.out, out);
}

inline void cmd_select_parses(const PipelineConfig& cfg, const CommandPaths& paths) {
  require(paths.corpus, "--corpus");
  require(paths.table, "--table");
  require(paths.out, "--out");
  std::vector<SentenceRecord> records = load_corpus(paths.corpus);
  std::ifstream table_in = open_input(paths.table);
  syndist::ParsePairTable table = syndist::ParsePairTable::load_tsv(table_in);
  if (table.empty()) throw syndist::EmptyTableError("parse pair table is empty");
  syndist::SourceRanker ranker(table);
  std::string out;
  for (const SentenceRecord& r : records) {
    std::string src_key =
        tree::serialize(tree::prune(tree::parse_bracketed(r.parse), cfg.prune_height));
    std::vector<std::string> matches =
        ranker.rank(src_key, static_cast<std::size_t>(cfg.m_sources));
    std::vector<std::string> targets = syndist::sample_target_parses(
        matches, table, static_cast<std::size_t>(cfg.k_paraphrases),
        rng::derive_seed(cfg.seed, "select", r.id));
    for (std::size_t rank = 0; rank < targets.size(); ++rank) {
      out += r.id;
      out += '\t';
      out += std::to_string(rank + 1);
      out += '\t';
      out += targets[rank];
      out += '\n';
    }
  }
  write_file(paths.out, out);
}

inline void cmd_restore(const PipelineConfig& cfg, const CommandPaths& paths) {
  require(paths.corpus, "--corpus");
  require(paths.paraphrases, "--paraphrases");
  require(paths.out, "--out");
  if (paths.embeddings.empty()) throw ConfigError("missing required option --embeddings");

  std::vector<SentenceRecord> sources = load_corpus(paths.corpus);
  std::vector<SentenceRecord> paraphrases = load_corpus(paths.paraphrases);
  EmbeddingBundle bundle = load_embeddings(paths.embeddings);
  std::map<std::string, const SentenceRecord*> source_by_id;
  for (const SentenceRecord& r : sources) source_by_id[r.id] = &r;

  std::optional<restore::LemmaTable> lemmas;
  if (!paths.lemmas.empty()) lemmas = read_lemma_table(paths.lemmas);
  std::map<std::size_t, std::string> replies;
  bool external_predicates = !paths.replies.empty();
  if (external_predicates) replies = read_replies(paths.replies);

  restore::RestoreOptions opts;
  opts.tau = cfg.tau;

  std::string restored_out;
  std::string requests_out;
  std::string preds_out;
  std::size_t restored_count = 0;
  std::size_t dropped = 0;
  std::size_t request_no = 0;

  for (const SentenceRecord& para : paraphrases) {
    auto src_it = source_by_id.find(para.source_id);
    if (src_it == source_by_id.end()) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "paraphrase '" + para.id + "' references unknown source '" +
                            para.source_id + "'");
    }
    const SentenceRecord& src = *src_it->second;
    const EmbeddingMatrix& src_emb = embeddings_for(bundle, src);
    const EmbeddingMatrix& tgt_emb = embeddings_for(bundle, para);
    tree::ParseTree tgt_tree = tree::parse_bracketed(para.parse);
    std::vector<std::string> tgt_tokens = text::whitespace_tokens(para.text);

    nlohmann::ordered_json out_record;
    out_record["id"] = para.id;
    out_record["source_id"] = src.id;
    out_record["text"] = para.text;
    out_record["tuples"] = nlohmann::ordered_json::array();

    for (std::size_t t = 0; t < src.tuples.size(); ++t) {
      const Extraction& tuple = src.tuples[t];
      if (tuple.arg_spans.empty()) continue;  // text-only tuples cannot be restored

      // Candidate spans per argument.
      std::vector<std::vector<restore::ScoredSpan>> slots;
      std::vector<std::vector<double>> profiles;
      bool no_candidates = false;
      for (const TokenSpan& span : tuple.arg_spans) {
        std::vector<double> profile = restore::similarity_profile(src_emb, tgt_emb, span);
        std::vector<restore::ScoredSpan> candidates =
            restore::merge_threshold_spans(profile, opts.tau);
        if (paths.tree_completion) candidates = restore::complete_spans(tgt_tree, candidates);
        if (candidates.empty()) {
          no_candidates = true;
          break;
        }
        slots.push_back(std::move(candidates));
        profiles.push_back(std::move(profile));
      }
      if (no_candidates) {
        ++dropped;
        continue;
      }

      // Without an external predicate generator, predicate candidates from
      // the predicate's own similarity profile compete in the non-overlap
      // selection.
      std::vector<restore::ScoredSpan> pred_candidates;
      if (!external_predicates && tuple.pred_span) {
        std::vector<double> pred_profile =
            restore::similarity_profile(src_emb, tgt_emb, *tuple.pred_span);
        pred_candidates = restore::merge_threshold_spans(pred_profile, opts.tau);
      }

      std::vector<TokenSpan> chosen;
      std::optional<TokenSpan> pred_span_out;
      bool selected = false;
      if (!pred_candidates.empty()) {
        std::vector<std::vector<restore::ScoredSpan>> joint = slots;
        joint.push_back(pred_candidates);
        try {
          std::vector<TokenSpan> all =
              restore::select_tuple_spans(joint, opts.max_candidates_per_slot);
          pred_span_out = all.back();
          all.pop_back();
          chosen = std::move(all);
          selected = true;
        } catch (const restore::NoFeasibleSelectionError&) {
          // fall back to arguments only
        }
      }
      if (!selected) {
        try {
          chosen = restore::select_tuple_spans(slots, opts.max_candidates_per_slot);
        } catch (const restore::RestoreError&) {
          ++dropped;
          continue;
        }
      }

      std::vector<restore::ScoredSpan> selected_spans;
      for (std::size_t a = 0; a < chosen.size(); ++a) {
        auto it = std::find_if(slots[a].begin(), slots[a].end(),
                               [&](const restore::ScoredSpan& s) { return s.span == chosen[a]; });
        selected_spans.push_back(*it);
      }

      // Predicate text.
      std::string pred_text;
      ++request_no;
      std::string a1 = join_tokens(tgt_tokens, chosen[0]);
      std::string a2 = chosen.size() > 1 ? join_tokens(tgt_tokens, chosen[1]) : std::string();
      requests_out += restore::predicate_request(para.text, a1, a2);
      requests_out += '\n';
      if (external_predicates) {
        auto reply = replies.find(request_no);
        if (reply == replies.end()) {
          throw CorpusError(CorpusErrorKind::bad_record,
                            "no reply for predicate request " + std::to_string(request_no));
        }
        pred_text = reply->second;
        pred_span_out.reset();
      } else if (pred_span_out) {
        pred_text = join_tokens(tgt_tokens, *pred_span_out);
      } else {
        std::vector<std::string> pred_lemmas;
        for (const std::string& tok : text::whitespace_tokens(tuple.pred_text)) {
          pred_lemmas.push_back(restore::lemma_of(tok, lemmas ? &*lemmas : nullptr));
        }
        pred_span_out = restore::fallback_predicate(tgt_tokens, pred_lemmas, chosen,
                                                    lemmas ? &*lemmas : nullptr);
        pred_text = pred_span_out ? join_tokens(tgt_tokens, *pred_span_out) : tuple.pred_text;
      }

      std::vector<std::optional<double>> importance =
          restore::importance_scores(selected_spans, profiles);

      nlohmann::ordered_json out_tuple;
      out_tuple["args"] = nlohmann::ordered_json::array();
      for (std::size_t a = 0; a < selected_spans.size(); ++a) {
        const restore::ScoredSpan& s = selected_spans[a];
        nlohmann::ordered_json arg;
        arg["text"] = join_tokens(tgt_tokens, s.span);
        arg["l"] = s.span.l;
        arg["r"] = s.span.r;
        arg["provenance"] =
            s.provenance == restore::SpanProvenance::similarity ? "similarity" : "tree_completed";
        if (s.origin) {
          arg["origin_l"] = s.origin->l;
          arg["origin_r"] = s.origin->r;
        }
        arg["score"] = s.score;
        out_tuple["args"].push_back(arg);
      }
      nlohmann::ordered_json pred;
      pred["text"] = pred_text;
      if (pred_span_out) {
        pred["l"] = pred_span_out->l;
        pred["r"] = pred_span_out->r;
      }
      out_tuple["pred"] = pred;
      out_tuple["confidence"] = 1.0;
      nlohmann::ordered_json imp = nlohmann::ordered_json::array();
      for (std::size_t j = 0; j < importance.size(); ++j) {
        if (importance[j]) imp.push_back({j, *importance[j]});
      }
      out_tuple["importance"] = imp;
      out_record["tuples"].push_back(out_tuple);
      ++restored_count;

      preds_out += para.text;
      preds_out += '\t';
      preds_out += fmt(1.0, 4);
      preds_out += '\t';
      preds_out += pred_text;
      for (const restore::ScoredSpan& s : selected_spans) {
        preds_out += '\t';
        preds_out += join_tokens(tgt_tokens, s.span);
      }
      preds_out += '\n';
    }
    restored_out += out_record.dump();
    restored_out += '\n';
  }

  write_file(paths.out, restored_out);
  if (!paths.requests_out.empty()) write_file(paths.requests_out, requests_out);
  if (!paths.preds_out.empty()) write_file(paths.preds_out, preds_out);
  std::cerr << "restored " << restored_count << " tuples (" << dropped << " dropped) from "
            << paraphrases.size() << " paraphrases\n";
}

inline void cmd_mask(const PipelineConfig& cfg, const CommandPaths& paths) {
  require(paths.restored, "--restored");
  require(paths.out, "--out");
  std::ifstream in = open_input(paths.restored);
  std::string line;
  std::size_t line_no = 0;
  std::string out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "restored line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    std::string id = j.at("id").get<std::string>();
    const nlohmann::json& tuples = j.at("tuples");
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      std::vector<std::size_t> positions;
      std::vector<double> values;
      for (const nlohmann::json& entry : tuples[t].at("importance")) {
        positions.push_back(entry[0].get<std::size_t>());
        values.push_back(entry[1].get<double>());
      }
      std::vector<std::size_t> masked;
      if (!values.empty()) {
        std::vector<std::size_t> picks = restore::mask_indices(
            values, cfg.mask_rate, rng::derive_seed(cfg.seed, "mask", id, t));
        for (std::size_t p : picks) masked.push_back(positions[p]);
        std::sort(masked.begin(), masked.end());
      }
      out += id;
      out += '\t';
      out += std::to_string(t);
      out += '\t';
      for (std::size_t i = 0; i < masked.size(); ++i) {
        if (i > 0) out += ' ';
        out += std::to_string(masked[i]);
      }
      out += '\n';
    }
  }
  write_file(paths.out, out);
}

inline void cmd_score(const PipelineConfig& cfg, const CommandPaths& paths) {
  (void)cfg;
  require(paths.gold, "--gold");
  require(paths.pred, "--pred");
  require(paths.out, "--out");
  std::ifstream gold_in = open_input(paths.gold);
  std::vector<GoldRow> golds = read_gold_tsv(gold_in);
  std::ifstream pred_in = open_input(paths.pred);
  std::vector<GoldRow> preds = read_pred_tsv(pred_in);

  std::map<std::string, score::SentencePair> groups;
  for (GoldRow& row : golds) groups[row.sentence].golds.push_back(std::move(row.tuple));
  for (GoldRow& row : preds) groups[row.sentence].preds.push_back(std::move(row.tuple));
  std::vector<score::SentencePair> ordered;
  ordered.reserve(groups.size());
  for (auto& [sentence, pair] : groups) ordered.push_back(pair);

  score::PRCurve curve = score::pr_curve_grouped(ordered);

  std::string out;
  for (const auto& [sentence, pair] : groups) {
    out += "# ";
    out += sentence;
    out += '\n';
    score::MatchTable table = score::build_match_table(pair.golds, pair.preds);
    for (std::size_t g = 0; g < table.gold_count; ++g) {
      for (std::size_t p = 0; p < table.pred_count; ++p) {
        const score::MatchCell& cell = table.cell(g, p);
        out += std::to_string(g);
        out += '\t';
        out += std::to_string(p);
        out += '\t';
        for (std::size_t s = 0; s < cell.slot_common.size(); ++s) {
          if (s > 0) out += ',';
          out += std::to_string(cell.slot_common[s]);
        }
        out += '\t';
        out += fmt(cell.precision, 4);
        out += '\t';
        out += fmt(cell.recall, 4);
        out += '\n';
      }
    }
  }
  out += fmt(curve.auc, 4);
  out += '\t';
  out += fmt(curve.optimal_f1, 4);
  out += '\t';
  out += fmt(curve.last_f1, 4);
  out += '\n';
  write_file(paths.out, out);
}

inline void cmd_report(const PipelineConfig& cfg, const CommandPaths& paths) {
  (void)cfg;
  require(paths.corpus_a, "--corpus-a");
  require(paths.corpus_b, "--corpus-b");
  require(paths.out, "--out");
  auto tokens_of = [](const std::string& path) {
    std::vector<std::vector<std::string>> out;
    for (const SentenceRecord& r : load_corpus(path)) {
      out.push_back(text::whitespace_tokens(r.text));
    }
    return out;
  };
  std::vector<cluster::WordFrequency> rows =
      cluster::word_distribution_report(tokens_of(paths.corpus_a), tokens_of(paths.corpus_b));
  std::string out;
  for (const cluster::WordFrequency& row : rows) {
    out += row.word;
    out += '\t';
    out += fmt(row.freq_a, 8);
    out += '\t';
    out += fmt(row.freq_b, 8);
    out += '\n';
  }
  write_file(paths.out, out);
}

}  // namespace detail

// Dispatches one batch command. Config ranges are validated before any
// output is touched. Returns 0 on success, 1 on validation failure, 2 on an
// I/O failure, printing one diagnostic line to stderr per failure.
inline int run_command(const std::string& command, const PipelineConfig& cfg,
                       const CommandPaths& paths) {
  try {
    cfg.validate();
    if (command == "prune") {
      detail::cmd_prune(cfg, paths);
    } else if (command == "distance") {
      detail::cmd_distance(cfg, paths);
    } else if (command == "cluster") {
      detail::cmd_cluster(cfg, paths);
    } else if (command == "select-parses") {
      detail::cmd_select_parses(cfg, paths);
    } else if (command == "restore") {
      detail::cmd_restore(cfg, paths);
    } else if (command == "mask") {
      detail::cmd_mask(cfg, paths);
    } else if (command == "score") {
      detail::cmd_score(cfg, paths);
    } else if (command == "report") {
      detail::cmd_report(cfg, paths);
    } else {
      std::cerr << "unknown command: " << command << '\n';
      return 1;
    }
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace oiekit::cli

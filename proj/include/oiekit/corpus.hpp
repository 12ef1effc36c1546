#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "oiekit/extraction.hpp"
#include "oiekit/text.hpp"
#include "oiekit/treebank.hpp"

namespace oiekit::cli {

// One corpus record: a pre-tokenized sentence (tokens separated by single
// spaces), its bracketed constituency parse, and optionally the tuples
// extracted from it. Paraphrase records carry the id of the sentence they
// paraphrase in source_id.
struct SentenceRecord {
  std::string id;
  std::string text;
  std::string parse;
  std::vector<Extraction> tuples;
  std::string source_id;
};

enum class CorpusErrorKind { missing_field, parse_token_mismatch, bad_record };

class CorpusError : public std::runtime_error {
 public:
  CorpusError(CorpusErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  CorpusErrorKind kind() const { return kind_; }

 private:
  CorpusErrorKind kind_;
};

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline Extraction tuple_from_json(const json& j, const std::string& id, std::size_t n_tokens) {
  Extraction ex;
  if (!j.contains("args") || !j["args"].is_array() || j["args"].empty()) {
    throw CorpusError(CorpusErrorKind::missing_field,
                      "record '" + id + "': tuple needs a non-empty 'args' array");
  }
  bool all_spans = true;
  for (const json& arg : j["args"]) {
    if (!arg.contains("text")) {
      throw CorpusError(CorpusErrorKind::missing_field,
                        "record '" + id + "': tuple argument needs 'text'");
    }
    ex.arg_texts.push_back(arg["text"].get<std::string>());
    if (arg.contains("l") && arg.contains("r")) {
      ex.arg_spans.push_back(TokenSpan{arg["l"].get<std::size_t>(), arg["r"].get<std::size_t>()});
    } else {
      all_spans = false;
    }
  }
  if (!all_spans && !ex.arg_spans.empty()) {
    throw CorpusError(CorpusErrorKind::missing_field,
                      "record '" + id + "': either all tuple arguments carry spans or none");
  }
  if (j.contains("pred")) {
    const json& pred = j["pred"];
    if (pred.contains("text")) ex.pred_text = pred["text"].get<std::string>();
    if (pred.contains("l") && pred.contains("r")) {
      ex.pred_span = TokenSpan{pred["l"].get<std::size_t>(), pred["r"].get<std::size_t>()};
    }
  }
  if (j.contains("confidence")) ex.confidence = j["confidence"].get<double>();

  std::vector<TokenSpan> spans = ex.arg_spans;
  if (ex.pred_span) spans.push_back(*ex.pred_span);
  for (const TokenSpan& s : spans) {
    if (s.l >= s.r || s.r > n_tokens) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "record '" + id + "': tuple span out of sentence bounds");
    }
  }
  for (std::size_t i = 0; i < spans.size(); ++i) {
    for (std::size_t k = i + 1; k < spans.size(); ++k) {
      if (spans[i].overlaps(spans[k])) {
        throw CorpusError(CorpusErrorKind::bad_record,
                          "record '" + id + "': tuple spans overlap");
      }
    }
  }
  return ex;
}

inline ordered_json tuple_to_json(const Extraction& ex) {
  ordered_json j;
  j["args"] = ordered_json::array();
  for (std::size_t a = 0; a < ex.arg_texts.size(); ++a) {
    ordered_json arg;
    arg["text"] = ex.arg_texts[a];
    if (a < ex.arg_spans.size()) {
      arg["l"] = ex.arg_spans[a].l;
      arg["r"] = ex.arg_spans[a].r;
    }
    j["args"].push_back(arg);
  }
  ordered_json pred;
  pred["text"] = ex.pred_text;
  if (ex.pred_span) {
    pred["l"] = ex.pred_span->l;
    pred["r"] = ex.pred_span->r;
  }
  j["pred"] = pred;
  j["confidence"] = ex.confidence;
  return j;
}

}  // namespace detail

// Reads one JSON record per line. Required fields: id, text, parse. The
// parse's leaf tokens must equal the whitespace tokens of the text.
inline std::vector<SentenceRecord> ingest_corpus(std::istream& in) {
  std::vector<SentenceRecord> records;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    detail::json j;
    try {
      j = detail::json::parse(line);
    } catch (const detail::json::exception& e) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    SentenceRecord record;
    for (const char* field : {"id", "text", "parse"}) {
      if (!j.contains(field) || !j[field].is_string()) {
        throw CorpusError(CorpusErrorKind::missing_field,
                          "line " + std::to_string(line_no) + ": missing field '" +
                              std::string(field) + "'");
      }
    }
    record.id = j["id"].get<std::string>();
    record.text = j["text"].get<std::string>();
    record.parse = j["parse"].get<std::string>();
    if (j.contains("source_id")) record.source_id = j["source_id"].get<std::string>();
    if (!seen_ids.insert(record.id).second) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "line " + std::to_string(line_no) + ": duplicate record id '" +
                            record.id + "'");
    }

    tree::ParseTree tree;
    try {
      tree = tree::parse_bracketed(record.parse);
    } catch (const tree::ParseError& e) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "record '" + record.id + "': " + e.what());
    }
    std::vector<std::string> text_tokens = text::whitespace_tokens(record.text);
    if (tree::leaf_tokens(tree) != text_tokens) {
      throw CorpusError(CorpusErrorKind::parse_token_mismatch,
                        "record '" + record.id + "': parse leaves disagree with text tokens");
    }
    if (j.contains("tuples")) {
      for (const detail::json& t : j["tuples"]) {
        record.tuples.push_back(detail::tuple_from_json(t, record.id, text_tokens.size()));
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

inline void write_corpus(std::ostream& out, const std::vector<SentenceRecord>& records) {
  for (const SentenceRecord& record : records) {
    detail::ordered_json j;
    j["id"] = record.id;
    j["text"] = record.text;
    j["parse"] = record.parse;
    if (!record.source_id.empty()) j["source_id"] = record.source_id;
    if (!record.tuples.empty()) {
      j["tuples"] = detail::ordered_json::array();
      for (const Extraction& t : record.tuples) j["tuples"].push_back(detail::tuple_to_json(t));
    }
    out << j.dump() << '\n';
  }
}

// Gold tuples: sentence <TAB> relation <TAB> arg1 <TAB> arg2 [<TAB> arg3 ...]
struct GoldRow {
  std::string sentence;
  Extraction tuple;
};

inline std::vector<GoldRow> read_gold_tsv(std::istream& in) {
  std::vector<GoldRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 4) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "gold line " + std::to_string(line_no) +
                            ": expected sentence, relation, arg1, arg2[, ...]");
    }
    GoldRow row;
    row.sentence = fields[0];
    row.tuple.pred_text = fields[1];
    for (std::size_t i = 2; i < fields.size(); ++i) row.tuple.arg_texts.push_back(fields[i]);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Predictions: sentence <TAB> confidence <TAB> relation <TAB> arg1 [<TAB> arg2 ...]
inline std::vector<GoldRow> read_pred_tsv(std::istream& in) {
  std::vector<GoldRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 4) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "prediction line " + std::to_string(line_no) +
                            ": expected sentence, confidence, relation, arg1[, ...]");
    }
    GoldRow row;
    row.sentence = fields[0];
    try {
      row.tuple.confidence = std::stod(fields[1]);
    } catch (const std::exception&) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "prediction line " + std::to_string(line_no) + ": bad confidence '" +
                            fields[1] + "'");
    }
    if (!std::isfinite(row.tuple.confidence)) {
      throw CorpusError(CorpusErrorKind::bad_record,
                        "prediction line " + std::to_string(line_no) +
                            ": confidence must be finite");
    }
    row.tuple.pred_text = fields[2];
    for (std::size_t i = 3; i < fields.size(); ++i) row.tuple.arg_texts.push_back(fields[i]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace oiekit::cli

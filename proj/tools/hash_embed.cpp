// Builds a deterministic toy embedding bundle from corpus files: the shared
// vocabulary (case-folded tokens, sorted) defines one-hot rows, so equal
// tokens match with cosine 1 and distinct tokens with cosine 0. Useful for
// driving the restoration pipeline without an external embedder.

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oiekit/corpus.hpp"
#include "oiekit/embedding.hpp"
#include "oiekit/text.hpp"

int main(int argc, char** argv) {
  CLI::App app{"one-hot embedding bundle generator"};
  std::vector<std::string> corpus_paths;
  std::string out_path;
  app.add_option("corpora", corpus_paths, "corpus files (JSON lines)")->required()->expected(-1);
  app.add_option("--out", out_path, "output bundle path")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::vector<oiekit::cli::SentenceRecord>> corpora;
    std::set<std::string> vocab_set;
    for (const std::string& path : corpus_paths) {
      std::ifstream in(path, std::ios::binary);
      if (!in) {
        std::cerr << "cannot open input file: " << path << '\n';
        return 2;
      }
      corpora.push_back(oiekit::cli::ingest_corpus(in));
      for (const oiekit::cli::SentenceRecord& r : corpora.back()) {
        for (const std::string& tok : oiekit::text::whitespace_tokens(r.text)) {
          vocab_set.insert(oiekit::text::fold_case(tok));
        }
      }
    }
    std::map<std::string, std::size_t> vocab;
    for (const std::string& word : vocab_set) vocab.emplace(word, vocab.size());
    const std::size_t dim = vocab.size();

    oiekit::EmbeddingBundle bundle;
    for (const auto& records : corpora) {
      for (const oiekit::cli::SentenceRecord& r : records) {
        if (bundle.count(r.id)) {
          std::cerr << "duplicate sentence id across corpora: " << r.id << '\n';
          return 1;
        }
        std::vector<std::string> tokens = oiekit::text::whitespace_tokens(r.text);
        oiekit::EmbeddingMatrix matrix;
        matrix.sentence_id = r.id;
        matrix.dim = dim;
        matrix.data.assign(tokens.size() * dim, 0.0f);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
          matrix.data[i * dim + vocab.at(oiekit::text::fold_case(tokens[i]))] = 1.0f;
        }
        bundle.emplace(r.id, std::move(matrix));
      }
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open output file: " << out_path << '\n';
      return 2;
    }
    oiekit::write_embedding_bundle(out, bundle);
    std::cerr << "wrote " << bundle.size() << " sentences, dim " << dim << '\n';
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}

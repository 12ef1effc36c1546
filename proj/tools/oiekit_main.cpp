// Command-line front end: batch subcommands over line-delimited corpora,
// distance matrices, embedding bundles, and tuple files.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oiekit/commands.hpp"
#include "oiekit/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"syntactic-distance and extraction-restoration toolkit"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_path;
  std::uint64_t seed = 0;
  double tau = 0.7, alpha = 0.9, mask_rate = 0.15;
  int k = 5, m = 2, height = 3, clusters = 5, max_iter = 300, train_sample = 300;

  app.add_option("--config", config_path, "JSON config file; flags override its fields");
  app.add_option("--seed", seed, "pipeline seed (all randomness derives from it)");
  app.add_option("--tau", tau, "similarity threshold for span candidates");
  app.add_option("--k", k, "target parses sampled per sentence");
  app.add_option("--m", m, "source parses retrieved per sentence");
  app.add_option("--height", height, "parse pruning height");
  app.add_option("--alpha", alpha, "match run discount factor");
  app.add_option("--mask-rate", mask_rate, "fraction of argument tokens to mask");
  app.add_option("--clusters", clusters, "number of clusters");
  app.add_option("--max-iter", max_iter, "clustering iteration cap");
  app.add_option("--train-sample", train_sample, "training sentences sampled for distances");

  oiekit::cli::CommandPaths paths;
  bool no_tree_completion = false;

  CLI::App* prune = app.add_subcommand("prune", "prune corpus parses to a fixed height");
  prune->add_option("--corpus", paths.corpus);
  prune->add_option("--out", paths.out);

  CLI::App* distance = app.add_subcommand("distance", "pairwise syntactic distance matrix");
  distance->add_option("--corpus", paths.corpus);
  distance->add_option("--out", paths.out);

  CLI::App* cluster = app.add_subcommand("cluster", "k-medoids over a distance matrix");
  cluster->add_option("--matrix", paths.matrix);
  cluster->add_option("--corpus", paths.corpus);
  cluster->add_option("--train-corpus", paths.train_corpus);
  cluster->add_option("--out", paths.out);

  CLI::App* select = app.add_subcommand("select-parses", "retrieve and sample target parses");
  select->add_option("--corpus", paths.corpus);
  select->add_option("--table", paths.table);
  select->add_option("--out", paths.out);

  CLI::App* restore = app.add_subcommand("restore", "restore tuples inside paraphrases");
  restore->add_option("--corpus", paths.corpus);
  restore->add_option("--paraphrases", paths.paraphrases);
  restore->add_option("--embeddings", paths.embeddings)->expected(-1);
  restore->add_option("--lemmas", paths.lemmas);
  restore->add_option("--replies", paths.replies);
  restore->add_option("--out", paths.out);
  restore->add_option("--requests-out", paths.requests_out);
  restore->add_option("--preds-out", paths.preds_out);
  restore->add_flag("--no-tree-completion", no_tree_completion,
                    "restore from similarity runs only");

  CLI::App* mask = app.add_subcommand("mask", "sample denoise masks for restored tuples");
  mask->add_option("--restored", paths.restored);
  mask->add_option("--out", paths.out);

  CLI::App* score = app.add_subcommand("score", "score predictions against gold tuples");
  score->add_option("--gold", paths.gold);
  score->add_option("--pred", paths.pred);
  score->add_option("--out", paths.out);

  CLI::App* report = app.add_subcommand("report", "word distribution comparison of two corpora");
  report->add_option("--corpus-a", paths.corpus_a);
  report->add_option("--corpus-b", paths.corpus_b);
  report->add_option("--out", paths.out);

  CLI11_PARSE(app, argc, argv);

  oiekit::cli::PipelineConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config file: " << config_path << '\n';
      return 2;
    }
    try {
      cfg = oiekit::cli::load_config(in);
    } catch (const std::exception& e) {
      std::cerr << e.what() << '\n';
      return 1;
    }
  }
  if (app.count("--seed")) cfg.seed = seed;
  if (app.count("--tau")) cfg.tau = tau;
  if (app.count("--k")) cfg.k_paraphrases = k;
  if (app.count("--m")) cfg.m_sources = m;
  if (app.count("--height")) cfg.prune_height = height;
  if (app.count("--alpha")) cfg.alpha = alpha;
  if (app.count("--mask-rate")) cfg.mask_rate = mask_rate;
  if (app.count("--clusters")) cfg.cluster_k = clusters;
  if (app.count("--max-iter")) cfg.cluster_max_iter = max_iter;
  if (app.count("--train-sample")) cfg.train_sample = train_sample;

  // config file path defaults apply where no flag was given
  if (paths.corpus.empty()) paths.corpus = cfg.corpus_path;
  if (paths.paraphrases.empty()) paths.paraphrases = cfg.paraphrases_path;
  if (paths.embeddings.empty()) paths.embeddings = cfg.embedding_paths;
  if (paths.table.empty()) paths.table = cfg.parse_pairs_path;
  if (paths.gold.empty()) paths.gold = cfg.gold_path;
  if (paths.pred.empty()) paths.pred = cfg.pred_path;
  if (paths.train_corpus.empty()) paths.train_corpus = cfg.train_corpus_path;
  if (paths.lemmas.empty()) paths.lemmas = cfg.lemmas_path;
  paths.tree_completion = !no_tree_completion;

  CLI::App* sub = app.get_subcommands().front();
  return oiekit::cli::run_command(sub->get_name(), cfg, paths);
}

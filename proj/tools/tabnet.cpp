// tabnet: command-line front end for the TabularNet pipeline.

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tabularnet/tabularnet.hpp"

namespace fs = std::filesystem;
using namespace tabularnet;

namespace {

struct GraphCliOptions {
  std::string kind = "wordnet";
  WordnetGraphOptions opts;
  std::string taxonomy_file;
  std::string lexicon_file;
};

void add_graph_flags(CLI::App* cmd, GraphCliOptions& g) {
  cmd->add_option("--graph", g.kind, "Graph construction: wordnet|grid|tlbr|none")
      ->check(CLI::IsMember({"wordnet", "grid", "tlbr", "none"}));
  cmd->add_option("--eta", g.opts.eta, "Max synonyms taken per word (wordnet graph)");
  cmd->add_option("--eps-depth", g.opts.eps_depth, "Max depth gap to the LCA (wordnet graph)");
  cmd->add_flag("--strict-depth-gap", g.opts.strict_gap,
                "Compare the depth gap with < instead of <=");
  cmd->add_option("--taxonomy", g.taxonomy_file, "Taxonomy file (child<TAB>parent lines)");
  cmd->add_option("--lexicon", g.lexicon_file, "Lexicon file (word<TAB>node,... lines)");
}

struct LoadedLex {
  std::optional<Taxonomy> tax;
  std::optional<Lexicon> lex;
};

/// Wordnet graphs need a taxonomy + lexicon; default to the files that
/// gen-synthetic drops next to the dataset.
LoadedLex load_lex_if_needed(const GraphCliOptions& g, const fs::path& data_dir) {
  LoadedLex out;
  if (g.kind != "wordnet") return out;
  fs::path tax_path = g.taxonomy_file.empty() ? data_dir / "taxonomy.tsv" : fs::path(g.taxonomy_file);
  fs::path lex_path = g.lexicon_file.empty() ? data_dir / "lexicon.tsv" : fs::path(g.lexicon_file);
  if (!fs::exists(tax_path))
    throw ParseError("wordnet graph needs a taxonomy; not found at " + tax_path.string() +
                     " (pass --taxonomy)");
  if (!fs::exists(lex_path))
    throw ParseError("wordnet graph needs a lexicon; not found at " + lex_path.string() +
                     " (pass --lexicon)");
  out.tax = Taxonomy::from_string(read_file(tax_path));
  out.lex = Lexicon::from_string(read_file(lex_path), *out.tax);
  return out;
}

std::vector<PreparedTable> prepare_all(const std::vector<GridTable>& tables,
                                       const TextEmbeddingProvider& provider,
                                       const GraphCliOptions& g, const LoadedLex& lex) {
  const GraphKind kind = *graph_kind_from_name(g.kind);
  return prepare_tables(tables, provider, kind, lex.tax ? &*lex.tax : nullptr,
                        lex.lex ? &*lex.lex : nullptr, g.opts);
}

int run(int argc, char** argv) {
  CLI::App app{"TabularNet: table understanding pipeline"};
  app.require_subcommand(1);

  // --- gen-synthetic -------------------------------------------------------
  auto* gen = app.add_subcommand("gen-synthetic", "Generate a labeled synthetic dataset");
  SyntheticSpec spec;
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output dataset directory")->required();
  gen->add_option("--count", spec.table_count, "Number of tables");
  gen->add_option("--seed", spec.seed, "Generator seed");
  gen->add_option("--min-data-rows", spec.min_data_rows);
  gen->add_option("--max-data-rows", spec.max_data_rows);
  gen->add_option("--min-data-cols", spec.min_data_cols);
  gen->add_option("--max-data-cols", spec.max_data_cols);
  gen->add_option("--min-header-rows", spec.min_header_rows);
  gen->add_option("--max-header-rows", spec.max_header_rows);
  gen->add_option("--min-header-cols", spec.min_header_cols);
  gen->add_option("--max-header-cols", spec.max_header_cols);
  gen->add_option("--agg-prob", spec.aggregation_prob, "Probability of an aggregation row");
  gen->add_option("--style-noise", spec.style_noise, "Per-cue style flip probability");
  gen->callback([&] {
    write_synthetic_dataset(gen_out, spec);
    std::cout << "wrote " << spec.table_count << " tables to " << gen_out << "\n";
  });

  // --- extract-features ----------------------------------------------------
  auto* feat = app.add_subcommand("extract-features", "Write per-table feature matrices");
  std::string feat_data, feat_out, feat_embfile;
  int feat_dim = 64;
  bool feat_allow_large = false;
  feat->add_option("--data", feat_data, "Dataset directory")->required();
  feat->add_option("--out", feat_out, "Output directory")->required();
  feat->add_option("--embeddings-file", feat_embfile, "Precomputed text embedding file");
  feat->add_option("--embedding-dim", feat_dim, "Hashing embedding width (default provider)");
  feat->add_flag("--allow-large-tables", feat_allow_large, "Lift the 5000-cell limit");
  feat->callback([&] {
    auto provider = make_embedding_provider(feat_embfile, feat_dim);
    const auto tables = load_dataset(feat_data, feat_allow_large);
    fs::create_directories(feat_out);
    for (const GridTable& t : tables)
      write_file(fs::path(feat_out) / (t.id + ".features.json"),
                 export_feature_matrix(extract_features(t, *provider)));
    std::cout << "wrote " << tables.size() << " feature matrices to " << feat_out << "\n";
  });

  // --- build-graph ---------------------------------------------------------
  auto* graph = app.add_subcommand("build-graph", "Write per-table cell graphs");
  std::string graph_data, graph_out;
  bool graph_allow_large = false;
  GraphCliOptions graph_cli;
  graph->add_option("--data", graph_data, "Dataset directory")->required();
  graph->add_option("--out", graph_out, "Output directory")->required();
  graph->add_flag("--allow-large-tables", graph_allow_large);
  add_graph_flags(graph, graph_cli);
  graph->callback([&] {
    const auto lex = load_lex_if_needed(graph_cli, graph_data);
    const auto tables = load_dataset(graph_data, graph_allow_large);
    const GraphKind kind = *graph_kind_from_name(graph_cli.kind);
    fs::create_directories(graph_out);
    std::string params;
    if (kind == GraphKind::Wordnet)
      params = "eta=" + std::to_string(graph_cli.opts.eta) +
               " eps_depth=" + std::to_string(graph_cli.opts.eps_depth) +
               " strict_gap=" + std::to_string(graph_cli.opts.strict_gap ? 1 : 0);
    for (const GridTable& t : tables) {
      const CellGraph g = build_graph(kind, t, lex.tax ? &*lex.tax : nullptr,
                                      lex.lex ? &*lex.lex : nullptr, graph_cli.opts);
      write_file(fs::path(graph_out) / (t.id + ".graph.tsv"),
                 export_graph(g, graph_cli.kind, params));
    }
    std::cout << "wrote " << tables.size() << " graphs to " << graph_out << "\n";
  });

  // --- train ---------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "Train a model on a dataset directory");
  std::string tr_data, tr_ckpt, tr_report, tr_task = "cell", tr_embfile;
  std::vector<double> tr_split{0.7, 0.1, 0.2};
  int tr_dim = 64;
  bool tr_allow_large = false;
  TrainConfig tcfg;
  GraphCliOptions tr_graph;
  tr->add_option("--data", tr_data, "Dataset directory")->required();
  tr->add_option("--out", tr_ckpt, "Checkpoint output path")->required();
  tr->add_option("--report", tr_report, "Metrics report output path (JSON)");
  tr->add_option("--task", tr_task, "cell|region|multi")
      ->check(CLI::IsMember({"cell", "region", "multi"}));
  tr->add_option("--split", tr_split, "Train/val/test ratios")->expected(3);
  tr->add_option("--lr", tcfg.optimizer.lr, "AdamW learning rate");
  tr->add_option("--weight-decay", tcfg.optimizer.weight_decay, "AdamW decoupled decay");
  tr->add_option("--batch", tcfg.batch_size, "Tables per optimizer step");
  tr->add_option("--epochs", tcfg.max_epochs, "Maximum epochs");
  tr->add_option("--patience", tcfg.patience, "Early stopping patience");
  tr->add_option("--dropout", tcfg.encoder.dropout, "Dropout probability");
  tr->add_option("--seed", tcfg.seed, "Split/init/shuffle seed");
  tr->add_option("--stack-layers", tcfg.encoder.stack_layers, "Structure layers to stack");
  tr->add_flag("--deterministic", tcfg.deterministic, "Force deterministic execution");
  tr->add_flag("--class-weighting", tcfg.class_weighting, "Inverse-frequency cell loss weights");
  tr->add_option("--embeddings-file", tr_embfile, "Precomputed text embedding file");
  tr->add_option("--embedding-dim", tr_dim, "Hashing embedding width (default provider)");
  tr->add_flag("--allow-large-tables", tr_allow_large);
  add_graph_flags(tr, tr_graph);
  tr->callback([&] {
    auto provider = make_embedding_provider(tr_embfile, tr_dim);
    const auto lex = load_lex_if_needed(tr_graph, tr_data);
    const auto tables = load_dataset(tr_data, tr_allow_large);
    const auto split = split_dataset(tables, tr_split[0], tr_split[1], tr_split[2], tcfg.seed);
    std::cerr << "split: " << split.train.size() << " train / " << split.val.size() << " val / "
              << split.test.size() << " test\n";
    tcfg.task = *task_from_name(tr_task);
    tcfg.graph = *graph_kind_from_name(tr_graph.kind);
    tcfg.graph_opts = tr_graph.opts;
    const auto train_prep = prepare_all(split.train, *provider, tr_graph, lex);
    const auto val_prep = prepare_all(split.val, *provider, tr_graph, lex);
    TrainResult res = train(tcfg, train_prep, val_prep, *provider);
    for (const EpochStat& e : res.report.history)
      std::cerr << "epoch " << e.epoch << ": train_loss=" << e.train_loss
                << (e.has_val ? " val_score=" + std::to_string(e.val_score) : "") << "\n";
    save_checkpoint(tr_ckpt, res.meta, res.model->params());
    std::cout << "checkpoint written to " << tr_ckpt << "\n";
    if (!tr_report.empty()) write_file(tr_report, res.report.dump());
  });

  // --- shared flags for checkpoint consumers --------------------------------
  struct CkptArgs {
    std::string data, ckpt, out, embfile;
    bool allow_large = false;
    std::string taxonomy_file, lexicon_file;
  };
  auto add_ckpt_flags = [](CLI::App* cmd, CkptArgs& a, bool out_required) {
    cmd->add_option("--data", a.data, "Dataset directory")->required();
    cmd->add_option("--checkpoint", a.ckpt, "Checkpoint path")->required();
    auto* o = cmd->add_option("--out", a.out, "Output file");
    if (out_required) o->required();
    cmd->add_option("--embeddings-file", a.embfile,
                    "Embedding file (required when the checkpoint used one)");
    cmd->add_option("--taxonomy", a.taxonomy_file, "Taxonomy file override");
    cmd->add_option("--lexicon", a.lexicon_file, "Lexicon file override");
    cmd->add_flag("--allow-large-tables", a.allow_large);
  };

  /// Rebuild the pipeline a checkpoint was trained with.
  auto load_for_inference = [](const CkptArgs& a) {
    LoadedCheckpoint lc = load_checkpoint(a.ckpt);
    std::unique_ptr<TextEmbeddingProvider> provider;
    if (lc.meta.embedding_kind == "file") {
      if (a.embfile.empty())
        throw ParseError("checkpoint was trained with a file embedding provider; pass "
                         "--embeddings-file");
      provider = make_embedding_provider(a.embfile, lc.meta.embedding_dim);
    } else {
      provider = std::make_unique<HashingEmbeddingProvider>(lc.meta.embedding_dim);
    }
    check_fingerprint(lc.meta, *provider);
    GraphCliOptions g;
    g.kind = graph_kind_name(lc.meta.graph_kind);
    g.opts = lc.meta.graph_opts;
    g.taxonomy_file = a.taxonomy_file;
    g.lexicon_file = a.lexicon_file;
    const auto lex = load_lex_if_needed(g, a.data);
    const auto tables = load_dataset(a.data, a.allow_large);
    auto prep = prepare_tables(tables, *provider, lc.meta.graph_kind,
                               lex.tax ? &*lex.tax : nullptr, lex.lex ? &*lex.lex : nullptr,
                               g.opts);
    return std::pair{std::move(lc), std::move(prep)};
  };

  // --- evaluate --------------------------------------------------------------
  auto* ev = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset");
  static CkptArgs ev_args;
  add_ckpt_flags(ev, ev_args, /*out_required=*/false);
  ev->callback([&] {
    auto [lc, prep] = load_for_inference(ev_args);
    const MetricsReport report = evaluate_prepared(*lc.model, prep);
    const std::string text = report.dump();
    if (!ev_args.out.empty())
      write_file(ev_args.out, text);
    else
      std::cout << text << "\n";
  });

  // --- predict ---------------------------------------------------------------
  auto* pr = app.add_subcommand("predict", "Predict roles and header sets (JSON lines)");
  static CkptArgs pr_args;
  add_ckpt_flags(pr, pr_args, /*out_required=*/true);
  pr->callback([&] {
    auto [lc, prep] = load_for_inference(pr_args);
    std::string out;
    for (const PreparedTable& t : prep)
      out += prediction_to_json(predict_table(*lc.model, t)).dump() + "\n";
    write_file(pr_args.out, out);
    std::cout << "predictions for " << prep.size() << " tables written to " << pr_args.out << "\n";
  });

  // --- export-embeddings -------------------------------------------------------
  auto* ex = app.add_subcommand("export-embeddings", "Export final per-cell embeddings (TSV)");
  static CkptArgs ex_args;
  add_ckpt_flags(ex, ex_args, /*out_required=*/true);
  ex->callback([&] {
    auto [lc, prep] = load_for_inference(ex_args);
    write_file(ex_args.out, export_embeddings(*lc.model, prep));
    std::cout << "embeddings written to " << ex_args.out << "\n";
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

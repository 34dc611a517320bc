#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jcce/analysis.hpp"
#include "jcce/datagen.hpp"
#include "jcce/error.hpp"
#include "jcce/eval.hpp"
#include "jcce/event.hpp"
#include "jcce/filters.hpp"
#include "jcce/model.hpp"
#include "jcce/rankers.hpp"
#include "jcce/rng.hpp"
#include "jcce/runconfig.hpp"
#include "jcce/serve.hpp"
#include "jcce/train.hpp"
#include "jcce/tsne.hpp"
#include "jcce/vocab.hpp"
#include "jcce/widedeep.hpp"

namespace {

using namespace jcce;

// Artifact layout inside the run directory. Every stage reads and writes
// through these names, so a pipeline is reproducible from the directory alone.
struct Paths {
  std::string dir;
  std::string config() const { return dir + "/config.json"; }
  std::string events() const { return dir + "/events.csv"; }
  std::string train_split() const { return dir + "/train.csv"; }
  std::string test_split() const { return dir + "/test.csv"; }
  std::string vocabs() const { return dir + "/vocabs.json"; }
  std::string model(const std::string& v) const {
    return dir + "/model-" + v + ".json";
  }
  std::string train_log(const std::string& v) const {
    return dir + "/train_log-" + v + ".csv";
  }
  std::string metrics() const { return dir + "/metrics.csv"; }
  std::string hit_curve() const { return dir + "/hit_curve.csv"; }
  std::string mcnemar_pairs() const { return dir + "/mcnemar.csv"; }
  std::string embeddings() const { return dir + "/embeddings.csv"; }
  std::string projection() const { return dir + "/projection.csv"; }
};

Schema schema_for(const RunConfig& cfg) {
  return cfg.schema_path.empty() ? default_schema()
                                 : Schema::load(cfg.schema_path);
}

Paths open_run_dir(const RunConfig& cfg) {
  Paths paths{cfg.run_dir()};
  std::error_code ec;
  std::filesystem::create_directories(paths.dir, ec);
  if (ec)
    throw IoError("cannot create run directory " + paths.dir + ": " +
                  ec.message());
  std::ofstream out(paths.config(), std::ios::binary);
  if (!out) throw IoError("cannot write " + paths.config());
  out << cfg.to_json();
  return paths;
}

void write_train_log(const std::string& path,
                     const std::vector<EpochStats>& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch,train_loss,val_loss,is_best\n";
  char line[128];
  for (const auto& e : history) {
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%d\n", e.epoch,
                  e.train_loss, e.val_loss, e.improved ? 1 : 0);
    out << line;
  }
  if (!out) throw IoError("failed writing " + path);
}

void cmd_datagen(const RunConfig& cfg) {
  const Paths paths = open_run_dir(cfg);
  const Schema schema = schema_for(cfg);
  const DataGenerator gen(cfg.datagen);
  const auto events = gen.generate();
  save_events(events, schema, paths.events());
  std::printf("wrote %zu events to %s\n", events.size(),
              paths.events().c_str());
}

void cmd_prepare(const RunConfig& cfg) {
  const Paths paths = open_run_dir(cfg);
  const Schema schema = schema_for(cfg);
  const auto events = load_events(paths.events(), schema);
  const auto kept = filter_events(events, cfg.prepare.min_duration,
                                  cfg.prepare.min_content_count);
  auto [fit, held] = temporal_split(kept, cfg.prepare.train_fraction);
  save_events(fit, schema, paths.train_split());
  save_events(held, schema, paths.test_split());
  const VocabSet vocabs = build_vocabularies(fit, schema);
  vocabs.save(paths.vocabs());
  std::printf("kept %zu of %zu events: train %zu, test %zu, catalog %zu\n",
              kept.size(), events.size(), fit.size(), held.size(),
              vocabs.at("genre").cardinality());
}

void cmd_train(const RunConfig& cfg, std::string variant) {
  if (variant.empty()) variant = cfg.train_variant;
  if (variant != "jcce" && variant != "ljcce" && variant != "widedeep")
    throw ConfigError("variant must be jcce, ljcce or widedeep, got '" +
                      variant + "'");
  const Paths paths = open_run_dir(cfg);
  const Schema schema = schema_for(cfg);
  const auto fit = load_events(paths.train_split(), schema);
  const VocabSet vocabs = VocabSet::load(paths.vocabs());

  if (variant == "widedeep") {
    WideDeepStats stats;
    const WideDeepModel model =
        train_widedeep(fit, schema, vocabs, cfg.widedeep, &stats, &std::cerr);
    model.save(paths.model(variant));
    write_train_log(paths.train_log(variant), stats.history);
    std::printf("wrote %s (best epoch %zu, val loss %.6f)\n",
                paths.model(variant).c_str(), stats.best_epoch,
                stats.best_val_loss);
    return;
  }

  TrainConfig tc = cfg.train;
  tc.nonlinear = variant == "jcce";
  TrainStats stats;
  const JcceModel model =
      train_jcce(fit, schema, vocabs, tc, &stats, &std::cerr);
  model.save(paths.model(variant));
  write_train_log(paths.train_log(variant), stats.history);
  std::printf("wrote %s (best epoch %zu, val loss %.6f)\n",
              paths.model(variant).c_str(), stats.best_epoch,
              stats.best_val_loss);
}

void cmd_evaluate(const RunConfig& cfg) {
  const Paths paths = open_run_dir(cfg);
  const Schema schema = schema_for(cfg);
  const auto fit = load_events(paths.train_split(), schema);
  const auto held = load_events(paths.test_split(), schema);
  const VocabSet vocabs = VocabSet::load(paths.vocabs());
  const std::vector<std::string> catalog = vocabs.at("genre").values;

  std::vector<std::unique_ptr<JcceModel>> towers;
  std::vector<std::unique_ptr<WideDeepModel>> wd;
  std::vector<std::unique_ptr<Ranker>> methods;
  methods.push_back(std::make_unique<RandomRanker>(
      catalog, derive_seed(cfg.seed, "eval:random")));
  methods.push_back(std::make_unique<ToppopRanker>(catalog));
  methods.push_back(std::make_unique<ToppopTemporalRanker>(catalog));
  for (const std::string variant : {"jcce", "ljcce"}) {
    const std::string path = paths.model(variant);
    if (!std::filesystem::exists(path)) continue;
    towers.push_back(std::make_unique<JcceModel>(JcceModel::load(path)));
    methods.push_back(std::make_unique<JcceRanker>(*towers.back(), variant));
  }
  if (std::filesystem::exists(paths.model("widedeep"))) {
    wd.push_back(
        std::make_unique<WideDeepModel>(WideDeepModel::load(paths.model("widedeep"))));
    methods.push_back(std::make_unique<WideDeepRanker>(*wd.back()));
  }

  std::vector<EvalReport> reports;
  for (auto& method : methods) {
    method->fit(fit);
    reports.push_back(evaluate(*method, held, cfg.eval.ks));
    const EvalReport& r = reports.back();
    std::printf("%-16s", r.method.c_str());
    for (int k : cfg.eval.ks) std::printf(" hr@%d %.4f", k, r.hr.at(k));
    std::printf(" mrr %.4f", r.mrr);
    if (r.missing_targets)
      std::printf(" (%zu targets outside catalog)", r.missing_targets);
    std::printf("\n");
  }
  write_metrics_csv(paths.metrics(), reports);
  write_hit_curve_csv(paths.hit_curve(), reports);
  write_mcnemar_csv(paths.mcnemar_pairs(), reports);
  std::printf("wrote %s, %s, %s\n", paths.metrics().c_str(),
              paths.hit_curve().c_str(), paths.mcnemar_pairs().c_str());
}

std::map<std::string, std::string> parse_attrs(
    const std::vector<std::string>& flags) {
  std::map<std::string, std::string> attrs;
  for (const auto& flag : flags) {
    const size_t eq = flag.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("attribute must look like name=value, got '" + flag +
                        "'");
    attrs[flag.substr(0, eq)] = flag.substr(eq + 1);
  }
  return attrs;
}

void cmd_recommend(const RunConfig& cfg, std::string model_path,
                   const std::vector<std::string>& attr_flags, int k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (model_path.empty()) model_path = Paths{cfg.run_dir()}.model("jcce");
  const JcceModel model = JcceModel::load(model_path);
  const SparseVec context =
      model.features().encode_context_query(parse_attrs(attr_flags));
  const auto ranked = model.recommend(context, static_cast<size_t>(k));
  for (size_t i = 0; i < ranked.size(); ++i)
    std::printf("%zu %s %s\n", i + 1, ranked[i].genre.c_str(),
                format_score(ranked[i].score).c_str());
}

void cmd_export(const RunConfig& cfg, std::string model_path) {
  const Paths paths = open_run_dir(cfg);
  const Schema schema = schema_for(cfg);
  if (model_path.empty()) model_path = paths.model("jcce");
  const JcceModel model = JcceModel::load(model_path);
  const auto held = load_events(paths.test_split(), schema);
  const size_t sample =
      std::min(cfg.export_cfg.sample_size, held.size());
  const EmbeddingTable table = export_embeddings(
      model, held, sample, derive_seed(cfg.seed, "stage:export"));
  save_embedding_table(table, paths.embeddings());
  std::printf("wrote %zu embeddings (%zu contexts + %zu contents) to %s\n",
              table.rows.size(), sample, table.rows.size() - sample,
              paths.embeddings().c_str());
}

void cmd_project(const RunConfig& cfg) {
  const Paths paths = open_run_dir(cfg);
  const EmbeddingTable table = load_embedding_table(paths.embeddings());
  const TsneResult result = tsne_project(table.matrix(), cfg.tsne);
  save_projection_csv(table, result.coords, paths.projection());
  const auto& final_kl = result.kl_checkpoints.back();
  std::printf("wrote %s (final KL %.6f after %zu iterations)\n",
              paths.projection().c_str(), final_kl.second, final_kl.first);
}

void cmd_serve(const RunConfig& cfg, std::string model_path,
               const std::string& host, int port) {
  if (model_path.empty()) model_path = Paths{cfg.run_dir()}.model("jcce");
  auto model = std::make_shared<const JcceModel>(JcceModel::load(model_path));
  std::printf("serving %s (catalog %zu) on %s:%d\n", model_path.c_str(),
              model->catalog().size(), host.c_str(), port);
  std::fflush(stdout);
  RecommendService service(std::move(model));
  service.run(host, port);
}

const char* error_kind(ErrorCode code) {
  switch (code) {
    case ErrorCode::config: return "config";
    case ErrorCode::data: return "data";
    case ErrorCode::io: return "io";
    case ErrorCode::version: return "version";
    case ErrorCode::fingerprint: return "fingerprint";
    case ErrorCode::parse: return "parse";
    case ErrorCode::contract: return "contract";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint context-content embeddings: data, training, evaluation, serving"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "JSON run configuration file");
  app.add_option("--set", sets,
                 "override a config key, e.g. --set train.lr=0.01");

  auto* c_datagen =
      app.add_subcommand("datagen", "generate a synthetic viewing log");
  auto* c_prepare = app.add_subcommand(
      "prepare", "filter events, split train/test, build vocabularies");
  auto* c_train =
      app.add_subcommand("train", "train a model variant on the train split");
  auto* c_evaluate = app.add_subcommand(
      "evaluate", "rank the test split with every available method");
  auto* c_recommend =
      app.add_subcommand("recommend", "rank the catalog for an ad-hoc context");
  auto* c_export = app.add_subcommand(
      "export-embeddings", "embed sampled test contexts and the catalog");
  auto* c_project =
      app.add_subcommand("project", "project exported embeddings to 2-D");
  auto* c_serve =
      app.add_subcommand("serve", "serve recommendations over HTTP");

  std::string variant;
  c_train->add_option("--variant", variant,
                      "jcce, ljcce or widedeep (default: config train_variant)");

  std::string model_path;
  std::vector<std::string> attr_flags;
  int k = 10;
  c_recommend->add_option("--model", model_path,
                          "model file (default: run dir model-jcce.json)");
  c_recommend->add_option("--attr", attr_flags,
                          "context attribute, e.g. --attr day_of_week=Sat");
  c_recommend->add_option("-k,--k", k, "list length");

  std::string export_model;
  c_export->add_option("--model", export_model,
                       "model file (default: run dir model-jcce.json)");

  std::string serve_model;
  std::string host = "127.0.0.1";
  int port = 8080;
  c_serve->add_option("--model", serve_model,
                      "model file (default: run dir model-jcce.json)");
  c_serve->add_option("--host", host, "bind address");
  c_serve->add_option("--port", port, "TCP port");

  for (auto* sub : {c_datagen, c_prepare, c_train, c_evaluate, c_recommend,
                    c_export, c_project, c_serve})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = config_path.empty()
                              ? RunConfig::from_json_text("", sets)
                              : RunConfig::load(config_path, sets);
    if (c_datagen->parsed()) cmd_datagen(cfg);
    if (c_prepare->parsed()) cmd_prepare(cfg);
    if (c_train->parsed()) cmd_train(cfg, variant);
    if (c_evaluate->parsed()) cmd_evaluate(cfg);
    if (c_recommend->parsed()) cmd_recommend(cfg, model_path, attr_flags, k);
    if (c_export->parsed()) cmd_export(cfg, export_model);
    if (c_project->parsed()) cmd_project(cfg);
    if (c_serve->parsed()) cmd_serve(cfg, serve_model, host, port);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", error_kind(e.code()), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return static_cast<int>(ErrorCode::internal);
  }
  return 0;
}

#include "jcce/runconfig.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace jcce {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& known) {
  if (!obj.is_object())
    throw ConfigError("config section '" + section + "' must be an object");
  for (const auto& [key, value] : obj.items())
    if (!known.count(key))
      throw ConfigError("unknown config key '" +
                        (section.empty() ? key : section + "." + key) + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key +
                      "' has the wrong type");
  }
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return json(text);  // bare strings need no quotes on the command line
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key=value, got '" + assignment +
                      "'");
  std::string pointer = "/" + assignment.substr(0, eq);
  for (auto& ch : pointer)
    if (ch == '.') ch = '/';
  try {
    doc[json::json_pointer(pointer)] =
        parse_override_value(assignment.substr(eq + 1));
  } catch (const json::exception& e) {
    throw ConfigError("cannot apply override '" + assignment + "': " + e.what());
  }
}

RegScope reg_scope_from_name(const std::string& name) {
  if (name == "per_example") return RegScope::per_example;
  if (name == "batch_sum") return RegScope::batch_sum;
  throw ConfigError("reg_scope must be per_example or batch_sum, got '" + name +
                    "'");
}

std::string reg_scope_name(RegScope scope) {
  return scope == RegScope::per_example ? "per_example" : "batch_sum";
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text,
                                    const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = text.empty() ? json::object() : json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config json: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& o : overrides) apply_override(doc, o);

  reject_unknown(doc, "",
                 {"seed", "run_root", "train_variant", "schema", "datagen",
                  "prepare", "train", "widedeep", "eval", "export", "tsne"});

  RunConfig cfg;
  read(doc, "seed", cfg.seed);
  read(doc, "run_root", cfg.run_root);
  read(doc, "train_variant", cfg.train_variant);
  read(doc, "schema", cfg.schema_path);

  if (doc.contains("datagen")) {
    const json& d = doc["datagen"];
    reject_unknown(d, "datagen",
                   {"households", "days", "genres", "top_genres",
                    "events_per_household_per_day", "habit_strength",
                    "nonlinear_interaction", "adults_probs", "children_probs",
                    "regions", "household_tastes", "noise_event_rate",
                    "start_date"});
    read(d, "households", cfg.datagen.n_households);
    read(d, "days", cfg.datagen.n_days);
    read(d, "genres", cfg.datagen.n_genres);
    read(d, "top_genres", cfg.datagen.n_top_genres);
    read(d, "events_per_household_per_day",
         cfg.datagen.events_per_household_per_day);
    read(d, "habit_strength", cfg.datagen.habit_strength);
    read(d, "nonlinear_interaction", cfg.datagen.nonlinear_interaction);
    read(d, "adults_probs", cfg.datagen.adults_probs);
    read(d, "children_probs", cfg.datagen.children_probs);
    read(d, "regions", cfg.datagen.n_regions);
    read(d, "household_tastes", cfg.datagen.household_tastes);
    read(d, "noise_event_rate", cfg.datagen.noise_event_rate);
    read(d, "start_date", cfg.datagen.start_date);
  }
  if (doc.contains("prepare")) {
    const json& p = doc["prepare"];
    reject_unknown(p, "prepare",
                   {"min_duration", "min_content_count", "train_fraction"});
    read(p, "min_duration", cfg.prepare.min_duration);
    read(p, "min_content_count", cfg.prepare.min_content_count);
    read(p, "train_fraction", cfg.prepare.train_fraction);
  }
  if (doc.contains("train")) {
    const json& t = doc["train"];
    reject_unknown(t, "train",
                   {"batch_size", "max_epochs", "patience", "val_fraction",
                    "embedding_dim", "hidden_dims", "dropout", "lambda",
                    "reg_scope", "lr", "beta1", "beta2", "epsilon"});
    read(t, "batch_size", cfg.train.batch_size);
    read(t, "max_epochs", cfg.train.max_epochs);
    read(t, "patience", cfg.train.patience);
    read(t, "val_fraction", cfg.train.val_fraction);
    read(t, "embedding_dim", cfg.train.embedding_dim);
    read(t, "hidden_dims", cfg.train.hidden_dims);
    read(t, "dropout", cfg.train.dropout);
    read(t, "lambda", cfg.train.loss.lambda);
    if (t.contains("reg_scope"))
      cfg.train.loss.reg_scope =
          reg_scope_from_name(t.at("reg_scope").get<std::string>());
    read(t, "lr", cfg.train.adam.lr);
    read(t, "beta1", cfg.train.adam.beta1);
    read(t, "beta2", cfg.train.adam.beta2);
    read(t, "epsilon", cfg.train.adam.epsilon);
  }
  if (doc.contains("widedeep")) {
    const json& w = doc["widedeep"];
    reject_unknown(w, "widedeep",
                   {"batch_size", "max_epochs", "patience", "val_fraction",
                    "hidden_dims", "dropout", "lr", "beta1", "beta2",
                    "epsilon"});
    read(w, "batch_size", cfg.widedeep.batch_size);
    read(w, "max_epochs", cfg.widedeep.max_epochs);
    read(w, "patience", cfg.widedeep.patience);
    read(w, "val_fraction", cfg.widedeep.val_fraction);
    read(w, "hidden_dims", cfg.widedeep.hidden_dims);
    read(w, "dropout", cfg.widedeep.dropout);
    read(w, "lr", cfg.widedeep.adam.lr);
    read(w, "beta1", cfg.widedeep.adam.beta1);
    read(w, "beta2", cfg.widedeep.adam.beta2);
    read(w, "epsilon", cfg.widedeep.adam.epsilon);
  }
  if (doc.contains("eval")) {
    const json& e = doc["eval"];
    reject_unknown(e, "eval", {"ks"});
    read(e, "ks", cfg.eval.ks);
  }
  if (doc.contains("export")) {
    const json& e = doc["export"];
    reject_unknown(e, "export", {"sample_size"});
    read(e, "sample_size", cfg.export_cfg.sample_size);
  }
  if (doc.contains("tsne")) {
    const json& t = doc["tsne"];
    reject_unknown(t, "tsne",
                   {"perplexity", "iterations", "learning_rate",
                    "early_exaggeration", "exaggeration_until",
                    "initial_momentum", "final_momentum", "momentum_switch"});
    read(t, "perplexity", cfg.tsne.perplexity);
    read(t, "iterations", cfg.tsne.iterations);
    read(t, "learning_rate", cfg.tsne.learning_rate);
    read(t, "early_exaggeration", cfg.tsne.early_exaggeration);
    read(t, "exaggeration_until", cfg.tsne.exaggeration_until);
    read(t, "initial_momentum", cfg.tsne.initial_momentum);
    read(t, "final_momentum", cfg.tsne.final_momentum);
    read(t, "momentum_switch", cfg.tsne.momentum_switch);
  }

  cfg.validate();

  // One global seed, per-stage streams.
  cfg.datagen.seed = derive_seed(cfg.seed, "stage:datagen");
  cfg.train.seed = derive_seed(cfg.seed, "stage:train");
  cfg.widedeep.seed = derive_seed(cfg.seed, "stage:widedeep");
  cfg.tsne.seed = derive_seed(cfg.seed, "stage:tsne");
  return cfg;
}

RunConfig RunConfig::load(const std::string& path,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), overrides);
}

void RunConfig::validate() const {
  if (train_variant != "jcce" && train_variant != "ljcce" &&
      train_variant != "widedeep")
    throw ConfigError("train_variant must be jcce, ljcce or widedeep, got '" +
                      train_variant + "'");
  if (run_root.empty()) throw ConfigError("run_root must not be empty");
  if (!(prepare.train_fraction > 0.0 && prepare.train_fraction < 1.0))
    throw ConfigError("prepare.train_fraction must be in (0,1)");
  if (prepare.min_duration < 0)
    throw ConfigError("prepare.min_duration must be nonnegative");
  if (prepare.min_content_count < 0)
    throw ConfigError("prepare.min_content_count must be nonnegative");
  if (eval.ks.empty()) throw ConfigError("eval.ks must not be empty");
  for (int k : eval.ks)
    if (k < 1) throw ConfigError("eval.ks entries must be positive");
  datagen.validate();
  train.validate();
  widedeep.validate();
}

std::string RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["run_root"] = run_root;
  j["train_variant"] = train_variant;
  j["schema"] = schema_path;
  j["datagen"] = {{"households", datagen.n_households},
                  {"days", datagen.n_days},
                  {"genres", datagen.n_genres},
                  {"top_genres", datagen.n_top_genres},
                  {"events_per_household_per_day",
                   datagen.events_per_household_per_day},
                  {"habit_strength", datagen.habit_strength},
                  {"nonlinear_interaction", datagen.nonlinear_interaction},
                  {"adults_probs", datagen.adults_probs},
                  {"children_probs", datagen.children_probs},
                  {"regions", datagen.n_regions},
                  {"household_tastes", datagen.household_tastes},
                  {"noise_event_rate", datagen.noise_event_rate},
                  {"start_date", datagen.start_date}};
  j["prepare"] = {{"min_duration", prepare.min_duration},
                  {"min_content_count", prepare.min_content_count},
                  {"train_fraction", prepare.train_fraction}};
  j["train"] = {{"batch_size", train.batch_size},
                {"max_epochs", train.max_epochs},
                {"patience", train.patience},
                {"val_fraction", train.val_fraction},
                {"embedding_dim", train.embedding_dim},
                {"hidden_dims", train.hidden_dims},
                {"dropout", train.dropout},
                {"lambda", train.loss.lambda},
                {"reg_scope", reg_scope_name(train.loss.reg_scope)},
                {"lr", train.adam.lr},
                {"beta1", train.adam.beta1},
                {"beta2", train.adam.beta2},
                {"epsilon", train.adam.epsilon}};
  j["widedeep"] = {{"batch_size", widedeep.batch_size},
                   {"max_epochs", widedeep.max_epochs},
                   {"patience", widedeep.patience},
                   {"val_fraction", widedeep.val_fraction},
                   {"hidden_dims", widedeep.hidden_dims},
                   {"dropout", widedeep.dropout},
                   {"lr", widedeep.adam.lr},
                   {"beta1", widedeep.adam.beta1},
                   {"beta2", widedeep.adam.beta2},
                   {"epsilon", widedeep.adam.epsilon}};
  j["eval"] = {{"ks", eval.ks}};
  j["export"] = {{"sample_size", export_cfg.sample_size}};
  j["tsne"] = {{"perplexity", tsne.perplexity},
               {"iterations", tsne.iterations},
               {"learning_rate", tsne.learning_rate},
               {"early_exaggeration", tsne.early_exaggeration},
               {"exaggeration_until", tsne.exaggeration_until},
               {"initial_momentum", tsne.initial_momentum},
               {"final_momentum", tsne.final_momentum},
               {"momentum_switch", tsne.momentum_switch}};
  return j.dump(2) + "\n";
}

std::string RunConfig::config_hash() const {
  const uint64_t h = fnv1a64(to_json());
  char buf[17];
  snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::run_dir() const {
  return run_root + "/" + config_hash();
}

}  // namespace jcce

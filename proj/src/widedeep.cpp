#include "jcce/widedeep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "jcce/filters.hpp"
#include "json.hpp"

namespace jcce {

namespace {

constexpr char kSep = '\x1f';

std::string viewer_cross_key(const std::string& viewer,
                             const std::string& genre) {
  return viewer + kSep + genre;
}

std::string temporal_cross_key(const std::string& day, const std::string& slot,
                               const std::string& genre) {
  return day + kSep + slot + kSep + genre;
}

// Canonical identity of a context: every context feature that the encoders
// see, in fixed order. Negative sampling treats two events with equal keys as
// the same context.
std::string context_key(const ViewingEvent& ev, const Schema& schema) {
  std::string key;
  for (const auto& v : ev.viewer_ids) {
    key += v;
    key += '|';
  }
  for (const auto* attr : schema.side_attrs(AttrSide::context)) {
    if (attr->name == "viewer_ids") continue;
    key += kSep;
    auto it = ev.attrs.find(attr->name);
    if (it != ev.attrs.end()) key += it->second;
  }
  return key;
}

Vocabulary vocab_from_keys(const std::set<std::string>& keys) {
  Vocabulary v;
  v.values.assign(keys.begin(), keys.end());
  for (size_t i = 0; i < v.values.size(); ++i) v.to_index[v.values[i]] = i;
  v.counts.assign(v.values.size(), 0);
  return v;
}

SparseVec from_entries(const std::map<size_t, double>& entries, size_t dim) {
  SparseVec out;
  out.dim = dim;
  for (const auto& [idx, val] : entries) out.push(idx, std::min(val, 1.0));
  return out;
}

}  // namespace

WideDeepModel::WideDeepModel(Schema schema, VocabSet vocabs,
                             Vocabulary viewer_genre, Vocabulary temporal_genre,
                             Encoder wide, Encoder deep)
    : features_(schema, vocabs),
      viewer_genre_(std::move(viewer_genre)),
      temporal_genre_(std::move(temporal_genre)),
      wide_(std::move(wide)),
      deep_(std::move(deep)) {
  if (wide_.input_dim() != wide_dim())
    throw ConfigError("wide tower input dim does not match the cross layout");
  if (deep_.input_dim() != deep_dim())
    throw ConfigError("deep tower input dim does not match the feature layout");
  if (wide_.output_dim() != 1 || deep_.output_dim() != 1)
    throw ConfigError("both towers must produce one logit");
}

size_t WideDeepModel::wide_dim() const {
  return viewer_genre_.cardinality() + 1 + temporal_genre_.cardinality() + 1;
}

size_t WideDeepModel::deep_dim() const {
  return features_.context_dim() + features_.content_dim();
}

SparseVec WideDeepModel::wide_vec(const std::vector<std::string>& viewer_ids,
                                  const std::string& day_of_week,
                                  const std::string& time_slot,
                                  const std::string& genre) const {
  std::map<size_t, double> entries;
  for (const auto& viewer : viewer_ids)
    entries[viewer_genre_.lookup(viewer_cross_key(viewer, genre))] += 1.0;
  const size_t temporal_offset = viewer_genre_.cardinality() + 1;
  entries[temporal_offset +
          temporal_genre_.lookup(
              temporal_cross_key(day_of_week, time_slot, genre))] += 1.0;
  return from_entries(entries, wide_dim());
}

SparseVec WideDeepModel::wide_vec(const ViewingEvent& query,
                                  const std::string& genre) const {
  return wide_vec(query.viewer_ids, query.attr("day_of_week"),
                  query.attr("time_slot"), genre);
}

SparseVec WideDeepModel::deep_vec(const SparseVec& context,
                                  const std::string& genre) const {
  if (context.dim != features_.context_dim())
    throw DimensionError("context vector does not match the feature layout");
  const SparseVec content = features_.encode_genre(genre);
  SparseVec out;
  out.dim = deep_dim();
  for (size_t k = 0; k < context.indices.size(); ++k)
    out.push(context.indices[k], context.values[k]);
  for (size_t k = 0; k < content.indices.size(); ++k)
    out.push(features_.context_dim() + content.indices[k], content.values[k]);
  return out;
}

double WideDeepModel::logit(const ViewingEvent& query,
                            const std::string& genre) const {
  const SparseVec ctx = features_.encode_context(query);
  const Tensor w = wide_.embed({wide_vec(query, genre)});
  const Tensor d = deep_.embed({deep_vec(ctx, genre)});
  return w.at(0) + d.at(0);
}

std::vector<double> WideDeepModel::score_catalog(
    const ViewingEvent& query) const {
  const SparseVec ctx = features_.encode_context(query);
  std::vector<SparseVec> wide_batch, deep_batch;
  for (const auto& genre : catalog()) {
    wide_batch.push_back(wide_vec(query, genre));
    deep_batch.push_back(deep_vec(ctx, genre));
  }
  const Tensor w = wide_.embed(wide_batch);
  const Tensor d = deep_.embed(deep_batch);
  std::vector<double> logits(catalog().size());
  for (size_t g = 0; g < logits.size(); ++g) logits[g] = w.at(g) + d.at(g);
  return logits;
}

std::string WideDeepModel::to_json() const {
  nlohmann::json j;
  j["version"] = kWideDeepVersion;
  j["schema_fingerprint"] = fingerprint();
  j["schema"] = nlohmann::json::parse(schema().to_json());
  j["vocabs"] = nlohmann::json::parse(vocabs().to_json());
  j["viewer_genre_keys"] = viewer_genre_.values;
  j["temporal_genre_keys"] = temporal_genre_.values;
  j["wide"] = nlohmann::json::parse(wide_.to_json());
  j["deep"] = nlohmann::json::parse(deep_.to_json());
  return j.dump(2) + "\n";
}

WideDeepModel WideDeepModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version") || !j["version"].is_string())
    throw ParseError("model json has no version tag");
  const std::string version = j["version"].get<std::string>();
  if (version != kWideDeepVersion)
    throw VersionError("unsupported model version: " + version);
  try {
    Schema schema = Schema::from_json(j.at("schema").dump());
    VocabSet vocabs = VocabSet::from_json(j.at("vocabs").dump());
    const std::string stored = j.at("schema_fingerprint").get<std::string>();
    const std::string actual = schema_fingerprint(schema, vocabs);
    if (stored != actual)
      throw FingerprintError("model fingerprint " + stored +
                             " does not match its schema/vocabs (" + actual +
                             ")");
    auto viewer_keys = j.at("viewer_genre_keys").get<std::vector<std::string>>();
    auto temporal_keys =
        j.at("temporal_genre_keys").get<std::vector<std::string>>();
    Vocabulary vg = vocab_from_keys({viewer_keys.begin(), viewer_keys.end()});
    Vocabulary tg =
        vocab_from_keys({temporal_keys.begin(), temporal_keys.end()});
    if (vg.cardinality() != viewer_keys.size() ||
        tg.cardinality() != temporal_keys.size())
      throw ParseError("cross-feature key list has duplicates");
    Encoder wide = Encoder::from_json(j.at("wide").dump());
    Encoder deep = Encoder::from_json(j.at("deep").dump());
    try {
      return WideDeepModel(std::move(schema), std::move(vocabs), std::move(vg),
                           std::move(tg), std::move(wide), std::move(deep));
    } catch (const ConfigError& e) {
      throw ParseError(std::string("inconsistent model file: ") + e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model json: ") + e.what());
  }
}

void WideDeepModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  out << to_json();
  if (!out) throw IoError("failed writing model file: " + path);
}

WideDeepModel WideDeepModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void WideDeepConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (max_epochs < 1) throw ConfigError("max_epochs must be positive");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw ConfigError("val_fraction must be in [0,1)");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw ConfigError("dropout must be in [0,1)");
  if (adam.lr <= 0.0) throw ConfigError("learning rate must be positive");
}

namespace {

struct PairBatchResult {
  double loss_sum = 0.0;
  size_t batches = 0;
};

// One negative per positive: a genre this exact context key was never
// observed with. Falls back to "any other genre" only in the degenerate case
// where a context has consumed the whole catalog but one.
size_t sample_negative(const std::set<std::pair<std::string, size_t>>& observed,
                       const std::string& key, size_t positive,
                       size_t n_genres, Rng& rng) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    const size_t g = rng.uniform_int(n_genres);
    if (!observed.count({key, g})) return g;
  }
  size_t g = rng.uniform_int(n_genres);
  while (g == positive && n_genres > 1) g = rng.uniform_int(n_genres);
  return g;
}

}  // namespace

WideDeepModel train_widedeep(const std::vector<ViewingEvent>& events,
                             const Schema& schema, const VocabSet& vocabs,
                             const WideDeepConfig& cfg, WideDeepStats* stats,
                             std::ostream* progress) {
  cfg.validate();
  if (events.empty()) throw DataError("no events to train on");

  // Cross vocabularies from the full training input.
  std::set<std::string> viewer_keys, temporal_keys;
  for (const auto& ev : events) {
    for (const auto& viewer : ev.viewer_ids)
      viewer_keys.insert(viewer_cross_key(viewer, ev.genre));
    temporal_keys.insert(temporal_cross_key(ev.attr("day_of_week"),
                                            ev.attr("time_slot"), ev.genre));
  }

  FeatureEncoder features(schema, vocabs);
  EncoderConfig wide_cfg;
  wide_cfg.nonlinear = false;
  wide_cfg.embedding_dim = 1;
  EncoderConfig deep_cfg;
  deep_cfg.nonlinear = true;
  deep_cfg.hidden_dims = cfg.hidden_dims;
  deep_cfg.embedding_dim = 1;
  deep_cfg.dropout = cfg.dropout;

  const size_t wide_dim = viewer_keys.size() + 1 + temporal_keys.size() + 1;
  Encoder wide(wide_dim, wide_cfg);
  Encoder deep(features.context_dim() + features.content_dim(), deep_cfg);
  {
    Rng init_rng(derive_seed(cfg.seed, "widedeep:init"));
    wide.init_glorot(init_rng);
    deep.init_glorot(init_rng);
  }
  WideDeepModel model(schema, vocabs, vocab_from_keys(viewer_keys),
                      vocab_from_keys(temporal_keys), std::move(wide),
                      std::move(deep));

  const auto& catalog = model.catalog();
  const size_t n_genres = catalog.size();
  std::set<std::pair<std::string, size_t>> observed;
  for (const auto& ev : events) {
    const size_t g = vocabs.at("genre").lookup(ev.genre);
    if (g >= n_genres)
      throw DataError("training event genre '" + ev.genre +
                      "' is outside the vocabulary");
    observed.insert({context_key(ev, schema), g});
  }

  std::vector<ViewingEvent> fit = events, val;
  if (cfg.val_fraction > 0.0) {
    auto split = temporal_split(events, 1.0 - cfg.val_fraction);
    fit = std::move(split.first);
    val = std::move(split.second);
  } else {
    std::stable_sort(fit.begin(), fit.end(),
                     [](const ViewingEvent& a, const ViewingEvent& b) {
                       return a.timestamp < b.timestamp;
                     });
  }
  // temporal_split reorders; compute per-event keys against the sorted view.
  std::vector<ViewingEvent> ordered = fit;
  ordered.insert(ordered.end(), val.begin(), val.end());
  std::vector<std::string> okeys;
  std::vector<size_t> opos;
  for (const auto& ev : ordered) {
    okeys.push_back(context_key(ev, schema));
    opos.push_back(vocabs.at("genre").lookup(ev.genre));
  }
  const size_t n_fit = fit.size();
  if (n_fit == 0) throw DataError("validation split leaves no training events");

  std::vector<Parameter*> params = model.wide().parameters();
  for (Parameter* p : model.deep().parameters()) params.push_back(p);
  AdamState adam(params, cfg.adam);

  // Fixed validation pairs: each held-out positive plus one negative drawn
  // once, so epochs are compared on identical data.
  std::vector<std::pair<size_t, double>> val_pairs;  // (ordered index, label)
  std::vector<size_t> val_negatives;
  {
    Rng vrng(derive_seed(cfg.seed, "widedeep:val"));
    for (size_t i = n_fit; i < ordered.size(); ++i) {
      val_pairs.push_back({i, 1.0});
      val_negatives.push_back(
          sample_negative(observed, okeys[i], opos[i], n_genres, vrng));
    }
  }

  auto batch_loss = [&](const std::vector<size_t>& rows,
                        const std::vector<size_t>& genres,
                        const std::vector<double>& labels, bool training,
                        Rng* dropout_rng, Tape* tape_out) {
    std::vector<SparseVec> wide_batch, deep_batch;
    Tensor targets(rows.size(), 1);
    for (size_t r = 0; r < rows.size(); ++r) {
      const ViewingEvent& ev = ordered[rows[r]];
      const std::string& genre = catalog[genres[r]];
      const SparseVec ctx = features.encode_context(ev);
      wide_batch.push_back(model.wide_vec(ev, genre));
      deep_batch.push_back(model.deep_vec(ctx, genre));
      targets(r, 0) = labels[r];
    }
    if (!training) {
      const Tensor w = model.wide().embed(wide_batch);
      const Tensor d = model.deep().embed(deep_batch);
      double loss = 0.0;
      for (size_t r = 0; r < rows.size(); ++r) {
        const double z = w.at(r) + d.at(r);
        const double softplus =
            z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += softplus - targets(r, 0) * z;
      }
      return loss / static_cast<double>(rows.size());
    }
    Tape& tape = *tape_out;
    const auto w = model.wide().forward(tape, wide_batch, true, *dropout_rng);
    const auto d = model.deep().forward(tape, deep_batch, true, *dropout_rng);
    const auto loss = tape.bce_with_logits_mean(tape.add(w, d), targets);
    const double value = tape.scalar(loss);
    tape.backward(loss);
    return value;
  };

  Rng shuffle_rng(derive_seed(cfg.seed, "widedeep:shuffle"));
  Rng negative_rng(derive_seed(cfg.seed, "widedeep:negatives"));
  Rng dropout_rng(derive_seed(cfg.seed, "widedeep:dropout"));

  WideDeepStats local;
  WideDeepStats& st = stats ? *stats : local;
  st = WideDeepStats{};

  double best = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_params;
  for (const Parameter* p : params) best_params.push_back(p->value);
  size_t since_improvement = 0;
  const bool has_val = !val_pairs.empty();

  for (size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::vector<size_t> perm(n_fit);
    for (size_t i = 0; i < n_fit; ++i) perm[i] = i;
    for (size_t i = n_fit - 1; i > 0; --i)
      std::swap(perm[i], perm[shuffle_rng.uniform_int(i + 1)]);

    double epoch_loss = 0.0;
    size_t batches = 0;
    for (size_t begin = 0; begin < n_fit; begin += cfg.batch_size) {
      const size_t end = std::min(begin + cfg.batch_size, n_fit);
      std::vector<size_t> rows, genres;
      std::vector<double> labels;
      for (size_t i = begin; i < end; ++i) {
        const size_t row = perm[i];
        rows.push_back(row);
        genres.push_back(opos[row]);
        labels.push_back(1.0);
        rows.push_back(row);
        genres.push_back(sample_negative(observed, okeys[row], opos[row],
                                         n_genres, negative_rng));
        labels.push_back(0.0);
      }
      Tape tape;
      const double value =
          batch_loss(rows, genres, labels, true, &dropout_rng, &tape);
      if (!std::isfinite(value))
        throw TrainingError("training diverged: non-finite loss in epoch " +
                            std::to_string(epoch) + " (lr " +
                            std::to_string(cfg.adam.lr) + ")");
      epoch_loss += value;
      ++batches;
      adam.step();
    }
    epoch_loss /= static_cast<double>(batches);

    double metric = epoch_loss;
    if (has_val) {
      std::vector<size_t> rows, genres;
      std::vector<double> labels;
      for (size_t i = 0; i < val_pairs.size(); ++i) {
        rows.push_back(val_pairs[i].first);
        genres.push_back(opos[val_pairs[i].first]);
        labels.push_back(1.0);
        rows.push_back(val_pairs[i].first);
        genres.push_back(val_negatives[i]);
        labels.push_back(0.0);
      }
      metric = batch_loss(rows, genres, labels, false, nullptr, nullptr);
    }
    if (!std::isfinite(metric))
      throw TrainingError(
          "training diverged: non-finite validation loss in epoch " +
          std::to_string(epoch) + " (lr " + std::to_string(cfg.adam.lr) + ")");

    const bool improved = metric < best;
    if (improved) {
      best = metric;
      for (size_t i = 0; i < params.size(); ++i) best_params[i] = params[i]->value;
      st.best_epoch = epoch;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    st.history.push_back({epoch, epoch_loss, metric, improved});
    if (progress)
      *progress << "epoch " << epoch << "/" << cfg.max_epochs << "  train "
                << epoch_loss << "  val " << metric << (improved ? " *" : "")
                << "\n";
    if (since_improvement >= cfg.patience) {
      st.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }
  st.best_val_loss = best;
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = best_params[i];
  return model;
}

WideDeepRanker::WideDeepRanker(const WideDeepModel& model)
    : Ranker(model.catalog()), model_(model) {
  fitted_ = true;
}

const std::string& WideDeepRanker::name() const {
  static const std::string n = "widedeep";
  return n;
}

std::vector<size_t> WideDeepRanker::rank(const ViewingEvent& query,
                                         size_t) const {
  return order_descending(model_.score_catalog(query));
}

}  // namespace jcce

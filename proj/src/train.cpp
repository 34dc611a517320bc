#include "jcce/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "jcce/filters.hpp"
#include "jcce/sampler.hpp"

namespace jcce {

namespace {

std::vector<Tensor> snapshot_params(const std::vector<Parameter*>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const Parameter* p : params) out.push_back(p->value);
  return out;
}

void restore_params(const std::vector<Parameter*>& params,
                    const std::vector<Tensor>& snap) {
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = snap[i];
}

// Deals the validation events into genre-distinct batches: round b holds the
// b-th event of every genre that still has one. Covers the whole split, needs
// no sampling, and is identical every epoch.
std::vector<std::vector<size_t>> validation_batches(
    const std::vector<ViewingEvent>& val) {
  std::map<std::string, std::vector<size_t>> by_genre;
  for (size_t i = 0; i < val.size(); ++i) by_genre[val[i].genre].push_back(i);
  std::vector<std::vector<size_t>> batches;
  for (size_t round = 0;; ++round) {
    std::vector<size_t> batch;
    for (const auto& [genre, idx] : by_genre)
      if (round < idx.size()) batch.push_back(idx[round]);
    if (batch.empty()) break;
    batches.push_back(std::move(batch));
  }
  return batches;
}

// Event-weighted mean objective over the fixed batches, dropout off.
double validation_loss(Encoder& ctx_enc, Encoder& cnt_enc,
                       const FeatureEncoder& features,
                       const std::vector<ViewingEvent>& val,
                       const std::vector<std::vector<size_t>>& batches,
                       const LossConfig& loss_cfg) {
  double total = 0.0;
  size_t count = 0;
  for (const auto& idx : batches) {
    std::vector<SparseVec> ctx, cnt;
    for (size_t i : idx) {
      ctx.push_back(features.encode_context(val[i]));
      cnt.push_back(features.encode_genre(val[i].genre));
    }
    total += static_cast<double>(idx.size()) *
             jcce_loss_value(ctx_enc.embed(ctx), cnt_enc.embed(cnt), loss_cfg);
    count += idx.size();
  }
  return total / static_cast<double>(count);
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (max_epochs < 1) throw ConfigError("max_epochs must be positive");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw ConfigError("val_fraction must be in [0,1)");
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw ConfigError("dropout must be in [0,1)");
  if (adam.lr <= 0.0) throw ConfigError("learning rate must be positive");
}

JcceModel train_jcce(const std::vector<ViewingEvent>& events,
                     const Schema& schema, const VocabSet& vocabs,
                     const TrainConfig& cfg, TrainStats* stats,
                     std::ostream* progress) {
  cfg.validate();
  if (events.empty()) throw DataError("no events to train on");

  FeatureEncoder features(schema, vocabs);

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
  if (fit.empty()) throw DataError("validation split leaves no training events");
  BatchSampler fit_sampler(fit);
  const auto val_batches = validation_batches(val);
  const bool has_val = !val.empty();

  EncoderConfig enc_cfg;
  enc_cfg.nonlinear = cfg.nonlinear;
  enc_cfg.hidden_dims = cfg.hidden_dims;
  enc_cfg.embedding_dim = cfg.embedding_dim;
  enc_cfg.dropout = cfg.dropout;
  Encoder ctx_enc(features.context_dim(), enc_cfg);
  Encoder cnt_enc(features.content_dim(), enc_cfg);
  {
    Rng init_rng(derive_seed(cfg.seed, "train:init"));
    ctx_enc.init_glorot(init_rng);
    cnt_enc.init_glorot(init_rng);
  }

  std::vector<Parameter*> params = ctx_enc.parameters();
  for (Parameter* p : cnt_enc.parameters()) params.push_back(p);
  AdamState adam(params, cfg.adam);

  const size_t n = std::min(cfg.batch_size, fit_sampler.distinct_genres());
  const size_t batches_per_epoch = (fit.size() + n - 1) / n;

  Rng sample_rng(derive_seed(cfg.seed, "train:sample"));
  Rng dropout_rng(derive_seed(cfg.seed, "train:dropout"));

  TrainStats local;
  TrainStats& st = stats ? *stats : local;
  st = TrainStats{};
  st.batch_size_used = n;
  st.fit_events = fit.size();
  st.val_events = val.size();

  double best = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_params = snapshot_params(params);
  size_t since_improvement = 0;

  for (size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (size_t b = 0; b < batches_per_epoch; ++b) {
      const auto idx = fit_sampler.sample_batch(n, sample_rng);
      std::vector<SparseVec> ctx, cnt;
      ctx.reserve(n);
      cnt.reserve(n);
      for (size_t i : idx) {
        ctx.push_back(features.encode_context(fit[i]));
        cnt.push_back(features.encode_genre(fit[i].genre));
      }
      Tape tape;
      const auto ctx_node = ctx_enc.forward(tape, ctx, true, dropout_rng);
      const auto cnt_node = cnt_enc.forward(tape, cnt, true, dropout_rng);
      const auto loss = jcce_loss(tape, ctx_node, cnt_node, cfg.loss);
      const double value = tape.scalar(loss);
      if (!std::isfinite(value))
        throw TrainingError("training diverged: non-finite loss in epoch " +
                            std::to_string(epoch) + " (lr " +
                            std::to_string(cfg.adam.lr) + ")");
      epoch_loss += value;
      tape.backward(loss);
      adam.step();
    }
    epoch_loss /= static_cast<double>(batches_per_epoch);

    const double metric =
        has_val ? validation_loss(ctx_enc, cnt_enc, features, val, val_batches,
                                  cfg.loss)
                : epoch_loss;
    if (!std::isfinite(metric))
      throw TrainingError(
          "training diverged: non-finite validation loss in epoch " +
          std::to_string(epoch) + " (lr " + std::to_string(cfg.adam.lr) + ")");

    const bool improved = metric < best;
    if (improved) {
      best = metric;
      best_params = snapshot_params(params);
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
  restore_params(params, best_params);

  return JcceModel(schema, vocabs, std::move(ctx_enc), std::move(cnt_enc));
}

}  // namespace jcce

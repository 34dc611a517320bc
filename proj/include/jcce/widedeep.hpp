#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jcce/adam.hpp"
#include "jcce/encode.hpp"
#include "jcce/encoder.hpp"
#include "jcce/event.hpp"
#include "jcce/rankers.hpp"
#include "jcce/train.hpp"
#include "jcce/vocab.hpp"

namespace jcce {

inline constexpr const char* kWideDeepVersion = "widedeep-model-v1";

// Logistic scorer over observed context-content pairs: a wide linear term on
// two cross features (each viewer id crossed with genre, and the day/slot
// pair crossed with genre) plus a deep MLP over the concatenated context and
// content one/multi-hot features, ending in one scalar logit.
class WideDeepModel {
 public:
  WideDeepModel(Schema schema, VocabSet vocabs, Vocabulary viewer_genre,
                Vocabulary temporal_genre, Encoder wide, Encoder deep);

  const Schema& schema() const { return features_.schema(); }
  const VocabSet& vocabs() const { return features_.vocabs(); }
  const FeatureEncoder& features() const { return features_; }
  const std::string& fingerprint() const { return features_.fingerprint(); }
  const std::vector<std::string>& catalog() const { return features_.catalog(); }
  Encoder& wide() { return wide_; }
  Encoder& deep() { return deep_; }

  size_t wide_dim() const;
  size_t deep_dim() const;

  // Sparse inputs for one (context, genre) pair. Unseen cross tuples land on
  // each cross feature's OOV slot.
  SparseVec wide_vec(const std::vector<std::string>& viewer_ids,
                     const std::string& day_of_week,
                     const std::string& time_slot,
                     const std::string& genre) const;
  SparseVec wide_vec(const ViewingEvent& query, const std::string& genre) const;
  SparseVec deep_vec(const SparseVec& context, const std::string& genre) const;

  double logit(const ViewingEvent& query, const std::string& genre) const;
  // Logits against the whole catalog, in catalog order.
  std::vector<double> score_catalog(const ViewingEvent& query) const;

  std::string to_json() const;
  static WideDeepModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static WideDeepModel load(const std::string& path);

 private:
  FeatureEncoder features_;
  Vocabulary viewer_genre_;    // keys "<viewer>\x1f<genre>"
  Vocabulary temporal_genre_;  // keys "<day>\x1f<slot>\x1f<genre>"
  Encoder wide_;
  Encoder deep_;
};

struct WideDeepConfig {
  uint64_t seed = 42;
  size_t batch_size = 256;  // positives per batch; negatives double the rows
  size_t max_epochs = 8;
  size_t patience = 2;
  double val_fraction = 0.1;
  std::vector<size_t> hidden_dims = {250, 250};
  double dropout = 0.2;
  AdamConfig adam;
  void validate() const;
};

struct WideDeepStats {
  std::vector<EpochStats> history;  // val_loss is held-out BCE
  size_t best_epoch = 0;
  double best_val_loss = 0.0;
  bool stopped_early = false;
};

// Binary cross-entropy training with 1:1 negative sampling: each positive is
// paired per epoch with a uniformly drawn genre never observed for that exact
// context key. Early-stops on held-out BCE and restores the best weights.
WideDeepModel train_widedeep(const std::vector<ViewingEvent>& events,
                             const Schema& schema, const VocabSet& vocabs,
                             const WideDeepConfig& cfg,
                             WideDeepStats* stats = nullptr,
                             std::ostream* progress = nullptr);

class WideDeepRanker : public Ranker {
 public:
  explicit WideDeepRanker(const WideDeepModel& model);
  const std::string& name() const override;
  std::vector<size_t> rank(const ViewingEvent& query,
                           size_t query_index) const override;

 private:
  const WideDeepModel& model_;
};

}  // namespace jcce

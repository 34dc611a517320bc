#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "jcce/adam.hpp"
#include "jcce/encoder.hpp"
#include "jcce/event.hpp"
#include "jcce/loss.hpp"
#include "jcce/model.hpp"

namespace jcce {

struct TrainConfig {
  uint64_t seed = 42;
  size_t batch_size = 64;  // capped at the fit split's distinct genre count
  size_t max_epochs = 40;
  size_t patience = 10;      // epochs without val improvement before stopping
  double val_fraction = 0.1; // chronological tail; 0 stops on train loss
  bool nonlinear = true;     // false trains the linear variant
  std::vector<size_t> hidden_dims = {250, 250};
  size_t embedding_dim = 50;
  double dropout = 0.2;
  LossConfig loss;
  AdamConfig adam;
  void validate() const;
};

struct EpochStats {
  size_t epoch;  // 1-based
  double train_loss;
  double val_loss;
  bool improved;
};

struct TrainStats {
  std::vector<EpochStats> history;
  size_t best_epoch = 0;
  double best_val_loss = 0.0;
  bool stopped_early = false;
  size_t batch_size_used = 0;
  size_t fit_events = 0;
  size_t val_events = 0;
};

// Raised when optimization produces a non-finite loss.
struct TrainingError : Error {
  explicit TrainingError(const std::string& m) : Error(ErrorCode::internal, m) {}
};

// Trains both towers end to end: splits off a chronological validation tail,
// optimizes the symmetric contrastive objective with Adam, early-stops on
// validation loss and returns the model restored to its best-validation
// weights. Vocabularies come prebuilt from the preparation stage.
JcceModel train_jcce(const std::vector<ViewingEvent>& events,
                     const Schema& schema, const VocabSet& vocabs,
                     const TrainConfig& cfg, TrainStats* stats = nullptr,
                     std::ostream* progress = nullptr);

}  // namespace jcce

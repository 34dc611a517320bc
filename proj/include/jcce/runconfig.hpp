#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jcce/datagen.hpp"
#include "jcce/train.hpp"
#include "jcce/tsne.hpp"
#include "jcce/widedeep.hpp"

namespace jcce {

struct PrepareConfig {
  int min_duration = 3;
  int64_t min_content_count = 50;
  double train_fraction = 0.9;
};

struct EvalKsConfig {
  std::vector<int> ks = {1, 3, 5, 10};
};

struct ExportConfig {
  size_t sample_size = 1000;
};

// The whole pipeline's configuration. One global seed fans out into derived
// per-stage seeds, so stages rerun independently yet deterministically; the
// canonical serialization hashes into the run-directory name, so different
// configurations never share outputs.
struct RunConfig {
  uint64_t seed = 42;
  std::string run_root = "runs";
  std::string train_variant = "jcce";  // jcce | ljcce | widedeep
  std::string schema_path;             // empty = built-in default schema
  GenConfig datagen;
  PrepareConfig prepare;
  TrainConfig train;
  WideDeepConfig widedeep;
  EvalKsConfig eval;
  ExportConfig export_cfg;
  TsneConfig tsne;

  // Parses JSON text, applies key=value overrides (dotted paths, values
  // parsed as JSON with plain-string fallback), rejects unknown keys, then
  // fans the global seed out into the per-stage configs.
  static RunConfig from_json_text(const std::string& text,
                                  const std::vector<std::string>& overrides);
  static RunConfig load(const std::string& path,
                        const std::vector<std::string>& overrides);

  std::string to_json() const;  // canonical: all fields, sorted keys
  std::string config_hash() const;
  std::string run_dir() const;

  void validate() const;
};

}  // namespace jcce

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "edda/augmentation.hpp"
#include "edda/datasets.hpp"
#include "edda/explainers.hpp"
#include "edda/network.hpp"

namespace edda {

enum class Strategy { kNone, kEddaMc, kEddaMl, kCutMix, kMixUp };

std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view name);

struct TrainConfig {
  int epochs = 10;
  int batch_size = 32;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  Strategy strategy = Strategy::kNone;
  AugmentationConfig augmentation;
  // EDDA is skipped for epochs < warmup_epochs.
  int warmup_epochs = 1;
  std::uint64_t seed = 0;
  double mix_alpha = 1.0;               // CutMix / MixUp Beta parameter
  bool standard_augmentation = false;   // random 4-pixel-pad crop + horizontal flip
  // Used by the command-line front end; train() itself takes a Dataset.
  DatasetSpec data;
  SmallCnnWidths model;

  void validate() const;
};

// Strict JSON mapping: every field above has a key, nested objects for
// "augmentation", "explainer", "data" (spec string) and "model"; unknown keys
// raise ConfigError naming the key.
nlohmann::ordered_json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig load_train_config(const std::string& path);

struct BranchCounts {
  std::size_t original = 0;
  std::size_t masked_original_label = 0;
  std::size_t masked_background_label = 0;
  std::size_t masked_single_label = 0;
  std::size_t mixed = 0;  // CutMix / MixUp outputs

  std::size_t total() const {
    return original + masked_original_label + masked_background_label + masked_single_label +
           mixed;
  }
  bool operator==(const BranchCounts&) const = default;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;       // mean per-sample loss over the epoch
  double accuracy = 0.0;   // on the samples actually trained
  double first_batch_loss = 0.0;
  double last_batch_loss = 0.0;
  std::size_t examples_seen = 0;
  BranchCounts branches;
  std::uint64_t parameter_hash = 0;  // after the epoch's last step
  double wall_time_s = 0.0;
};

using RunLog = std::vector<EpochRecord>;

// One JSON object per line. `include_wall_time` = false drops the only
// non-deterministic field so two logs can be compared textually.
std::string epoch_record_to_json(const EpochRecord& record, bool include_wall_time = true);
std::string run_log_to_jsonl(const RunLog& log, bool include_wall_time = true);

struct TrainResult {
  Network model;
  RunLog log;
};

struct TrainOptions {
  // Replaces the explainer built from config.augmentation.explainer.
  const Explainer* explainer = nullptr;
  std::function<void(const EpochRecord&)> on_epoch;
};

// Mini-batch SGD with momentum and weight decay. For EDDA strategies every
// mini-batch from epoch warmup_epochs on first goes through the matching
// augmentation pass on the current, frozen parameters.
TrainResult train(const TrainConfig& config, const Dataset& dataset, Network model,
                  const TrainOptions& options = {});

// Loss and its gradient w.r.t. the logits for one sample. `target` is a soft
// distribution (multiclass) or 0/1 vector (multilabel); `class_mask`, when
// non-empty, restricts the multilabel loss to entries with mask 1.
double sample_loss(TaskKind task, std::span<const double> logits, std::span<const double> target,
                   std::span<const std::uint8_t> class_mask, std::span<double> grad_logits);

}  // namespace edda

#include "edda/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "edda/baselines.hpp"
#include "edda/errors.hpp"
#include "edda/parallel.hpp"

namespace edda {
namespace {

// Independent random streams derived from the run seed.
enum StreamId : std::uint64_t { kShuffleStream = 1, kAugmentStream = 2, kMixStream = 3, kEddaStream = 4 };

std::mt19937_64 make_stream(std::uint64_t seed, StreamId id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

struct TrainSample {
  ImageTensor image;
  std::vector<double> target;
  std::vector<std::uint8_t> class_mask;
};

// Random crop after zero-padding by 4 pixels, then a horizontal flip with
// probability 1/2.
ImageTensor crop_and_flip(const ImageTensor& image, std::mt19937_64& rng) {
  constexpr int kPad = 4;
  std::uniform_int_distribution<int> offset(-kPad, kPad);
  std::bernoulli_distribution flip(0.5);
  const int dy = offset(rng);
  const int dx = offset(rng);
  const bool mirrored = flip(rng);
  ImageTensor out(image.width(), image.height(), image.channels(), 0.0);
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < image.height(); ++y) {
      const int sy = y + dy;
      if (sy < 0 || sy >= image.height()) continue;
      for (int x = 0; x < image.width(); ++x) {
        const int sx = (mirrored ? image.width() - 1 - x : x) + dx;
        if (sx < 0 || sx >= image.width()) continue;
        out.at(c, y, x) = image.at(c, sy, sx);
      }
    }
  }
  return out;
}

bool is_edda(Strategy s) { return s == Strategy::kEddaMc || s == Strategy::kEddaMl; }

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kNone: return "none";
    case Strategy::kEddaMc: return "edda_mc";
    case Strategy::kEddaMl: return "edda_ml";
    case Strategy::kCutMix: return "cutmix";
    case Strategy::kMixUp: return "mixup";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
  for (auto s : {Strategy::kNone, Strategy::kEddaMc, Strategy::kEddaMl, Strategy::kCutMix,
                 Strategy::kMixUp}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be non-negative");
  if (is_edda(strategy) && warmup_epochs >= epochs) {
    throw ConfigError("warmup_epochs must be smaller than epochs for EDDA strategies");
  }
  if (!(mix_alpha > 0.0)) throw ConfigError("mix_alpha must be positive");
  augmentation.validate();
}

double sample_loss(TaskKind task, std::span<const double> logits, std::span<const double> target,
                   std::span<const std::uint8_t> class_mask, std::span<double> grad_logits) {
  if (target.size() != logits.size() || grad_logits.size() != logits.size()) {
    throw ArgumentError("loss target length does not match the model outputs");
  }
  if (task == TaskKind::kMulticlass) {
    const auto p = softmax(logits);
    const double max = *std::max_element(logits.begin(), logits.end());
    double log_sum = 0.0;
    for (double z : logits) log_sum += std::exp(z - max);
    log_sum = std::log(log_sum) + max;
    double loss = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      if (target[i] != 0.0) loss -= target[i] * (logits[i] - log_sum);
      mass += target[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) grad_logits[i] = mass * p[i] - target[i];
    return loss;
  }
  std::size_t active = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (class_mask.empty() || class_mask[i]) ++active;
  }
  std::fill(grad_logits.begin(), grad_logits.end(), 0.0);
  if (active == 0) return 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!class_mask.empty() && !class_mask[i]) continue;
    const double z = logits[i];
    // log(1 + e^z) computed stably.
    const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - target[i] * z;
    grad_logits[i] = (sigmoid(z) - target[i]) / static_cast<double>(active);
  }
  return loss / static_cast<double>(active);
}

std::string epoch_record_to_json(const EpochRecord& r, bool include_wall_time) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["loss"] = r.loss;
  j["accuracy"] = r.accuracy;
  j["first_batch_loss"] = r.first_batch_loss;
  j["last_batch_loss"] = r.last_batch_loss;
  j["examples_seen"] = r.examples_seen;
  j["branches"] = {{"original", r.branches.original},
                   {"masked_original_label", r.branches.masked_original_label},
                   {"masked_background_label", r.branches.masked_background_label},
                   {"masked_single_label", r.branches.masked_single_label},
                   {"mixed", r.branches.mixed}};
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(r.parameter_hash));
  j["parameter_hash"] = hash;
  if (include_wall_time) j["wall_time_s"] = r.wall_time_s;
  return j.dump();
}

std::string run_log_to_jsonl(const RunLog& log, bool include_wall_time) {
  std::string out;
  for (const auto& r : log) out += epoch_record_to_json(r, include_wall_time) + "\n";
  return out;
}

TrainResult train(const TrainConfig& config, const Dataset& dataset, Network model,
                  const TrainOptions& options) {
  config.validate();
  if (dataset.examples.empty()) throw ArgumentError("training dataset is empty");
  const TaskKind task = model.task();
  if (dataset.task != task) throw ConfigError("dataset task does not match the model task");
  if (config.strategy == Strategy::kEddaMc && task != TaskKind::kMulticlass) {
    throw ConfigError("strategy edda_mc needs a multiclass task");
  }
  if (config.strategy == Strategy::kEddaMl && task != TaskKind::kMultilabel) {
    throw ConfigError("strategy edda_ml needs a multilabel task");
  }
  if (dataset.num_classes != model.num_classes()) {
    throw ConfigError("dataset and model disagree on num_classes");
  }

  std::unique_ptr<Explainer> owned_explainer;
  const Explainer* explainer = options.explainer;
  if (is_edda(config.strategy) && explainer == nullptr) {
    owned_explainer = make_explainer(config.augmentation.explainer);
    explainer = owned_explainer.get();
  }

  auto shuffle_rng = make_stream(config.seed, kShuffleStream);
  auto augment_rng = make_stream(config.seed, kAugmentStream);
  auto mix_rng = make_stream(config.seed, kMixStream);
  auto edda_rng = make_stream(config.seed, kEddaStream);

  const int outputs = model.num_outputs();
  const std::size_t n_params = model.parameter_count();
  std::vector<double> velocity(n_params, 0.0);
  std::vector<double> step(n_params);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{std::move(model), {}};
  Network& net = result.model;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochRecord record;
    record.epoch = epoch;
    double loss_sum = 0.0;
    double correct_sum = 0.0;
    double accuracy_weight = 0.0;
    bool first_batch = true;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::vector<Example> batch;
      batch.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        const Example& ex = dataset.examples[order[i]];
        if (config.standard_augmentation) {
          batch.push_back({crop_and_flip(ex.image, augment_rng), ex.target});
        } else {
          batch.push_back(ex);
        }
      }

      std::vector<TrainSample> samples;
      samples.reserve(batch.size());
      const bool edda_active = is_edda(config.strategy) && epoch >= config.warmup_epochs;
      if (edda_active) {
        const std::uint64_t before = net.parameter_hash();
        auto augmented = config.strategy == Strategy::kEddaMc
                             ? edda_mc_batch(batch, net, *explainer, config.augmentation, edda_rng)
                             : edda_ml_batch(batch, net, *explainer, config.augmentation);
        if (net.parameter_hash() != before) {
          throw std::logic_error("augmentation pass modified model parameters");
        }
        for (auto& a : augmented) {
          TrainSample s{std::move(a.image), target_vector(a.target, outputs), {}};
          switch (a.provenance) {
            case Provenance::kOriginal: ++record.branches.original; break;
            case Provenance::kMaskedOriginalLabel: ++record.branches.masked_original_label; break;
            case Provenance::kMaskedBackgroundLabel:
              ++record.branches.masked_background_label;
              break;
            case Provenance::kMaskedSingleLabel:
              ++record.branches.masked_single_label;
              s.class_mask.assign(outputs, 0);
              s.class_mask[a.masked_class] = 1;
              break;
          }
          samples.push_back(std::move(s));
        }
      } else if (config.strategy == Strategy::kCutMix || config.strategy == Strategy::kMixUp) {
        auto mixed = config.strategy == Strategy::kCutMix
                         ? cutmix_batch(batch, outputs, config.mix_alpha, mix_rng)
                         : mixup_batch(batch, outputs, config.mix_alpha, mix_rng);
        for (auto& m : mixed) samples.push_back({std::move(m.image), std::move(m.target), {}});
        record.branches.mixed += mixed.size();
      } else {
        for (auto& ex : batch) {
          samples.push_back({std::move(ex.image), target_vector(ex.target, outputs), {}});
        }
        record.branches.original += batch.size();
      }

      const std::size_t n = samples.size();
      std::vector<std::vector<double>> grads(n);
      std::vector<double> losses(n);
      std::vector<double> correct(n);
      std::vector<double> weight(n);
      parallel_for(n, [&](std::size_t k) {
        const TrainSample& s = samples[k];
        const auto trace = net.forward(s.image.data());
        const auto& logits = trace.acts.back();
        std::vector<double> grad_logits(logits.size());
        losses[k] = sample_loss(task, logits, s.target, s.class_mask, grad_logits);
        grads[k].assign(n_params, 0.0);
        net.backward(trace, grad_logits, grads[k], 0, false);
        if (task == TaskKind::kMulticlass) {
          correct[k] = argmax(logits) == argmax(s.target) ? 1.0 : 0.0;
          weight[k] = 1.0;
        } else {
          for (std::size_t z = 0; z < logits.size(); ++z) {
            if (!s.class_mask.empty() && !s.class_mask[z]) continue;
            correct[k] += ((logits[z] >= 0.0) == (s.target[z] >= 0.5)) ? 1.0 : 0.0;
            weight[k] += 1.0;
          }
        }
      });

      std::fill(step.begin(), step.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n_params; ++i) step[i] += grads[k][i];
        batch_loss += losses[k];
        correct_sum += correct[k];
        accuracy_weight += weight[k];
      }
      loss_sum += batch_loss;
      batch_loss /= static_cast<double>(n);
      if (first_batch) record.first_batch_loss = batch_loss;
      record.last_batch_loss = batch_loss;
      first_batch = false;
      record.examples_seen += n;

      auto params = net.parameters();
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n_params; ++i) {
        const double g = step[i] * inv_n + config.weight_decay * params[i];
        velocity[i] = config.momentum * velocity[i] + g;
        params[i] -= config.learning_rate * velocity[i];
      }
    }

    record.loss = loss_sum / static_cast<double>(record.examples_seen);
    record.accuracy = accuracy_weight > 0.0 ? correct_sum / accuracy_weight : 0.0;
    record.parameter_hash = net.parameter_hash();
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (options.on_epoch) options.on_epoch(record);
    result.log.push_back(record);
  }
  return result;
}

}  // namespace edda

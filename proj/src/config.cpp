// JSON mapping for TrainConfig. Every object is read strictly: keys not listed
// here are rejected so typos surface instead of silently taking defaults.

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "edda/errors.hpp"
#include "edda/trainer.hpp"

namespace edda {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto k : allowed) known = known || item.key() == k;
    if (!known) {
      throw ConfigError("unknown config key '" + std::string(where) + "." + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(where) + "." + key + "' has the wrong type");
  }
}

}  // namespace

nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["momentum"] = c.momentum;
  j["weight_decay"] = c.weight_decay;
  j["strategy"] = std::string(to_string(c.strategy));
  j["warmup_epochs"] = c.warmup_epochs;
  j["seed"] = c.seed;
  j["mix_alpha"] = c.mix_alpha;
  j["standard_augmentation"] = c.standard_augmentation;
  nlohmann::ordered_json aug;
  aug["tau"] = c.augmentation.tau;
  aug["p"] = c.augmentation.p;
  aug["background_enabled"] = c.augmentation.background_enabled;
  aug["positive_threshold"] = c.augmentation.positive_threshold;
  aug["explainer"] = {{"method", std::string(to_string(c.augmentation.explainer.method))},
                      {"target_layer", c.augmentation.explainer.target_layer}};
  j["augmentation"] = aug;
  j["data"] = c.data.to_string();
  j["model"] = {{"conv1", c.model.conv1}, {"conv2", c.model.conv2}, {"conv3", c.model.conv3}};
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  reject_unknown(j, "config",
                 {"epochs", "batch_size", "learning_rate", "momentum", "weight_decay", "strategy",
                  "warmup_epochs", "seed", "mix_alpha", "standard_augmentation", "augmentation",
                  "data", "model"});
  TrainConfig c;
  read(j, "epochs", c.epochs, "config");
  read(j, "batch_size", c.batch_size, "config");
  read(j, "learning_rate", c.learning_rate, "config");
  read(j, "momentum", c.momentum, "config");
  read(j, "weight_decay", c.weight_decay, "config");
  read(j, "warmup_epochs", c.warmup_epochs, "config");
  read(j, "seed", c.seed, "config");
  read(j, "mix_alpha", c.mix_alpha, "config");
  read(j, "standard_augmentation", c.standard_augmentation, "config");
  std::string strategy(to_string(c.strategy));
  read(j, "strategy", strategy, "config");
  c.strategy = strategy_from_string(strategy);

  if (j.contains("augmentation")) {
    const json& a = j.at("augmentation");
    reject_unknown(a, "augmentation",
                   {"tau", "p", "background_enabled", "positive_threshold", "explainer"});
    read(a, "tau", c.augmentation.tau, "augmentation");
    read(a, "p", c.augmentation.p, "augmentation");
    read(a, "background_enabled", c.augmentation.background_enabled, "augmentation");
    read(a, "positive_threshold", c.augmentation.positive_threshold, "augmentation");
    if (a.contains("explainer")) {
      const json& e = a.at("explainer");
      reject_unknown(e, "augmentation.explainer", {"method", "target_layer"});
      std::string method(to_string(c.augmentation.explainer.method));
      read(e, "method", method, "augmentation.explainer");
      c.augmentation.explainer.method = explainer_method_from_string(method);
      read(e, "target_layer", c.augmentation.explainer.target_layer, "augmentation.explainer");
    }
  }
  if (j.contains("data")) {
    std::string spec;
    read(j, "data", spec, "config");
    c.data = DatasetSpec::parse(spec);
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown(m, "model", {"conv1", "conv2", "conv3"});
    read(m, "conv1", c.model.conv1, "model");
    read(m, "conv2", c.model.conv2, "model");
    read(m, "conv3", c.model.conv3, "model");
  }
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return train_config_from_json(j);
}

}  // namespace edda

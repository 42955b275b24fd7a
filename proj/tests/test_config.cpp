#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "edda/errors.hpp"
#include "edda/trainer.hpp"

namespace edda {
namespace {

std::string config_error(const nlohmann::json& j) {
  try {
    train_config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(TrainConfigJson, DefaultsMatchTheReferenceSettings) {
  const TrainConfig c = train_config_from_json(nlohmann::json::object());
  EXPECT_EQ(c.learning_rate, 0.01);
  EXPECT_EQ(c.momentum, 0.9);
  EXPECT_EQ(c.weight_decay, 1e-4);
  EXPECT_EQ(c.augmentation.tau, 0.5);
  EXPECT_EQ(c.augmentation.p, 0.0);
  EXPECT_EQ(c.warmup_epochs, 1);
  EXPECT_EQ(c.strategy, Strategy::kNone);
}

TEST(TrainConfigJson, RoundTrip) {
  TrainConfig c;
  c.epochs = 7;
  c.batch_size = 16;
  c.strategy = Strategy::kEddaMc;
  c.augmentation.p = 0.3;
  c.augmentation.background_enabled = true;
  c.augmentation.explainer.method = ExplainerMethod::kVanillaSaliency;
  c.seed = 12345678901234ULL;
  c.mix_alpha = 0.4;
  c.data = DatasetSpec::parse("synthetic_mc:num_examples=50,image_size=16,seed=3,subset=train");
  c.model.conv2 = 12;
  const auto j = to_json(c);
  const TrainConfig back = train_config_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.data.subset, "train");
}

TEST(TrainConfigJson, UnknownKeysAreNamed) {
  EXPECT_NE(config_error({{"epoch", 3}}).find("epoch"), std::string::npos);
  EXPECT_NE(config_error({{"augmentation", {{"tua", 0.4}}}}).find("augmentation.tua"),
            std::string::npos);
  EXPECT_NE(config_error({{"augmentation", {{"explainer", {{"layer", "x"}}}}}})
                .find("augmentation.explainer.layer"),
            std::string::npos);
  EXPECT_NE(config_error({{"model", {{"conv4", 3}}}}).find("model.conv4"), std::string::npos);
}

TEST(TrainConfigJson, InvalidValues) {
  EXPECT_FALSE(config_error({{"epochs", "ten"}}).empty());
  EXPECT_FALSE(config_error({{"batch_size", 0}}).empty());
  EXPECT_FALSE(config_error({{"strategy", "cutout"}}).empty());
  EXPECT_FALSE(config_error({{"strategy", "edda_mc"}, {"epochs", 1}, {"warmup_epochs", 1}}).empty());
  EXPECT_FALSE(config_error({{"augmentation", {{"p", 1.5}}}}).empty());
  EXPECT_FALSE(config_error({{"data", "nothing:"}}).empty());
  // Warm-up only constrains EDDA runs.
  EXPECT_TRUE(config_error({{"strategy", "none"}, {"epochs", 1}}).empty());
}

TEST(TrainConfigJson, FileLoading) {
  const auto path = std::filesystem::temp_directory_path() / "edda_config_test.json";
  {
    std::ofstream out(path);
    out << R"({"epochs": 3, "strategy": "cutmix"})";
  }
  const TrainConfig c = load_train_config(path.string());
  EXPECT_EQ(c.epochs, 3);
  EXPECT_EQ(c.strategy, Strategy::kCutMix);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_THROW(load_train_config(path.string()), ConfigError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_train_config(path.string()), ConfigError);
}

}  // namespace
}  // namespace edda

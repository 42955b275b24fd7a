#include "edda/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <optional>

#include "edda/errors.hpp"

namespace edda {
namespace {

constexpr const char* kFormatTag = "edda-checkpoint";

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void save_checkpoint(const std::string& path, const Network& model,
                     const nlohmann::json& provenance) {
  nlohmann::ordered_json j;
  j["format"] = kFormatTag;
  j["version"] = kCheckpointVersion;
  j["architecture"] = "sequential";
  const Shape in = model.input_shape();
  j["input"] = {{"channels", in.channels}, {"height", in.height}, {"width", in.width}};
  j["num_classes"] = model.num_classes();
  j["task"] = std::string(to_string(model.task()));
  j["background"] = model.has_background();
  auto layers = nlohmann::ordered_json::array();
  for (const auto& l : model.layers()) {
    nlohmann::ordered_json lj;
    lj["kind"] = std::string(to_string(l.kind));
    if (!l.name.empty()) lj["name"] = l.name;
    if (l.kind == LayerKind::kConv2d || l.kind == LayerKind::kLinear) lj["units"] = l.units;
    if (l.kind == LayerKind::kConv2d) {
      lj["kernel"] = l.kernel;
      lj["pad"] = l.pad;
    }
    if (l.kind == LayerKind::kNormalize) {
      lj["mean"] = l.mean;
      lj["stddev"] = l.stddev;
    }
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  j["parameters"] = std::vector<double>(model.parameters().begin(), model.parameters().end());
  j["parameter_hash"] = hex(model.parameter_hash());
  j["provenance"] = provenance;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw FormatError("cannot write checkpoint " + path);
    out << j.dump() << "\n";
    if (!out) throw FormatError("failed writing checkpoint " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw FormatError("cannot move checkpoint into place at " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("checkpoint " + path + " is corrupt: " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormatTag) {
      throw FormatError("checkpoint " + path + " has an unknown format tag");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw FormatError("checkpoint " + path + " has version " + std::to_string(version) +
                        ", expected " + std::to_string(kCheckpointVersion));
    }
    if (j.at("architecture").get<std::string>() != "sequential") {
      throw FormatError("checkpoint " + path + " has an unknown architecture");
    }
    const auto& input = j.at("input");
    const Shape shape{input.at("channels").get<int>(), input.at("height").get<int>(),
                      input.at("width").get<int>()};
    Network net(shape, j.at("num_classes").get<int>(),
                task_from_string(j.at("task").get<std::string>()), j.at("background").get<bool>());
    for (const auto& lj : j.at("layers")) {
      LayerSpec spec;
      spec.kind = layer_kind_from_string(lj.at("kind").get<std::string>());
      spec.name = lj.value("name", std::string());
      spec.units = lj.value("units", 0);
      spec.kernel = lj.value("kernel", 0);
      spec.pad = lj.value("pad", 0);
      spec.mean = lj.value("mean", std::vector<double>());
      spec.stddev = lj.value("stddev", std::vector<double>());
      net.add(std::move(spec));
    }
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != net.parameter_count()) {
      throw FormatError("checkpoint " + path + " holds " + std::to_string(params.size()) +
                        " parameters, architecture needs " +
                        std::to_string(net.parameter_count()));
    }
    std::copy(params.begin(), params.end(), net.parameters().begin());
    if (hex(net.parameter_hash()) != j.at("parameter_hash").get<std::string>()) {
      throw FormatError("checkpoint " + path + " failed its parameter hash check");
    }
    net.logits(ImageTensor(shape.width, shape.height, shape.channels));  // output-size check
    return {std::move(net), j.value("provenance", nlohmann::json::object())};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint " + path + " is malformed: " + e.what());
  } catch (const ConfigError& e) {
    throw FormatError("checkpoint " + path + " describes an invalid model: " + e.what());
  } catch (const InputShapeError& e) {
    throw FormatError("checkpoint " + path + " describes an invalid model: " + e.what());
  }
}

}  // namespace edda

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "edda/network.hpp"

namespace edda {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Network model;
  // Free-form record of how the model was produced (strategy, config).
  nlohmann::json provenance;
};

// Self-describing JSON container: format tag and version, architecture
// ("sequential" plus its layer list), input shape, num_classes, task,
// background flag, every parameter at round-trip precision, an FNV-1a hash
// of the parameters, and `provenance`.
void save_checkpoint(const std::string& path, const Network& model,
                     const nlohmann::json& provenance = nlohmann::json::object());

// Throws FormatError on a missing file, malformed JSON, unknown version,
// inconsistent layer list or parameter hash mismatch. Nothing is returned
// unless the whole model validated.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace edda

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edda/tensor.hpp"

namespace edda {

// Binary mask (row-major, width x height, entries 0/1) of one drawn object.
struct GroundTruthRegion {
  int class_id = 0;
  std::vector<std::uint8_t> mask;

  bool operator==(const GroundTruthRegion&) const = default;
};

struct Dataset {
  TaskKind task = TaskKind::kMulticlass;
  int num_classes = 0;
  Shape shape;
  std::vector<Example> examples;
  // Per-example object masks; empty for archive data.
  std::vector<std::vector<GroundTruthRegion>> regions;

  std::size_t size() const { return examples.size(); }
};

enum class DatasetSource { kSyntheticMulticlass, kSyntheticMultilabel, kArchive };

// Compact textual form, e.g.
//   synthetic_mc:num_examples=2500,image_size=32,num_classes=3,seed=1,split=0.8,subset=test
//   archive:path=data.bin,image_size=32,channels=3,num_classes=100,label_bytes=2
// `subset` (all|train|test) selects a side of split_dataset(split, seed).
struct DatasetSpec {
  DatasetSource source = DatasetSource::kSyntheticMulticlass;
  std::string path;
  int num_examples = 1000;
  int image_size = 32;
  int channels = 3;
  int num_classes = 3;
  std::uint64_t seed = 0;
  double split = 0.75;
  std::string subset = "all";
  int label_bytes = 1;
  TaskKind archive_task = TaskKind::kMulticlass;

  static DatasetSpec parse(std::string_view text);
  std::string to_string() const;
};

// Uniform noise background in [0.1, 0.3] plus one (multiclass) or one to
// three distinct-class (multilabel) non-overlapping filled shapes with fill
// values in [0.7, 1]. Class ids map to circle, square, triangle, diamond,
// cross. Multiclass labels are assigned round-robin. Pure in `spec`.
Dataset generate_synthetic(const DatasetSpec& spec);

// Fixed-size records: `label_bytes` label bytes followed by a channel-planar
// uint8 pixel block. Multiclass labels read the last label byte; multilabel
// labels are a little-endian bitmask over all label bytes.
struct ArchiveLayout {
  int image_size = 32;
  int channels = 3;
  int num_classes = 10;
  int label_bytes = 1;
  TaskKind task = TaskKind::kMulticlass;

  std::size_t record_size() const {
    return static_cast<std::size_t>(label_bytes) + static_cast<std::size_t>(channels) *
                                                       image_size * image_size;
  }
};

Dataset load_archive(const std::string& path, const ArchiveLayout& layout);
// Pixels are quantized to round(255 v).
void write_archive(const std::string& path, const Dataset& dataset, int label_bytes);

// Sidecar file with one line per object: record index, class id, then
// alternating run lengths (background first) over the row-major mask.
void write_mask_file(const std::string& path, const Dataset& dataset);
std::vector<std::vector<GroundTruthRegion>> read_mask_file(const std::string& path);

// Deterministic shuffle under `seed`; the first round(fraction * n) shuffled
// examples form the training side.
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double fraction,
                                          std::uint64_t seed);

// Generates or loads per `spec`, then applies spec.subset.
Dataset load_dataset(const DatasetSpec& spec);

}  // namespace edda

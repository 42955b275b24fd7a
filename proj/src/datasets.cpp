#include "edda/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "edda/errors.hpp"

namespace edda {
namespace {

constexpr int kMaxPlacementAttempts = 200;
constexpr int kShapeKinds = 5;

bool inside_shape(int kind, double dx, double dy, double r) {
  switch (kind) {
    case 0: return dx * dx + dy * dy <= r * r;                          // circle
    case 1: return std::abs(dx) <= r && std::abs(dy) <= r;              // square
    case 2: return dy >= -r && dy <= r && std::abs(dx) <= (dy + r) / 2;  // triangle
    case 3: return std::abs(dx) + std::abs(dy) <= r;                    // diamond
    default:                                                            // cross
      return (std::abs(dx) <= r / 3 && std::abs(dy) <= r) ||
             (std::abs(dy) <= r / 3 && std::abs(dx) <= r);
  }
}

struct Box {
  int x0, y0, x1, y1;  // inclusive
  bool overlaps(const Box& o, int gap) const {
    return !(x1 + gap < o.x0 || o.x1 + gap < x0 || y1 + gap < o.y0 || o.y1 + gap < y0);
  }
};

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      out = static_cast<T>(std::stod(std::string(value), &used));
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("dataset spec: bad number for '" + std::string(key) + "'");
    }
  } else {
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw ConfigError("dataset spec: bad integer for '" + std::string(key) + "'");
    }
  }
  return out;
}

Dataset subset_of(const Dataset& d, std::span<const std::size_t> indices) {
  Dataset out;
  out.task = d.task;
  out.num_classes = d.num_classes;
  out.shape = d.shape;
  out.examples.reserve(indices.size());
  for (auto i : indices) {
    out.examples.push_back(d.examples[i]);
    if (!d.regions.empty()) out.regions.push_back(d.regions[i]);
  }
  return out;
}

}  // namespace

DatasetSpec DatasetSpec::parse(std::string_view text) {
  DatasetSpec spec;
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  if (kind == "synthetic_mc") {
    spec.source = DatasetSource::kSyntheticMulticlass;
  } else if (kind == "synthetic_ml") {
    spec.source = DatasetSource::kSyntheticMultilabel;
  } else if (kind == "archive") {
    spec.source = DatasetSource::kArchive;
  } else {
    throw ConfigError("dataset spec: unknown source '" + std::string(kind) + "'");
  }
  std::string_view rest = colon == std::string_view::npos ? "" : text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? "" : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("dataset spec: expected key=value, got '" + std::string(item) + "'");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "path") spec.path = std::string(value);
    else if (key == "num_examples") spec.num_examples = parse_number<int>(key, value);
    else if (key == "image_size") spec.image_size = parse_number<int>(key, value);
    else if (key == "channels") spec.channels = parse_number<int>(key, value);
    else if (key == "num_classes") spec.num_classes = parse_number<int>(key, value);
    else if (key == "seed") spec.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "split") spec.split = parse_number<double>(key, value);
    else if (key == "subset") spec.subset = std::string(value);
    else if (key == "label_bytes") spec.label_bytes = parse_number<int>(key, value);
    else if (key == "task") spec.archive_task = task_from_string(value);
    else throw ConfigError("dataset spec: unknown key '" + std::string(key) + "'");
  }
  if (spec.subset != "all" && spec.subset != "train" && spec.subset != "test") {
    throw ConfigError("dataset spec: subset must be all, train or test");
  }
  if (!(spec.split > 0.0 && spec.split < 1.0)) {
    throw ConfigError("dataset spec: split must lie in (0, 1)");
  }
  if (spec.source == DatasetSource::kArchive && spec.path.empty()) {
    throw ConfigError("dataset spec: archive source needs path=");
  }
  return spec;
}

std::string DatasetSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (source) {
    case DatasetSource::kSyntheticMulticlass: os << "synthetic_mc:"; break;
    case DatasetSource::kSyntheticMultilabel: os << "synthetic_ml:"; break;
    case DatasetSource::kArchive:
      os << "archive:path=" << path << ",label_bytes=" << label_bytes
         << ",task=" << edda::to_string(archive_task) << ",";
      break;
  }
  if (source != DatasetSource::kArchive) os << "num_examples=" << num_examples << ",";
  os << "image_size=" << image_size << ",channels=" << channels << ",num_classes=" << num_classes
     << ",seed=" << seed << ",split=" << split << ",subset=" << subset;
  return os.str();
}

Dataset generate_synthetic(const DatasetSpec& spec) {
  if (spec.source == DatasetSource::kArchive) {
    throw ConfigError("generate_synthetic needs a synthetic source");
  }
  const bool multilabel = spec.source == DatasetSource::kSyntheticMultilabel;
  if (spec.num_classes < 1 || spec.num_classes > kShapeKinds) {
    throw ConfigError("synthetic data supports 1 to 5 classes");
  }
  if (spec.image_size < 8) throw ConfigError("synthetic images must be at least 8x8");
  if (spec.num_examples < 1 || spec.channels < 1) {
    throw ConfigError("synthetic spec needs positive num_examples and channels");
  }

  const int size = spec.image_size;
  const std::size_t plane = static_cast<std::size_t>(size) * size;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> noise(0.1, 0.3);
  std::uniform_real_distribution<double> fill(0.7, 1.0);
  std::uniform_real_distribution<double> radius(0.15 * size, 0.25 * size);

  Dataset d;
  d.task = multilabel ? TaskKind::kMultilabel : TaskKind::kMulticlass;
  d.num_classes = spec.num_classes;
  d.shape = {spec.channels, size, size};
  d.examples.reserve(spec.num_examples);
  d.regions.reserve(spec.num_examples);

  for (int n = 0; n < spec.num_examples; ++n) {
    std::vector<int> classes;
    if (multilabel) {
      const int max_objects = std::min(3, spec.num_classes);
      std::vector<int> pool(spec.num_classes);
      std::iota(pool.begin(), pool.end(), 0);
      std::shuffle(pool.begin(), pool.end(), rng);
      const int count = std::uniform_int_distribution<int>(1, max_objects)(rng);
      classes.assign(pool.begin(), pool.begin() + count);
      std::sort(classes.begin(), classes.end());
    } else {
      classes.push_back(n % spec.num_classes);
    }

    ImageTensor image(size, size, spec.channels);
    for (double& v : image.data()) v = noise(rng);

    // Shapes are placed one at a time; when one cannot fit, the whole layout
    // is redrawn so an early central shape cannot block the rest.
    struct Placement {
      double r;
      int cx, cy;
    };
    std::vector<Placement> layout;
    for (int restart = 0; restart < kMaxPlacementAttempts && layout.size() < classes.size();
         ++restart) {
      layout.clear();
      std::vector<Box> placed;
      for (std::size_t k = 0; k < classes.size(); ++k) {
        // Smaller objects when several share the canvas.
        const double scale = classes.size() > 1 ? 0.75 : 1.0;
        const double r = radius(rng) * scale;
        const int ir = static_cast<int>(std::ceil(r));
        std::uniform_int_distribution<int> centre(ir, size - 1 - ir);
        bool ok = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !ok; ++attempt) {
          const int cx = centre(rng);
          const int cy = centre(rng);
          const Box box{cx - ir, cy - ir, cx + ir, cy + ir};
          ok = std::none_of(placed.begin(), placed.end(),
                            [&](const Box& b) { return b.overlaps(box, 1); });
          if (ok) {
            placed.push_back(box);
            layout.push_back({r, cx, cy});
          }
        }
        if (!ok) break;
      }
    }
    if (layout.size() < classes.size()) {
      throw GenerationError("could not place " + std::to_string(classes.size()) +
                            " non-overlapping shapes in example " + std::to_string(n));
    }

    std::vector<GroundTruthRegion> regions;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const int cls = classes[k];
      const auto [r, cx, cy] = layout[k];
      const int ir = static_cast<int>(std::ceil(r));
      std::vector<double> colour(spec.channels);
      for (double& c : colour) c = fill(rng);
      GroundTruthRegion region{cls, std::vector<std::uint8_t>(plane, 0)};
      for (int y = std::max(0, cy - ir); y <= std::min(size - 1, cy + ir); ++y) {
        for (int x = std::max(0, cx - ir); x <= std::min(size - 1, cx + ir); ++x) {
          if (!inside_shape(cls, x - cx, y - cy, r)) continue;
          region.mask[static_cast<std::size_t>(y) * size + x] = 1;
          for (int c = 0; c < spec.channels; ++c) image.at(c, y, x) = colour[c];
        }
      }
      regions.push_back(std::move(region));
    }

    Target target = Target::multiclass(classes.front());
    if (multilabel) {
      std::vector<std::uint8_t> labels(spec.num_classes, 0);
      for (int c : classes) labels[c] = 1;
      target = Target::multilabel(std::move(labels));
    }
    d.examples.push_back({std::move(image), std::move(target)});
    d.regions.push_back(std::move(regions));
  }
  return d;
}

Dataset load_archive(const std::string& path, const ArchiveLayout& layout) {
  if (layout.label_bytes < 1 || layout.channels < 1 || layout.image_size < 1 ||
      layout.num_classes < 1) {
    throw ConfigError("archive layout fields must be positive");
  }
  if (layout.task == TaskKind::kMultilabel && layout.num_classes > 8 * layout.label_bytes) {
    throw ConfigError("multilabel archive needs ceil(num_classes / 8) label bytes");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open archive " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::size_t record = layout.record_size();
  if (bytes.size() % record != 0) {
    const std::size_t index = bytes.size() / record;
    throw FormatError("archive " + path + ": record " + std::to_string(index) +
                      " truncated at byte offset " + std::to_string(index * record) + " (" +
                      std::to_string(bytes.size() - index * record) + " of " +
                      std::to_string(record) + " bytes)");
  }

  Dataset d;
  d.task = layout.task;
  d.num_classes = layout.num_classes;
  d.shape = {layout.channels, layout.image_size, layout.image_size};
  const std::size_t count = bytes.size() / record;
  d.examples.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    const unsigned char* rec = bytes.data() + r * record;
    Target target = Target::multiclass(0);
    if (layout.task == TaskKind::kMulticlass) {
      const int label = rec[layout.label_bytes - 1];
      if (label >= layout.num_classes) {
        throw FormatError("archive " + path + ": record " + std::to_string(r) + " at byte offset " +
                          std::to_string(r * record) + " has label " + std::to_string(label) +
                          " >= num_classes");
      }
      target = Target::multiclass(label);
    } else {
      std::vector<std::uint8_t> labels(layout.num_classes, 0);
      for (int z = 0; z < layout.num_classes; ++z) labels[z] = (rec[z / 8] >> (z % 8)) & 1u;
      target = Target::multilabel(std::move(labels));
    }
    std::vector<double> pixels(record - layout.label_bytes);
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = rec[layout.label_bytes + i] / 255.0;
    d.examples.push_back({ImageTensor(layout.image_size, layout.image_size, layout.channels,
                                      std::move(pixels)),
                          std::move(target)});
  }
  return d;
}

void write_archive(const std::string& path, const Dataset& dataset, int label_bytes) {
  if (dataset.task == TaskKind::kMultilabel && dataset.num_classes > 8 * label_bytes) {
    throw ConfigError("too few label bytes for the multilabel bitmask");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write archive " + path);
  std::vector<unsigned char> rec;
  for (const auto& ex : dataset.examples) {
    rec.assign(label_bytes, 0);
    if (ex.target.kind() == TaskKind::kMulticlass) {
      if (ex.target.class_index() > 255) throw ConfigError("class index does not fit one byte");
      rec[label_bytes - 1] = static_cast<unsigned char>(ex.target.class_index());
    } else {
      const auto& labels = ex.target.labels();
      for (std::size_t z = 0; z < labels.size(); ++z) {
        if (labels[z]) rec[z / 8] |= static_cast<unsigned char>(1u << (z % 8));
      }
    }
    for (double v : ex.image.data()) {
      rec.push_back(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    }
    out.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
  }
  if (!out) throw FormatError("failed writing archive " + path);
}

void write_mask_file(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write mask file " + path);
  out << "edda-masks 1 " << dataset.shape.width << " " << dataset.shape.height << " "
      << dataset.regions.size() << "\n";
  for (std::size_t r = 0; r < dataset.regions.size(); ++r) {
    for (const auto& region : dataset.regions[r]) {
      std::vector<std::size_t> runs;
      std::uint8_t current = 0;
      std::size_t length = 0;
      for (auto v : region.mask) {
        if (v != current) {
          runs.push_back(length);
          current = v;
          length = 0;
        }
        ++length;
      }
      runs.push_back(length);
      out << r << " " << region.class_id << " " << runs.size();
      for (auto n : runs) out << " " << n;
      out << "\n";
    }
  }
  if (!out) throw FormatError("failed writing mask file " + path);
}

std::vector<std::vector<GroundTruthRegion>> read_mask_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open mask file " + path);
  std::string magic;
  int version = 0;
  int width = 0;
  int height = 0;
  std::size_t records = 0;
  if (!(in >> magic >> version >> width >> height >> records) || magic != "edda-masks" ||
      version != 1 || width <= 0 || height <= 0) {
    throw FormatError("mask file " + path + ": bad header");
  }
  const std::size_t plane = static_cast<std::size_t>(width) * height;
  std::vector<std::vector<GroundTruthRegion>> out(records);
  std::size_t record = 0;
  while (in >> record) {
    int cls = 0;
    std::size_t count = 0;
    if (!(in >> cls >> count) || record >= records) {
      throw FormatError("mask file " + path + ": bad object line for record " +
                        std::to_string(record));
    }
    GroundTruthRegion region{cls, {}};
    region.mask.reserve(plane);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t n = 0;
      if (!(in >> n)) throw FormatError("mask file " + path + ": truncated run list");
      region.mask.insert(region.mask.end(), n, static_cast<std::uint8_t>(i % 2));
    }
    if (region.mask.size() != plane) {
      throw FormatError("mask file " + path + ": runs for record " + std::to_string(record) +
                        " cover " + std::to_string(region.mask.size()) + " pixels, expected " +
                        std::to_string(plane));
    }
    out[record].push_back(std::move(region));
  }
  if (!in.eof()) throw FormatError("mask file " + path + ": trailing garbage");
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double fraction,
                                          std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ArgumentError("split fraction must lie in (0, 1)");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(dataset.size())));
  const std::span<const std::size_t> all(order);
  return {subset_of(dataset, all.first(n_train)), subset_of(dataset, all.subspan(n_train))};
}

Dataset load_dataset(const DatasetSpec& spec) {
  Dataset d;
  if (spec.source == DatasetSource::kArchive) {
    d = load_archive(spec.path, {spec.image_size, spec.channels, spec.num_classes,
                                 spec.label_bytes, spec.archive_task});
  } else {
    d = generate_synthetic(spec);
  }
  if (spec.subset == "all") return d;
  auto [train, test] = split_dataset(d, spec.split, spec.seed);
  return spec.subset == "train" ? std::move(train) : std::move(test);
}

}  // namespace edda

#include "edda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "edda/errors.hpp"
#include "edda/occlusion.hpp"
#include "edda/parallel.hpp"

namespace edda {
namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

FaithfulnessReport faithfulness_from_scores(std::span<const ScorePair> pairs,
                                            double keep_fraction, std::string explainer) {
  if (pairs.empty()) throw ArgumentError("faithfulness needs at least one evaluated example");
  std::size_t drops = 0;
  std::size_t increases = 0;
  std::size_t excluded = 0;
  CompensatedSum drop_mag;
  CompensatedSum increase_mag;
  for (const auto& p : pairs) {
    if (p.masked < p.original) ++drops;
    if (p.masked > p.original) ++increases;
    if (p.original == 0.0) {
      ++excluded;
      continue;
    }
    drop_mag.add(std::max(0.0, p.original - p.masked) / p.original);
    increase_mag.add(std::max(0.0, p.masked - p.original) / p.original);
  }
  const auto n = static_cast<double>(pairs.size());
  FaithfulnessReport r;
  r.n_examples = pairs.size();
  r.n_excluded = excluded;
  r.keep_fraction = keep_fraction;
  r.explainer = std::move(explainer);
  r.drop_prop = 100.0 * static_cast<double>(drops) / n;
  r.increase_prop = 100.0 * static_cast<double>(increases) / n;
  r.tie_prop = 100.0 * static_cast<double>(pairs.size() - drops - increases) / n;
  const std::size_t included = pairs.size() - excluded;
  if (included > 0) {
    r.drop_mag = 100.0 * drop_mag.value() / static_cast<double>(included);
    r.increase_mag = 100.0 * increase_mag.value() / static_cast<double>(included);
  }
  return r;
}

std::vector<ScorePair> collect_score_pairs(const Classifier& model,
                                           std::span<const Example> dataset,
                                           const Explainer& explainer, double keep_fraction,
                                           double positive_threshold) {
  if (dataset.empty()) throw ArgumentError("evaluation dataset is empty");
  kept_pixel_count(1, keep_fraction);  // validates the fraction up front
  std::vector<std::vector<ScorePair>> per_example(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t i) {
    const ImageTensor& image = dataset[i].image;
    const auto scores = predict(model, image);
    if (model.task() == TaskKind::kMulticlass) {
      const int c = argmax(scores, model.num_classes());
      const SaliencyMap saliency = explainer.explain(model, image, c);
      const auto masked = predict(model, keep_top_fraction(image, saliency, keep_fraction));
      per_example[i].push_back({scores[c], masked[c]});
      return;
    }
    const auto& labels = dataset[i].target.labels();
    for (int z = 0; z < model.num_classes(); ++z) {
      if (labels[z] != 1 || scores[z] < positive_threshold) continue;
      const SaliencyMap saliency = explainer.explain(model, image, z);
      const auto masked = predict(model, keep_top_fraction(image, saliency, keep_fraction));
      per_example[i].push_back({scores[z], masked[z]});
    }
  });
  std::vector<ScorePair> pairs;
  for (auto& v : per_example) pairs.insert(pairs.end(), v.begin(), v.end());
  return pairs;
}

FaithfulnessReport evaluate_faithfulness(const Classifier& model,
                                         std::span<const Example> dataset,
                                         const Explainer& explainer, double keep_fraction) {
  const auto pairs = collect_score_pairs(model, dataset, explainer, keep_fraction);
  return faithfulness_from_scores(pairs, keep_fraction, explainer.id());
}

FaithfulnessReport evaluate_faithfulness(const Classifier& model,
                                         std::span<const Example> dataset,
                                         const ExplainerSpec& explainer, double keep_fraction) {
  return evaluate_faithfulness(model, dataset, *make_explainer(explainer), keep_fraction);
}

std::vector<ComparisonRow> compare_runs(std::span<const FaithfulnessReport> reports) {
  if (reports.size() < 2) throw ArgumentError("comparison needs at least two reports");
  for (const auto& r : reports) {
    if (r.keep_fraction != reports.front().keep_fraction) {
      throw ArgumentError("reports use different keep fractions (" +
                          std::to_string(reports.front().keep_fraction) + " vs " +
                          std::to_string(r.keep_fraction) + ")");
    }
  }
  double min_drop = reports.front().drop_prop;
  double max_increase = reports.front().increase_prop;
  double min_drop_mag = reports.front().drop_mag;
  double max_increase_mag = reports.front().increase_mag;
  for (const auto& r : reports) {
    min_drop = std::min(min_drop, r.drop_prop);
    max_increase = std::max(max_increase, r.increase_prop);
    min_drop_mag = std::min(min_drop_mag, r.drop_mag);
    max_increase_mag = std::max(max_increase_mag, r.increase_mag);
  }
  std::vector<ComparisonRow> rows;
  rows.reserve(reports.size());
  for (const auto& r : reports) {
    rows.push_back({r, r.drop_prop == min_drop, r.increase_prop == max_increase,
                    r.drop_mag == min_drop_mag, r.increase_mag == max_increase_mag});
  }
  return rows;
}

std::string format_comparison_table(std::span<const ComparisonRow> rows) {
  std::size_t label_width = 3;
  for (const auto& row : rows) label_width = std::max(label_width, row.report.run.size());
  std::ostringstream os;
  const auto cell = [&os](double v, bool best) {
    std::ostringstream c;
    c << std::fixed << std::setprecision(2) << v << (best ? "*" : " ");
    os << std::setw(14) << c.str();
  };
  os << std::left << std::setw(static_cast<int>(label_width)) << "run" << std::right
     << std::setw(14) << "drop_prop" << std::setw(14) << "increase_prop" << std::setw(14)
     << "tie_prop" << std::setw(14) << "drop_mag" << std::setw(14) << "increase_mag"
     << std::setw(8) << "n" << "  explainer\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    os << std::left << std::setw(static_cast<int>(label_width)) << r.run << std::right;
    cell(r.drop_prop, row.best_drop_prop);
    cell(r.increase_prop, row.best_increase_prop);
    cell(r.tie_prop, false);
    cell(r.drop_mag, row.best_drop_mag);
    cell(r.increase_mag, row.best_increase_mag);
    os << std::setw(8) << r.n_examples << "  " << r.explainer << "\n";
  }
  if (!rows.empty()) {
    os << "keep_fraction " << rows.front().report.keep_fraction
       << "; * marks the best value per metric (lowest drop, highest increase)\n";
  }
  return os.str();
}

std::string report_to_json(const FaithfulnessReport& r) {
  nlohmann::ordered_json j;
  j["run"] = r.run;
  j["explainer"] = r.explainer;
  j["keep_fraction"] = r.keep_fraction;
  j["n_examples"] = r.n_examples;
  j["n_excluded"] = r.n_excluded;
  j["drop_prop"] = r.drop_prop;
  j["increase_prop"] = r.increase_prop;
  j["tie_prop"] = r.tie_prop;
  j["drop_mag"] = r.drop_mag;
  j["increase_mag"] = r.increase_mag;
  return j.dump();
}

FaithfulnessReport report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    FaithfulnessReport r;
    r.run = j.at("run").get<std::string>();
    r.explainer = j.at("explainer").get<std::string>();
    r.keep_fraction = j.at("keep_fraction").get<double>();
    r.n_examples = j.at("n_examples").get<std::size_t>();
    r.n_excluded = j.at("n_excluded").get<std::size_t>();
    r.drop_prop = j.at("drop_prop").get<double>();
    r.increase_prop = j.at("increase_prop").get<double>();
    r.tie_prop = j.at("tie_prop").get<double>();
    r.drop_mag = j.at("drop_mag").get<double>();
    r.increase_mag = j.at("increase_mag").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad report record: ") + e.what());
  }
}

std::vector<FaithfulnessReport> read_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open report file " + path);
  std::vector<FaithfulnessReport> reports;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    reports.push_back(report_from_json(line));
  }
  if (reports.empty()) throw FormatError("report file " + path + " holds no records");
  return reports;
}

}  // namespace edda

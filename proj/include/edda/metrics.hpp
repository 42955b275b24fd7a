#pragma once

#include <span>
#include <string>
#include <vector>

#include "edda/classifier.hpp"
#include "edda/explainers.hpp"
#include "edda/tensor.hpp"

namespace edda {

// Confidence in the evaluated class before and after keeping only the most
// salient pixels.
struct ScorePair {
  double original = 0.0;
  double masked = 0.0;
};

// Drop% / Increase% faithfulness summary. Percentages are in [0, 100].
// drop_prop + increase_prop + tie_prop == 100. Magnitudes average over the
// pairs whose original score is non-zero; the rest are counted in n_excluded.
struct FaithfulnessReport {
  std::string run;
  double drop_prop = 0.0;
  double increase_prop = 0.0;
  double tie_prop = 0.0;
  double drop_mag = 0.0;
  double increase_mag = 0.0;
  std::size_t n_examples = 0;
  std::size_t n_excluded = 0;
  double keep_fraction = 0.15;
  std::string explainer;

  bool operator==(const FaithfulnessReport&) const = default;
};

inline constexpr double kDefaultKeepFraction = 0.15;

// The four metrics over precomputed score pairs. Throws ArgumentError when
// `pairs` is empty.
FaithfulnessReport faithfulness_from_scores(std::span<const ScorePair> pairs,
                                            double keep_fraction, std::string explainer);

// Score pairs for a dataset. Multiclass: one pair per example for the
// highest-scoring real class. Multilabel: one pair per (example, class) with
// label 1 and score >= positive_threshold.
std::vector<ScorePair> collect_score_pairs(const Classifier& model,
                                           std::span<const Example> dataset,
                                           const Explainer& explainer, double keep_fraction,
                                           double positive_threshold = 0.5);

FaithfulnessReport evaluate_faithfulness(const Classifier& model,
                                         std::span<const Example> dataset,
                                         const Explainer& explainer,
                                         double keep_fraction = kDefaultKeepFraction);
FaithfulnessReport evaluate_faithfulness(const Classifier& model,
                                         std::span<const Example> dataset,
                                         const ExplainerSpec& explainer,
                                         double keep_fraction = kDefaultKeepFraction);

struct ComparisonRow {
  FaithfulnessReport report;
  bool best_drop_prop = false;      // lowest
  bool best_increase_prop = false;  // highest
  bool best_drop_mag = false;       // lowest
  bool best_increase_mag = false;   // highest
};

// Rows in input order with best-per-metric markers; exact ties are all
// marked. Needs at least two reports sharing one keep_fraction.
std::vector<ComparisonRow> compare_runs(std::span<const FaithfulnessReport> reports);

// Fixed-width text table; best values carry a trailing '*'.
std::string format_comparison_table(std::span<const ComparisonRow> rows);

// One JSON object per report, stable field names, no trailing newline.
std::string report_to_json(const FaithfulnessReport& report);
// Parses one record written by report_to_json. Throws FormatError.
FaithfulnessReport report_from_json(const std::string& text);
// Reads every non-empty line of a report file.
std::vector<FaithfulnessReport> read_report_file(const std::string& path);

}  // namespace edda

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tmc/pipeline.hpp"
#include "tmc/trajectory.hpp"

namespace tmc {

/// How Unknown predictions enter the metrics: CountAsError charges them as
/// misses against their actual class (an extra all-false-negative column),
/// Exclude drops those vehicles and only records how many there were.
enum class UnknownPolicy { CountAsError, Exclude };

UnknownPolicy parse_unknown_policy(const std::string& text);
std::string unknown_policy_name(UnknownPolicy policy);

/// Rows are actual classes, columns predicted. unknown_by_class holds, per
/// actual class, the predictions that came back Unknown (only charged under
/// CountAsError); unknown_count is their total either way.
struct ConfusionMatrix {
    std::vector<MovementLabel> classes;
    std::vector<std::vector<long long>> counts;
    std::vector<long long> unknown_by_class;
    long long unknown_count = 0;
    UnknownPolicy policy = UnknownPolicy::CountAsError;

    long long total() const;
    long long trace() const;
    long long row_total(std::size_t r) const;  // includes unknowns under CountAsError
    long long col_total(std::size_t c) const;
};

using LabelledPredictions = std::vector<std::pair<std::string, MovementLabel>>;

LabelledPredictions flatten(const ClassificationResult& result);

/// Tallies actual-vs-predicted counts. Every predicted vehicle id must have a
/// truth label. Classes are the union of truth and predicted labels in
/// canonical order (Left, Through, Right, Cluster0.., never Unknown).
ConfusionMatrix build_confusion(const std::map<std::string, MovementLabel>& truth,
                                const LabelledPredictions& predictions, UnknownPolicy policy,
                                Diagnostics* diag = nullptr);

/// trace / total. The denominator follows the unknown policy.
double accuracy(const ConfusionMatrix& cm);

/// Macro-average of per-class recall. Classes with no actual instances are
/// excluded from the mean (with a diagnostic).
double balanced_accuracy(const ConfusionMatrix& cm, Diagnostics* diag = nullptr);

/// Macro-average of per-class F1 = 2PR/(P+R). A class with no predictions or
/// no actual instances contributes 0 (with a diagnostic).
double macro_f1(const ConfusionMatrix& cm, Diagnostics* diag = nullptr);

/// Best bijective mapping from predicted labels onto truth labels, maximizing
/// agreement. Separates clustering quality from the cosmetic cluster naming;
/// Unknown is never remapped. Returns identity-extended mapping.
std::map<MovementLabel, MovementLabel> best_label_alignment(
    const std::map<std::string, MovementLabel>& truth, const LabelledPredictions& predictions);

LabelledPredictions apply_alignment(const LabelledPredictions& predictions,
                                    const std::map<MovementLabel, MovementLabel>& mapping);

/// Ground-truth CSV: header `vehicle_id,label`.
std::map<std::string, MovementLabel> load_truth(const std::filesystem::path& path);
void save_truth(const std::map<std::string, MovementLabel>& truth,
                const std::filesystem::path& path);

/// Per-vehicle label CSV: header `vehicle_id,label,similarity`; similarity is
/// empty for Unknown.
void save_labels(const ClassificationResult& result, const std::filesystem::path& path);
LabelledPredictions load_labels(const std::filesystem::path& path);

/// Full metrics report for one confusion matrix plus (optionally) the
/// best-alignment rerun of the same predictions.
struct MetricsReport {
    ConfusionMatrix cm;
    double accuracy = 0.0;
    double balanced_accuracy = 0.0;
    double macro_f1 = 0.0;
    std::map<MovementLabel, MovementLabel> alignment;  // empty = identity
    double aligned_accuracy = 0.0;
    double aligned_balanced_accuracy = 0.0;
    double aligned_macro_f1 = 0.0;
};

MetricsReport evaluate_predictions(const std::map<std::string, MovementLabel>& truth,
                                   const LabelledPredictions& predictions, UnknownPolicy policy,
                                   Diagnostics* diag = nullptr);

std::string metrics_report_text(const MetricsReport& report);
std::string metrics_report_json(const MetricsReport& report);

}  // namespace tmc

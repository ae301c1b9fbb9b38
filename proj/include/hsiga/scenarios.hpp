#pragma once

#include "hsiga/dataset.hpp"
#include "hsiga/ga.hpp"
#include "hsiga/grid_search.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsiga {

enum class ScenarioKind { htc, hic, hicvs_small, hicvs_large };
enum class Selector { ga, gs };

std::string_view to_string(ScenarioKind s);
std::string_view to_string(Selector s);
ScenarioKind parse_scenario(std::string_view s);
Selector parse_selector(std::string_view s);

/// One model-selection iteration: fit on `train`, score on `evaluation`.
struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> evaluation;
};

/// Index sets of one repetition of a scenario.
struct FoldPlan {
    ScenarioKind scenario = ScenarioKind::htc;
    std::vector<std::size_t> pool;        // final training set
    std::vector<std::size_t> test;
    std::vector<std::size_t> validation;  // HICVS only
    std::vector<Fold> folds;
    std::size_t subsample_per_class = 0;  // > 0: each evaluation fits on this many per class drawn from the fold
};

struct PlanOptions {
    std::size_t quota = 50;         // per class x image (HTC) or class x Frame image (HIC, HICVS-small)
    std::size_t large_quota = 0;    // HICVS-large per class x Frame image; 0 = largest feasible
    std::size_t folds = 0;          // 0 = scenario default (10, or 5 for HICVS-large)
    std::size_t subsample = 10;     // HIC examples per class per evaluation
    double validation_fraction = 0.2;
    bool conventional_cv = false;   // HIC: fit on k-1 folds, score on the held-out one

    void validate() const;
};

/// Stratified k-fold partition of `pool`: each class is shuffled and dealt
/// round-robin over the folds.
std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& data, std::span<const std::size_t> pool,
                                                       std::size_t k, std::uint64_t seed);

FoldPlan build_htc_plan(const LabeledDataset& data, const PlanOptions& options, std::uint64_t seed);
FoldPlan build_hic_plan(const LabeledDataset& data, const PlanOptions& options, std::uint64_t seed);
FoldPlan build_hicvs_plan(const LabeledDataset& data, ScenarioKind variant, const PlanOptions& options,
                          std::uint64_t seed);
FoldPlan build_plan(const LabeledDataset& data, ScenarioKind scenario, const PlanOptions& options, std::uint64_t seed);

/// Comparison-scene records split per (class, day): round(fraction * n)
/// go to validation, the rest to test.
SplitPlan split_validation(const LabeledDataset& data, double fraction, std::uint64_t seed);

/// Mean fold accuracy of the candidate under the plan's protocol.
double evaluate_candidate(const LabeledDataset& data, const FoldPlan& plan, const Candidate& candidate,
                          std::uint64_t seed);

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::htc;
    Selector selector = Selector::ga;
    ClassifierFamily classifier = ClassifierFamily::nu_svm;
    PlanOptions plan;
    std::size_t repetitions = 5;
    GaConfig ga;                       // seed and workers are overridden per repetition
    std::optional<GridSpec> grid;      // default: desk_grid(classifier)
    std::uint64_t seed = 0;
    unsigned workers = 1;

    void validate() const;
};

struct DayResult {
    std::string day;  // "1", "7", "21" or "all"
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
    std::size_t test_size = 0;
};

struct RepetitionResult {
    Candidate best;
    double selection_fitness = 0.0;
    std::vector<double> day_accuracy;  // parallel to EvaluationReport::days, last = combined
    std::vector<EpochStats> history;   // GA only
    std::vector<std::vector<std::size_t>> confusion;  // [truth][prediction] over the dataset's classes
};

struct EvaluationReport {
    ScenarioKind scenario = ScenarioKind::htc;
    Selector selector = Selector::ga;
    ClassifierFamily classifier = ClassifierFamily::nu_svm;
    std::vector<DayResult> days;       // per reported day, then "all"
    double band_count = 0.0;           // mean over repetitions
    std::size_t best_repetition = 0;   // highest selection fitness, earliest on ties
    std::vector<RepetitionResult> repetitions;
    TrainedModel best_model;

    const DayResult& combined() const { return days.back(); }
    const RepetitionResult& best() const { return repetitions[best_repetition]; }
};

/// Repeats: build the plan, select a model, fit it on the pool, score the
/// test set per day. Repetition r uses seed derive_seed(config.seed, {r}).
EvaluationReport run_scenario(const LabeledDataset& data, const ScenarioConfig& config);

/// `scenario,selector,classifier,day,accuracy_mean,accuracy_std,band_count`
void write_report_csv(std::ostream& out, const EvaluationReport& report, bool header = true);
void write_report_table(std::ostream& out, const EvaluationReport& report);
/// `epoch,best_accuracy,mean_accuracy,best_band_count`
void write_history_csv(std::ostream& out, std::span<const EpochStats> history);

}  // namespace hsiga

#include "hsiga/scenarios.hpp"

#include "hsiga/error.hpp"
#include "hsiga/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

namespace hsiga {

std::string_view to_string(ScenarioKind s) {
    switch (s) {
        case ScenarioKind::htc: return "htc";
        case ScenarioKind::hic: return "hic";
        case ScenarioKind::hicvs_small: return "hicvs-small";
        case ScenarioKind::hicvs_large: return "hicvs-large";
    }
    return "?";
}

std::string_view to_string(Selector s) { return s == Selector::ga ? "ga" : "gs"; }

ScenarioKind parse_scenario(std::string_view s) {
    if (s == "htc") return ScenarioKind::htc;
    if (s == "hic") return ScenarioKind::hic;
    if (s == "hicvs-small" || s == "hicvs") return ScenarioKind::hicvs_small;
    if (s == "hicvs-large") return ScenarioKind::hicvs_large;
    throw InvalidArgument("unknown scenario '" + std::string(s) + "'");
}

Selector parse_selector(std::string_view s) {
    if (s == "ga") return Selector::ga;
    if (s == "gs") return Selector::gs;
    throw InvalidArgument("unknown selector '" + std::string(s) + "'");
}

void PlanOptions::validate() const {
    if (quota == 0) throw InvalidArgument("quota must be >= 1");
    if (folds == 1) throw InvalidArgument("need at least 2 folds");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw InvalidArgument("validation fraction must lie in (0, 1)");
}

namespace {

std::vector<std::size_t> scene_indices(const LabeledDataset& data, Scene scene) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data.scene(i) == scene) out.push_back(i);
    return out;
}

void require_scenes(const LabeledDataset& data, std::span<const std::size_t> frame,
                    std::span<const std::size_t> comparison) {
    if (frame.empty()) throw InsufficientData("dataset has no Frame-scene records");
    if (comparison.empty()) throw InsufficientData("dataset has no Comparison-scene records");
    (void)data;
}

std::vector<std::size_t> set_difference(std::span<const std::size_t> all, std::span<const std::size_t> minus) {
    std::vector<std::size_t> a(all.begin(), all.end()), b(minus.begin(), minus.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::size_t> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::size_t smallest_group(const LabeledDataset& data, std::span<const std::size_t> subset) {
    std::map<std::pair<int, std::size_t>, std::size_t> counts;
    for (auto i : subset) ++counts[{data.labels()[i], data.image_of()[i]}];
    std::size_t m = std::numeric_limits<std::size_t>::max();
    for (const auto& [key, n] : counts) m = std::min(m, n);
    return counts.empty() ? 0 : m;
}

void check_subsample(const LabeledDataset& data, const std::vector<std::size_t>& fold, std::size_t per_class) {
    for (const auto& [label, n] : class_histogram(data, fold))
        if (n < per_class)
            throw InsufficientData("fold holds " + std::to_string(n) + " records of class " + std::to_string(label)
                                   + ", subsample needs " + std::to_string(per_class));
}

}  // namespace

std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& data, std::span<const std::size_t> pool,
                                                       std::size_t k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("need at least 2 folds");
    std::map<int, std::vector<std::size_t>> by_class;
    for (auto i : pool) by_class[data.labels()[i]].push_back(i);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (auto& [label, members] : by_class) {
        std::sort(members.begin(), members.end());
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(label)}));
        shuffle(members.begin(), members.end(), rng);
        for (auto i : members) folds[next++ % k].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

FoldPlan build_htc_plan(const LabeledDataset& data, const PlanOptions& options, std::uint64_t seed) {
    options.validate();
    const SplitPlan split = stratified_sample(data, options.quota, GroupBy::label_and_image, derive_seed(seed, {1}));
    FoldPlan plan;
    plan.scenario = ScenarioKind::htc;
    plan.pool = split.train;
    plan.test = split.test;
    const auto folds = stratified_folds(data, plan.pool, options.folds ? options.folds : 10, derive_seed(seed, {2}));
    for (const auto& f : folds) plan.folds.push_back({set_difference(plan.pool, f), f});
    return plan;
}

FoldPlan build_hic_plan(const LabeledDataset& data, const PlanOptions& options, std::uint64_t seed) {
    options.validate();
    const auto frame = scene_indices(data, Scene::frame);
    const auto comparison = scene_indices(data, Scene::comparison);
    require_scenes(data, frame, comparison);
    FoldPlan plan;
    plan.scenario = ScenarioKind::hic;
    plan.pool = stratified_sample(data, options.quota, GroupBy::label_and_image, derive_seed(seed, {1}), frame).train;
    plan.test = comparison;
    const auto folds = stratified_folds(data, plan.pool, options.folds ? options.folds : 10, derive_seed(seed, {2}));
    if (options.conventional_cv) {
        for (const auto& f : folds) plan.folds.push_back({set_difference(plan.pool, f), f});
    } else {
        plan.subsample_per_class = options.subsample;
        for (const auto& f : folds) {
            if (options.subsample) check_subsample(data, f, options.subsample);
            plan.folds.push_back({f, set_difference(plan.pool, f)});
        }
    }
    return plan;
}

SplitPlan split_validation(const LabeledDataset& data, double fraction, std::uint64_t seed) {
    std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data.scene(i) == Scene::comparison)
            groups[{data.labels()[i], static_cast<int>(data.day(i))}].push_back(i);
    SplitPlan split;
    for (auto& [key, members] : groups) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(key.first), static_cast<std::uint64_t>(key.second)}));
        shuffle(members.begin(), members.end(), rng);
        const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
        split.validation.insert(split.validation.end(), members.begin(), members.begin() + n_val);
        split.test.insert(split.test.end(), members.begin() + n_val, members.end());
    }
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

FoldPlan build_hicvs_plan(const LabeledDataset& data, ScenarioKind variant, const PlanOptions& options,
                          std::uint64_t seed) {
    options.validate();
    if (variant != ScenarioKind::hicvs_small && variant != ScenarioKind::hicvs_large)
        throw InvalidArgument("HICVS variant must be small or large");
    const auto frame = scene_indices(data, Scene::frame);
    require_scenes(data, frame, scene_indices(data, Scene::comparison));
    const bool large = variant == ScenarioKind::hicvs_large;
    const std::size_t quota = large ? (options.large_quota ? options.large_quota : smallest_group(data, frame))
                                    : options.quota;
    FoldPlan plan;
    plan.scenario = variant;
    const SplitPlan split = split_validation(data, options.validation_fraction, derive_seed(seed, {3}));
    plan.test = split.test;
    plan.validation = split.validation;
    if (plan.validation.empty()) throw InsufficientData("validation split is empty");
    plan.pool = stratified_sample(data, quota, GroupBy::label_and_image, derive_seed(seed, {1}), frame).train;
    const std::size_t k = options.folds ? options.folds : (large ? 5 : 10);
    for (const auto& f : stratified_folds(data, plan.pool, k, derive_seed(seed, {2})))
        plan.folds.push_back({set_difference(plan.pool, f), plan.validation});
    return plan;
}

FoldPlan build_plan(const LabeledDataset& data, ScenarioKind scenario, const PlanOptions& options, std::uint64_t seed) {
    switch (scenario) {
        case ScenarioKind::htc: return build_htc_plan(data, options, seed);
        case ScenarioKind::hic: return build_hic_plan(data, options, seed);
        default: return build_hicvs_plan(data, scenario, options, seed);
    }
}

namespace {

ModelSpec with_seed(ModelSpec spec, std::uint64_t seed) {
    if (auto* mlp = std::get_if<MlpSpec>(&spec)) mlp->seed = seed;
    return spec;
}

std::vector<int> gather_labels(const LabeledDataset& data, std::span<const std::size_t> rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto i : rows) out.push_back(data.labels()[i]);
    return out;
}

}  // namespace

double evaluate_candidate(const LabeledDataset& data, const FoldPlan& plan, const Candidate& candidate,
                          std::uint64_t seed) {
    if (plan.folds.empty()) throw InvalidArgument("plan has no folds");
    std::vector<double> scores;
    scores.reserve(plan.folds.size());
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const Fold& fold = plan.folds[f];
        std::vector<std::size_t> train = fold.train;
        if (plan.subsample_per_class)
            train = stratified_sample(data, plan.subsample_per_class, GroupBy::label, derive_seed(seed, {f}), fold.train)
                        .train;
        const auto model = train_model(with_seed(candidate.model, derive_seed(seed, {f, 0x6d6c70})),
                                       gather(data.spectra(), train, candidate.features), gather_labels(data, train));
        const auto pred = predict(model, gather(data.spectra(), fold.evaluation, candidate.features));
        scores.push_back(accuracy(pred, gather_labels(data, fold.evaluation)));
    }
    return cv_accuracy(scores);
}

void ScenarioConfig::validate() const {
    plan.validate();
    if (repetitions == 0) throw InvalidArgument("repetitions must be >= 1");
    if (selector == Selector::ga) {
        if (classifier != ClassifierFamily::nu_svm)
            throw InvalidArgument("the GA selector is defined for the nu-svm family only, not "
                                  + std::string(to_string(classifier)));
        ga.validate();
    }
    if (grid && grid_size(*grid) == 0) throw InvalidArgument("grid search over an empty grid");
}

EvaluationReport run_scenario(const LabeledDataset& data, const ScenarioConfig& config) {
    config.validate();
    if (data.empty()) throw InsufficientData("empty dataset");
    const std::array<Day, 3> report_days{Day::d1, Day::d7, Day::d21};
    const GridSpec grid = config.grid.value_or(desk_grid(config.classifier));

    EvaluationReport report;
    report.scenario = config.scenario;
    report.selector = config.selector;
    report.classifier = config.classifier;
    std::vector<std::array<std::size_t, 3>> day_sizes;
    std::vector<double> best_fitness;

    for (std::size_t r = 0; r < config.repetitions; ++r) {
        const std::uint64_t rep_seed = derive_seed(config.seed, {r});
        const FoldPlan plan = build_plan(data, config.scenario, config.plan, derive_seed(rep_seed, {1}));
        if (plan.test.empty()) throw InsufficientData("test set is empty");
        const FitnessFn fitness = [&](const Candidate& c, std::uint64_t s) {
            return evaluate_candidate(data, plan, c, s);
        };

        RepetitionResult rep;
        if (config.selector == Selector::ga) {
            GaConfig ga = config.ga;
            ga.seed = derive_seed(rep_seed, {2});
            ga.workers = config.workers;
            GaResult result = ga_optimize(ga, data.dims(), fitness);
            rep.best = decode(result.best);
            rep.selection_fitness = result.best_fitness;
            rep.history = std::move(result.history);
        } else {
            GridResult result = grid_search(grid, data.dims(), fitness, derive_seed(rep_seed, {3}), config.workers);
            rep.selection_fitness = result.best_fitness;
            rep.best.model = result.best;
            rep.best.features.resize(data.dims());
            std::iota(rep.best.features.begin(), rep.best.features.end(), std::size_t{0});
        }

        TrainedModel model = train_model(with_seed(rep.best.model, derive_seed(rep_seed, {4})),
                                         gather_rows(data.spectra(), plan.pool), gather_labels(data, plan.pool),
                                         rep.best.features);
        const auto pred = predict(model, gather_rows(data.spectra(), plan.test));
        const auto truth = gather_labels(data, plan.test);

        std::array<std::size_t, 3> total{}, correct{};
        for (std::size_t j = 0; j < plan.test.size(); ++j) {
            const Day d = report_day(data.day(plan.test[j]));
            const auto slot = static_cast<std::size_t>(std::find(report_days.begin(), report_days.end(), d)
                                                       - report_days.begin());
            ++total[slot];
            correct[slot] += pred[j] == truth[j];
        }
        for (std::size_t s = 0; s < 3; ++s)
            rep.day_accuracy.push_back(total[s] ? static_cast<double>(correct[s]) / static_cast<double>(total[s]) * 100.0
                                                : std::numeric_limits<double>::quiet_NaN());
        rep.day_accuracy.push_back(accuracy(pred, truth));
        const std::vector<int> classes(data.classes().begin(), data.classes().end());
        rep.confusion = confusion_matrix(pred, truth, classes);
        day_sizes.push_back(total);

        if (r == 0 || rep.selection_fitness > best_fitness[report.best_repetition]) {
            report.best_repetition = r;
            report.best_model = std::move(model);
        }
        best_fitness.push_back(rep.selection_fitness);
        report.repetitions.push_back(std::move(rep));
    }

    auto collect = [&](std::size_t slot) {
        std::vector<double> v;
        for (const auto& rep : report.repetitions) v.push_back(rep.day_accuracy[slot]);
        return v;
    };
    for (std::size_t s = 0; s < 3; ++s) {
        const bool present = std::all_of(day_sizes.begin(), day_sizes.end(), [&](const auto& t) { return t[s] > 0; });
        if (!present) continue;
        const auto values = collect(s);
        const MeanStd ms = mean_std(values);
        report.days.push_back({std::string(to_string(report_days[s])), ms.mean, ms.std, day_sizes.front()[s]});
    }
    const MeanStd all = mean_std(collect(3));
    std::size_t test_size = 0;
    for (auto n : day_sizes.front()) test_size += n;
    report.days.push_back({"all", all.mean, all.std, test_size});

    std::vector<double> bands;
    for (const auto& rep : report.repetitions) bands.push_back(static_cast<double>(rep.best.features.size()));
    report.band_count = mean_std(bands).mean;
    return report;
}

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const EvaluationReport& report, bool header) {
    if (header) out << "scenario,selector,classifier,day,accuracy_mean,accuracy_std,band_count\n";
    for (const auto& d : report.days)
        out << to_string(report.scenario) << ',' << to_string(report.selector) << ',' << to_string(report.classifier)
            << ',' << d.day << ',' << fixed(d.accuracy_mean, 4) << ',' << fixed(d.accuracy_std, 4) << ','
            << fixed(report.band_count, 2) << '\n';
}

void write_report_table(std::ostream& out, const EvaluationReport& report) {
    out << to_string(report.scenario) << " / " << to_string(report.selector) << " / " << to_string(report.classifier)
        << "  (" << report.repetitions.size() << " repetitions, mean band count " << fixed(report.band_count, 2)
        << ")\n";
    out << "  day    accuracy             test size\n";
    for (const auto& d : report.days) {
        std::string day = d.day;
        day.resize(6, ' ');
        std::string acc = fixed(d.accuracy_mean, 2) + " +- " + fixed(d.accuracy_std, 2);
        acc.resize(20, ' ');
        out << "  " << day << ' ' << acc << ' ' << d.test_size << '\n';
    }
    out << "  best model: " << describe(report.best().best.model) << '\n';
}

void write_history_csv(std::ostream& out, std::span<const EpochStats> history) {
    out << "epoch,best_accuracy,mean_accuracy,best_band_count\n";
    for (const auto& e : history)
        out << e.epoch << ',' << fixed(e.best, 4) << ',' << fixed(e.mean, 4) << ',' << e.best_band_count << '\n';
}

}  // namespace hsiga

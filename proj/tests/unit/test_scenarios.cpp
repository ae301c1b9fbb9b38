#include <doctest.h>

#include <hsiga/error.hpp>
#include <hsiga/metrics.hpp>
#include <hsiga/random.hpp>
#include <hsiga/scenarios.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

using namespace hsiga;

namespace {

const std::vector<ImageMeta> kImages{
    {"F1", Scene::frame, Day::d1},        {"F1a", Scene::frame, Day::d1a},
    {"F7", Scene::frame, Day::d7},        {"F21", Scene::frame, Day::d21},
    {"C1", Scene::comparison, Day::d1},   {"C7", Scene::comparison, Day::d7},
    {"C21", Scene::comparison, Day::d21},
};

// counts[image][class index] records; spectra come from `fill`.
template <class Fill>
LabeledDataset make_dataset(const std::vector<std::vector<std::size_t>>& counts, const std::set<int>& classes,
                            std::size_t dims, Fill fill) {
    std::size_t n = 0;
    for (const auto& row : counts)
        for (auto c : row) n += c;
    FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
    std::vector<int> labels;
    std::vector<std::size_t> image_of;
    labels.reserve(n);
    image_of.reserve(n);
    const std::vector<int> ids(classes.begin(), classes.end());
    for (std::size_t img = 0; img < counts.size(); ++img)
        for (std::size_t k = 0; k < ids.size(); ++k)
            for (std::size_t j = 0; j < counts[img][k]; ++j) {
                const auto r = static_cast<Eigen::Index>(labels.size());
                for (std::size_t d = 0; d < dims; ++d) x(r, static_cast<Eigen::Index>(d)) = fill(img, ids[k], d);
                labels.push_back(ids[k]);
                image_of.push_back(img);
            }
    return LabeledDataset(std::move(x), std::move(labels), std::move(image_of), kImages, classes);
}

LabeledDataset metadata_only(const std::vector<std::vector<std::size_t>>& counts) {
    return make_dataset(counts, kDefaultClasses, 1, [](std::size_t, int, std::size_t) { return 0.0; });
}

// Frame images hold 2100 per class except one group of exactly 2068. The 18
// Comparison groups sum to 82,097 and their per-group 20% shares round to
// 16,421 in total.
std::vector<std::vector<std::size_t>> full_scale_counts() {
    std::vector<std::vector<std::size_t>> counts(7, std::vector<std::size_t>(6, 2100));
    counts[2][3] = 2068;
    std::vector<std::size_t> comparison(18, 4560);
    for (std::size_t g = 0; g < 3; ++g) comparison[g] = 4563;
    comparison[17] = 82097 - 4560 * 14 - 4563 * 3;
    for (std::size_t img = 4; img < 7; ++img)
        for (std::size_t k = 0; k < 6; ++k) counts[img][k] = comparison[(img - 4) * 6 + k];
    return counts;
}

std::size_t count_images(const LabeledDataset& data, std::span<const std::size_t> rows, Scene scene) {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [&](std::size_t i) { return data.scene(i) == scene; }));
}

bool disjoint(std::vector<std::size_t> a, std::vector<std::size_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::size_t> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    return both.empty();
}

// Two classes one unit apart in every dimension.
LabeledDataset separable(std::size_t per_group, double noise, std::uint64_t seed) {
    Rng rng(seed);
    return make_dataset(std::vector<std::vector<std::size_t>>(7, std::vector<std::size_t>(2, per_group)), {1, 2}, 3,
                        [&](std::size_t, int label, std::size_t d) {
                            return (label == 1 ? 0.0 : 1.0) + noise * standard_normal(rng);
                        });
}

GridSpec knn_singleton(std::size_t k) {
    return GridSpec{{KnnGrid{{DistanceMetric::euclidean}, {KnnWeighting::uniform}, {k}}}};
}

}  // namespace

TEST_CASE("accuracy and cross-validation mean") {
    const std::vector<int> t{1, 2, 3, 4};
    CHECK(accuracy(t, t) == 100.0);
    const std::vector<int> p{1, 2, 3, 3};
    CHECK(accuracy(p, t) == 75.0);
    const std::vector<double> folds{100.0, 50.0};
    CHECK(cv_accuracy(folds) == 75.0);
    CHECK_THROWS(accuracy(std::vector<int>{}, std::vector<int>{}));
    CHECK_THROWS(accuracy(p, std::vector<int>{1}));
    const std::vector<double> same{0.1 + 0.2, 0.1 + 0.2, 0.1 + 0.2};
    CHECK(mean_std(same).std == 0.0);
    const auto ms = mean_std(std::vector<double>{1, 3});
    CHECK(ms.mean == 2.0);
    CHECK(ms.std == 1.0);
    const auto cm = confusion_matrix(p, t, std::vector<int>{1, 2, 3, 4});
    CHECK(cm[3][2] == 1);
    CHECK(cm[0][0] == 1);
}

TEST_CASE("scenario names round trip") {
    for (auto s : {ScenarioKind::htc, ScenarioKind::hic, ScenarioKind::hicvs_small, ScenarioKind::hicvs_large})
        CHECK(parse_scenario(to_string(s)) == s);
    CHECK(parse_scenario("hicvs") == ScenarioKind::hicvs_small);
    CHECK_THROWS_AS(parse_scenario("htc2"), InvalidArgument);
}

TEST_CASE("stratified folds partition the pool with balanced classes") {
    const auto data = metadata_only(std::vector<std::vector<std::size_t>>(7, std::vector<std::size_t>(6, 13)));
    std::vector<std::size_t> pool(data.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    const auto folds = stratified_folds(data, pool, 10, 5);
    REQUIRE(folds.size() == 10);
    std::vector<std::size_t> all;
    for (const auto& f : folds) {
        all.insert(all.end(), f.begin(), f.end());
        for (const auto& [label, n] : class_histogram(data, f)) CHECK((n == 9 || n == 10));
    }
    std::sort(all.begin(), all.end());
    CHECK(all == pool);
}

TEST_CASE("HTC plan at desk scale") {
    const auto data = metadata_only(std::vector<std::vector<std::size_t>>(7, std::vector<std::size_t>(6, 30)));
    PlanOptions o;
    o.quota = 20;
    const auto plan = build_htc_plan(data, o, 1);
    CHECK(plan.pool.size() == 840);
    CHECK(plan.test.size() == data.size() - 840);
    CHECK(disjoint(plan.pool, plan.test));
    CHECK(plan.folds.size() == 10);
    for (const auto& f : plan.folds) {
        CHECK(f.train.size() + f.evaluation.size() == 840);
        CHECK(disjoint(f.train, f.evaluation));
    }
    o.quota = 31;
    CHECK_THROWS_AS(build_htc_plan(data, o, 1), InsufficientData);
}

TEST_CASE("HTC plan at full scale") {
    const auto data = metadata_only(std::vector<std::vector<std::size_t>>(7, std::vector<std::size_t>(6, 1000)));
    PlanOptions o;
    o.quota = 989;
    const auto plan = build_htc_plan(data, o, 2);
    CHECK(plan.pool.size() == 41538);
    CHECK(disjoint(plan.pool, plan.test));
}

TEST_CASE("HIC plan at full scale") {
    const auto data = metadata_only(full_scale_counts());
    PlanOptions o;
    o.quota = 250;
    const auto plan = build_hic_plan(data, o, 3);
    CHECK(plan.pool.size() == 6000);
    CHECK(plan.test.size() == 82097);
    CHECK(count_images(data, plan.test, Scene::comparison) == 82097);
    CHECK(count_images(data, plan.pool, Scene::comparison) == 0);
    CHECK(plan.folds.size() == 10);
    CHECK(plan.subsample_per_class == 10);
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const auto& fold = plan.folds[f];
        CHECK(count_images(data, fold.train, Scene::comparison) == 0);
        CHECK(count_images(data, fold.evaluation, Scene::comparison) == 0);
        CHECK(fold.train.size() == 600);
        CHECK(fold.evaluation.size() == 5400);
        CHECK(stratified_sample(data, 10, GroupBy::label, 9, fold.train).train.size() == 60);
    }
}

TEST_CASE("HIC plan with conventional cross-validation") {
    const auto data = metadata_only(full_scale_counts());
    PlanOptions o;
    o.quota = 30;
    o.conventional_cv = true;
    const auto plan = build_hic_plan(data, o, 3);
    CHECK(plan.subsample_per_class == 0);
    for (const auto& fold : plan.folds) CHECK(fold.train.size() == 9 * fold.evaluation.size());
}

TEST_CASE("HIC plan needs both scenes and enough records per fold") {
    auto counts = full_scale_counts();
    for (std::size_t img = 4; img < 7; ++img) counts[img].assign(6, 0);
    CHECK_THROWS_AS(build_hic_plan(metadata_only(counts), PlanOptions{}, 1), InsufficientData);
    PlanOptions o;
    o.quota = 20;  // 80 per class over 10 folds leaves 8 < 10 per fold
    CHECK_THROWS_AS(build_hic_plan(metadata_only(full_scale_counts()), o, 1), InsufficientData);
}

TEST_CASE("HICVS plans at full scale") {
    const auto data = metadata_only(full_scale_counts());
    PlanOptions o;
    o.quota = 250;
    o.large_quota = 2068;
    const auto small = build_hicvs_plan(data, ScenarioKind::hicvs_small, o, 4);
    CHECK(small.test.size() == 65676);
    CHECK(small.validation.size() == 16421);
    CHECK(small.pool.size() == 6000);
    CHECK(disjoint(small.test, small.validation));
    CHECK(disjoint(small.pool, small.validation));
    CHECK(count_images(data, small.pool, Scene::comparison) == 0);
    REQUIRE(small.folds.size() == 10);
    for (const auto& f : small.folds) {
        CHECK(f.train.size() == 5400);
        CHECK(f.evaluation == small.validation);
    }

    const auto large = build_hicvs_plan(data, ScenarioKind::hicvs_large, o, 4);
    CHECK(large.pool.size() == 49632);
    CHECK(large.test.size() == 65676);
    REQUIRE(large.folds.size() == 5);
    std::size_t trained = 0;
    for (const auto& f : large.folds) {
        trained += f.train.size();
        CHECK(f.evaluation == large.validation);
    }
    CHECK(trained == large.pool.size() * 4);

    o.large_quota = 0;  // smallest class x Frame-image group
    CHECK(build_hicvs_plan(data, ScenarioKind::hicvs_large, o, 4).pool.size() == 49632);
    o.large_quota = 2069;
    CHECK_THROWS_AS(build_hicvs_plan(data, ScenarioKind::hicvs_large, o, 4), InsufficientData);
}

TEST_CASE("validation split rounds per class and day") {
    const auto data = metadata_only(full_scale_counts());
    const auto a = split_validation(data, 0.2, 11);
    const auto b = split_validation(data, 0.2, 11);
    CHECK(a.validation == b.validation);
    CHECK(a.validation.size() == 16421);
    std::map<std::pair<int, Day>, std::size_t> groups, held;
    for (auto i : a.test) ++groups[{data.labels()[i], data.day(i)}];
    for (auto i : a.validation) {
        ++groups[{data.labels()[i], data.day(i)}];
        ++held[{data.labels()[i], data.day(i)}];
    }
    for (const auto& [key, n] : groups) CHECK(held[key] == static_cast<std::size_t>(std::llround(0.2 * n)));
}

TEST_CASE("plans are disjoint for many seeds") {
    const auto data = metadata_only(std::vector<std::vector<std::size_t>>(7, std::vector<std::size_t>(6, 40)));
    PlanOptions o;
    o.quota = 30;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        for (auto s : {ScenarioKind::htc, ScenarioKind::hic, ScenarioKind::hicvs_small, ScenarioKind::hicvs_large}) {
            const auto p = build_plan(data, s, o, seed);
            CHECK(disjoint(p.pool, p.test));
            CHECK(disjoint(p.pool, p.validation));
            CHECK(disjoint(p.test, p.validation));
            SplitPlan split{p.pool, p.test, p.validation};
            CHECK(is_valid_split(split, data.size()));
        }
}

TEST_CASE("grid search on separable classes scores 100 with zero spread") {
    const auto data = separable(12, 0.05, 1);
    ScenarioConfig c;
    c.scenario = ScenarioKind::htc;
    c.selector = Selector::gs;
    c.classifier = ClassifierFamily::knn;
    c.grid = knn_singleton(1);
    c.plan.quota = 6;
    c.plan.folds = 3;
    c.repetitions = 3;
    c.seed = 5;
    const auto r = run_scenario(data, c);
    CHECK(r.combined().day == "all");
    CHECK(r.combined().accuracy_mean == 100.0);
    CHECK(r.combined().accuracy_std == 0.0);
    CHECK(r.band_count == 3.0);
    REQUIRE(r.days.size() == 4);
    CHECK(r.days[0].day == "1");
    CHECK(r.days[1].day == "7");
    CHECK(r.days[2].day == "21");
    // day 1 includes the afternoon image
    CHECK(r.days[0].test_size == 3 * 2 * 6);
    CHECK(r.combined().test_size == 7 * 2 * 6);
}

TEST_CASE("reports are reproducible and combine days by test size") {
    const auto data = separable(15, 0.8, 2);
    ScenarioConfig c;
    c.scenario = ScenarioKind::hicvs_small;
    c.selector = Selector::gs;
    c.classifier = ClassifierFamily::knn;
    c.grid = GridSpec{{KnnGrid{{DistanceMetric::euclidean, DistanceMetric::manhattan}, {KnnWeighting::uniform}, {1, 5}}}};
    c.plan.quota = 10;
    c.repetitions = 2;
    c.seed = 9;
    const auto a = run_scenario(data, c);
    const auto b = run_scenario(data, c);
    std::ostringstream sa, sb;
    write_report_csv(sa, a);
    write_report_csv(sb, b);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("scenario,selector,classifier,day,accuracy_mean,accuracy_std,band_count\n", 0) == 0);

    for (const auto& rep : a.repetitions) {
        double weighted = 0.0;
        std::size_t total = 0;
        for (std::size_t d = 0; d + 1 < a.days.size(); ++d) {
            weighted += rep.day_accuracy[d] * static_cast<double>(a.days[d].test_size);
            total += a.days[d].test_size;
        }
        CHECK(total == a.combined().test_size);
        CHECK(rep.day_accuracy.back() == doctest::Approx(weighted / static_cast<double>(total)).epsilon(1e-12));
    }
    CHECK(a.combined().accuracy_mean < 100.0);

    c.workers = 3;
    std::ostringstream sc;
    write_report_csv(sc, run_scenario(data, c));
    CHECK(sc.str() == sa.str());
}

TEST_CASE("GA selection runs the nu-SVM only") {
    ScenarioConfig c;
    c.classifier = ClassifierFamily::knn;
    c.selector = Selector::ga;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.classifier = ClassifierFamily::nu_svm;
    CHECK_NOTHROW(c.validate());
    c.repetitions = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("GA scenario history and best repetition") {
    const auto data = separable(15, 0.6, 3);
    ScenarioConfig c;
    c.scenario = ScenarioKind::htc;
    c.plan.quota = 6;
    c.plan.folds = 3;
    c.repetitions = 2;
    c.ga.population = 8;
    c.ga.epochs = 3;
    c.seed = 4;
    const auto r = run_scenario(data, c);
    REQUIRE(r.repetitions.size() == 2);
    for (const auto& rep : r.repetitions) CHECK(rep.history.size() == 3);
    const auto& best = r.best();
    for (const auto& rep : r.repetitions) CHECK(best.selection_fitness >= rep.selection_fitness);
    std::ostringstream h;
    write_history_csv(h, best.history);
    CHECK(h.str().rfind("epoch,best_accuracy,mean_accuracy,best_band_count\n", 0) == 0);
}

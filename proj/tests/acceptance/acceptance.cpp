// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes or fails only among the ids
// given with --known-fail; anything else returns 1.

#include "gradcheck.hpp"
#include "svm_oracle.hpp"

#include <cli.hpp>

#include <hsiga/classifier.hpp>
#include <hsiga/metrics.hpp>
#include <hsiga/preprocess.hpp>
#include <hsiga/scenarios.hpp>
#include <hsiga/synthgen.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

using namespace hsiga;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. SVM dual objective against the brute-force QP oracle.

Outcome svm_oracle() {
    const auto t0 = Clock::now();
    Rng rng(1);
    std::size_t worst_index = 0, failures = 0, missing = 0;
    double worst = 0.0;
    std::string failed;
    for (int i = 0; i < 50; ++i) {
        const auto p = oracle::random_problem(rng, i);
        const auto c = oracle::compare_with_oracle(p, 1e-10);
        if (!c.oracle_found) {
            ++missing;
            continue;
        }
        const double gap = std::abs(c.solver - c.oracle) / std::max(1.0, std::abs(c.oracle));
        if (gap > worst) {
            worst = gap;
            worst_index = static_cast<std::size_t>(i);
        }
        if (gap > 1e-6) {
            ++failures;
            failed += fmt(" [#%d %s: solver %.6f oracle %.6f]", i, p.label.c_str(), c.solver, c.oracle);
        }
    }
    const double secs = seconds_since(t0);
    return {failures == 0 && missing == 0 && secs < 30.0,
            fmt("%zu/50 beyond 1e-6, %zu without oracle, worst rel gap %.2e (#%zu), %.1fs", failures, missing, worst,
                worst_index, secs)
                + failed};
}

// ---------------------------------------------------------------------------
// 2. nu bounds the margin-error and support-vector fractions.

Outcome nu_property() {
    constexpr std::size_t n = 200;
    std::size_t cases = 0, violations = 0;
    double worst_me = -1.0, worst_sv = -1.0;
    for (std::uint64_t problem = 0; problem < 20; ++problem) {
        Rng rng(derive_seed(2, {problem}));
        FeatureMatrix x(static_cast<Eigen::Index>(n), 2);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            const bool pos = i % 2 == 0;
            y[i] = pos ? 1 : 2;
            x(static_cast<Eigen::Index>(i), 0) = (pos ? 2.0 : -2.0) + standard_normal(rng);
            x(static_cast<Eigen::Index>(i), 1) = standard_normal(rng);
        }
        for (double nu : {0.1, 0.2, 0.4}) {
            SvmSpec spec;
            spec.kernel = KernelSpec{KernelKind::rbf, 0.5};
            spec.nu = nu;
            spec.solver.eps = 1e-8;
            const auto m = train_svm(spec, x, y);
            const auto dv = decision_values(m, x);
            const auto& pair = m.pairs[0];
            std::size_t margin_errors = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double yi = y[i] == pair.positive ? 1.0 : -1.0;
                if (yi * dv(static_cast<Eigen::Index>(i), 0) < 1.0 - 1e-4) ++margin_errors;
            }
            const double me = static_cast<double>(margin_errors) / n, sv = static_cast<double>(pair.sv.size()) / n;
            const double inv = 1.0 / static_cast<double>(n);
            worst_me = std::max(worst_me, me - nu);
            worst_sv = std::max(worst_sv, nu - sv);
            ++cases;
            if (me > nu + inv + 1e-12 || sv < nu - inv - 1e-12) ++violations;
        }
    }
    return {violations == 0, fmt("%zu/%zu cases within bounds; max(me - nu) %+.3f, max(nu - sv) %+.3f", cases - violations,
                                 cases, worst_me, worst_sv)};
}

// ---------------------------------------------------------------------------
// 3 and 4. GA runs with a real nu-SVM fitness on the band-recovery data.

FitnessFn cv_fitness(const LabeledDataset& data, std::size_t folds, std::uint64_t seed) {
    FoldPlan plan;
    plan.pool.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) plan.pool[i] = i;
    const auto parts = stratified_folds(data, plan.pool, folds, seed);
    for (std::size_t f = 0; f < parts.size(); ++f) {
        Fold fold;
        fold.evaluation = parts[f];
        for (std::size_t g = 0; g < parts.size(); ++g)
            if (g != f) fold.train.insert(fold.train.end(), parts[g].begin(), parts[g].end());
        plan.folds.push_back(std::move(fold));
    }
    return [&data, plan](const Candidate& c, std::uint64_t s) { return evaluate_candidate(data, plan, c, s); };
}

Outcome elitism() {
    const auto rec = band_recovery_dataset(20, 3, 20, 1.5, 3);
    const auto fitness = cv_fitness(rec.data, 3, 3);
    std::size_t monotone = 0;
    std::string drops;
    for (std::uint64_t run = 0; run < 10; ++run) {
        GaConfig c;
        c.population = 50;
        c.epochs = 30;
        c.seed = derive_seed(3, {run});
        const auto r = ga_optimize(c, rec.data.dims(), fitness);
        bool ok = r.history.size() == 30;
        for (std::size_t t = 1; t < r.history.size(); ++t)
            if (r.history[t].best < r.history[t - 1].best) {
                ok = false;
                drops += fmt(" [run %llu epoch %zu]", static_cast<unsigned long long>(run), t);
            }
        monotone += ok;
    }
    return {monotone == 10, fmt("%zu/10 runs with a non-decreasing best-fitness history", monotone) + drops};
}

Outcome band_recovery() {
    const auto rec = band_recovery_dataset(40, 5, 30, 3.0, 4);
    const auto fitness = cv_fitness(rec.data, 3, 4);
    std::size_t good = 0;
    double slowest = 0.0;
    std::string runs;
    for (std::uint64_t run = 0; run < 5; ++run) {
        const auto t0 = Clock::now();
        GaConfig c;
        c.population = 50;
        c.epochs = 30;
        c.seed = derive_seed(4, {run});
        const auto r = ga_optimize(c, rec.data.dims(), fitness);
        slowest = std::max(slowest, seconds_since(t0));
        std::size_t found = 0;
        for (auto b : rec.informative) found += r.best.bands[b];
        const std::size_t mask = r.best.band_count();
        good += found >= 4 && mask < 30;
        runs += fmt(" [%zu/5 informative, %zu bands, %.1f%%]", found, mask, r.best_fitness);
    }
    return {good >= 4 && slowest < 180.0, fmt("%zu/5 runs recover >= 4 bands with < 30 selected, slowest %.1fs;", good,
                                              slowest)
                                              + runs};
}

// ---------------------------------------------------------------------------
// 5, 6 and 7. Scenario directions on a desk-scale synthetic suite.

struct SuiteData {
    LabeledDataset full;
    LabeledDataset no_derivative;
};

const SuiteData& suite_data() {
    static const SuiteData data = [] {
        const auto suite = generate_suite(SceneRecipe{}, 1);
        PreprocessConfig ablated;
        ablated.apply_derivative = false;
        return SuiteData{suite_dataset(suite, PreprocessConfig{}), suite_dataset(suite, ablated)};
    }();
    return data;
}

ScenarioConfig ga_config(ScenarioKind scenario, std::uint64_t seed, std::size_t repetitions, std::size_t population,
                         std::size_t epochs) {
    ScenarioConfig c;
    c.scenario = scenario;
    c.selector = Selector::ga;
    c.classifier = ClassifierFamily::nu_svm;
    c.repetitions = repetitions;
    c.ga.population = population;
    c.ga.epochs = epochs;
    c.seed = seed;
    c.plan.quota = 30;
    if (scenario == ScenarioKind::htc) {
        c.plan.quota = 10;
        c.plan.folds = 3;
    }
    return c;
}

Outcome htc_vs_hic() {
    const auto& d = suite_data().full;
    const auto htc = run_scenario(d, ga_config(ScenarioKind::htc, 5, 2, 20, 10)).combined();
    const auto hic = run_scenario(d, ga_config(ScenarioKind::hic, 5, 2, 20, 10)).combined();
    const double gap = htc.accuracy_mean - hic.accuracy_mean;
    return {gap >= 10.0, fmt("HTC %.2f +- %.2f, HIC %.2f +- %.2f, gap %.2f points", htc.accuracy_mean, htc.accuracy_std,
                             hic.accuracy_mean, hic.accuracy_std, gap)};
}

Outcome hicvs_vs_hic() {
    const auto& d = suite_data().full;
    std::size_t wins = 0;
    std::string runs;
    for (std::uint64_t seed = 61; seed <= 65; ++seed) {
        const double hic = run_scenario(d, ga_config(ScenarioKind::hic, seed, 1, 12, 8)).combined().accuracy_mean;
        const double vs = run_scenario(d, ga_config(ScenarioKind::hicvs_small, seed, 1, 12, 8)).combined().accuracy_mean;
        wins += vs >= hic;
        runs += fmt(" [%.2f vs %.2f]", vs, hic);
    }
    return {wins >= 4, fmt("HICVS >= HIC in %zu/5 runs;", wins) + runs};
}

Outcome derivative_ablation() {
    const auto& s = suite_data();
    std::size_t lower = 0;
    std::string runs;
    for (std::uint64_t seed = 71; seed <= 75; ++seed) {
        const auto c = ga_config(ScenarioKind::hic, seed, 5, 30, 15);
        const double with = run_scenario(s.full, c).combined().accuracy_mean;
        const double without = run_scenario(s.no_derivative, c).combined().accuracy_mean;
        lower += without < with;
        runs += fmt(" [%.2f vs %.2f]", without, with);
    }
    return {lower >= 4, fmt("skipping the derivative lowers HIC accuracy in %zu/5 runs;", lower) + runs};
}

// ---------------------------------------------------------------------------
// 8. Metrics against hand-computed values.

Outcome metric_exactness() {
    Rng rng(8);
    // Fold sizes dividing 400 give percentages that are multiples of 1/4,
    // so every fold value and their sum are exact.
    const std::size_t sizes[] = {4, 5, 8, 10, 16, 20, 25, 40, 50, 80, 100};
    std::size_t mismatches = 0;
    for (int pair = 0; pair < 20; ++pair) {
        const std::size_t k = 1 + uniform_index(rng, 10);
        std::vector<double> folds;
        long long quarter_sum = 0;
        for (std::size_t f = 0; f < k; ++f) {
            const std::size_t n = pair < 10 ? sizes[uniform_index(rng, 11)] : 1 + uniform_index(rng, 500);
            std::vector<int> pred(n), truth(n);
            long long correct = 0;
            for (std::size_t i = 0; i < n; ++i) {
                truth[i] = static_cast<int>(uniform_index(rng, 4));
                pred[i] = uniform01(rng) < 0.7 ? truth[i] : static_cast<int>(uniform_index(rng, 4));
                correct += pred[i] == truth[i];
            }
            const double hand = static_cast<double>(100 * correct) / static_cast<double>(n);
            const double got = accuracy(pred, truth);
            mismatches += got != hand;
            folds.push_back(got);
            quarter_sum += 400 * correct / static_cast<long long>(n);
        }
        if (pair < 10) {
            const double hand = static_cast<double>(quarter_sum) / 4.0 / static_cast<double>(k);
            mismatches += cv_accuracy(folds) != hand;
        }
    }
    const std::vector<double> two{100.0, 50.0};
    mismatches += cv_accuracy(two) != 75.0;
    return {mismatches == 0, fmt("%zu mismatches over 20 prediction sets and their fold means", mismatches)};
}

// ---------------------------------------------------------------------------
// 9. Preprocessing invariants.

Outcome preprocessing() {
    Rng rng(9);
    std::size_t failures = 0;
    double worst_median = 0.0;
    const auto removed = default_removed_bands();
    for (int trial = 0; trial < 1000; ++trial) {
        // dyadic values keep the translation check exact
        std::vector<double> s(128);
        for (auto& v : s) v = static_cast<double>(1 + uniform_index(rng, 4096)) / 256.0;
        const auto kept = remove_bands(s, removed);
        failures += kept.size() != 113;
        const auto norm = median_normalize(kept);
        worst_median = std::max(worst_median, std::abs(median(norm) - 1.0));
        const auto d = derivative(norm);
        failures += d.size() != norm.size() - 1;

        const double scale = std::ldexp(1.0, static_cast<int>(uniform_index(rng, 9)) - 4);
        std::vector<double> scaled(kept);
        for (auto& v : scaled) v *= scale;
        failures += median_normalize(scaled) != norm;

        const double shift = static_cast<double>(uniform_index(rng, 256)) / 16.0;
        std::vector<double> shifted(kept);
        for (auto& v : shifted) v += shift;
        failures += derivative(shifted) != derivative(kept);
    }
    failures += worst_median > 1e-12;
    return {failures == 0, fmt("%zu violations over 1000 spectra, max |median - 1| %.1e", failures, worst_median)};
}

// ---------------------------------------------------------------------------
// 10. MLP gradients.

Outcome gradient_check() {
    Rng rng(10);
    const Activation acts[] = {Activation::sigmoid, Activation::tanh};
    double worst = 0.0;
    std::size_t failures = 0;
    for (int net_index = 0; net_index < 10; ++net_index) {
        const std::size_t inputs = 2 + uniform_index(rng, 4), classes = 2 + uniform_index(rng, 3);
        std::vector<std::size_t> sizes{inputs};
        const std::size_t layers = 1 + uniform_index(rng, 3);
        for (std::size_t l = 0; l < layers; ++l) sizes.push_back(2 + uniform_index(rng, 5));
        sizes.push_back(classes);
        const auto net = init_network(sizes, acts[net_index % 2], rng);
        FeatureMatrix x(8, static_cast<Eigen::Index>(inputs));
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = standard_normal(rng);
        std::vector<std::size_t> t(8);
        for (auto& v : t) v = uniform_index(rng, classes);
        const auto r = oracle::check_gradient(net, x, t);
        worst = std::max(worst, r.max_relative_error);
        failures += r.max_relative_error > 1e-5;
    }
    return {failures == 0, fmt("%zu/10 networks beyond 1e-5, worst relative error %.2e", failures, worst)};
}

// ---------------------------------------------------------------------------
// 11. Byte-identical reports across worker counts.

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "hsiga_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ostringstream sink;
    if (cli::run({"synth", "--out", (dir / "suite").string(), "--seed", "11", "--rows", "36", "--cols", "24"}, sink,
                 sink)
        != 0)
        return {false, "synth failed: " + sink.str()};

    const std::vector<std::vector<std::string>> runs{
        {"--scenario", "hic", "--selector", "ga", "--quota", "30", "--population", "12", "--epochs", "5",
         "--repetitions", "2"},
        {"--scenario", "htc", "--selector", "gs", "--classifier", "mlp", "--quota", "5", "--folds", "3",
         "--repetitions", "2"},
        {"--scenario", "hicvs-large", "--selector", "gs", "--classifier", "knn", "--quota", "20", "--repetitions", "2"},
    };
    std::size_t identical = 0;
    std::string detail;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        std::vector<std::string> files;
        for (const char* workers : {"1", "3"}) {
            const auto out = dir / ("report_" + std::to_string(r) + "_" + workers + ".csv");
            const auto hist = dir / ("history_" + std::to_string(r) + "_" + workers + ".csv");
            std::vector<std::string> args{"run", "--suite", (dir / "suite").string(), "--seed", "13", "--workers",
                                          workers, "--out", out.string(), "--history", hist.string()};
            args.insert(args.end(), runs[r].begin(), runs[r].end());
            if (cli::run(args, sink, sink) != 0) return {false, "run failed: " + sink.str()};
            files.push_back(slurp(out) + slurp(hist));
        }
        const bool same = !files[0].empty() && files[0] == files[1];
        identical += same;
        detail += fmt(" [%s: %s]", runs[r][1].c_str(), same ? "identical" : "differs");
    }
    fs::remove_all(dir);
    return {identical == runs.size(), fmt("%zu/%zu configurations byte-identical with 1 and 3 workers;", identical,
                                          runs.size())
                                          + detail};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> only, known_fail;
    app.add_option("--only", only, "run only these criteria");
    app.add_option("--known-fail", known_fail, "criteria whose failure is documented and tolerated");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "SVM dual matches the brute-force QP oracle", svm_oracle},
        {2, "nu-property bounds", nu_property},
        {3, "elitism keeps the best fitness non-decreasing", elitism},
        {4, "GA band recovery", band_recovery},
        {5, "HTC exceeds HIC by >= 10 points", htc_vs_hic},
        {6, "HICVS >= HIC for the GA", hicvs_vs_hic},
        {7, "skipping the derivative lowers HIC accuracy", derivative_ablation},
        {8, "accuracy and cv_accuracy exactness", metric_exactness},
        {9, "preprocessing invariants", preprocessing},
        {10, "MLP gradient check", gradient_check},
        {11, "determinism across worker counts", determinism},
    };

    int status = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const bool tolerated = std::find(known_fail.begin(), known_fail.end(), c.id) != known_fail.end();
        std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << " -- "
                  << o.detail << fmt(" (%.1fs)", seconds_since(t0)) << (!o.pass && tolerated ? " [known]" : "")
                  << std::endl;
        if (!o.pass && !tolerated) status = 1;
    }
    return status;
}

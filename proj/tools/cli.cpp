#include "cli.hpp"

#include <hsiga/error.hpp>
#include <hsiga/scenarios.hpp>
#include <hsiga/synthgen.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace hsiga::cli {

namespace fs = std::filesystem;

namespace {

/// Missing or unreadable input: reported with exit code 2.
struct DataError : Error {
    using Error::Error;
};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::size_t to_size(const std::string& s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw InvalidArgument("bad band index '" + s + "'");
    return v;
}

std::string format_band_list(const std::vector<std::size_t>& bands) {
    if (bands.empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < bands.size();) {
        std::size_t j = i;
        while (j + 1 < bands.size() && bands[j + 1] == bands[j] + 1) ++j;
        if (!out.empty()) out += ',';
        out += std::to_string(bands[i]);
        if (j > i) out += '-' + std::to_string(bands[j]);
        i = j + 1;
    }
    return out;
}

void require_file(const fs::path& p) {
    if (!fs::exists(p)) throw DataError("input not found: " + p.string());
}

/// Writes through a temporary sibling so a failed run leaves no partial file.
template <class Fn>
void write_atomically(const fs::path& path, Fn&& fn, bool binary = false) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
        if (!out) throw DataError("cannot write " + path.string());
        fn(out);
        if (!out) throw DataError("write failed: " + path.string());
    }
    fs::rename(tmp, path);
}

struct PreprocessFlags {
    std::size_t median_radius = 1;
    std::string removed_bands = "0-4,48-50,121-127";
    bool skip_normalization = false;
    bool skip_derivative = false;

    void add(CLI::App& app) {
        app.add_option("--median-radius", median_radius, "spatial median half-width (0 disables)")->capture_default_str();
        app.add_option("--removed-bands", removed_bands, "band ranges to drop, e.g. 0-4,48-50 or none")
            ->capture_default_str();
        app.add_flag("--skip-normalization", skip_normalization, "do not divide spectra by their median");
        app.add_flag("--skip-derivative", skip_derivative, "keep normalized spectra instead of band differences");
    }

    PreprocessConfig config() const {
        PreprocessConfig c;
        c.median_radius = median_radius;
        c.removed_bands = parse_band_list(removed_bands);
        c.apply_normalization = !skip_normalization;
        c.apply_derivative = !skip_derivative;
        return c;
    }
};

struct SynthArgs {
    std::string out;
    std::uint64_t seed = 1;
    std::size_t bands = 128, rows = 48, cols = 48, backgrounds = 3;
    double contrast = 1.0, illumination = 0.3, frequency = 1.0, noise = 0.005, drift = 0.1;
    double alpha_min = 0.5, alpha_max = 0.9;
    bool include_excluded = false;
};

struct RunArgs {
    std::string suite, out, history, model;
    std::string scenario = "htc", selector = "ga", classifier = "nu-svm";
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::size_t repetitions = 5;
    std::size_t quota = 50, large_quota = 0, folds = 0, subsample = 10;
    double validation_fraction = 0.2;
    bool conventional_cv = false;
    std::size_t population = 50, epochs = 30, tournament = 3, elite = 1;
    std::string crossover = "uniform", mutation_mode = "per-individual";
    double pc = 0.8, pm = 0.8;
    bool paper_scale = false, table = false, confusion = false, print_config = false;
    PreprocessFlags prep;
};

void apply_paper_scale(RunArgs& a, CLI::App& run) {
    auto unset = [&](const char* name) { return run.get_option(name)->count() == 0; };
    if (unset("--quota")) a.quota = parse_scenario(a.scenario) == ScenarioKind::htc ? 989 : 250;
    if (unset("--large-quota")) a.large_quota = 2068;
    if (unset("--population")) a.population = 200;
    if (unset("--epochs")) a.epochs = 100;
}

std::string dump_config(const RunArgs& a) {
    std::ostringstream s;
    s << "suite=" << a.suite << "\nscenario=" << a.scenario << "\nselector=" << a.selector
      << "\nclassifier=" << a.classifier << "\nseed=" << a.seed << "\nrepetitions=" << a.repetitions
      << "\nquota=" << a.quota << "\nlarge-quota=" << a.large_quota << "\nfolds=" << a.folds
      << "\nsubsample=" << a.subsample << "\nvalidation-fraction=" << a.validation_fraction
      << "\nconventional-cv=" << (a.conventional_cv ? "true" : "false") << "\npopulation=" << a.population
      << "\nepochs=" << a.epochs << "\ntournament=" << a.tournament << "\nelite=" << a.elite
      << "\ncrossover=" << a.crossover << "\ncrossover-probability=" << a.pc << "\nmutation-probability=" << a.pm
      << "\nmutation-mode=" << a.mutation_mode << "\npaper-scale=" << (a.paper_scale ? "true" : "false")
      << "\nmedian-radius=" << a.prep.median_radius << "\nremoved-bands=" << a.prep.removed_bands
      << "\nskip-normalization=" << (a.prep.skip_normalization ? "true" : "false")
      << "\nskip-derivative=" << (a.prep.skip_derivative ? "true" : "false") << '\n';
    return s.str();
}

ScenarioConfig scenario_config(const RunArgs& a) {
    ScenarioConfig c;
    c.scenario = parse_scenario(a.scenario);
    c.selector = parse_selector(a.selector);
    c.classifier = parse_classifier(a.classifier);
    c.plan.quota = a.quota;
    c.plan.large_quota = a.large_quota;
    c.plan.folds = a.folds;
    c.plan.subsample = a.subsample;
    c.plan.validation_fraction = a.validation_fraction;
    c.plan.conventional_cv = a.conventional_cv;
    c.repetitions = a.repetitions;
    c.ga.population = a.population;
    c.ga.epochs = a.epochs;
    c.ga.tournament = a.tournament;
    c.ga.elite = a.elite;
    c.ga.crossover_probability = a.pc;
    c.ga.mutation_probability = a.pm;
    if (a.crossover == "uniform") c.ga.crossover = CrossoverKind::uniform;
    else if (a.crossover == "one-point") c.ga.crossover = CrossoverKind::one_point;
    else throw InvalidArgument("unknown crossover '" + a.crossover + "'");
    if (a.mutation_mode == "per-individual") c.ga.mutation_mode = MutationMode::per_individual;
    else if (a.mutation_mode == "per-gene") c.ga.mutation_mode = MutationMode::per_gene;
    else throw InvalidArgument("unknown mutation mode '" + a.mutation_mode + "'");
    if (a.paper_scale) c.grid = paper_grid(c.classifier);
    c.seed = a.seed;
    c.workers = std::max(1u, a.workers);
    return c;
}

int do_synth(const SynthArgs& a, std::ostream& err) {
    SceneRecipe recipe;
    recipe.bands = a.bands;
    recipe.rows = a.rows;
    recipe.cols = a.cols;
    recipe.background_contrast = a.contrast;
    recipe.illumination_amplitude = a.illumination;
    recipe.illumination_frequency = a.frequency;
    recipe.noise_std = a.noise;
    recipe.drift = a.drift;
    recipe.alpha = {a.alpha_min, a.alpha_max};
    recipe.include_excluded = a.include_excluded;
    const Suite suite = generate_suite(recipe, a.seed, a.backgrounds);
    save_suite(a.out, suite);
    err << "wrote " << suite.images.size() << " images to " << a.out << '\n';
    return kOk;
}

int do_preprocess(const std::string& input, const std::string& output, const std::string& format,
                  const PreprocessFlags& prep, std::ostream& err) {
    require_file(input);
    const PreprocessConfig config = prep.config();
    if (format == "csv") {
        auto [cube, labels] = load_csv(input);
        const SpectralCube result = preprocess_cube(cube, config);
        save_csv(output, result, labels);
        err << "preprocessed " << cube.bands() << " -> " << result.bands() << " features\n";
    } else if (format == "binary") {
        const SpectralCube cube = load_cube(input);
        const SpectralCube result = preprocess_cube(cube, config);
        const fs::path tmp = output + ".tmp";
        save_cube(tmp, result);
        fs::rename(tmp, output);
        err << "preprocessed " << cube.bands() << " -> " << result.bands() << " features\n";
    } else {
        throw InvalidArgument("unknown format '" + format + "'");
    }
    return kOk;
}

int do_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
    ScenarioConfig config;
    PreprocessConfig prep;
    try {
        config = scenario_config(a);
        config.validate();
        prep = a.prep.config();
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    require_file(fs::path(a.suite) / "suite.json");
    const Suite suite = load_suite(a.suite);
    const LabeledDataset data = suite_dataset(suite, prep);
    err << "dataset: " << data.size() << " records, " << data.dims() << " features\n";

    const EvaluationReport report = run_scenario(data, config);

    std::ostringstream csv;
    write_report_csv(csv, report);
    if (a.out.empty()) out << csv.str();
    else write_atomically(a.out, [&](std::ostream& s) { s << csv.str(); });

    if (!a.history.empty())
        write_atomically(a.history, [&](std::ostream& s) { write_history_csv(s, report.best().history); });
    if (!a.model.empty()) {
        const auto origin = feature_origin(suite.images.front().cube.bands(), prep);
        write_atomically(
            a.model,
            [&](std::ostream& s) {
                const auto& features = report.best().best.features;
                s << "HSBANDS v1 " << features.size();
                for (auto f : features) s << ' ' << origin[f];
                s << '\n';
                write_model(s, report.best_model);
            },
            true);
    }
    const auto origin = feature_origin(suite.images.front().cube.bands(), prep);
    std::vector<std::size_t> bands;
    for (auto f : report.best().best.features) bands.push_back(origin[f]);
    err << "best model: " << describe(report.best().best.model) << "\nbands: " << format_band_list(bands) << '\n';
    if (a.table) write_report_table(out, report);
    if (a.confusion) {
        const auto& m = report.best().confusion;
        err << "confusion (rows truth, columns prediction):\n";
        for (const auto& row : m) {
            for (auto v : row) err << ' ' << v;
            err << '\n';
        }
    }
    return kOk;
}

int do_report(const std::vector<std::string>& inputs, bool as_csv, std::ostream& out) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& path : inputs) {
        require_file(path);
        std::ifstream in(path);
        std::string line;
        if (!std::getline(in, line) || trim(line) != "scenario,selector,classifier,day,accuracy_mean,accuracy_std,band_count")
            throw FormatError(path + ": not a report file");
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
            if (cells.size() != 7) throw FormatError(path + ": expected 7 columns in '" + line + "'");
            rows.push_back(std::move(cells));
        }
    }
    if (as_csv) {
        out << "scenario,selector,classifier,day,accuracy_mean,accuracy_std,band_count\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << '\n';
        }
        return kOk;
    }
    const char* headers[] = {"scenario", "selector", "classifier", "day", "accuracy", "bands"};
    std::vector<std::vector<std::string>> table;
    table.push_back({headers, headers + 6});
    for (const auto& r : rows) table.push_back({r[0], r[1], r[2], r[3], r[4] + " +- " + r[5], r[6]});
    std::vector<std::size_t> width(6, 0);
    for (const auto& r : table)
        for (std::size_t i = 0; i < 6; ++i) width[i] = std::max(width[i], r[i].size());
    for (const auto& r : table) {
        for (std::size_t i = 0; i < 6; ++i) {
            std::string cell = r[i];
            if (i + 1 < 6) cell.resize(width[i] + 2, ' ');
            out << cell;
        }
        out << '\n';
    }
    return kOk;
}

/// Expands `--config FILE` into flags placed before the command-line ones,
/// skipping keys already given on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty()) return rest;
    require_file(config_path);
    std::ifstream in(config_path);
    std::vector<std::string> from_file;
    std::string line;
    auto given = [&](const std::string& key) {
        return std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
            return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
        });
    };
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("config line without '=': " + line);
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (given(key)) continue;
        if (value == "true") from_file.push_back("--" + key);
        else if (value != "false") from_file.push_back("--" + key + "=" + value);
    }
    // the subcommand name must stay first
    if (rest.empty()) return from_file;
    std::vector<std::string> out{rest.front()};
    out.insert(out.end(), from_file.begin(), from_file.end());
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

}  // namespace

std::vector<std::size_t> parse_band_list(const std::string& text) {
    std::vector<std::size_t> out;
    const std::string t = trim(text);
    if (t.empty() || t == "none") return out;
    std::stringstream ss(t);
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(to_size(item));
        } else {
            const std::size_t lo = to_size(trim(item.substr(0, dash))), hi = to_size(trim(item.substr(dash + 1)));
            if (hi < lo) throw InvalidArgument("empty band range '" + item + "'");
            for (std::size_t b = lo; b <= hi; ++b) out.push_back(b);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Band selection and model selection for hyperspectral pixel classification", "hsiga"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic seven-image suite");
    synth_cmd->add_option("--out", synth.out, "output directory")->required();
    synth_cmd->add_option("--seed", synth.seed, "master seed")->capture_default_str();
    synth_cmd->add_option("--bands", synth.bands)->capture_default_str();
    synth_cmd->add_option("--rows", synth.rows)->capture_default_str();
    synth_cmd->add_option("--cols", synth.cols)->capture_default_str();
    synth_cmd->add_option("--backgrounds", synth.backgrounds, "backgrounds per Comparison image")->capture_default_str();
    synth_cmd->add_option("--contrast", synth.contrast, "Comparison background contrast")->capture_default_str();
    synth_cmd->add_option("--illumination", synth.illumination, "illumination field amplitude")->capture_default_str();
    synth_cmd->add_option("--illumination-frequency", synth.frequency)->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise, "noise standard deviation")->capture_default_str();
    synth_cmd->add_option("--drift", synth.drift, "bump shift in bands per day")->capture_default_str();
    synth_cmd->add_option("--alpha-min", synth.alpha_min)->capture_default_str();
    synth_cmd->add_option("--alpha-max", synth.alpha_max)->capture_default_str();
    synth_cmd->add_flag("--include-excluded", synth.include_excluded, "add class 4 to two Frame images");

    std::string pre_in, pre_out, pre_format = "binary";
    PreprocessFlags pre_flags;
    auto* pre_cmd = app.add_subcommand("preprocess", "apply the preprocessing chain to a cube file");
    pre_cmd->add_option("--input", pre_in)->required();
    pre_cmd->add_option("--output", pre_out)->required();
    pre_cmd->add_option("--format", pre_format, "input format: binary or csv")->capture_default_str();
    pre_flags.add(*pre_cmd);

    RunArgs ra;
    auto* run_cmd = app.add_subcommand("run", "run one evaluation scenario end to end");
    run_cmd->add_option("--suite", ra.suite, "suite directory")->required();
    run_cmd->add_option("--out", ra.out, "report CSV (default: stdout)");
    run_cmd->add_option("--history", ra.history, "GA history CSV of the best repetition");
    run_cmd->add_option("--model", ra.model, "best model file");
    run_cmd->add_option("--scenario", ra.scenario, "htc, hic, hicvs-small or hicvs-large")->capture_default_str();
    run_cmd->add_option("--selector", ra.selector, "ga or gs")->capture_default_str();
    run_cmd->add_option("--classifier", ra.classifier, "nu-svm, svc, lsvc, knn or mlp")->capture_default_str();
    run_cmd->add_option("--seed", ra.seed)->capture_default_str();
    run_cmd->add_option("--workers", ra.workers, "parallel fitness workers")->capture_default_str();
    run_cmd->add_option("--repetitions", ra.repetitions)->capture_default_str();
    run_cmd->add_option("--quota", ra.quota, "training pixels per class and image")->capture_default_str();
    run_cmd->add_option("--large-quota", ra.large_quota, "hicvs-large quota (0: largest feasible)")->capture_default_str();
    run_cmd->add_option("--folds", ra.folds, "0: scenario default")->capture_default_str();
    run_cmd->add_option("--subsample", ra.subsample, "hic examples per class per fit")->capture_default_str();
    run_cmd->add_option("--validation-fraction", ra.validation_fraction)->capture_default_str();
    run_cmd->add_flag("--conventional-cv", ra.conventional_cv, "hic: fit on k-1 folds instead of one");
    run_cmd->add_option("--population", ra.population)->capture_default_str();
    run_cmd->add_option("--epochs", ra.epochs)->capture_default_str();
    run_cmd->add_option("--tournament", ra.tournament)->capture_default_str();
    run_cmd->add_option("--elite", ra.elite)->capture_default_str();
    run_cmd->add_option("--crossover", ra.crossover, "uniform or one-point")->capture_default_str();
    run_cmd->add_option("--crossover-probability", ra.pc)->capture_default_str();
    run_cmd->add_option("--mutation-probability", ra.pm)->capture_default_str();
    run_cmd->add_option("--mutation-mode", ra.mutation_mode, "per-individual or per-gene")->capture_default_str();
    run_cmd->add_flag("--paper-scale", ra.paper_scale, "full quotas, population, epochs and grids");
    run_cmd->add_flag("--table", ra.table, "also print a readable table");
    run_cmd->add_flag("--confusion", ra.confusion, "dump the confusion matrix of the best repetition");
    run_cmd->add_flag("--print-config", ra.print_config, "print the resolved configuration and exit");
    ra.prep.add(*run_cmd);

    std::vector<std::string> report_inputs;
    bool report_csv = false;
    auto* report_cmd = app.add_subcommand("report", "print report CSV files as a table");
    report_cmd->add_option("inputs", report_inputs, "report CSV files")->required();
    report_cmd->add_flag("--csv", report_csv, "concatenate as CSV instead");

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::vector<const char*> argv{"hsiga"};
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*synth_cmd) return do_synth(synth, err);
        if (*pre_cmd) return do_preprocess(pre_in, pre_out, pre_format, pre_flags, err);
        if (*report_cmd) return do_report(report_inputs, report_csv, out);
        if (*run_cmd) {
            try {
                if (ra.paper_scale) apply_paper_scale(ra, *run_cmd);
            } catch (const InvalidArgument& e) {
                err << "error: " << e.what() << '\n';
                return kUsage;
            }
            if (ra.print_config) {
                out << dump_config(ra);
                return kOk;
            }
            return do_run(ra, out, err);
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return *synth_cmd ? kUsage : kData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}

}  // namespace hsiga::cli

#include <cli.hpp>

#include <hsiga/classifier.hpp>
#include <hsiga/error.hpp>
#include <hsiga/metrics.hpp>
#include <hsiga/preprocess.hpp>
#include <hsiga/scenarios.hpp>
#include <hsiga/synthgen.hpp>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace hsiga;

namespace {

template <class E>
E pick(std::string_view name, std::initializer_list<E> values) {
    for (E v : values)
        if (to_string(v) == name) return v;
    throw InvalidArgument("unknown value '" + std::string(name) + "'");
}

PreprocessConfig preprocess_config(std::size_t median_radius, std::optional<std::vector<std::size_t>> removed,
                                   bool normalize, bool derivative) {
    PreprocessConfig c;
    c.median_radius = median_radius;
    if (removed) c.removed_bands = *removed;
    c.apply_normalization = normalize;
    c.apply_derivative = derivative;
    return c;
}

// Opaque holder: a bare std::variant would be converted by the STL casters.
struct PyModel {
    TrainedModel model;
};

py::dict report_dict(const EvaluationReport& r) {
    py::list days;
    for (const auto& d : r.days)
        days.append(py::dict(py::arg("day") = d.day, py::arg("accuracy_mean") = d.accuracy_mean,
                             py::arg("accuracy_std") = d.accuracy_std, py::arg("test_size") = d.test_size));
    std::ostringstream csv;
    write_report_csv(csv, r);
    return py::dict(py::arg("scenario") = std::string(to_string(r.scenario)),
                    py::arg("selector") = std::string(to_string(r.selector)),
                    py::arg("classifier") = std::string(to_string(r.classifier)), py::arg("days") = days,
                    py::arg("band_count") = r.band_count, py::arg("best_model") = describe(r.best().best.model),
                    py::arg("best_features") = r.best().best.features, py::arg("csv") = csv.str());
}

}  // namespace

PYBIND11_MODULE(_hsiga, m) {
    m.doc() = "Band selection and model selection for hyperspectral pixel classification";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def(
        "accuracy", [](const std::vector<int>& p, const std::vector<int>& t) { return accuracy(p, t); },
        py::arg("predictions"), py::arg("truth"));
    m.def(
        "cv_accuracy", [](const std::vector<double>& folds) { return cv_accuracy(folds); },
        py::arg("fold_accuracies"));
    m.def(
        "median_normalize", [](const std::vector<double>& s) { return median_normalize(s); }, py::arg("spectrum"));
    m.def(
        "derivative", [](const std::vector<double>& s) { return derivative(s); }, py::arg("spectrum"));
    m.def("default_removed_bands", &default_removed_bands);
    m.def(
        "preprocess",
        [](const FeatureMatrix& spectra, std::optional<std::vector<std::size_t>> removed_bands, bool normalize,
           bool derivative) {
            return transform_spectra(spectra, preprocess_config(0, std::move(removed_bands), normalize, derivative));
        },
        py::arg("spectra"), py::arg("removed_bands") = py::none(), py::arg("normalize") = true,
        py::arg("derivative") = true, "Band removal, median normalization and derivative on rows of spectra.");

    py::class_<PyModel>(m, "Model")
        .def("predict", [](const PyModel& m, const FeatureMatrix& x) { return predict(m.model, x); })
        .def("save", [](const PyModel& m, const std::filesystem::path& p) { save_model(p, m.model); })
        .def_static("load", [](const std::filesystem::path& p) { return PyModel{load_model(p)}; })
        .def("__repr__", [](const PyModel& m) {
            return std::visit([](const auto& mm) { return "<Model " + describe(mm.spec) + ">"; }, m.model);
        });

    m.def(
        "train_svm",
        [](const FeatureMatrix& x, const std::vector<int>& y, std::string family, std::string kernel, double nu,
           double c, double gamma, int degree, double coef0, std::vector<std::size_t> features) {
            SvmSpec spec;
            spec.family = pick(family, {SvmFamily::nu, SvmFamily::c, SvmFamily::linear_c});
            spec.kernel = KernelSpec{parse_kernel(kernel), gamma, coef0, degree};
            spec.nu = nu;
            spec.c = c;
            py::gil_scoped_release release;
            return PyModel{train_model(spec, x, y, features)};
        },
        py::arg("x"), py::arg("y"), py::arg("family") = "nu-svm", py::arg("kernel") = "rbf", py::arg("nu") = 0.2,
        py::arg("c") = 1.0, py::arg("gamma") = 1.0, py::arg("degree") = 3, py::arg("coef0") = 1.0,
        py::arg("features") = std::vector<std::size_t>{});
    m.def(
        "train_knn",
        [](const FeatureMatrix& x, const std::vector<int>& y, std::size_t k, std::string metric,
           std::string weighting) {
            KnnSpec spec;
            spec.k = k;
            spec.metric = pick(metric, {DistanceMetric::euclidean, DistanceMetric::manhattan, DistanceMetric::chebyshev});
            spec.weighting = pick(weighting, {KnnWeighting::uniform, KnnWeighting::distance});
            return PyModel{train_model(spec, x, y)};
        },
        py::arg("x"), py::arg("y"), py::arg("k") = 5, py::arg("metric") = "euclidean",
        py::arg("weighting") = "uniform");
    m.def(
        "train_mlp",
        [](const FeatureMatrix& x, const std::vector<int>& y, std::vector<std::size_t> hidden, double dropout,
           double learning_rate, std::size_t batch_size, std::size_t iterations, std::uint64_t seed) {
            MlpSpec spec;
            spec.hidden = std::move(hidden);
            spec.dropout = dropout;
            spec.learning_rate = learning_rate;
            spec.batch_size = batch_size;
            spec.iterations = iterations;
            spec.seed = seed;
            py::gil_scoped_release release;
            return PyModel{train_model(spec, x, y)};
        },
        py::arg("x"), py::arg("y"), py::arg("hidden") = std::vector<std::size_t>{30}, py::arg("dropout") = 0.0,
        py::arg("learning_rate") = 0.01, py::arg("batch_size") = 50, py::arg("iterations") = 100,
        py::arg("seed") = 0);

    m.def(
        "synthesize",
        [](const std::filesystem::path& out, std::uint64_t seed, std::size_t bands, std::size_t rows,
           std::size_t cols, double contrast, double illumination, double noise, double drift) {
            SceneRecipe r;
            r.bands = bands;
            r.rows = rows;
            r.cols = cols;
            r.background_contrast = contrast;
            r.illumination_amplitude = illumination;
            r.noise_std = noise;
            r.drift = drift;
            py::gil_scoped_release release;
            const auto suite = generate_suite(r, seed);
            save_suite(out, suite);
            return suite.informative_bands;
        },
        py::arg("out"), py::arg("seed") = 1, py::arg("bands") = 128, py::arg("rows") = 48, py::arg("cols") = 48,
        py::arg("contrast") = 1.0, py::arg("illumination") = 0.3, py::arg("noise") = 0.005, py::arg("drift") = 0.1,
        "Writes a seven-image synthetic suite to `out`; returns the informative band indices.");

    m.def(
        "load_dataset",
        [](const std::filesystem::path& suite_dir, bool derivative) {
            PreprocessConfig c;
            c.apply_derivative = derivative;
            const auto data = suite_dataset(load_suite(suite_dir), c);
            std::vector<std::string> image;
            for (auto i : data.image_of()) image.push_back(data.images()[i].id);
            return py::make_tuple(data.spectra(), data.labels(), image);
        },
        py::arg("suite_dir"), py::arg("derivative") = true,
        "Preprocessed labeled pixels of a suite: (features, labels, image ids).");

    m.def(
        "run_scenario",
        [](const std::filesystem::path& suite_dir, std::string scenario, std::string selector,
           std::string classifier, std::uint64_t seed, std::size_t repetitions, std::size_t quota,
           std::size_t folds, std::size_t population, std::size_t epochs, unsigned workers, bool derivative) {
            PreprocessConfig pc;
            pc.apply_derivative = derivative;
            const auto data = suite_dataset(load_suite(suite_dir), pc);
            ScenarioConfig c;
            c.scenario = parse_scenario(scenario);
            c.selector = parse_selector(selector);
            c.classifier = parse_classifier(classifier);
            c.seed = seed;
            c.repetitions = repetitions;
            c.plan.quota = quota;
            c.plan.folds = folds;
            c.ga.population = population;
            c.ga.epochs = epochs;
            c.workers = workers;
            EvaluationReport r;
            {
                py::gil_scoped_release release;
                r = run_scenario(data, c);
            }
            return report_dict(r);
        },
        py::arg("suite_dir"), py::arg("scenario") = "htc", py::arg("selector") = "ga",
        py::arg("classifier") = "nu-svm", py::arg("seed") = 0, py::arg("repetitions") = 5, py::arg("quota") = 50,
        py::arg("folds") = 0, py::arg("population") = 50, py::arg("epochs") = 30, py::arg("workers") = 1,
        py::arg("derivative") = true);

    m.def(
        "main",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line tool in-process: (exit code, stdout, stderr).");
}

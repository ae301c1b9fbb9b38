#include "hsiga/grid_search.hpp"

#include "hsiga/error.hpp"
#include "hsiga/parallel.hpp"

#include <numeric>
#include <string>

namespace hsiga {

std::string_view to_string(ClassifierFamily f) {
    switch (f) {
        case ClassifierFamily::nu_svm: return "nu-svm";
        case ClassifierFamily::svc: return "svc";
        case ClassifierFamily::lsvc: return "lsvc";
        case ClassifierFamily::knn: return "knn";
        case ClassifierFamily::mlp: return "mlp";
    }
    return "?";
}

ClassifierFamily parse_classifier(std::string_view s) {
    if (s == "nu-svm" || s == "nusvm" || s == "nu") return ClassifierFamily::nu_svm;
    if (s == "svc" || s == "svm") return ClassifierFamily::svc;
    if (s == "lsvc" || s == "linear-svm") return ClassifierFamily::lsvc;
    if (s == "knn") return ClassifierFamily::knn;
    if (s == "mlp") return ClassifierFamily::mlp;
    throw InvalidArgument("unknown classifier '" + std::string(s) + "'");
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void enumerate_svm(const SvmGrid& g, std::vector<ModelSpec>& out) {
    if (g.family == SvmFamily::linear_c) {
        for (auto loss : g.loss)
            for (double c : g.regularization) {
                SvmSpec s;
                s.family = SvmFamily::linear_c;
                s.kernel = KernelSpec{KernelKind::linear, 1.0, 0.0, 1};
                s.c = c;
                s.loss = loss;
                out.emplace_back(s);
            }
        return;
    }
    const bool uses_gamma = g.kernel != KernelKind::linear;
    const bool uses_coef0 = g.kernel == KernelKind::polynomial || g.kernel == KernelKind::sigmoid;
    const bool uses_degree = g.kernel == KernelKind::polynomial;
    const std::vector<double> one{0.0};
    const std::vector<int> one_int{1};
    for (double reg : g.regularization)
        for (double gamma : uses_gamma ? g.gamma : std::vector<double>{1.0})
            for (double coef0 : uses_coef0 ? g.coef0 : one)
                for (int degree : uses_degree ? g.degree : one_int) {
                    SvmSpec s;
                    s.family = g.family;
                    s.kernel = KernelSpec{g.kernel, gamma, coef0, degree};
                    (g.family == SvmFamily::nu ? s.nu : s.c) = reg;
                    out.emplace_back(s);
                }
}

}  // namespace

std::size_t block_size(const GridBlock& block) {
    return std::visit(overloaded{[](const SvmGrid& g) -> std::size_t {
                                     if (g.family == SvmFamily::linear_c) return g.loss.size() * g.regularization.size();
                                     std::size_t n = g.regularization.size();
                                     if (g.kernel != KernelKind::linear) n *= g.gamma.size();
                                     if (g.kernel == KernelKind::polynomial || g.kernel == KernelKind::sigmoid)
                                         n *= g.coef0.size();
                                     if (g.kernel == KernelKind::polynomial) n *= g.degree.size();
                                     return n;
                                 },
                                 [](const KnnGrid& g) -> std::size_t { return g.metric.size() * g.weighting.size() * g.k.size(); },
                                 [](const MlpGrid& g) -> std::size_t {
                                     return g.hidden.size() * g.dropout.size() * g.learning_rate.size()
                                            * g.batch_size.size() * g.iterations.size();
                                 }},
                      block);
}

std::size_t grid_size(const GridSpec& grid) {
    std::size_t n = 0;
    for (const auto& b : grid.blocks) n += block_size(b);
    return n;
}

std::vector<ModelSpec> enumerate(const GridSpec& grid) {
    std::vector<ModelSpec> out;
    for (const auto& block : grid.blocks) {
        std::visit(overloaded{[&](const SvmGrid& g) { enumerate_svm(g, out); },
                              [&](const KnnGrid& g) {
                                  for (auto m : g.metric)
                                      for (auto w : g.weighting)
                                          for (auto k : g.k) out.emplace_back(KnnSpec{m, w, k});
                              },
                              [&](const MlpGrid& g) {
                                  for (const auto& h : g.hidden)
                                      for (double d : g.dropout)
                                          for (double lr : g.learning_rate)
                                              for (auto bs : g.batch_size)
                                                  for (auto it : g.iterations) {
                                                      MlpSpec s;
                                                      s.hidden = h;
                                                      s.dropout = d;
                                                      s.learning_rate = lr;
                                                      s.batch_size = bs;
                                                      s.iterations = it;
                                                      s.seed = g.seed;
                                                      out.emplace_back(s);
                                                  }
                              }},
                   block);
    }
    return out;
}

namespace {

const std::vector<double> kLogC{0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
const std::vector<double> kGamma{0.001, 0.01, 0.1, 1.0, 5.0};
const std::vector<double> kCoef0{0.01, 0.1, 1.0, 5.0, 10.0};
const std::vector<double> kNu{0.001, 0.1, 0.2, 0.3, 0.4};
const std::vector<int> kDegree{1, 2, 3, 4, 5};

GridSpec kernel_blocks(SvmFamily family, const std::vector<double>& reg_rbf, const std::vector<double>& reg_other,
                       const std::vector<double>& gamma_rbf, const std::vector<double>& gamma_other,
                       const std::vector<double>& coef0, const std::vector<int>& degree) {
    GridSpec g;
    g.blocks.push_back(SvmGrid{family, KernelKind::rbf, reg_rbf, gamma_rbf, {0.0}, {1}, {}});
    g.blocks.push_back(SvmGrid{family, KernelKind::polynomial, reg_other, gamma_other, coef0, degree, {}});
    g.blocks.push_back(SvmGrid{family, KernelKind::sigmoid, reg_other, gamma_other, coef0, {1}, {}});
    return g;
}

}  // namespace

GridSpec paper_grid(ClassifierFamily family) {
    switch (family) {
        case ClassifierFamily::nu_svm: return kernel_blocks(SvmFamily::nu, kNu, kNu, kGamma, kGamma, kCoef0, kDegree);
        case ClassifierFamily::svc: return kernel_blocks(SvmFamily::c, kLogC, kLogC, kGamma, kGamma, kCoef0, kDegree);
        case ClassifierFamily::lsvc:
            return GridSpec{{SvmGrid{SvmFamily::linear_c, KernelKind::linear, kLogC, {1.0}, {0.0}, {1},
                                     {LinearLoss::hinge, LinearLoss::squared_hinge}}}};
        case ClassifierFamily::knn: {
            KnnGrid g{{DistanceMetric::euclidean, DistanceMetric::manhattan, DistanceMetric::chebyshev},
                      {KnnWeighting::uniform, KnnWeighting::distance},
                      {}};
            for (std::size_t k = 1; k <= 20; ++k) g.k.push_back(k);
            return GridSpec{{g}};
        }
        case ClassifierFamily::mlp: {
            MlpGrid g;
            g.hidden = {{1000}, {30, 30}, {1000, 1000}, {1000, 1000, 1000}};
            g.dropout = {0.0, 0.5};
            g.learning_rate = {0.1, 0.01, 0.001};
            g.batch_size = {50, 100};
            for (std::size_t it = 50; it <= 500; it += 50) g.iterations.push_back(it);
            return GridSpec{{g}};
        }
    }
    return {};
}

GridSpec desk_grid(ClassifierFamily family) {
    switch (family) {
        case ClassifierFamily::nu_svm:
            return kernel_blocks(SvmFamily::nu, {0.1, 0.2, 0.3, 0.4}, {0.1, 0.3}, {0.01, 0.1, 1.0, 5.0}, {0.1, 1.0},
                                 {0.1, 1.0}, {1, 2});
        case ClassifierFamily::svc:
            return kernel_blocks(SvmFamily::c, {0.1, 1.0, 10.0, 100.0}, {1.0, 100.0}, {0.01, 0.1, 1.0, 5.0}, {0.1, 1.0},
                                 {0.1, 1.0}, {1, 2});
        case ClassifierFamily::lsvc:
            return GridSpec{{SvmGrid{SvmFamily::linear_c, KernelKind::linear, {0.01, 0.1, 1.0, 10.0, 100.0}, {1.0}, {0.0},
                                     {1}, {LinearLoss::hinge, LinearLoss::squared_hinge}}}};
        case ClassifierFamily::knn:
            return GridSpec{{KnnGrid{{DistanceMetric::euclidean, DistanceMetric::manhattan, DistanceMetric::chebyshev},
                                     {KnnWeighting::uniform, KnnWeighting::distance},
                                     {1, 3, 5, 10, 20}}}};
        case ClassifierFamily::mlp: {
            MlpGrid g;
            g.hidden = {{30}, {30, 30}};
            g.dropout = {0.0, 0.5};
            g.learning_rate = {0.1, 0.01};
            g.batch_size = {50};
            g.iterations = {50, 100};
            return GridSpec{{g}};
        }
    }
    return {};
}

GridResult grid_search(const GridSpec& grid, std::size_t feature_count, const FitnessFn& fitness, std::uint64_t seed,
                       unsigned workers) {
    const auto points = enumerate(grid);
    if (points.empty()) throw InvalidArgument("grid search over an empty grid");
    std::vector<std::size_t> features(feature_count);
    std::iota(features.begin(), features.end(), std::size_t{0});
    GridResult result;
    result.scores.assign(points.size(), 0.0);
    parallel_for(points.size(), workers, [&](std::size_t i) {
        try {
            result.scores[i] = fitness(Candidate{points[i], features}, derive_seed(seed, {i}));
        } catch (const std::exception& e) {
            throw FitnessError(0, i, e.what());
        }
    });
    result.best_index = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
        if (result.scores[i] > result.scores[result.best_index]) result.best_index = i;
    result.best = points[result.best_index];
    result.best_fitness = result.scores[result.best_index];
    return result;
}

}  // namespace hsiga

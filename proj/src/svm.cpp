#include "hsiga/svm.hpp"

#include "hsiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace hsiga {

std::string_view to_string(SvmFamily f) {
    switch (f) {
        case SvmFamily::nu: return "nu-svm";
        case SvmFamily::c: return "svc";
        case SvmFamily::linear_c: return "lsvc";
    }
    return "?";
}

std::string_view to_string(LinearLoss l) { return l == LinearLoss::hinge ? "hinge" : "squared_hinge"; }

void SvmSpec::validate() const {
    if (family == SvmFamily::nu && !(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("nu must lie in (0, 1]");
    if (family != SvmFamily::nu && !(c > 0.0)) throw InvalidArgument("C must be positive");
    if (family != SvmFamily::linear_c) {
        if (kernel.kind != KernelKind::linear && !(kernel.gamma > 0.0)) throw InvalidArgument("gamma must be positive");
        if (kernel.kind == KernelKind::polynomial && kernel.degree < 0) throw InvalidArgument("degree must be >= 0");
    }
}

namespace {

// Gram matrices above this many entries are computed per subproblem instead.
constexpr std::size_t kSharedGramLimit = std::size_t{3000} * 3000;

}  // namespace

SvmModel train_svm(const SvmSpec& spec, const FeatureMatrix& x, std::span<const int> labels,
                   std::span<const std::size_t> feature_indices) {
    spec.validate();
    if (static_cast<std::size_t>(x.rows()) != labels.size()) throw InvalidArgument("train_svm: label count mismatch");
    for (auto f : feature_indices)
        if (f >= static_cast<std::size_t>(x.cols())) throw InvalidArgument("train_svm: feature index out of range");
    const std::set<int> class_set(labels.begin(), labels.end());
    if (class_set.size() < 2) throw InvalidArgument("train_svm: at least two classes are required");

    SvmModel model;
    model.spec = spec;
    model.classes.assign(class_set.begin(), class_set.end());
    model.input_dims = static_cast<std::size_t>(x.cols());
    model.feature_indices.assign(feature_indices.begin(), feature_indices.end());

    KernelSpec kernel = spec.kernel;
    if (spec.family == SvmFamily::linear_c) kernel = KernelSpec{KernelKind::linear, 1.0, 0.0, 1};
    const FeatureMatrix xs = select_columns(x, feature_indices);
    const auto n = labels.size();
    Eigen::MatrixXd gram;
    if (n * n <= kSharedGramLimit) gram = kernel_matrix(kernel, xs, xs);

    std::vector<std::vector<std::size_t>> members(model.classes.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(std::lower_bound(model.classes.begin(), model.classes.end(), labels[i])
                                                - model.classes.begin());
        members[c].push_back(i);
    }

    std::vector<std::ptrdiff_t> sv_slot(n, -1);
    std::vector<std::size_t> sv_rows;
    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            std::vector<std::size_t> rows;
            std::merge(members[a].begin(), members[a].end(), members[b].begin(), members[b].end(),
                       std::back_inserter(rows));
            std::vector<signed char> y(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) y[k] = labels[rows[k]] == model.classes[a] ? +1 : -1;

            const double shift = (spec.family == SvmFamily::linear_c && spec.loss == LinearLoss::squared_hinge)
                                     ? 1.0 / (2.0 * spec.c)
                                     : 0.0;
            auto q = gram.size() ? QMatrix(gram, rows, y, shift) : QMatrix(gather_rows(xs, rows), kernel, y, shift);

            DualResult sol;
            BinarySvm bin{model.classes[a], model.classes[b], {}, {}, {}, 0.0, 0.0, 0, true};
            if (spec.family == SvmFamily::nu) {
                try {
                    sol = solve_nu_dual(q, spec.nu, spec.solver);
                } catch (const InfeasibleNu& e) {
                    throw InfeasibleNu(std::string(e.what()) + " (classes " + std::to_string(bin.positive) + " vs "
                                       + std::to_string(bin.negative) + ")");
                }
            } else {
                const std::vector<double> p(rows.size(), -1.0);
                const double ub = (spec.family == SvmFamily::linear_c && spec.loss == LinearLoss::squared_hinge)
                                      ? std::numeric_limits<double>::infinity()
                                      : spec.c;
                const std::vector<double> upper(rows.size(), ub);
                sol = solve_c_dual(q, p, upper, spec.solver);
            }
            const double scale = spec.family == SvmFamily::nu ? sol.r : 1.0;
            bin.rho = sol.rho / scale;
            bin.objective = sol.objective;
            bin.iterations = sol.iterations;
            bin.converged = sol.converged;
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (sol.alpha[k] == 0.0) continue;
                auto& slot = sv_slot[rows[k]];
                if (slot < 0) {
                    slot = static_cast<std::ptrdiff_t>(sv_rows.size());
                    sv_rows.push_back(rows[k]);
                }
                const double beta = sol.alpha[k] / scale;
                bin.sv.push_back(static_cast<std::size_t>(slot));
                bin.beta.push_back(beta);
                bin.coef.push_back(y[k] * beta);
            }
            model.pairs.push_back(std::move(bin));
        }
    }
    model.support_vectors = gather_rows(xs, sv_rows);
    return model;
}

Eigen::MatrixXd decision_values(const SvmModel& model, const FeatureMatrix& x) {
    if (static_cast<std::size_t>(x.cols()) != model.input_dims)
        throw InvalidArgument("predict: query has " + std::to_string(x.cols()) + " features, model expects "
                              + std::to_string(model.input_dims));
    KernelSpec kernel = model.spec.kernel;
    if (model.spec.family == SvmFamily::linear_c) kernel = KernelSpec{KernelKind::linear, 1.0, 0.0, 1};
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(model.pairs.size()));
    constexpr Eigen::Index kBlock = 512;
    for (Eigen::Index start = 0; start < x.rows(); start += kBlock) {
        const Eigen::Index len = std::min(kBlock, x.rows() - start);
        std::vector<std::size_t> rows(static_cast<std::size_t>(len));
        for (Eigen::Index k = 0; k < len; ++k) rows[static_cast<std::size_t>(k)] = static_cast<std::size_t>(start + k);
        const FeatureMatrix q = gather(x, rows, model.feature_indices);
        const Eigen::MatrixXd k = kernel_matrix(kernel, q, model.support_vectors);
        for (std::size_t p = 0; p < model.pairs.size(); ++p) {
            const auto& bin = model.pairs[p];
            for (Eigen::Index r = 0; r < len; ++r) {
                double s = 0.0;
                for (std::size_t t = 0; t < bin.sv.size(); ++t) s += bin.coef[t] * k(r, static_cast<Eigen::Index>(bin.sv[t]));
                out(start + r, static_cast<Eigen::Index>(p)) = s - bin.rho;
            }
        }
    }
    return out;
}

std::vector<int> predict(const SvmModel& model, const FeatureMatrix& x) {
    const Eigen::MatrixXd dec = decision_values(model, x);
    const auto k = model.classes.size();
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    std::vector<int> votes(k);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        std::fill(votes.begin(), votes.end(), 0);
        std::size_t p = 0;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b, ++p) ++votes[dec(r, static_cast<Eigen::Index>(p)) > 0 ? a : b];
        const auto best = std::max_element(votes.begin(), votes.end()) - votes.begin();
        out[static_cast<std::size_t>(r)] = model.classes[static_cast<std::size_t>(best)];
    }
    return out;
}

}  // namespace hsiga

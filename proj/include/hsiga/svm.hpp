#pragma once

#include "hsiga/kernel.hpp"
#include "hsiga/matrix.hpp"
#include "hsiga/svm_solver.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hsiga {

enum class SvmFamily { nu, c, linear_c };
enum class LinearLoss { hinge, squared_hinge };

std::string_view to_string(SvmFamily f);
std::string_view to_string(LinearLoss l);

struct SvmSpec {
    SvmFamily family = SvmFamily::nu;
    KernelSpec kernel;           // ignored (forced linear) for linear_c
    double nu = 0.2;             // nu family, in (0, 1]
    double c = 1.0;              // c and linear_c families, > 0
    LinearLoss loss = LinearLoss::hinge;  // linear_c only
    SolverOptions solver;

    void validate() const;
    friend bool operator==(const SvmSpec& a, const SvmSpec& b) {
        return a.family == b.family && a.kernel == b.kernel && a.nu == b.nu && a.c == b.c && a.loss == b.loss;
    }
};

/// One binary subproblem of the one-vs-one reduction. `positive` is the
/// lower class id. decision(x) = sum_k coef_k K(x, sv_k) - rho; > 0 votes for
/// `positive`.
struct BinarySvm {
    int positive = 0;
    int negative = 0;
    std::vector<std::size_t> sv;  // indices into SvmModel::support_vectors
    std::vector<double> beta;     // >= 0
    std::vector<double> coef;     // y_k * beta_k
    double rho = 0.0;
    double objective = 0.0;       // dual objective of the problem as solved
    std::size_t iterations = 0;
    bool converged = true;
};

struct SvmModel {
    SvmSpec spec;
    std::vector<int> classes;                 // ascending
    std::size_t input_dims = 0;               // feature count expected by predict
    std::vector<std::size_t> feature_indices; // columns used; empty = all
    FeatureMatrix support_vectors;            // restricted to feature_indices
    std::vector<BinarySvm> pairs;             // (0,1), (0,2), ..., (k-2,k-1)

    std::size_t support_vector_count() const { return static_cast<std::size_t>(support_vectors.rows()); }
};

/// Trains one-vs-one binary SVMs for every class pair. `feature_indices`
/// restricts training (and later prediction) to those columns.
SvmModel train_svm(const SvmSpec& spec, const FeatureMatrix& x, std::span<const int> labels,
                   std::span<const std::size_t> feature_indices = {});

/// Decision values, one column per pair, for each query row.
Eigen::MatrixXd decision_values(const SvmModel& model, const FeatureMatrix& x);

/// One-vs-one vote; ties go to the lowest class id.
std::vector<int> predict(const SvmModel& model, const FeatureMatrix& x);

}  // namespace hsiga

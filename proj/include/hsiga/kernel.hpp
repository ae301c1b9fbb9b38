#pragma once

#include "hsiga/matrix.hpp"

#include <span>
#include <string_view>

namespace hsiga {

enum class KernelKind { linear, rbf, polynomial, sigmoid };

std::string_view to_string(KernelKind k);
KernelKind parse_kernel(std::string_view s);

/// Kernel and its parameters. gamma is read by rbf, polynomial and sigmoid;
/// coef0 by polynomial and sigmoid; degree by polynomial only. A polynomial
/// of degree 0 reduces to the plain dot product.
struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double gamma = 1.0;
    double coef0 = 0.0;
    int degree = 3;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// K(a_i, b_j) for all row pairs, computed through one matrix product.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const FeatureMatrix& a, const FeatureMatrix& b);

}  // namespace hsiga

#include "hsiga/kernel.hpp"

#include "hsiga/error.hpp"

#include <cmath>
#include <string>

namespace hsiga {

std::string_view to_string(KernelKind k) {
    switch (k) {
        case KernelKind::linear: return "linear";
        case KernelKind::rbf: return "rbf";
        case KernelKind::polynomial: return "polynomial";
        case KernelKind::sigmoid: return "sigmoid";
    }
    return "?";
}

KernelKind parse_kernel(std::string_view s) {
    if (s == "linear") return KernelKind::linear;
    if (s == "rbf") return KernelKind::rbf;
    if (s == "polynomial" || s == "poly") return KernelKind::polynomial;
    if (s == "sigmoid") return KernelKind::sigmoid;
    throw InvalidArgument("unknown kernel '" + std::string(s) + "'");
}

namespace {

double from_dot(const KernelSpec& spec, double dot) {
    switch (spec.kind) {
        case KernelKind::polynomial:
            if (spec.degree == 0) return dot;
            return std::pow(spec.gamma * dot + spec.coef0, spec.degree);
        case KernelKind::sigmoid: return std::tanh(spec.gamma * dot + spec.coef0);
        default: return dot;
    }
}

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw InvalidArgument("kernel arguments differ in length (" + std::to_string(x.size()) + " vs "
                              + std::to_string(y.size()) + ")");
    if (spec.kind == KernelKind::rbf) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double d = x[k] - y[k];
            d2 += d * d;
        }
        return std::exp(-spec.gamma * d2);
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) dot += x[k] * y[k];
    return from_dot(spec, dot);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const FeatureMatrix& a, const FeatureMatrix& b) {
    if (a.cols() != b.cols()) throw InvalidArgument("kernel_matrix: feature dimension mismatch");
    Eigen::MatrixXd k = a * b.transpose();
    if (spec.kind == KernelKind::rbf) {
        const Eigen::VectorXd na = a.rowwise().squaredNorm();
        const Eigen::VectorXd nb = b.rowwise().squaredNorm();
        for (Eigen::Index j = 0; j < k.cols(); ++j)
            for (Eigen::Index i = 0; i < k.rows(); ++i)
                k(i, j) = std::exp(-spec.gamma * std::max(0.0, na(i) + nb(j) - 2.0 * k(i, j)));
    } else if (spec.kind != KernelKind::linear) {
        k = k.unaryExpr([&spec](double d) { return from_dot(spec, d); });
    }
    return k;
}

}  // namespace hsiga

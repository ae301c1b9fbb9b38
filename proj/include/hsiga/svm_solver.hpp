#pragma once

#include "hsiga/kernel.hpp"
#include "hsiga/matrix.hpp"

#include <cstddef>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

namespace hsiga {

/// Signed kernel matrix Q_ij = y_i y_j K(x_i, x_j) + shift * [i == j] of a
/// binary problem. Small problems are stored densely; larger ones compute
/// columns on demand behind an LRU cache.
class QMatrix {
public:
    QMatrix(const FeatureMatrix& x, const KernelSpec& kernel, std::vector<signed char> y, double diag_shift = 0.0,
            std::size_t cache_bytes = std::size_t{256} << 20);
    /// Dense Q from a precomputed kernel over a superset; `rows` picks the members.
    QMatrix(const Eigen::MatrixXd& kernel_full, std::span<const std::size_t> rows, std::vector<signed char> y,
            double diag_shift = 0.0);

    std::size_t size() const noexcept { return y_.size(); }
    signed char y(std::size_t i) const noexcept { return y_[i]; }
    double diag(std::size_t i) const noexcept { return diag_[i]; }
    const double* column(std::size_t i);

private:
    std::vector<signed char> y_;
    std::vector<double> diag_;
    double shift_ = 0.0;
    Eigen::MatrixXd dense_;
    bool is_dense_ = false;

    // cached mode
    const FeatureMatrix* x_ = nullptr;
    KernelSpec kernel_;
    std::size_t capacity_ = 0;
    std::list<std::size_t> lru_;
    std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>> cache_;
};

struct SolverOptions {
    double eps = 1e-3;          // KKT violation tolerance
    std::size_t max_iter = 0;   // 0 = 10^4 * n
};

struct DualResult {
    std::vector<double> alpha;  // solution of the problem as posed (before any rescaling)
    double objective = 0.0;     // 0.5 a'Qa + p'a at alpha
    double rho = 0.0;
    double r = 1.0;             // nu problems only: margin scale used to rescale the solution
    std::size_t iterations = 0;
    bool converged = true;
};

/// min 0.5 a'Qa + p'a  s.t.  y'a = 0,  0 <= a_i <= upper_i.
/// `upper` may hold +infinity. Starts from alpha = 0.
DualResult solve_c_dual(QMatrix& q, std::span<const double> p, std::span<const double> upper,
                        const SolverOptions& options = {});

/// min 0.5 a'Qa  s.t.  y'a = 0,  sum a = nu * n,  0 <= a_i <= 1.
/// Throws InfeasibleNu when nu * n / 2 exceeds either class count.
DualResult solve_nu_dual(QMatrix& q, double nu, const SolverOptions& options = {});

}  // namespace hsiga

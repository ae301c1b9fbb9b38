#include "hsiga/svm_solver.hpp"

#include "hsiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

namespace hsiga {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTau = 1e-12;

}  // namespace

QMatrix::QMatrix(const FeatureMatrix& x, const KernelSpec& kernel, std::vector<signed char> y, double diag_shift,
                 std::size_t cache_bytes)
    : y_(std::move(y)), shift_(diag_shift), x_(&x), kernel_(kernel) {
    const auto n = y_.size();
    if (static_cast<std::size_t>(x.rows()) != n) throw InvalidArgument("QMatrix: label count != sample count");
    diag_.resize(n);
    if (n * n * sizeof(double) <= cache_bytes) {
        dense_ = kernel_matrix(kernel, x, x);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) dense_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *= y_[i] * y_[j];
        dense_.diagonal().array() += shift_;
        for (std::size_t i = 0; i < n; ++i) diag_[i] = dense_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        is_dense_ = true;
        x_ = nullptr;
        return;
    }
    capacity_ = std::max<std::size_t>(2, cache_bytes / (n * sizeof(double)));
    for (std::size_t i = 0; i < n; ++i) diag_[i] = kernel_eval(kernel, row_span(x, static_cast<Eigen::Index>(i)), row_span(x, static_cast<Eigen::Index>(i))) + shift_;
}

QMatrix::QMatrix(const Eigen::MatrixXd& kernel_full, std::span<const std::size_t> rows, std::vector<signed char> y,
                 double diag_shift)
    : y_(std::move(y)), shift_(diag_shift) {
    const auto n = rows.size();
    if (y_.size() != n) throw InvalidArgument("QMatrix: label count != row count");
    dense_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    diag_.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            dense_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                y_[i] * y_[j] * kernel_full(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(rows[j]));
    dense_.diagonal().array() += shift_;
    for (std::size_t i = 0; i < n; ++i) diag_[i] = dense_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    is_dense_ = true;
}

const double* QMatrix::column(std::size_t i) {
    if (is_dense_) return dense_.data() + static_cast<Eigen::Index>(i) * dense_.rows();
    if (auto it = cache_.find(i); it != cache_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second.second);
        return it->second.first.data();
    }
    if (cache_.size() >= capacity_) {
        cache_.erase(lru_.back());
        lru_.pop_back();
    }
    const auto n = size();
    std::vector<double> col(n);
    const FeatureMatrix xi = x_->row(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd k = kernel_matrix(kernel_, *x_, xi);
    for (std::size_t r = 0; r < n; ++r) col[r] = y_[r] * y_[i] * k(static_cast<Eigen::Index>(r), 0);
    col[i] += shift_;
    lru_.push_front(i);
    auto [it, _] = cache_.emplace(i, std::make_pair(std::move(col), lru_.begin()));
    return it->second.first.data();
}

namespace {

class Smo {
public:
    Smo(QMatrix& q, std::span<const double> p, std::span<const double> upper, std::vector<double> alpha, bool nu,
        const SolverOptions& options)
        : q_(q), p_(p.begin(), p.end()), upper_(upper.begin(), upper.end()), alpha_(std::move(alpha)), nu_(nu),
          options_(options), n_(q.size()) {
        grad_ = p_;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] == 0.0) continue;
            const double* qi = q_.column(i);
            for (std::size_t k = 0; k < n_; ++k) grad_[k] += alpha_[i] * qi[k];
        }
    }

    DualResult run() {
        const std::size_t cap = options_.max_iter ? options_.max_iter : std::max<std::size_t>(10000 * n_, 10000);
        DualResult out;
        out.converged = false;
        std::size_t iter = 0;
        while (iter < cap) {
            std::size_t i = 0, j = 0;
            const bool optimal = nu_ ? select_nu(i, j) : select_c(i, j);
            if (optimal) {
                out.converged = true;
                break;
            }
            ++iter;
            update(i, j);
        }
        if (!out.converged)
            std::cerr << "warning: SMO iteration cap (" << cap << ") reached before KKT tolerance " << options_.eps
                      << "\n";
        out.iterations = iter;
        if (nu_) {
            compute_rho_nu(out.rho, out.r);
        } else {
            out.rho = compute_rho_c();
        }
        double obj = 0.0;
        for (std::size_t i = 0; i < n_; ++i) obj += alpha_[i] * (grad_[i] + p_[i]);
        out.objective = obj / 2.0;
        out.alpha = std::move(alpha_);
        return out;
    }

private:
    bool at_upper(std::size_t i) const { return alpha_[i] >= upper_[i]; }
    bool at_lower(std::size_t i) const { return alpha_[i] <= 0.0; }

    // Second-order working-set selection over the single equality constraint.
    bool select_c(std::size_t& out_i, std::size_t& out_j) {
        double gmax = -kInf, gmax2 = -kInf;
        std::ptrdiff_t gmax_idx = -1, gmin_idx = -1;
        double obj_diff_min = kInf;
        for (std::size_t t = 0; t < n_; ++t) {
            if (q_.y(t) == +1) {
                if (!at_upper(t) && -grad_[t] >= gmax) {
                    gmax = -grad_[t];
                    gmax_idx = static_cast<std::ptrdiff_t>(t);
                }
            } else if (!at_lower(t) && grad_[t] >= gmax) {
                gmax = grad_[t];
                gmax_idx = static_cast<std::ptrdiff_t>(t);
            }
        }
        if (gmax_idx < 0) return true;
        const auto i = static_cast<std::size_t>(gmax_idx);
        const double* qi = q_.column(i);
        for (std::size_t j = 0; j < n_; ++j) {
            if (q_.y(j) == +1) {
                if (at_lower(j)) continue;
                const double grad_diff = gmax + grad_[j];
                gmax2 = std::max(gmax2, grad_[j]);
                if (grad_diff > 0) {
                    const double quad = q_.diag(i) + q_.diag(j) - 2.0 * q_.y(i) * qi[j];
                    const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
                    if (obj <= obj_diff_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(j);
                        obj_diff_min = obj;
                    }
                }
            } else {
                if (at_upper(j)) continue;
                const double grad_diff = gmax - grad_[j];
                gmax2 = std::max(gmax2, -grad_[j]);
                if (grad_diff > 0) {
                    const double quad = q_.diag(i) + q_.diag(j) + 2.0 * q_.y(i) * qi[j];
                    const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
                    if (obj <= obj_diff_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(j);
                        obj_diff_min = obj;
                    }
                }
            }
        }
        if (gmax + gmax2 < options_.eps || gmin_idx < 0) return true;
        out_i = i;
        out_j = static_cast<std::size_t>(gmin_idx);
        return false;
    }

    // Same selection restricted to pairs of equal label, which keeps both
    // equality constraints satisfied.
    bool select_nu(std::size_t& out_i, std::size_t& out_j) {
        double gmaxp = -kInf, gmaxp2 = -kInf, gmaxn = -kInf, gmaxn2 = -kInf;
        std::ptrdiff_t gmaxp_idx = -1, gmaxn_idx = -1, gmin_idx = -1;
        double obj_diff_min = kInf;
        for (std::size_t t = 0; t < n_; ++t) {
            if (q_.y(t) == +1) {
                if (!at_upper(t) && -grad_[t] >= gmaxp) {
                    gmaxp = -grad_[t];
                    gmaxp_idx = static_cast<std::ptrdiff_t>(t);
                }
            } else if (!at_lower(t) && grad_[t] >= gmaxn) {
                gmaxn = grad_[t];
                gmaxn_idx = static_cast<std::ptrdiff_t>(t);
            }
        }
        const double* qip = gmaxp_idx >= 0 ? q_.column(static_cast<std::size_t>(gmaxp_idx)) : nullptr;
        const double* qin = gmaxn_idx >= 0 ? q_.column(static_cast<std::size_t>(gmaxn_idx)) : nullptr;
        // column() may evict in cached mode; re-fetch keeps both pointers valid
        // because capacity is at least two and qin was fetched last.
        if (qip && qin) qip = q_.column(static_cast<std::size_t>(gmaxp_idx));
        if (qip && qin) qin = q_.column(static_cast<std::size_t>(gmaxn_idx));
        for (std::size_t j = 0; j < n_; ++j) {
            if (q_.y(j) == +1) {
                if (at_lower(j)) continue;
                const double grad_diff = gmaxp + grad_[j];
                gmaxp2 = std::max(gmaxp2, grad_[j]);
                if (grad_diff > 0 && qip) {
                    const auto ip = static_cast<std::size_t>(gmaxp_idx);
                    const double quad = q_.diag(ip) + q_.diag(j) - 2.0 * qip[j];
                    const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
                    if (obj <= obj_diff_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(j);
                        obj_diff_min = obj;
                    }
                }
            } else {
                if (at_upper(j)) continue;
                const double grad_diff = gmaxn - grad_[j];
                gmaxn2 = std::max(gmaxn2, -grad_[j]);
                if (grad_diff > 0 && qin) {
                    const auto in = static_cast<std::size_t>(gmaxn_idx);
                    const double quad = q_.diag(in) + q_.diag(j) - 2.0 * qin[j];
                    const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
                    if (obj <= obj_diff_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(j);
                        obj_diff_min = obj;
                    }
                }
            }
        }
        if (std::max(gmaxp + gmaxp2, gmaxn + gmaxn2) < options_.eps || gmin_idx < 0) return true;
        out_j = static_cast<std::size_t>(gmin_idx);
        out_i = static_cast<std::size_t>(q_.y(out_j) == +1 ? gmaxp_idx : gmaxn_idx);
        return false;
    }

    void update(std::size_t i, std::size_t j) {
        const double* qi = q_.column(i);
        const double* qj = q_.column(j);
        qi = q_.column(i);  // keep both resident in cached mode
        const double ci = upper_[i], cj = upper_[j];
        const double old_ai = alpha_[i], old_aj = alpha_[j];
        double& ai = alpha_[i];
        double& aj = alpha_[j];
        if (q_.y(i) != q_.y(j)) {
            double quad = q_.diag(i) + q_.diag(j) + 2.0 * qi[j];
            if (quad <= 0) quad = kTau;
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0) {
                if (aj < 0) {
                    aj = 0;
                    ai = diff;
                }
            } else if (ai < 0) {
                ai = 0;
                aj = -diff;
            }
            const double bound_gap = ci == cj ? 0.0 : ci - cj;
            if (diff > bound_gap) {
                if (ai > ci) {
                    ai = ci;
                    aj = ci - diff;
                }
            } else if (aj > cj) {
                aj = cj;
                ai = cj + diff;
            }
        } else {
            double quad = q_.diag(i) + q_.diag(j) - 2.0 * qi[j];
            if (quad <= 0) quad = kTau;
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > ci) {
                if (ai > ci) {
                    ai = ci;
                    aj = sum - ci;
                }
            } else if (aj < 0) {
                aj = 0;
                ai = sum;
            }
            if (sum > cj) {
                if (aj > cj) {
                    aj = cj;
                    ai = sum - cj;
                }
            } else if (ai < 0) {
                ai = 0;
                aj = sum;
            }
        }
        const double dai = ai - old_ai, daj = aj - old_aj;
        for (std::size_t k = 0; k < n_; ++k) grad_[k] += qi[k] * dai + qj[k] * daj;
    }

    double compute_rho_c() const {
        double ub = kInf, lb = -kInf, sum_free = 0.0;
        std::size_t nr_free = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double yg = q_.y(i) * grad_[i];
            if (at_upper(i)) {
                if (q_.y(i) == -1) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (at_lower(i)) {
                if (q_.y(i) == +1) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++nr_free;
                sum_free += yg;
            }
        }
        if (nr_free > 0) return sum_free / static_cast<double>(nr_free);
        if (std::isinf(ub)) return lb;
        if (std::isinf(lb)) return ub;
        return (ub + lb) / 2.0;
    }

    void compute_rho_nu(double& rho, double& r) const {
        std::size_t free1 = 0, free2 = 0;
        double ub1 = kInf, ub2 = kInf, lb1 = -kInf, lb2 = -kInf, sum1 = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const bool pos = q_.y(i) == +1;
            double& ub = pos ? ub1 : ub2;
            double& lb = pos ? lb1 : lb2;
            if (at_upper(i)) {
                lb = std::max(lb, grad_[i]);
            } else if (at_lower(i)) {
                ub = std::min(ub, grad_[i]);
            } else {
                (pos ? free1 : free2)++;
                (pos ? sum1 : sum2) += grad_[i];
            }
        }
        auto mid = [](std::size_t nfree, double sum, double ub, double lb) {
            if (nfree > 0) return sum / static_cast<double>(nfree);
            if (std::isinf(ub)) return lb;
            if (std::isinf(lb)) return ub;
            return (ub + lb) / 2.0;
        };
        const double r1 = mid(free1, sum1, ub1, lb1);
        const double r2 = mid(free2, sum2, ub2, lb2);
        r = (r1 + r2) / 2.0;
        rho = (r1 - r2) / 2.0;
    }

    QMatrix& q_;
    std::vector<double> p_;
    std::vector<double> upper_;
    std::vector<double> alpha_;
    bool nu_;
    SolverOptions options_;
    std::size_t n_;
    std::vector<double> grad_;
};

}  // namespace

DualResult solve_c_dual(QMatrix& q, std::span<const double> p, std::span<const double> upper,
                        const SolverOptions& options) {
    const auto n = q.size();
    if (p.size() != n || upper.size() != n) throw InvalidArgument("solve_c_dual: size mismatch");
    return Smo(q, p, upper, std::vector<double>(n, 0.0), false, options).run();
}

DualResult solve_nu_dual(QMatrix& q, double nu, const SolverOptions& options) {
    const auto n = q.size();
    if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("nu must lie in (0, 1]");
    std::size_t npos = 0;
    for (std::size_t i = 0; i < n; ++i) npos += q.y(i) == +1;
    const std::size_t nneg = n - npos;
    const double half = nu * static_cast<double>(n) / 2.0;
    if (half > static_cast<double>(std::min(npos, nneg)))
        throw InfeasibleNu("nu = " + std::to_string(nu) + " is infeasible for a subproblem with "
                           + std::to_string(npos) + "/" + std::to_string(nneg)
                           + " examples (requires nu <= 2*min/n)");
    std::vector<double> alpha(n, 0.0);
    double sum_pos = half, sum_neg = half;
    for (std::size_t i = 0; i < n; ++i) {
        double& budget = q.y(i) == +1 ? sum_pos : sum_neg;
        alpha[i] = std::min(1.0, budget);
        budget -= alpha[i];
    }
    const std::vector<double> p(n, 0.0), upper(n, 1.0);
    return Smo(q, p, upper, std::move(alpha), true, options).run();
}

}  // namespace hsiga

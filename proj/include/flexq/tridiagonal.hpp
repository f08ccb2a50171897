#ifndef FLEXQ_TRIDIAGONAL_HPP
#define FLEXQ_TRIDIAGONAL_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "flexq/errors.hpp"

namespace flexq {

/// Tridiagonal system in the three-vector form: sub[i] multiplies x[i-1],
/// diag[i] multiplies x[i], sup[i] multiplies x[i+1].  sub[0] and sup[n-1]
/// are ignored.  Solved by the Thomas algorithm; the policy-evaluation
/// systems built here are strictly diagonally dominant, so no pivoting.
struct Tridiagonal {
    std::vector<double> sub, diag, sup;

    explicit Tridiagonal(size_t n) : sub(n, 0.0), diag(n, 0.0), sup(n, 0.0) {}
    size_t size() const { return diag.size(); }

    std::vector<double> solve(std::vector<double> rhs) const {
        const size_t n = size();
        std::vector<double> cp(n, 0.0);
        double den = diag[0];
        if (std::abs(den) < 1e-300) throw SingularSystem("tridiagonal pivot underflow at row 0");
        cp[0] = sup[0] / den;
        rhs[0] /= den;
        for (size_t i = 1; i < n; ++i) {
            den = diag[i] - sub[i] * cp[i - 1];
            if (std::abs(den) < 1e-300) throw SingularSystem("tridiagonal pivot underflow");
            cp[i] = sup[i] / den;
            rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / den;
        }
        for (size_t i = n - 1; i-- > 0;)
            rhs[i] -= cp[i] * rhs[i + 1];
        return rhs;
    }

    /// Solves (A + u e_k^T) x = rhs via Sherman-Morrison, where u is a dense
    /// column vector.  Used by the anchored policy evaluation, whose gain
    /// term couples one unknown into every row.
    std::vector<double> solve_rank1(const std::vector<double>& rhs,
                                    const std::vector<double>& u, size_t k) const {
        std::vector<double> y = solve(rhs);
        std::vector<double> z = solve(u);
        const double denom = 1.0 + z[k];
        if (std::abs(denom) < 1e-300) throw SingularSystem("rank-1 update denominator underflow");
        const double f = y[k] / denom;
        for (size_t i = 0; i < y.size(); ++i) y[i] -= f * z[i];
        return y;
    }
};

} // namespace flexq

#endif

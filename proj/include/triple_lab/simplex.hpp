#pragma once

// Dense primal simplex for   maximize c.x  subject to  A x <= b, x >= 0,
// with b >= 0 so the slack basis is feasible. Condensed (Tucker) tableau
// holding only the nonbasic columns. Entering variable by Dantzig's rule;
// after a run of degenerate pivots the method switches to Bland's rule for
// both choices (which cannot cycle) until the objective moves again.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "triple_lab/errors.hpp"

namespace triple_lab {

enum class LpStatus { optimal, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::optimal;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

struct SimplexOptions {
    double eps = 1e-12;
    double pivot_tol = 1e-9;
    std::size_t max_pivots = 200000;
    std::size_t degenerate_run = 50;
};

/// `a` is row-major m x n.
inline LpResult simplex_maximize(const std::vector<double>& c, const std::vector<double>& a,
                                 const std::vector<double>& b, const SimplexOptions& opts = {}) {
    const std::size_t n = c.size();
    const std::size_t m = b.size();
    if (a.size() != m * n) {
        throw UsageError("simplex_maximize: constraint matrix has wrong size");
    }
    for (double bi : b) {
        if (!(bi >= 0.0)) {
            throw UsageError("simplex_maximize: right-hand side must be non-negative");
        }
    }

    const std::size_t w = n + 1; // row width, last column is the right-hand side
    std::vector<double> t((m + 1) * w);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            t[i * w + j] = a[i * n + j];
        }
        t[i * w + n] = b[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        t[m * w + j] = -c[j];
    }

    // variable labels: 0..n-1 structural, n..n+m-1 slack
    std::vector<std::size_t> basic(m);
    std::vector<std::size_t> nonbasic(n);
    for (std::size_t i = 0; i < m; ++i) {
        basic[i] = n + i;
    }
    for (std::size_t j = 0; j < n; ++j) {
        nonbasic[j] = j;
    }

    LpResult out;
    std::size_t degenerate = 0;
    for (;;) {
        const bool bland = degenerate >= opts.degenerate_run;
        std::size_t enter = n;
        for (std::size_t j = 0; j < n; ++j) {
            const double rc = t[m * w + j];
            if (rc >= -opts.eps) {
                continue;
            }
            if (enter == n || (bland ? nonbasic[j] < nonbasic[enter] : rc < t[m * w + enter])) {
                enter = j;
            }
        }
        if (enter == n) {
            break;
        }
        std::size_t leave = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            const double piv = t[i * w + enter];
            if (piv > opts.pivot_tol) {
                const double ratio = t[i * w + n] / piv;
                if (ratio < best_ratio || (ratio == best_ratio && basic[i] < basic[leave])) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave == m) {
            out.status = LpStatus::unbounded;
            return out;
        }
        if (out.pivots >= opts.max_pivots) {
            out.status = LpStatus::iteration_limit;
            return out;
        }

        degenerate = best_ratio <= 0.0 ? degenerate + 1 : 0;
        const double p = t[leave * w + enter];
        double* prow = &t[leave * w];
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave) {
                continue;
            }
            double* row = &t[i * w];
            const double f = row[enter] / p;
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < w; ++j) {
                if (j != enter) {
                    row[j] -= f * prow[j];
                }
            }
            row[enter] = -f;
        }
        for (std::size_t j = 0; j < w; ++j) {
            if (j != enter) {
                prow[j] /= p;
            }
        }
        prow[enter] = 1.0 / p;
        std::swap(basic[leave], nonbasic[enter]);
        ++out.pivots;
    }

    out.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basic[i] < n) {
            out.x[basic[i]] = std::max(0.0, t[i * w + n]);
        }
    }
    out.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        out.objective += c[j] * out.x[j];
    }
    return out;
}

} // namespace triple_lab

#pragma once

// Dense complex linear algebra shared by the triple, Möbius and operator-norm code.
// Matrices are small (dimension <= a few hundred); everything is a pure function.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "triple_lab/errors.hpp"

namespace triple_lab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct Spectrum {
    std::vector<Complex> eigenvalues;
    double max_residual = 0.0;
};

struct SolveOptions {
    /// Normwise backward error bound: ||m v - b|| <= tol (||m|| ||v|| + ||b||).
    double tol = 1e-12;
    /// Reciprocal condition estimate below which the matrix is declared singular.
    double min_rcond = 1e-14;
};

struct SqrtOptions {
    double residual_tol = 1e-10;
    double domain_tol = 1e-12;
    int max_iterations = 100;
};

inline bool all_finite(const CMatrix& m) {
    return m.allFinite();
}

inline CMatrix make_matrix(Eigen::Index rows, Eigen::Index cols, const std::vector<Complex>& row_major) {
    if (rows <= 0 || cols <= 0 || static_cast<std::size_t>(rows * cols) != row_major.size()) {
        throw UsageError("make_matrix: entry count does not match rows x cols");
    }
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = row_major[static_cast<std::size_t>(i * cols + j)];
        }
    }
    if (!all_finite(m)) {
        throw UsageError("make_matrix: non-finite entry");
    }
    return m;
}

inline CVector mat_apply(const CMatrix& m, const CVector& v) {
    if (m.cols() != v.size()) {
        throw UsageError("mat_apply: matrix has " + std::to_string(m.cols()) + " columns, vector has length " +
                         std::to_string(v.size()));
    }
    return m * v;
}

inline CVector solve_linear(const CMatrix& m, const CVector& b, const SolveOptions& opts = {}) {
    if (m.rows() != m.cols()) {
        throw UsageError("solve_linear: matrix is not square");
    }
    if (m.rows() != b.size()) {
        throw UsageError("solve_linear: right-hand side length mismatch");
    }
    Eigen::PartialPivLU<CMatrix> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > opts.min_rcond)) {
        throw SingularityError("solve_linear: matrix is singular to working precision",
                               rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
    }
    CVector v = lu.solve(b);
    // one step of iterative refinement
    CVector r = b - m * v;
    v += lu.solve(r);
    r = b - m * v;
    const double scale = m.norm() * v.norm() + b.norm();
    if (r.norm() > opts.tol * scale && r.norm() > 0.0) {
        throw NumericalFailure("solve_linear: residual " + std::to_string(r.norm() / scale) +
                               " exceeds tolerance");
    }
    return v;
}

inline CMatrix solve_linear_columns(const CMatrix& m, const CMatrix& b, const SolveOptions& opts = {}) {
    CMatrix out(m.cols(), b.cols());
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        out.col(j) = solve_linear(m, CVector(b.col(j)), opts);
    }
    return out;
}

inline CMatrix inverse(const CMatrix& m, const SolveOptions& opts = {}) {
    return solve_linear_columns(m, CMatrix(CMatrix::Identity(m.rows(), m.cols())), opts);
}

namespace detail {

inline void canonical_order(std::vector<Complex>& values) {
    std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) {
            return a.real() > b.real();
        }
        return a.imag() > b.imag();
    });
}

} // namespace detail

/// Eigenvalues ordered by descending real part, then descending imaginary part.
inline Spectrum spectrum(const CMatrix& m) {
    if (m.rows() != m.cols()) {
        throw UsageError("spectrum: matrix is not square");
    }
    Eigen::ComplexEigenSolver<CMatrix> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("spectrum: eigenvalue iteration did not converge");
    }
    Spectrum out;
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
        out.eigenvalues.push_back(vals(k));
        const CVector v = vecs.col(k);
        const double vn = v.norm();
        if (vn > 0.0) {
            const double res = (m * v - vals(k) * v).norm() / (scale * vn);
            out.max_residual = std::max(out.max_residual, res);
        }
    }
    detail::canonical_order(out.eigenvalues);
    return out;
}

inline double spectral_norm(const CMatrix& m) {
    if (!all_finite(m)) {
        throw NumericalFailure("spectral_norm: non-finite entries");
    }
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

namespace detail {

inline double relative_residual(const CMatrix& s, const CMatrix& m) {
    const double denom = std::max(m.norm(), std::numeric_limits<double>::min());
    return (s * s - m).norm() / denom;
}

inline CMatrix sqrt_by_eigendecomposition(const CMatrix& m) {
    Eigen::ComplexEigenSolver<CMatrix> solver(m, true);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("principal_sqrt: eigendecomposition did not converge");
    }
    const CMatrix& v = solver.eigenvectors();
    CVector d = solver.eigenvalues();
    for (Eigen::Index k = 0; k < d.size(); ++k) {
        d(k) = std::sqrt(d(k));
    }
    Eigen::PartialPivLU<CMatrix> lu(v);
    if (!(lu.rcond() > 1e-13)) {
        throw NumericalFailure("principal_sqrt: eigenvector basis is ill-conditioned");
    }
    return v * d.asDiagonal() * lu.inverse();
}

} // namespace detail

/// Principal square root by scaled Denman-Beavers iteration, with an
/// eigendecomposition fallback when the iteration stalls.
inline CMatrix principal_sqrt(const CMatrix& m, const SqrtOptions& opts = {}) {
    if (m.rows() != m.cols()) {
        throw UsageError("principal_sqrt: matrix is not square");
    }
    const Eigen::Index n = m.rows();
    const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
    for (const Complex& lambda : spectrum(m).eigenvalues) {
        if (lambda.real() <= opts.domain_tol * scale && std::abs(lambda.imag()) <= opts.domain_tol * scale) {
            throw DomainError("principal_sqrt: spectrum meets the closed negative real axis");
        }
    }

    CMatrix y = m;
    CMatrix z = CMatrix::Identity(n, n);
    bool scaling = true;
    double prev_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::PartialPivLU<CMatrix> lu_y(y);
        Eigen::PartialPivLU<CMatrix> lu_z(z);
        if (!(lu_y.rcond() > 1e-15) || !(lu_z.rcond() > 1e-15)) {
            break;
        }
        double mu = 1.0;
        if (scaling) {
            const double logdet = std::log(std::abs(lu_y.determinant())) + std::log(std::abs(lu_z.determinant()));
            mu = std::exp(-logdet / (2.0 * static_cast<double>(n)));
            if (!std::isfinite(mu)) {
                mu = 1.0;
            }
        }
        const CMatrix y_next = 0.5 * (mu * y + lu_z.inverse() / mu);
        const CMatrix z_next = 0.5 * (mu * z + lu_y.inverse() / mu);
        const double step = (y_next - y).norm() / std::max(y_next.norm(), std::numeric_limits<double>::min());
        y = y_next;
        z = z_next;
        if (step < 1e-2) {
            scaling = false;
        }
        // quadratic convergence has ended once the step stops shrinking
        if (step < 1e-15 || (!scaling && step < 1e-10 && step >= prev_step)) {
            break;
        }
        prev_step = step;
    }
    if (y.allFinite() && detail::relative_residual(y, m) <= opts.residual_tol) {
        return y;
    }
    CMatrix s = detail::sqrt_by_eigendecomposition(m);
    if (!s.allFinite() || detail::relative_residual(s, m) > opts.residual_tol) {
        throw NumericalFailure("principal_sqrt: residual above tolerance after fallback");
    }
    return s;
}

} // namespace triple_lab

#pragma once

// Finite-dimensional JB*-triples: the disc C, Hilbert spaces C^n and
// rectangular matrices C^{p x q}, with their triple products and the
// operators x□y, Q_x, B(x,y) and B_x written as matrices in canonical
// coordinates.
//
// Canonical bases: disc {1}; hilbert(n) the standard basis; matrix(p,q) the
// matrix units E_ij in row-major order. All bases are fixed by coordinate
// conjugation, so an antilinear map T is stored as the matrix M with
// T(v) = M * conj(v).

#include <charconv>
#include <complex>
#include <cstddef>
#include <random>
#include <string>
#include <string_view>

#include "triple_lab/errors.hpp"
#include "triple_lab/numeric.hpp"

namespace triple_lab {

enum class ModelKind { disc, hilbert, matrix };
enum class NormKind { modulus, euclidean, spectral };

class TripleModel {
public:
    static TripleModel disc() { return TripleModel(ModelKind::disc, 1, 1); }

    static TripleModel hilbert(int n) {
        if (n < 1) {
            throw UsageError("hilbert model needs dimension >= 1");
        }
        return TripleModel(ModelKind::hilbert, n, 1);
    }

    static TripleModel matrix(int p, int q) {
        if (p < 1 || q < 1) {
            throw UsageError("matrix model needs p, q >= 1");
        }
        return TripleModel(ModelKind::matrix, p, q);
    }

    /// Parses "disc", "hilbert:N" or "matrix:PxQ".
    static TripleModel parse(std::string_view text);

    ModelKind kind() const noexcept { return kind_; }
    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int coord_dim() const noexcept { return rows_ * cols_; }

    NormKind norm_kind() const noexcept {
        switch (kind_) {
        case ModelKind::disc: return NormKind::modulus;
        case ModelKind::hilbert: return NormKind::euclidean;
        case ModelKind::matrix: return NormKind::spectral;
        }
        return NormKind::modulus;
    }

    /// True when the triple norm is a Hilbert norm on coordinates, so operator
    /// norms are plain largest singular values.
    bool has_euclidean_norm() const noexcept { return kind_ != ModelKind::matrix; }

    std::string descriptor() const {
        switch (kind_) {
        case ModelKind::disc: return "disc";
        case ModelKind::hilbert: return "hilbert:" + std::to_string(rows_);
        case ModelKind::matrix: return "matrix:" + std::to_string(rows_) + "x" + std::to_string(cols_);
        }
        return {};
    }

    friend bool operator==(const TripleModel&, const TripleModel&) = default;

private:
    TripleModel(ModelKind kind, int rows, int cols) : kind_(kind), rows_(rows), cols_(cols) {}

    ModelKind kind_;
    int rows_;
    int cols_;
};

namespace detail {

inline int parse_positive_int(std::string_view s, std::string_view what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value < 1) {
        throw UsageError("bad " + std::string(what) + " '" + std::string(s) + "'");
    }
    return value;
}

} // namespace detail

inline TripleModel TripleModel::parse(std::string_view text) {
    if (text == "disc") {
        return disc();
    }
    if (text.starts_with("hilbert:")) {
        return hilbert(detail::parse_positive_int(text.substr(8), "dimension"));
    }
    if (text.starts_with("matrix:")) {
        const std::string_view dims = text.substr(7);
        const auto x = dims.find('x');
        if (x == std::string_view::npos) {
            throw UsageError("model descriptor: expected matrix:PxQ, got '" + std::string(text) + "'");
        }
        return matrix(detail::parse_positive_int(dims.substr(0, x), "row count"),
                      detail::parse_positive_int(dims.substr(x + 1), "column count"));
    }
    throw UsageError("unknown model descriptor '" + std::string(text) + "'");
}

/// An element of a triple model, stored as its canonical coordinate vector.
struct TripleElement {
    TripleModel model;
    CVector coords;

    TripleElement(TripleModel m, CVector c) : model(m), coords(std::move(c)) {
        if (coords.size() != model.coord_dim()) {
            throw UsageError("TripleElement: coordinate length does not match model " + model.descriptor());
        }
        if (!coords.allFinite()) {
            throw UsageError("TripleElement: non-finite coordinate");
        }
    }

    static TripleElement zero(const TripleModel& m) { return {m, CVector::Zero(m.coord_dim())}; }

    static TripleElement basis(const TripleModel& m, int k) {
        CVector c = CVector::Zero(m.coord_dim());
        c(k) = 1.0;
        return {m, std::move(c)};
    }

    /// Scalar multiple of the first basis vector (1, e_1 or E_11).
    static TripleElement along_first(const TripleModel& m, Complex t) {
        CVector c = CVector::Zero(m.coord_dim());
        c(0) = t;
        return {m, std::move(c)};
    }

    /// Matrix-model view: p x q matrix with row-major coordinates.
    CMatrix as_matrix() const {
        CMatrix out(model.rows(), model.cols());
        for (int i = 0; i < model.rows(); ++i) {
            for (int j = 0; j < model.cols(); ++j) {
                out(i, j) = coords(i * model.cols() + j);
            }
        }
        return out;
    }

    static TripleElement from_matrix(const TripleModel& m, const CMatrix& a) {
        CVector c(m.coord_dim());
        for (int i = 0; i < m.rows(); ++i) {
            for (int j = 0; j < m.cols(); ++j) {
                c(i * m.cols() + j) = a(i, j);
            }
        }
        return {m, std::move(c)};
    }

    TripleElement operator-() const { return {model, -coords}; }
    friend TripleElement operator*(Complex s, const TripleElement& x) { return {x.model, s * x.coords}; }
    friend TripleElement operator+(const TripleElement& a, const TripleElement& b) {
        if (!(a.model == b.model)) {
            throw UsageError("element sum across different models");
        }
        return {a.model, a.coords + b.coords};
    }
    friend TripleElement operator-(const TripleElement& a, const TripleElement& b) { return a + (-b); }
};

inline void require_same_model(const TripleElement& a, const TripleElement& b, const char* op) {
    if (!(a.model == b.model)) {
        throw UsageError(std::string(op) + ": elements belong to different models (" + a.model.descriptor() +
                         " vs " + b.model.descriptor() + ")");
    }
}

inline double triple_norm(const TripleElement& x) {
    switch (x.model.kind()) {
    case ModelKind::disc: return std::abs(x.coords(0));
    case ModelKind::hilbert: return x.coords.norm();
    case ModelKind::matrix: return spectral_norm(x.as_matrix());
    }
    return 0.0;
}

/// (x|y), linear in x and conjugate-linear in y.
inline Complex inner(const CVector& x, const CVector& y) {
    return y.dot(x); // Eigen's dot conjugates its left operand
}

namespace detail {

// One of the two terms of the symmetric triple product: xy*z (matrix),
// (x|y)z (Hilbert), x conj(y) z (disc).
inline CVector half_product(const TripleElement& x, const TripleElement& y, const TripleElement& z) {
    switch (x.model.kind()) {
    case ModelKind::disc: {
        CVector out(1);
        out(0) = x.coords(0) * std::conj(y.coords(0)) * z.coords(0);
        return out;
    }
    case ModelKind::hilbert: return inner(x.coords, y.coords) * z.coords;
    case ModelKind::matrix: {
        const CMatrix prod = (x.as_matrix() * y.as_matrix().adjoint()) * z.as_matrix();
        return TripleElement::from_matrix(x.model, prod).coords;
    }
    }
    return {};
}

} // namespace detail

/// {x,y,z} = (xy*z + zy*x)/2, evaluated so that swapping x and z is bitwise exact.
inline TripleElement triple_product(const TripleElement& x, const TripleElement& y, const TripleElement& z) {
    require_same_model(x, y, "triple_product");
    require_same_model(x, z, "triple_product");
    return {x.model, 0.5 * (detail::half_product(x, y, z) + detail::half_product(z, y, x))};
}

/// Matrix of z -> {x,y,z}.
inline CMatrix box_rep(const TripleElement& x, const TripleElement& y) {
    require_same_model(x, y, "box_rep");
    const int n = x.model.coord_dim();
    CMatrix out(n, n);
    for (int k = 0; k < n; ++k) {
        out.col(k) = triple_product(x, y, TripleElement::basis(x.model, k)).coords;
    }
    return out;
}

/// Q_x(z) = {x,z,x} as an antilinear map: Q_x(z) = matrix * conj(z).
struct AntilinearRep {
    CMatrix matrix;

    CVector apply(const CVector& v) const { return matrix * v.conjugate(); }

    /// Q_x Q_y is linear with matrix M_x conj(M_y).
    CMatrix compose_linear(const AntilinearRep& other) const { return matrix * other.matrix.conjugate(); }
};

inline AntilinearRep quadratic_rep(const TripleElement& x) {
    const int n = x.model.coord_dim();
    CMatrix out(n, n);
    for (int k = 0; k < n; ++k) {
        out.col(k) = triple_product(x, TripleElement::basis(x.model, k), x).coords;
    }
    return {std::move(out)};
}

/// B(x,y) = id - 2 x□y + Q_x Q_y.
inline CMatrix bergman_rep(const TripleElement& x, const TripleElement& y) {
    require_same_model(x, y, "bergman_rep");
    const int n = x.model.coord_dim();
    return CMatrix::Identity(n, n) - 2.0 * box_rep(x, y) + quadratic_rep(x).compose_linear(quadratic_rep(y));
}

/// B_a = B(a,a)^{1/2}, defined on the open unit ball.
inline CMatrix bergman_sqrt(const TripleElement& a) {
    if (!(triple_norm(a) < 1.0)) {
        throw DomainError("bergman_sqrt: element norm " + std::to_string(triple_norm(a)) + " is not below 1");
    }
    return principal_sqrt(bergman_rep(a, a));
}

/// Coordinates i.i.d. complex standard normal, rescaled to the given triple norm.
template <typename Rng>
TripleElement random_element(const TripleModel& m, Rng& rng, double target_norm) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    CVector c(m.coord_dim());
    for (int k = 0; k < c.size(); ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        c(k) = Complex(re, im);
    }
    TripleElement x{m, std::move(c)};
    const double n = triple_norm(x);
    if (n == 0.0) {
        return TripleElement::along_first(m, target_norm);
    }
    return (target_norm / n) * x;
}

} // namespace triple_lab

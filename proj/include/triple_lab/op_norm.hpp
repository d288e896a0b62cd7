#pragma once

// Operator norms with respect to the triple norm. For the disc and Hilbert
// models this is the largest singular value of the coordinate matrix. For the
// matrix model (spectral norm on C^{p x q}) no closed form exists; we return a
// lower bound attained by an explicit witness and mark it uncertified.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "triple_lab/parallel.hpp"
#include "triple_lab/random.hpp"
#include "triple_lab/triple.hpp"

namespace triple_lab {

struct SamplingBudget {
    std::size_t samples = 10000;
    int ascent_steps = 100;
    /// Number of best random samples used as ascent starting points.
    int ascent_starts = 4;
    std::uint64_t seed = 0;
};

struct OpNormEstimate {
    double estimate = 0.0;
    TripleElement witness;
    bool certified = false;
};

namespace detail {

inline double image_norm(const CMatrix& op, const TripleElement& z) {
    return triple_norm(TripleElement{z.model, op * z.coords});
}

// One step of dual ascent for sup ||op z|| over the spectral-norm sphere.
// With y = op z and (u, v) its top singular pair, the linear functional
// w -> Re <u v*, w> norms y. The unit-spectral-norm maximiser of
// Re <op^H (u v*), z'> is the polar factor of G = op^H (u v*), and the value
// never decreases along the iteration.
inline TripleElement spectral_ascent_step(const CMatrix& op, const TripleElement& z) {
    const TripleModel& m = z.model;
    const CMatrix y = TripleElement{m, op * z.coords}.as_matrix();
    Eigen::JacobiSVD<CMatrix> svd_y(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CMatrix w = svd_y.matrixU().col(0) * svd_y.matrixV().col(0).adjoint();
    const CVector g_coords = op.adjoint() * TripleElement::from_matrix(m, w).coords;
    const CMatrix g = TripleElement{m, g_coords}.as_matrix();
    Eigen::JacobiSVD<CMatrix> svd_g(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CMatrix polar = svd_g.matrixU() * svd_g.matrixV().adjoint();
    TripleElement next = TripleElement::from_matrix(m, polar);
    const double n = triple_norm(next);
    if (!(n > 0.0)) {
        return z;
    }
    return (1.0 / n) * next;
}

} // namespace detail

inline OpNormEstimate op_norm_triple(const CMatrix& op, const TripleModel& model, const SamplingBudget& budget = {}) {
    const int n = model.coord_dim();
    if (op.rows() != n || op.cols() != n) {
        throw UsageError("op_norm_triple: operator is not square of the model's coordinate dimension");
    }
    if (model.has_euclidean_norm()) {
        Eigen::JacobiSVD<CMatrix> svd(op, Eigen::ComputeFullV);
        return {svd.singularValues()(0), TripleElement{model, svd.matrixV().col(0)}, true};
    }

    const std::size_t count = std::max<std::size_t>(budget.samples, 1);
    std::vector<double> values(count);
    parallel_for(count, [&](std::size_t i) {
        auto rng = derive_stream(budget.seed, 0x6f70u, i);
        values[i] = detail::image_norm(op, random_element(model, rng, 1.0));
    });

    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) {
        order[i] = i;
    }
    const std::size_t starts = std::min<std::size_t>(std::max(budget.ascent_starts, 1), count);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                      [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });

    auto regenerate = [&](std::size_t i) {
        auto rng = derive_stream(budget.seed, 0x6f70u, i);
        return random_element(model, rng, 1.0);
    };

    OpNormEstimate best{values[order[0]], regenerate(order[0]), false};
    for (std::size_t s = 0; s < starts; ++s) {
        TripleElement z = regenerate(order[s]);
        double value = values[order[s]];
        for (int step = 0; step < budget.ascent_steps; ++step) {
            TripleElement candidate = detail::spectral_ascent_step(op, z);
            const double cv = detail::image_norm(op, candidate);
            if (!(cv > value * (1.0 + 1e-15))) {
                break;
            }
            z = std::move(candidate);
            value = cv;
        }
        if (value > best.estimate) {
            best = {value, z, false};
        }
    }
    // report the value the witness actually attains
    best.estimate = detail::image_norm(op, best.witness);
    return best;
}

} // namespace triple_lab

#pragma once

// Möbius transformations of the open unit ball of a triple model.
//
// g_a(x) = a + B_a (id + x□a)^{-1} x
//
// In one variable this is (a + x) / (1 + conj(a) x). The equivalent
// quasi-inverse form a + B_a B(x,-a)^{-1} (x + Q_x(a)) and a truncated Neumann
// series a + B_a sum_n (-x□a)^n x are kept as independent cross-checks.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>

#include "triple_lab/op_norm.hpp"

namespace triple_lab {

class MobiusMap {
public:
    explicit MobiusMap(TripleElement center) : center_(std::move(center)) {
        if (!(triple_norm(center_) < 1.0)) {
            throw DomainError("MobiusMap: center norm " + std::to_string(triple_norm(center_)) + " is not below 1");
        }
        bergman_sqrt_ = std::make_shared<const CMatrix>(bergman_sqrt(center_));
    }

    const TripleElement& center() const noexcept { return center_; }
    const TripleModel& model() const noexcept { return center_.model; }
    const CMatrix& bergman_sqrt_matrix() const noexcept { return *bergman_sqrt_; }

    /// g_{-a}; shares B_{-a} = B_a.
    MobiusMap inverse() const { return MobiusMap(-center_, bergman_sqrt_); }

    TripleElement operator()(const TripleElement& x) const {
        check_argument(x);
        const int n = model().coord_dim();
        const CMatrix resolvent = CMatrix::Identity(n, n) + box_rep(x, center_);
        return {model(), center_.coords + *bergman_sqrt_ * solve(resolvent, x.coords)};
    }

    TripleElement apply_quasi_inverse(const TripleElement& x) const {
        check_argument(x);
        const CVector rhs = x.coords + quadratic_rep(x).apply(center_.coords);
        return {model(), center_.coords + *bergman_sqrt_ * solve(bergman_rep(x, -center_), rhs)};
    }

    /// Truncated series with `terms` + 1 summands; the tail is bounded by
    /// (||x|| ||a||)^{terms+1} / (1 - ||x|| ||a||) times ||x|| ||B_a||.
    TripleElement apply_series(const TripleElement& x, int terms = 64) const {
        check_argument(x);
        const CMatrix step = -box_rep(x, center_);
        CVector term = x.coords;
        CVector sum = term;
        for (int k = 0; k < terms; ++k) {
            term = step * term;
            sum += term;
        }
        return {model(), center_.coords + *bergman_sqrt_ * sum};
    }

private:
    MobiusMap(TripleElement center, std::shared_ptr<const CMatrix> cached)
        : center_(std::move(center)), bergman_sqrt_(std::move(cached)) {}

    void check_argument(const TripleElement& x) const {
        require_same_model(x, center_, "mobius_apply");
        if (!(triple_norm(x) < 1.0)) {
            throw DomainError("mobius_apply: argument norm " + std::to_string(triple_norm(x)) + " is not below 1");
        }
    }

    static CVector solve(const CMatrix& m, const CVector& b) {
        try {
            return solve_linear(m, b);
        } catch (const SingularityError& e) {
            throw NumericalFailure(std::string("mobius_apply: singular resolvent: ") + e.what());
        }
    }

    TripleElement center_;
    std::shared_ptr<const CMatrix> bergman_sqrt_;
};

inline TripleElement mobius_apply(const MobiusMap& g, const TripleElement& x) {
    return g(x);
}

/// ||g_{-a}(g_a(x)) - x|| in coordinates.
inline double mobius_inverse_residual(const MobiusMap& g, const TripleElement& x) {
    return (g.inverse()(g(x)).coords - x.coords).norm();
}

/// s_a(x) = g_a(-g_{-a}(x)).
inline TripleElement symmetry_apply(const TripleElement& a, const TripleElement& x) {
    const MobiusMap g(a);
    return g(-g.inverse()(x));
}

inline double supga_formula(double center_norm, double r) {
    return (center_norm + r) / (1.0 + r * center_norm);
}

struct SphereSupResult {
    double sup_estimate = 0.0;
    TripleElement witness;
    double formula_value = 0.0;
    /// ||g_a(x*)|| at the analytic witness x* = (r/||a||) a.
    double witness_value = 0.0;
    /// Largest value over the random norm-r samples alone.
    double max_sample_value = 0.0;
    std::size_t samples = 0;
};

/// sup over ||x|| = r of ||g_a(x)||: analytic witness plus seeded random samples.
inline SphereSupResult sphere_sup(const TripleElement& a, double r, const SamplingBudget& budget = {}) {
    if (!(r > 0.0 && r < 1.0)) {
        throw UsageError("sphere_sup: radius must lie in (0,1)");
    }
    const MobiusMap g(a);
    const double na = triple_norm(a);
    const TripleElement star = na > 0.0 ? (r / na) * a : TripleElement::along_first(a.model, r);

    SphereSupResult out{0.0, star, supga_formula(na, r), 0.0, 0.0, budget.samples};
    out.witness_value = triple_norm(g(star));
    out.sup_estimate = out.witness_value;

    std::vector<double> values(budget.samples);
    parallel_for(budget.samples, [&](std::size_t i) {
        auto rng = derive_stream(budget.seed, 0x7375u, i);
        values[i] = triple_norm(g(random_element(a.model, rng, r)));
    });
    std::size_t best = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > out.max_sample_value) {
            out.max_sample_value = values[i];
            best = i;
        }
    }
    if (out.max_sample_value > out.sup_estimate) {
        auto rng = derive_stream(budget.seed, 0x7375u, best);
        out.witness = random_element(a.model, rng, r);
        out.sup_estimate = out.max_sample_value;
    }
    return out;
}

/// Sign convention for the Bergman factor in the norm identity
/// 1/(1 - ||g_a(x)||^2) = ||B_a^{-1} B(a, ±x) B_x^{-1}||.
/// `corrected` uses B(a,-x), which is what the one-variable case forces;
/// `as_printed` uses B(a,x) and fails already on the disc.
enum class SignConvention { corrected, as_printed };

struct NormIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    bool certified = false;
};

inline NormIdentity norm_identity(const TripleElement& a, const TripleElement& x,
                                  SignConvention convention = SignConvention::corrected,
                                  const SamplingBudget& budget = {}) {
    const MobiusMap g(a);
    const double ng = triple_norm(g(x));
    const TripleElement y = convention == SignConvention::corrected ? -x : x;
    const CMatrix op = inverse(g.bergman_sqrt_matrix()) * bergman_rep(a, y) * inverse(bergman_sqrt(x));
    const OpNormEstimate est = op_norm_triple(op, a.model, budget);
    NormIdentity out;
    out.lhs = 1.0 / (1.0 - ng * ng);
    out.rhs = est.estimate;
    out.residual = std::abs(out.lhs - out.rhs);
    out.certified = est.certified;
    return out;
}

inline double norm_identity_residual(const TripleElement& a, const TripleElement& x,
                                     SignConvention convention = SignConvention::corrected,
                                     const SamplingBudget& budget = {}) {
    return norm_identity(a, x, convention, budget).residual;
}

struct InverseNormBracket {
    double estimate = 0.0; // ||B_x^{-1}|| as an operator on the triple norm
    double target = 0.0;   // 1 / (1 - ||x||^2)
    double ratio = 0.0;
    bool certified = false;
};

/// ||B_x^{-1}|| against 1/(1 - ||x||^2): exact on Euclidean models, a sampled
/// lower estimate on the spectral-norm model.
inline InverseNormBracket bergman_inverse_norm(const TripleElement& x, const SamplingBudget& budget = {}) {
    const OpNormEstimate est = op_norm_triple(inverse(bergman_sqrt(x)), x.model, budget);
    const double nx = triple_norm(x);
    InverseNormBracket out;
    out.estimate = est.estimate;
    out.target = 1.0 / (1.0 - nx * nx);
    out.ratio = out.estimate / out.target;
    out.certified = est.certified;
    return out;
}

using ElementMap = std::function<TripleElement(const TripleElement&)>;

struct SchwarzReport {
    bool precondition_ok = false;
    double origin_image_norm = 0.0;
    bool passed = false;
    double max_ratio = 0.0;
    /// Argument attaining max_ratio (zero element when no sample ran).
    TripleElement argmax;
    std::size_t samples = 0;
    std::size_t violations = 0;
};

/// Checks ||phi(x)|| <= ||x|| + slack on seeded samples, after verifying phi(0) = 0.
inline SchwarzReport schwarz_check(const ElementMap& phi, const TripleModel& domain, const TripleModel& codomain,
                                   std::size_t samples, std::uint64_t seed, double slack = 1e-10) {
    SchwarzReport out{false, 0.0, false, 0.0, TripleElement::zero(domain), 0, 0};
    const TripleElement origin_image = phi(TripleElement::zero(domain));
    if (!(origin_image.model == codomain)) {
        throw UsageError("schwarz_check: map output lies in " + origin_image.model.descriptor() + ", expected " +
                         codomain.descriptor());
    }
    out.origin_image_norm = triple_norm(origin_image);
    if (out.origin_image_norm > 1e-12) {
        return out;
    }
    out.precondition_ok = true;

    std::vector<double> ratios(samples);
    std::vector<char> violated(samples, 0);
    parallel_for(samples, [&](std::size_t i) {
        auto rng = derive_stream(seed, 0x7363u, i);
        std::uniform_real_distribution<double> radius(1e-3, 0.999);
        const double r = radius(rng);
        const TripleElement x = random_element(domain, rng, r);
        const double nx = triple_norm(x);
        const double nf = triple_norm(phi(x));
        ratios[i] = nf / nx;
        violated[i] = nf > nx + slack ? 1 : 0;
    });
    std::size_t best = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        out.violations += static_cast<std::size_t>(violated[i]);
        if (ratios[i] > out.max_ratio) {
            out.max_ratio = ratios[i];
            best = i;
        }
    }
    if (samples > 0) {
        auto rng = derive_stream(seed, 0x7363u, best);
        std::uniform_real_distribution<double> radius(1e-3, 0.999);
        const double r = radius(rng);
        out.argmax = random_element(domain, rng, r);
    }
    out.samples = samples;
    out.passed = out.violations == 0;
    return out;
}

} // namespace triple_lab

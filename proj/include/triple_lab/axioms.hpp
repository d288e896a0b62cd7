#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "triple_lab/op_norm.hpp"

namespace triple_lab {

struct AxiomResult {
    std::string name;
    bool passed = true;
    double worst_residual = 0.0;
    /// Trial index of the worst residual; the trial's stream is derive_stream(seed, 0x6178, trial).
    std::size_t worst_trial = 0;
};

struct AxiomReport {
    TripleModel model;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::vector<AxiomResult> axioms;

    bool all_passed() const {
        return std::all_of(axioms.begin(), axioms.end(), [](const AxiomResult& a) { return a.passed; });
    }

    const AxiomResult& get(const std::string& name) const {
        for (const auto& a : axioms) {
            if (a.name == name) {
                return a;
            }
        }
        throw UsageError("no axiom named " + name);
    }
};

struct AxiomResiduals {
    double multilinearity = 0.0;
    double symmetry = 0.0;
    double jordan = 0.0;
    double spectrum_imag = 0.0;
    double spectrum_negative = 0.0; // max(0, -min real eigenvalue)
    double cube_norm = 0.0;         // relative
    double box_norm_excess = 0.0;   // relative excess of ||x□x|| over ||x||^2
    double box_norm_error = 0.0;    // relative |  ||x□x|| - ||x||^2 |, only for certified norms
};

/// Residuals of every axiom check for one fixed tuple of elements.
inline AxiomResiduals axiom_residuals(const TripleElement& a, const TripleElement& b, const TripleElement& x,
                                      const TripleElement& y, const TripleElement& z, Complex lambda,
                                      const SamplingBudget& norm_budget) {
    AxiomResiduals r;
    auto diff = [](const TripleElement& p, const TripleElement& q) { return (p.coords - q.coords).norm(); };

    const TripleElement xyz = triple_product(x, y, z);
    r.symmetry = diff(xyz, triple_product(z, y, x));
    r.multilinearity = std::max({
        diff(triple_product(lambda * x + a, y, z), lambda * xyz + triple_product(a, y, z)),
        diff(triple_product(x, lambda * y + b, z), std::conj(lambda) * xyz + triple_product(x, b, z)),
        diff(triple_product(x, y, lambda * z + a), lambda * xyz + triple_product(x, y, a)),
    });

    const TripleElement lhs = triple_product(a, b, xyz);
    const TripleElement rhs = triple_product(triple_product(a, b, x), y, z) -
                              triple_product(x, triple_product(b, a, y), z) +
                              triple_product(x, y, triple_product(a, b, z));
    r.jordan = diff(lhs, rhs);

    const CMatrix xx = box_rep(x, x);
    const Spectrum spec = spectrum(xx);
    double min_real = 0.0;
    for (const Complex& ev : spec.eigenvalues) {
        r.spectrum_imag = std::max(r.spectrum_imag, std::abs(ev.imag()));
        min_real = std::min(min_real, ev.real());
    }
    r.spectrum_negative = -min_real;

    const double nx = triple_norm(x);
    const double n3 = nx * nx * nx;
    const double cube = triple_norm(triple_product(x, x, x));
    r.cube_norm = n3 > 0.0 ? std::abs(cube - n3) / n3 : cube;

    const OpNormEstimate box = op_norm_triple(xx, x.model, norm_budget);
    const double n2 = nx * nx;
    if (n2 > 0.0) {
        r.box_norm_excess = std::max(0.0, box.estimate - n2) / n2;
        if (box.certified) {
            r.box_norm_error = std::abs(box.estimate - n2) / n2;
        }
    } else {
        r.box_norm_excess = box.estimate;
        r.box_norm_error = box.estimate;
    }
    return r;
}

/// Seeded random checks of the JB*-triple axioms on a model: multilinearity and
/// outer symmetry, the Jordan triple identity, Hermitian non-negative x□x,
/// ||{x,x,x}|| = ||x||^3 and ||x□x|| = ||x||^2 (for the spectral-norm model only
/// the upper inequality, since the operator norm there is a sampled lower bound).
inline AxiomReport axiom_suite(const TripleModel& model, std::size_t trials, std::uint64_t seed, double tol) {
    if (trials < 1) {
        throw UsageError("axiom_suite: trials must be >= 1");
    }
    std::vector<AxiomResiduals> per_trial(trials);
    parallel_for(trials, [&](std::size_t t) {
        auto rng = derive_stream(seed, 0x6178u, t);
        std::uniform_real_distribution<double> radius(0.05, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto draw = [&] {
            const double r = radius(rng);
            return random_element(model, rng, r);
        };
        const TripleElement a = draw();
        const TripleElement b = draw();
        const TripleElement x = draw();
        const TripleElement y = draw();
        const TripleElement z = draw();
        const double lre = gauss(rng);
        const Complex lambda(lre, gauss(rng));
        SamplingBudget nb;
        nb.samples = 16;
        nb.ascent_steps = 20;
        nb.ascent_starts = 2;
        nb.seed = splitmix64(seed ^ t);
        per_trial[t] = axiom_residuals(a, b, x, y, z, lambda, nb);
    });

    AxiomReport report{model, trials, seed, tol, {}};
    auto collect = [&](const std::string& name, auto field) {
        AxiomResult res{name, true, 0.0, 0};
        for (std::size_t t = 0; t < trials; ++t) {
            const double v = field(per_trial[t]);
            if (v > res.worst_residual) {
                res.worst_residual = v;
                res.worst_trial = t;
            }
        }
        res.passed = res.worst_residual <= tol;
        report.axioms.push_back(res);
    };
    collect("multilinearity", [](const AxiomResiduals& r) { return r.multilinearity; });
    collect("symmetry", [](const AxiomResiduals& r) { return r.symmetry; });
    collect("jordan_identity", [](const AxiomResiduals& r) { return r.jordan; });
    collect("spectrum_real", [](const AxiomResiduals& r) { return r.spectrum_imag; });
    collect("spectrum_nonnegative", [](const AxiomResiduals& r) { return r.spectrum_negative; });
    collect("cube_norm", [](const AxiomResiduals& r) { return r.cube_norm; });
    collect("box_norm_bound", [](const AxiomResiduals& r) { return r.box_norm_excess; });
    if (model.has_euclidean_norm()) {
        collect("box_norm_equality", [](const AxiomResiduals& r) { return r.box_norm_error; });
    }
    return report;
}

} // namespace triple_lab

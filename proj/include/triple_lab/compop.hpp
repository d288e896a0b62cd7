#pragma once

// Sampled continuity tests for composition operators C_phi f = f o phi
// between weighted spaces of holomorphic functions on triple-model balls.
//
// Both per-map criteria look at v_X(x) / ṽ_Z(phi(x)) on shells
// ||x|| = 1 - 2^-k. ṽ_Z is replaced by its upper estimate, which can only
// inflate the ratio, so a "continuous" verdict is on the safe side.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "triple_lab/boundary.hpp"
#include "triple_lab/holo_map.hpp"
#include "triple_lab/parallel.hpp"
#include "triple_lab/random.hpp"

namespace triple_lab {

enum class ContinuityVerdict { continuous, not_continuous, inconclusive };

inline std::string to_string(ContinuityVerdict v) {
    switch (v) {
    case ContinuityVerdict::continuous: return "continuous";
    case ContinuityVerdict::not_continuous: return "not-continuous (diverging)";
    case ContinuityVerdict::inconclusive: return "inconclusive";
    }
    return {};
}

struct ShellOptions {
    int shells = 20;
    std::size_t samples_per_shell = 128;
    std::uint64_t seed = 0;
    int window = 5;
    double stable_spread = 0.10;
    double growth = 0.20;
};

struct ShellTrend {
    int k = 0;
    double radius = 0.0;        // 1 - 2^-k
    double log_max_ratio = 0.0; // log of max v_X(x) / ṽ_Z(phi(x)) over the shell
    double max_ratio = 0.0;
    double image_norm_at_max = 0.0;
    std::size_t samples = 0;
};

struct ContinuityReport {
    std::string criterion;
    std::string map;
    std::string weight_x;
    std::string weight_z;
    double sup_estimate = 0.0;
    double log_sup_estimate = 0.0;
    bool sup_infinite = false;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<ShellTrend> boundary_trend;
    ContinuityVerdict verdict = ContinuityVerdict::inconclusive;
    bool map_certified = true;
    std::vector<std::string> notes;
};

/// Images of the shell samples: gaps 1 - ||phi(x)||, indexed [shell][sample].
struct ShellSamples {
    std::vector<double> shell_gaps; // 2^-k
    std::vector<std::vector<double>> image_gaps;
    std::vector<std::vector<double>> image_norms;
    std::vector<std::vector<double>> arg_gaps; // 1 - ||x|| as sampled
    double min_image_gap = 1.0;
};

namespace detail {

inline std::vector<TripleElement> shell_probes(const HoloMap& phi, double radius) {
    const TripleModel& m = phi.domain_model();
    std::vector<TripleElement> probes{TripleElement::along_first(m, radius), TripleElement::along_first(m, -radius)};
    if (const MobiusMap* g = phi.mobius_map()) {
        const double na = triple_norm(g->center());
        if (na > 0.0) {
            // direction of the center maximises ||g_a(x)|| on the sphere
            probes.push_back((radius / na) * g->center());
        }
    }
    return probes;
}

} // namespace detail

inline ShellSamples sample_shells(const HoloMap& phi, const ShellOptions& opts) {
    if (opts.shells < 1) {
        throw UsageError("shell analysis needs at least one shell");
    }
    const std::size_t shells = static_cast<std::size_t>(opts.shells);
    ShellSamples out;
    out.image_gaps.resize(shells);
    out.image_norms.resize(shells);
    out.arg_gaps.resize(shells);
    std::vector<std::vector<TripleElement>> probes(shells);
    for (std::size_t k = 0; k < shells; ++k) {
        const double gap = std::ldexp(1.0, -static_cast<int>(k + 1));
        out.shell_gaps.push_back(gap);
        probes[k] = detail::shell_probes(phi, 1.0 - gap);
        const std::size_t n = opts.samples_per_shell + probes[k].size();
        out.image_gaps[k].resize(n);
        out.image_norms[k].resize(n);
        out.arg_gaps[k].resize(n);
    }
    const std::size_t per = opts.samples_per_shell;
    parallel_for(shells * per, [&](std::size_t flat) {
        const std::size_t k = flat / per;
        const std::size_t i = flat % per;
        auto rng = derive_stream(opts.seed, 0x636f0000u + k, i);
        const TripleElement x = random_element(phi.domain_model(), rng, 1.0 - out.shell_gaps[k]);
        const double ny = triple_norm(map_apply(phi, x));
        out.image_norms[k][i] = ny;
        out.image_gaps[k][i] = 1.0 - ny;
        out.arg_gaps[k][i] = 1.0 - triple_norm(x);
    });
    for (std::size_t k = 0; k < shells; ++k) {
        for (std::size_t j = 0; j < probes[k].size(); ++j) {
            const double ny = triple_norm(map_apply(phi, probes[k][j]));
            out.image_norms[k][per + j] = ny;
            out.image_gaps[k][per + j] = 1.0 - ny;
            out.arg_gaps[k][per + j] = 1.0 - triple_norm(probes[k][j]);
        }
        for (double g : out.image_gaps[k]) {
            out.min_image_gap = std::min(out.min_image_gap, g);
        }
    }
    return out;
}

/// Shell-trend rule: bounded if the last `window` maxima agree within
/// `stable_spread` or do not increase; diverging if each grows by more than
/// `growth`; otherwise inconclusive.
inline ContinuityVerdict trend_verdict(const std::vector<double>& log_maxima, const ShellOptions& opts) {
    if (log_maxima.size() < 2) {
        return ContinuityVerdict::inconclusive;
    }
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(opts.window, 2)), log_maxima.size());
    const auto tail = log_maxima.end() - static_cast<std::ptrdiff_t>(w);
    const double hi = *std::max_element(tail, log_maxima.end());
    const double lo = *std::min_element(tail, log_maxima.end());
    bool non_increasing = true;
    bool growing = true;
    for (auto it = tail + 1; it != log_maxima.end(); ++it) {
        const double step = *it - *(it - 1);
        non_increasing = non_increasing && step <= 1e-12;
        growing = growing && step > std::log1p(opts.growth);
    }
    if (hi - lo <= std::log1p(opts.stable_spread) || non_increasing) {
        return ContinuityVerdict::continuous;
    }
    return growing ? ContinuityVerdict::not_continuous : ContinuityVerdict::inconclusive;
}

namespace detail {

inline void require_condition_I(const Weight& w, const char* which) {
    const ConditionIReport r = condition_I_check(w);
    if (!r.passed) {
        throw UsageError(std::string(which) + " weight " + w.descriptor() + " violates Condition I at r = " +
                         std::to_string(r.offending_radius));
    }
}

inline ContinuityReport assemble(const char* criterion, const HoloMap& phi, const Weight& vx, const Weight& vz,
                                 const AssociatedWeightEstimate& assoc, const ShellSamples& samples,
                                 const ShellOptions& opts, double tail_radius) {
    ContinuityReport rep;
    rep.criterion = criterion;
    rep.map = phi.descriptor();
    rep.weight_x = vx.descriptor();
    rep.weight_z = vz.descriptor();
    rep.seed = opts.seed;
    rep.map_certified = phi.certified();
    rep.notes.push_back("v_Z associated weight replaced by its upper estimate; continuous verdicts are conservative");
    if (!phi.certified()) {
        rep.notes.push_back("map contains a linear factor validated only by a sampled norm estimate");
    }
    if (!assoc.covers_gap(samples.min_image_gap)) {
        throw UsageError("associated-weight estimate does not reach radius 1 - " +
                         std::to_string(samples.min_image_gap) + " attained by the map");
    }
    std::vector<double> log_maxima;
    rep.log_sup_estimate = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples.shell_gaps.size(); ++k) {
        ShellTrend t;
        t.k = static_cast<int>(k + 1);
        t.radius = 1.0 - samples.shell_gaps[k];
        t.log_max_ratio = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < samples.image_gaps[k].size(); ++i) {
            if (!(samples.image_norms[k][i] > tail_radius)) {
                continue;
            }
            const double lr =
                vx.log_at_gap(samples.arg_gaps[k][i]) - assoc.log_value_at_gap(samples.image_gaps[k][i]);
            ++t.samples;
            if (lr > t.log_max_ratio) {
                t.log_max_ratio = lr;
                t.image_norm_at_max = samples.image_norms[k][i];
            }
        }
        rep.samples += t.samples;
        if (t.samples == 0) {
            continue;
        }
        t.max_ratio = std::exp(t.log_max_ratio);
        log_maxima.push_back(t.log_max_ratio);
        rep.log_sup_estimate = std::max(rep.log_sup_estimate, t.log_max_ratio);
        rep.boundary_trend.push_back(t);
    }
    if (rep.boundary_trend.empty()) {
        rep.verdict = ContinuityVerdict::continuous;
        rep.log_sup_estimate = -std::numeric_limits<double>::infinity();
        rep.sup_estimate = 0.0;
        rep.notes.push_back("range compactly inside ball");
        return rep;
    }
    rep.verdict = trend_verdict(log_maxima, opts);
    rep.sup_infinite = rep.verdict == ContinuityVerdict::not_continuous;
    rep.sup_estimate =
        rep.sup_infinite ? std::numeric_limits<double>::infinity() : std::exp(rep.log_sup_estimate);
    return rep;
}

} // namespace detail

/// Octave depth of an associated-weight estimate that covers every image gap.
inline int octaves_for_gap(double min_gap) {
    return std::max(8, static_cast<int>(std::ceil(-std::log2(std::max(min_gap, 1e-300)))) + 1);
}

/// sup_x v_X(x) / ṽ_Z(phi(x)), estimated shell by shell.
inline ContinuityReport criterion_sup_ratio(const HoloMap& phi, const Weight& vx, const Weight& vz,
                                            const AssociatedWeightEstimate& assoc_z, const ShellOptions& opts = {}) {
    detail::require_condition_I(vx, "domain");
    detail::require_condition_I(vz, "codomain");
    const ShellSamples s = sample_shells(phi, opts);
    return detail::assemble("sup-ratio", phi, vx, vz, assoc_z, s, opts, -1.0);
}

inline ContinuityReport criterion_sup_ratio(const HoloMap& phi, const Weight& vx, const Weight& vz,
                                            const ShellOptions& opts = {}) {
    detail::require_condition_I(vx, "domain");
    detail::require_condition_I(vz, "codomain");
    const ShellSamples s = sample_shells(phi, opts);
    const AssociatedWeightEstimate assoc = associated_estimate(vz, octaves_for_gap(s.min_image_gap));
    return detail::assemble("sup-ratio", phi, vx, vz, assoc, s, opts, -1.0);
}

/// Same estimator restricted to samples with ||phi(x)|| > r0.
inline ContinuityReport criterion_tail(const HoloMap& phi, const Weight& vx, const Weight& vz,
                                       const AssociatedWeightEstimate& assoc_z, double r0,
                                       const ShellOptions& opts = {}) {
    if (!(r0 > 0.0 && r0 < 1.0)) {
        throw UsageError("criterion_tail: r0 must lie in (0,1)");
    }
    detail::require_condition_I(vx, "domain");
    detail::require_condition_I(vz, "codomain");
    const ShellSamples s = sample_shells(phi, opts);
    return detail::assemble("tail", phi, vx, vz, assoc_z, s, opts, r0);
}

inline ContinuityReport criterion_tail(const HoloMap& phi, const Weight& vx, const Weight& vz, double r0,
                                       const ShellOptions& opts = {}) {
    if (!(r0 > 0.0 && r0 < 1.0)) {
        throw UsageError("criterion_tail: r0 must lie in (0,1)");
    }
    detail::require_condition_I(vx, "domain");
    detail::require_condition_I(vz, "codomain");
    const ShellSamples s = sample_shells(phi, opts);
    const AssociatedWeightEstimate assoc = associated_estimate(vz, octaves_for_gap(s.min_image_gap));
    return detail::assemble("tail", phi, vx, vz, assoc, s, opts, r0);
}

/// A user map given only as sampled pairs (||x||, ||phi(x)||); reported as uncertified.
inline ContinuityReport criterion_from_samples(const std::vector<std::pair<double, double>>& pairs, const Weight& vx,
                                               const Weight& vz, const AssociatedWeightEstimate& assoc_z,
                                               const ShellOptions& opts = {}) {
    ShellSamples s;
    int deepest = 0;
    std::vector<std::pair<int, double>> placed;
    for (const auto& [nx, ny] : pairs) {
        if (!(nx > 0.0 && nx < 1.0) || !(ny >= 0.0 && ny < 1.0)) {
            throw UsageError("sampled map: norms must lie in the open unit ball");
        }
        const int k = static_cast<int>(std::lround(-std::log2(1.0 - nx)));
        if (k < 1 || std::abs(1.0 - nx - std::ldexp(1.0, -k)) > 1e-9 * std::ldexp(1.0, -k)) {
            throw UsageError("sampled map: argument norms must sit on shells 1 - 2^-k");
        }
        deepest = std::max(deepest, k);
        placed.emplace_back(k, ny);
    }
    for (int k = 1; k <= deepest; ++k) {
        s.shell_gaps.push_back(std::ldexp(1.0, -k));
    }
    s.image_gaps.resize(static_cast<std::size_t>(deepest));
    s.image_norms.resize(static_cast<std::size_t>(deepest));
    s.arg_gaps.resize(static_cast<std::size_t>(deepest));
    for (const auto& [k, ny] : placed) {
        s.arg_gaps[static_cast<std::size_t>(k - 1)].push_back(std::ldexp(1.0, -k));
        s.image_gaps[static_cast<std::size_t>(k - 1)].push_back(1.0 - ny);
        s.image_norms[static_cast<std::size_t>(k - 1)].push_back(ny);
        s.min_image_gap = std::min(s.min_image_gap, 1.0 - ny);
    }
    detail::require_condition_I(vx, "domain");
    detail::require_condition_I(vz, "codomain");
    const HoloMap placeholder = HoloMap::identity(TripleModel::disc());
    ContinuityReport rep = detail::assemble("sampled-sup-ratio", placeholder, vx, vz, assoc_z, s, opts, -1.0);
    rep.map = "user-sampled";
    rep.map_certified = false;
    rep.notes.push_back("uncertified: map known only through user samples");
    return rep;
}

enum class TheoremVerdict { all_continuous, not_all_continuous, inconclusive, inapplicable };

inline std::string to_string(TheoremVerdict v) {
    switch (v) {
    case TheoremVerdict::all_continuous: return "all composition operators continuous";
    case TheoremVerdict::not_all_continuous: return "not all composition operators continuous";
    case TheoremVerdict::inconclusive: return "inconclusive";
    case TheoremVerdict::inapplicable: return "theorem inapplicable";
    }
    return {};
}

struct TheoremReport {
    TheoremVerdict verdict = TheoremVerdict::inapplicable;
    std::vector<std::string> reasons;
    bool vz_non_increasing = false;
    bool condition_i_x = false;
    bool condition_i_z = false;
    DominationReport domination;
    double s0 = 0.25;
    std::optional<BoundaryFunction> boundary;
    std::optional<DoublingReport> doubling;
    /// The same test on the raw v_Z profile, reported alongside and never substituted.
    std::optional<DoublingReport> raw_doubling;
};

inline TheoremReport theorem_verdict(const Weight& vx, const Weight& vz, const AssociatedWeightEstimate& assoc_z,
                                     double s0 = 0.25) {
    TheoremReport rep;
    rep.s0 = s0;
    rep.vz_non_increasing = vz.non_increasing();
    rep.condition_i_x = condition_I_check(vx).passed;
    rep.condition_i_z = condition_I_check(vz).passed;
    rep.domination = weight_domination(vz, vx);
    if (!rep.vz_non_increasing) {
        rep.reasons.push_back("v_Z is not non-increasing");
    }
    if (!rep.condition_i_x || !rep.condition_i_z) {
        rep.reasons.push_back("Condition I fails");
    }
    if (!rep.domination.hypothesis_holds || !(rep.domination.k > 0.0)) {
        rep.reasons.push_back("domination constant K = 0 (v_Z >= K v_X fails near r = 1)");
    }
    if (!rep.reasons.empty()) {
        rep.verdict = TheoremVerdict::inapplicable;
        return rep;
    }
    DoublingOptions dopts;
    dopts.s0 = s0;
    rep.boundary = boundary_l(assoc_z, dyadic_s_grid());
    rep.doubling = doubling_check(*rep.boundary, dopts);
    rep.raw_doubling = doubling_check(boundary_l(vz, BoundarySource::raw_weight), dopts);
    switch (rep.doubling->verdict) {
    case DoublingVerdict::bounded: rep.verdict = TheoremVerdict::all_continuous; break;
    case DoublingVerdict::diverging: rep.verdict = TheoremVerdict::not_all_continuous; break;
    case DoublingVerdict::inconclusive: rep.verdict = TheoremVerdict::inconclusive; break;
    }
    return rep;
}

inline TheoremReport theorem_verdict(const Weight& vx, const Weight& vz, double s0 = 0.25) {
    return theorem_verdict(vx, vz, associated_estimate(vz, 22), s0);
}

struct MobiusSpotRow {
    double center_norm = 0.0;
    ContinuityReport report;
};

/// C_{g_a} with v_X = v_Z for centers c e_1; 2/5 is always included.
inline std::vector<MobiusSpotRow> spot_check_mobius_family(const Weight& vz, const TripleModel& model,
                                                           std::vector<double> center_norms = {0.4},
                                                           const ShellOptions& opts = {}) {
    if (std::find(center_norms.begin(), center_norms.end(), 0.4) == center_norms.end()) {
        center_norms.push_back(0.4);
    }
    std::vector<MobiusSpotRow> rows;
    for (double c : center_norms) {
        if (!(c >= 0.0 && c < 1.0)) {
            throw UsageError("spot_check_mobius_family: center norms must lie in [0,1)");
        }
        const HoloMap g = HoloMap::mobius(TripleElement::along_first(model, c));
        rows.push_back({c, criterion_sup_ratio(g, vz, vz, opts)});
    }
    return rows;
}

} // namespace triple_lab

#pragma once

// Boundary function l(s) = ṽ(1 - s), the doubling test l(s) <= M l(s/2) near
// s = 0, and the domination constant K = inf vZ / vX.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "triple_lab/associated.hpp"
#include "triple_lab/errors.hpp"
#include "triple_lab/weight.hpp"

namespace triple_lab {

enum class BoundarySource { associated_estimate, raw_weight, user_supplied };

inline std::string to_string(BoundarySource s) {
    switch (s) {
    case BoundarySource::associated_estimate: return "associated-estimate";
    case BoundarySource::raw_weight: return "raw-weight proxy";
    case BoundarySource::user_supplied: return "user-supplied";
    }
    return {};
}

struct BoundaryFunction {
    std::vector<double> s;
    std::vector<double> log_l;
    std::vector<double> l; // exp(log_l); may underflow to 0 for fast-decaying weights
    BoundarySource source = BoundarySource::associated_estimate;
    std::string weight_descriptor;
};

/// s_k = 2^-k, k = 1..count.
inline std::vector<double> dyadic_s_grid(int count = 20) {
    std::vector<double> s;
    for (int k = 1; k <= count; ++k) {
        s.push_back(std::ldexp(1.0, -k));
    }
    return s;
}

namespace detail {

inline void check_s_grid(const std::vector<double>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > 0.0 && s[i] <= 0.5)) {
            throw UsageError("boundary_l: s-grid values must lie in (0, 1/2]");
        }
        if (i > 0 && !(s[i] < s[i - 1])) {
            throw UsageError("boundary_l: s-grid must be strictly decreasing");
        }
    }
}

inline BoundaryFunction finish_boundary(std::vector<double> s, std::vector<double> log_l, BoundarySource src,
                                        std::string desc) {
    BoundaryFunction b;
    b.l.resize(log_l.size());
    std::transform(log_l.begin(), log_l.end(), b.l.begin(), [](double x) { return std::exp(x); });
    b.s = std::move(s);
    b.log_l = std::move(log_l);
    b.source = src;
    b.weight_descriptor = std::move(desc);
    return b;
}

} // namespace detail

/// l from a prebuilt associated-weight estimate.
inline BoundaryFunction boundary_l(const AssociatedWeightEstimate& est, const std::vector<double>& s_grid) {
    detail::check_s_grid(s_grid);
    std::vector<double> log_l;
    for (double s : s_grid) {
        log_l.push_back(est.log_value_at_gap(s));
    }
    return detail::finish_boundary(s_grid, std::move(log_l), BoundarySource::associated_estimate,
                                   est.weight_descriptor);
}

/// l from the weight, either through a fresh associated estimate or the raw profile.
inline BoundaryFunction boundary_l(const Weight& w, BoundarySource source,
                                   const std::vector<double>& s_grid = dyadic_s_grid()) {
    detail::check_s_grid(s_grid);
    if (source == BoundarySource::user_supplied) {
        throw UsageError("boundary_l: user-supplied source needs explicit values");
    }
    if (source == BoundarySource::raw_weight) {
        std::vector<double> log_l;
        for (double s : s_grid) {
            log_l.push_back(w.log_at_gap(s));
        }
        return detail::finish_boundary(s_grid, std::move(log_l), source, w.descriptor());
    }
    const int octaves = static_cast<int>(std::ceil(-std::log2(s_grid.empty() ? 0.5 : s_grid.back())));
    return boundary_l(associated_estimate(w, std::max(octaves, 1)), s_grid);
}

inline BoundaryFunction boundary_l_user(const std::vector<double>& s_grid, const std::vector<double>& values) {
    detail::check_s_grid(s_grid);
    if (values.size() != s_grid.size()) {
        throw UsageError("boundary_l: value count does not match the s-grid");
    }
    std::vector<double> log_l;
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw UsageError("boundary_l: user values must be positive and finite");
        }
        log_l.push_back(std::log(v));
    }
    return detail::finish_boundary(s_grid, std::move(log_l), BoundarySource::user_supplied, "user");
}

enum class DoublingVerdict { bounded, diverging, inconclusive };

inline std::string to_string(DoublingVerdict v) {
    switch (v) {
    case DoublingVerdict::bounded: return "bounded";
    case DoublingVerdict::diverging: return "diverging";
    case DoublingVerdict::inconclusive: return "inconclusive";
    }
    return {};
}

struct DoublingOptions {
    double s0 = 0.25;
    int window = 5;
    double stable_spread = 0.10; // bounded: max/min of the last ratios within 10%
    double growth = 0.20;        // diverging: each of the last ratios up by more than 20%
};

struct DoublingReport {
    double m_estimate = 0.0;     // may be +inf when the log form overflows
    double log_m_estimate = 0.0;
    DoublingVerdict verdict = DoublingVerdict::inconclusive;
    std::vector<double> s;       // s_k of each ratio
    std::vector<double> log_ratios;
    std::vector<double> ratios;  // l(s_k) / l(s_k / 2)
    BoundarySource source = BoundarySource::associated_estimate;
};

inline DoublingReport doubling_check(const BoundaryFunction& l, const DoublingOptions& opts = {}) {
    if (opts.window < 2) {
        throw UsageError("doubling_check: window must be at least 2");
    }
    DoublingReport out;
    out.source = l.source;
    for (std::size_t k = 0; k + 1 < l.s.size(); ++k) {
        if (std::abs(l.s[k + 1] * 2.0 - l.s[k]) > 1e-15 * l.s[k]) {
            continue; // s/2 not on the grid
        }
        out.s.push_back(l.s[k]);
        out.log_ratios.push_back(l.log_l[k] - l.log_l[k + 1]);
    }
    if (out.s.size() + 1 < 6) {
        throw UsageError("doubling_check: need at least 6 usable grid points");
    }
    out.ratios.resize(out.log_ratios.size());
    std::transform(out.log_ratios.begin(), out.log_ratios.end(), out.ratios.begin(),
                   [](double x) { return std::exp(x); });

    out.log_m_estimate = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < out.s.size(); ++k) {
        if (out.s[k] < opts.s0) {
            out.log_m_estimate = std::max(out.log_m_estimate, out.log_ratios[k]);
        }
    }
    out.m_estimate = std::exp(out.log_m_estimate);

    const std::size_t n = out.log_ratios.size();
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(opts.window), n);
    const auto tail = out.log_ratios.end() - static_cast<std::ptrdiff_t>(w);
    const double hi = *std::max_element(tail, out.log_ratios.end());
    const double lo = *std::min_element(tail, out.log_ratios.end());
    bool growing = true;
    for (auto it = tail + 1; it != out.log_ratios.end(); ++it) {
        // ratio_{k+1} > (1 + growth) ratio_k, compared in log form
        if (!(*it - *(it - 1) > std::log1p(opts.growth))) {
            growing = false;
        }
    }
    if (hi - lo <= std::log1p(opts.stable_spread)) {
        out.verdict = DoublingVerdict::bounded;
    } else if (growing) {
        out.verdict = DoublingVerdict::diverging;
    }
    return out;
}

struct DominationReport {
    double k = 0.0;
    double log_k = 0.0;
    double witness_r = 0.0;
    double witness_gap = 1.0;
    /// false when the ratio is still falling at the deepest grid point, so the
    /// infimum over the open ball is 0.
    bool hypothesis_holds = true;
    bool vz_non_increasing = true;
};

/// K = inf_r vZ(r) / vX(r) on a uniform grid plus gaps 2^{-j/4} down to 2^-40.
inline DominationReport weight_domination(const Weight& vz, const Weight& vx) {
    std::vector<double> gaps;
    for (int j = 512; j >= 1; --j) {
        gaps.push_back(j / 512.0);
    }
    for (int j = 40; j <= 160; ++j) {
        gaps.push_back(std::exp2(-j / 4.0));
    }
    DominationReport out;
    out.vz_non_increasing = vz.non_increasing();
    out.log_k = std::numeric_limits<double>::infinity();
    for (double g : gaps) {
        const double lr = vz.log_at_gap(g) - vx.log_at_gap(g);
        if (lr < out.log_k) {
            out.log_k = lr;
            out.witness_gap = g;
        }
    }
    out.witness_r = 1.0 - out.witness_gap;
    const double deepest = gaps.back();
    const double ten_octaves_up = std::ldexp(deepest, 10);
    const double drop = (vz.log_at_gap(ten_octaves_up) - vx.log_at_gap(ten_octaves_up)) -
                        (vz.log_at_gap(deepest) - vx.log_at_gap(deepest));
    if (out.witness_gap == deepest && drop > std::log(2.0)) {
        out.hypothesis_holds = false;
        out.k = 0.0;
        out.log_k = -std::numeric_limits<double>::infinity();
    } else {
        out.k = std::exp(out.log_k);
    }
    return out;
}

} // namespace triple_lab

#pragma once

// Upper bounds for the associated weight
//
//     ṽ(r) = 1 / sup { |f(r)| : sup_s v(s)|f(s)| <= 1 }
//
// of a radial weight. Any admissible f gives ṽ(r) <= 1/|f(r)|, so both
// estimators below produce certified-direction upper bounds:
//
//  * monomial envelope: z^n / M_n with M_n = sup_s v(s) s^n is admissible, so
//    ṽ(r) <= inf_n M_n / r^n. log M_n is a supremum of affine functions of n,
//    hence convex, and the minimising n is found by bisection on the discrete
//    slope instead of a scan.
//  * LP envelope: polynomials with non-negative coefficients, maximising p(r)
//    under v p <= 1 on a constraint grid, then rescaled by the norm measured on
//    a finer validation grid that also contains r.
//
// For a norm-radial weight on the ball of any JB*-triple, ṽ at x equals the
// disc associated weight at ||x||: restricting f to the slice through
// x/||x|| gives one inequality, composing a disc function with a norming
// functional gives the other. So everything here lives on [0,1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "triple_lab/parallel.hpp"
#include "triple_lab/simplex.hpp"
#include "triple_lab/weight.hpp"

namespace triple_lab {

struct MomentResult {
    double value = 0.0;
    double log_value = 0.0;
    double argmax_r = 0.0;
};

namespace detail {

constexpr double kMinLogGap = -80.0; // gaps down to e^-80
constexpr int kMomentScanPoints = 2048;

// log(v(s) s^n) at s = 1 - e^u.
inline double log_moment_integrand(const Weight& w, double n, double u) {
    const double t = std::exp(u);
    const double lv = w.log_at_gap(std::min(t, 1.0));
    if (n == 0.0) {
        return lv;
    }
    if (t >= 1.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return lv + n * std::log1p(-t);
}

} // namespace detail

/// M_n = sup_{s in [0,1)} v(s) s^n, by a scan in log(1 - s) followed by
/// golden-section refinement of the best bracket.
inline MomentResult moment(const Weight& w, double n) {
    if (!(n >= 0.0)) {
        throw UsageError("moment: order must be non-negative");
    }
    constexpr int points = detail::kMomentScanPoints;
    const double lo = detail::kMinLogGap;
    const double step = -lo / (points - 1);
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
        const double u = lo + step * i;
        const double val = detail::log_moment_integrand(w, n, u);
        if (val > best_val) {
            best_val = val;
            best = i;
        }
    }
    double best_u = lo + step * best;
    double a = std::max(lo, best_u - step);
    double b = std::min(0.0, best_u + step);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = detail::log_moment_integrand(w, n, x1);
    double f2 = detail::log_moment_integrand(w, n, x2);
    for (int it = 0; it < 80 && (b - a) > 1e-14; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = detail::log_moment_integrand(w, n, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = detail::log_moment_integrand(w, n, x1);
        }
    }
    for (const auto& [u, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
        if (f > best_val) {
            best_val = f;
            best_u = u;
        }
    }
    MomentResult out;
    out.log_value = best_val;
    out.value = std::exp(best_val);
    out.argmax_r = 1.0 - std::exp(best_u);
    return out;
}

/// Memoised log M_n for one weight. Thread-safe.
class MomentCache {
public:
    explicit MomentCache(const Weight& w) : weight_(w) {}

    const Weight& weight() const noexcept { return weight_; }

    double log_moment(std::uint64_t n) const {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            const auto it = cache_.find(n);
            if (it != cache_.end()) {
                return it->second;
            }
        }
        const double value = moment(weight_, static_cast<double>(n)).log_value;
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.emplace(n, value);
        return value;
    }

private:
    Weight weight_;
    mutable std::mutex mutex_;
    mutable std::map<std::uint64_t, double> cache_;
};

struct MonoEnvelope {
    double log_value = 0.0;
    std::uint64_t order = 0;
};

/// log of inf_{0 <= n <= n_max} M_n / r^n at r = 1 - gap, clamped below by
/// log v(r) (ṽ >= v, so the clamp keeps the bound valid).
inline MonoEnvelope mono_envelope_at_gap(const MomentCache& cache, double gap, std::uint64_t n_max) {
    const double log_r = std::log1p(-gap);
    auto f = [&](std::uint64_t n) { return cache.log_moment(n) - static_cast<double>(n) * log_r; };
    // smallest n with f(n+1) >= f(n)
    std::uint64_t lo = 0;
    std::uint64_t hi = n_max;
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (f(mid + 1) >= f(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    MonoEnvelope out{f(lo), lo};
    if (gap < 1.0) {
        out.log_value = std::max(out.log_value, cache.weight().log_at_gap(gap));
    }
    return out;
}

inline double associated_upper_mono(const Weight& w, double r, std::uint64_t n_max = 512) {
    if (!(r > 0.0 && r < 1.0)) {
        throw UsageError("associated_upper_mono: radius must lie in (0,1)");
    }
    const MomentCache cache(w);
    return std::exp(mono_envelope_at_gap(cache, 1.0 - r, n_max).log_value);
}

struct LpOptions {
    int degree = 128;
    int uniform_points = 1024;
    int boundary_points = 1024;
    /// Boundary cluster covers gaps 1 - s in [boundary_min_gap, 1/2].
    double boundary_min_gap = 1e-7;
    int validation_factor = 4;
    SimplexOptions simplex{};
};

struct LpEstimate {
    double value = 0.0;
    /// Polynomial coefficients c_n, n = 0..degree, admissible after rescaling.
    std::vector<double> coefficients;
    /// sup of v |p| over the validation grid after rescaling (1 up to rounding).
    double validated_norm = 0.0;
    /// Norm measured on the validation grid before rescaling.
    double raw_norm = 0.0;
    std::size_t pivots = 0;
};

namespace detail {

inline std::vector<double> lp_grid(int uniform, int boundary, double min_gap) {
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(uniform + boundary));
    for (int j = 0; j < uniform; ++j) {
        s.push_back(static_cast<double>(j) / uniform);
    }
    const double lo = std::log(min_gap);
    const double hi = std::log(0.5);
    for (int j = 0; j < boundary; ++j) {
        const double u = boundary > 1 ? lo + (hi - lo) * j / (boundary - 1) : lo;
        s.push_back(1.0 - std::exp(u));
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

// Row of scaled monomials v(s) s^n / M_n, n = 0..degree.
inline void scaled_row(const Weight& w, const std::vector<double>& log_m, double s, double* out) {
    const double lv = w.log_at(s);
    const double ls = std::log(s);
    for (std::size_t n = 0; n < log_m.size(); ++n) {
        const double e = n == 0 ? lv - log_m[0] : lv + static_cast<double>(n) * ls - log_m[n];
        out[n] = (s == 0.0 && n > 0) ? 0.0 : std::exp(e);
    }
}

} // namespace detail

/// Upper bound for ṽ(r) from the best non-negative-coefficient polynomial of
/// the given degree.
inline LpEstimate associated_upper_lp(const Weight& w, double r, const LpOptions& opts = {},
                                      const MomentCache* moments = nullptr) {
    if (!(r > 0.0 && r < 1.0)) {
        throw UsageError("associated_upper_lp: radius must lie in (0,1)");
    }
    if (opts.degree < 0 || opts.degree > 256) {
        throw UsageError("associated_upper_lp: degree must lie in [0, 256]");
    }
    if (opts.uniform_points + opts.boundary_points > 2048) {
        throw UsageError("associated_upper_lp: at most 2048 constraint points");
    }
    const std::size_t vars = static_cast<std::size_t>(opts.degree) + 1;
    const MomentCache local(w);
    const MomentCache& cache = moments ? *moments : local;
    std::vector<double> log_m(vars);
    for (std::size_t n = 0; n < vars; ++n) {
        log_m[n] = cache.log_moment(n);
    }

    // d_n = c_n M_n keeps every constraint entry in [0, 1]
    const std::vector<double> grid = detail::lp_grid(opts.uniform_points, opts.boundary_points, opts.boundary_min_gap);
    std::vector<double> a(grid.size() * vars);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        detail::scaled_row(w, log_m, grid[j], &a[j * vars]);
    }
    std::vector<double> objective(vars);
    const double log_r = std::log(r);
    for (std::size_t n = 0; n < vars; ++n) {
        objective[n] = std::exp(static_cast<double>(n) * log_r - log_m[n]);
    }
    const LpResult lp = simplex_maximize(objective, a, std::vector<double>(grid.size(), 1.0), opts.simplex);
    if (lp.status != LpStatus::optimal) {
        throw NumericalFailure("associated_upper_lp: simplex did not reach optimality");
    }

    std::vector<double> validation = detail::lp_grid(opts.uniform_points * opts.validation_factor,
                                                     opts.boundary_points * opts.validation_factor,
                                                     opts.boundary_min_gap);
    validation.insert(validation.end(), grid.begin(), grid.end());
    validation.push_back(r);
    std::vector<double> row(vars);
    std::vector<double> values;
    values.reserve(validation.size());
    double norm = 0.0;
    for (double s : validation) {
        detail::scaled_row(w, log_m, s, row.data());
        double acc = 0.0;
        for (std::size_t n = 0; n < vars; ++n) {
            acc += lp.x[n] * row[n];
        }
        values.push_back(acc);
        norm = std::max(norm, acc);
    }
    double obj = 0.0;
    for (std::size_t n = 0; n < vars; ++n) {
        obj += lp.x[n] * objective[n];
    }
    if (!(norm > 0.0) || !(obj > 0.0)) {
        throw NumericalFailure("associated_upper_lp: degenerate optimum");
    }

    LpEstimate out;
    // The best single monomial of degree <= N is admissible with norm exactly 1
    // and is a feasible LP point; keep it when rescaling left the LP behind.
    std::size_t best_n = 0;
    for (std::size_t n = 1; n < vars; ++n) {
        if (objective[n] > objective[best_n]) {
            best_n = n;
        }
    }
    if (objective[best_n] >= obj / norm) {
        out.raw_norm = norm;
        out.validated_norm = 1.0;
        out.value = 1.0 / objective[best_n];
        out.pivots = lp.pivots;
        out.coefficients.assign(vars, 0.0);
        out.coefficients[best_n] = std::exp(-log_m[best_n]);
        return out;
    }
    out.raw_norm = norm;
    out.validated_norm = 0.0;
    for (double v : values) {
        out.validated_norm = std::max(out.validated_norm, v / norm);
    }
    out.value = norm / obj;
    out.pivots = lp.pivots;
    out.coefficients.resize(vars);
    for (std::size_t n = 0; n < vars; ++n) {
        out.coefficients[n] = lp.x[n] / norm * std::exp(-log_m[n]);
    }
    return out;
}

struct EstimateOptions {
    /// LP estimates are computed only at radii up to this value; beyond it a
    /// degree-limited polynomial cannot compete with the monomial envelope.
    double lp_max_radius = 0.9;
    bool use_lp = true;
    LpOptions lp{};
    /// Largest monomial order considered at gap t: max(512, min(2^50, 16/t^2)).
    std::uint64_t min_order_cap = 512;
};

inline std::uint64_t order_cap_for_gap(double gap, std::uint64_t floor_cap) {
    const double want = 16.0 / (gap * gap);
    const double cap = std::min(want, std::ldexp(1.0, 50));
    return std::max<std::uint64_t>(floor_cap, static_cast<std::uint64_t>(cap));
}

/// Upper bounds for ṽ on a radius grid: monomial envelope everywhere, LP where
/// enabled, chosen = min of the two, made non-increasing by a running minimum.
/// ṽ is non-increasing in r for every radial weight (sup of |f| over circles
/// grows with the radius), so the running minimum stays an upper bound.
/// Values are kept in log form so deep radii of fast-decaying weights do not
/// underflow; the linear vectors are exp of the logs.
struct AssociatedWeightEstimate {
    std::string weight_descriptor;
    std::vector<double> radii;
    std::vector<double> gaps;
    std::vector<double> log_upper_mono;
    std::vector<double> log_upper_lp; // +inf where no LP was solved
    std::vector<double> log_chosen;
    std::vector<double> upper_mono;
    std::vector<double> upper_lp;
    std::vector<double> chosen;
    /// Pre-rescale validation norm of each LP polynomial (NaN where no LP ran).
    std::vector<double> certificates;
    /// Optimal monomial order at each grid radius and the moments behind them,
    /// for envelope values between grid radii.
    std::vector<std::uint64_t> mono_orders;
    std::shared_ptr<const MomentCache> moments;

    bool covers_gap(double gap) const { return !gaps.empty() && gap >= gaps.back() * (1.0 - 1e-12); }

    /// Upper bound for log ṽ at gap t = 1 - r: the smaller of the grid value at
    /// the nearest grid radius below r and M_n / r^n for the optimal orders n of
    /// the two neighbouring grid radii (every order gives a valid bound).
    double log_value_at_gap(double gap) const {
        if (gaps.empty()) {
            throw UsageError("AssociatedWeightEstimate: empty grid");
        }
        if (gap >= gaps.front()) {
            return log_chosen.front();
        }
        if (!covers_gap(gap)) {
            throw UsageError("AssociatedWeightEstimate: radius 1 - " + std::to_string(gap) + " beyond grid");
        }
        // gaps are decreasing; lo is the last grid gap >= gap
        const auto it = std::lower_bound(gaps.begin(), gaps.end(), gap, [](double g, double x) { return g > x; });
        if (it != gaps.end() && *it == gap) {
            return log_chosen[static_cast<std::size_t>(it - gaps.begin())];
        }
        const std::size_t hi = static_cast<std::size_t>(it - gaps.begin());
        const std::size_t lo = hi - 1;
        double value = log_chosen[lo];
        if (moments && mono_orders.size() == gaps.size()) {
            const double log_r = std::log1p(-gap);
            for (std::size_t j : {lo, hi}) {
                if (j < gaps.size()) {
                    const std::uint64_t n = mono_orders[j];
                    value = std::min(value, moments->log_moment(n) - static_cast<double>(n) * log_r);
                }
            }
            value = std::max(value, moments->weight().log_at_gap(gap));
        }
        return value;
    }

    double value_at(double r) const { return std::exp(log_value_at_gap(1.0 - r)); }
};

/// Builds the estimate at the given gaps (strictly decreasing, in (0, 1]).
inline AssociatedWeightEstimate associated_estimate_at_gaps(const Weight& w, const std::vector<double>& gaps,
                                                            const EstimateOptions& opts = {}) {
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (!(gaps[i] > 0.0 && gaps[i] <= 1.0) || (i > 0 && !(gaps[i] < gaps[i - 1]))) {
            throw UsageError("associated_estimate: gaps must be strictly decreasing in (0,1]");
        }
    }
    auto shared = std::make_shared<const MomentCache>(w);
    const MomentCache& cache = *shared;
    AssociatedWeightEstimate est;
    est.moments = shared;
    est.mono_orders.assign(gaps.size(), 0);
    est.weight_descriptor = w.descriptor();
    est.gaps = gaps;
    const std::size_t k = gaps.size();
    est.radii.resize(k);
    est.log_upper_mono.resize(k);
    est.log_upper_lp.assign(k, std::numeric_limits<double>::infinity());
    est.certificates.assign(k, std::numeric_limits<double>::quiet_NaN());
    parallel_for(k, [&](std::size_t i) {
        const double gap = gaps[i];
        est.radii[i] = 1.0 - gap;
        if (gap >= 1.0) {
            // r = 0: f = 1/v(0) is extremal for non-increasing v; mono n = 0 gives v(0)
            est.log_upper_mono[i] = cache.log_moment(0);
            return;
        }
        const MonoEnvelope env = mono_envelope_at_gap(cache, gap, order_cap_for_gap(gap, opts.min_order_cap));
        est.log_upper_mono[i] = env.log_value;
        est.mono_orders[i] = env.order;
        if (opts.use_lp && est.radii[i] <= opts.lp_max_radius) {
            const LpEstimate lp = associated_upper_lp(w, est.radii[i], opts.lp, &cache);
            est.log_upper_lp[i] = std::max(std::log(lp.value), w.log_at_gap(gap));
            est.certificates[i] = lp.raw_norm;
        }
    });
    est.log_chosen.resize(k);
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        running = std::min({running, est.log_upper_mono[i], est.log_upper_lp[i]});
        est.log_chosen[i] = running;
    }
    auto expv = [](const std::vector<double>& v) {
        std::vector<double> out(v.size());
        std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::exp(x); });
        return out;
    };
    est.upper_mono = expv(est.log_upper_mono);
    est.upper_lp = expv(est.log_upper_lp);
    est.chosen = expv(est.log_chosen);
    return est;
}

/// Gap grid 2^{-j/per_octave}, j = 0..octaves*per_octave (radius 0 first).
inline std::vector<double> geometric_gaps(int octaves, int per_octave = 8) {
    std::vector<double> g;
    for (int j = 0; j <= octaves * per_octave; ++j) {
        g.push_back(std::exp2(-static_cast<double>(j) / per_octave));
    }
    return g;
}

inline AssociatedWeightEstimate associated_estimate(const Weight& w, int octaves = 24,
                                                    const EstimateOptions& opts = {}) {
    return associated_estimate_at_gaps(w, geometric_gaps(octaves), opts);
}

} // namespace triple_lab

#pragma once

// Radial weights v on [0,1). Deep-boundary work is done in terms of the gap
// t = 1 - r and in log space, since exp(-beta/(1-r)) underflows long before
// the shells of interest.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "triple_lab/errors.hpp"

namespace triple_lab {

enum class WeightFamily { power, expdecay, constant, table };

struct Knot {
    double r;
    double v;
};

class Weight {
public:
    static Weight power(double alpha) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            throw UsageError("power weight needs alpha > 0");
        }
        return Weight(WeightFamily::power, alpha, {});
    }

    static Weight expdecay(double beta) {
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            throw UsageError("expdecay weight needs beta > 0");
        }
        return Weight(WeightFamily::expdecay, beta, {});
    }

    static Weight constant(double c) {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw UsageError("constant weight needs c > 0");
        }
        return Weight(WeightFamily::constant, c, {});
    }

    /// Piecewise-linear profile through the knots, constant beyond the first
    /// and last knot. Radii must be strictly increasing in [0,1); values must
    /// be finite and non-negative (a zero knot is accepted so that Condition I
    /// can report it).
    static Weight table(std::vector<Knot> knots) {
        if (knots.empty()) {
            throw UsageError("table weight needs at least one knot");
        }
        for (std::size_t i = 0; i < knots.size(); ++i) {
            const Knot& k = knots[i];
            if (!(k.r >= 0.0 && k.r < 1.0)) {
                throw UsageError("table weight: radius " + std::to_string(k.r) + " outside [0,1)");
            }
            if (!std::isfinite(k.v) || k.v < 0.0) {
                throw UsageError("table weight: value at r=" + std::to_string(k.r) + " is negative or non-finite");
            }
            if (i > 0 && !(k.r > knots[i - 1].r)) {
                throw UsageError("table weight: radii must be strictly increasing");
            }
        }
        return Weight(WeightFamily::table, 0.0, std::move(knots));
    }

    /// Reads a CSV with columns r,v (an optional non-numeric header line is skipped).
    static Weight table_from_csv(const std::string& path);

    /// "power:A", "expdecay:B", "constant:C" or "table:PATH".
    static Weight parse(std::string_view text);

    WeightFamily family() const noexcept { return family_; }
    double parameter() const noexcept { return param_; }
    const std::vector<Knot>& knots() const noexcept { return knots_; }
    const std::string& descriptor() const noexcept { return descriptor_; }

    double operator()(double r) const {
        if (!(r >= 0.0 && r < 1.0)) {
            throw UsageError("weight_eval: radius " + std::to_string(r) + " outside [0,1)");
        }
        switch (family_) {
        case WeightFamily::power: return std::pow((1.0 - r) * (1.0 + r), param_);
        case WeightFamily::expdecay: return std::exp(-param_ / (1.0 - r));
        case WeightFamily::constant: return param_;
        case WeightFamily::table: return interpolate(r);
        }
        return 0.0;
    }

    /// log v(1 - t) for a gap t in (0, 1]; accurate for tiny t.
    double log_at_gap(double t) const {
        if (!(t > 0.0 && t <= 1.0)) {
            throw UsageError("weight: gap " + std::to_string(t) + " outside (0,1]");
        }
        switch (family_) {
        case WeightFamily::power: return param_ * (std::log(t) + std::log(2.0 - t));
        case WeightFamily::expdecay: return -param_ / t;
        case WeightFamily::constant: return std::log(param_);
        case WeightFamily::table: return std::log(interpolate(1.0 - t));
        }
        return 0.0;
    }

    double log_at(double r) const {
        // tables are keyed by radius; going through 1 - (1 - r) would miss knots
        if (family_ == WeightFamily::table && r >= 0.0 && r < 1.0) {
            return std::log(interpolate(r));
        }
        return log_at_gap(1.0 - r);
    }

    /// Uniform validation grid r_j = j/512, j = 0..511.
    static std::vector<double> validation_grid() {
        std::vector<double> g(512);
        for (int j = 0; j < 512; ++j) {
            g[static_cast<std::size_t>(j)] = j / 512.0;
        }
        return g;
    }

    bool positive_on_grid() const {
        for (double r : validation_grid()) {
            const double v = (*this)(r);
            if (!(v > 0.0) || !std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }

    bool non_increasing() const {
        double prev = std::numeric_limits<double>::infinity();
        for (double r : validation_grid()) {
            const double v = (*this)(r);
            if (v > prev) {
                return false;
            }
            prev = v;
        }
        return true;
    }

private:
    Weight(WeightFamily family, double param, std::vector<Knot> knots)
        : family_(family), param_(param), knots_(std::move(knots)) {
        std::ostringstream os;
        os.precision(17);
        switch (family_) {
        case WeightFamily::power: os << "power:" << param_; break;
        case WeightFamily::expdecay: os << "expdecay:" << param_; break;
        case WeightFamily::constant: os << "constant:" << param_; break;
        case WeightFamily::table: os << "table[" << knots_.size() << " knots]"; break;
        }
        descriptor_ = os.str();
    }

    double interpolate(double r) const {
        if (r <= knots_.front().r) {
            return knots_.front().v;
        }
        if (r >= knots_.back().r) {
            return knots_.back().v;
        }
        const auto hi = std::upper_bound(knots_.begin(), knots_.end(), r,
                                         [](double x, const Knot& k) { return x < k.r; });
        const auto lo = hi - 1;
        const double w = (r - lo->r) / (hi->r - lo->r);
        return lo->v + w * (hi->v - lo->v);
    }

    WeightFamily family_;
    double param_;
    std::vector<Knot> knots_;
    std::string descriptor_;
};

namespace detail {

inline double parse_double(std::string_view s, std::string_view context) {
    std::string tmp(s);
    // trim
    const auto b = tmp.find_first_not_of(" \t\r");
    const auto e = tmp.find_last_not_of(" \t\r");
    if (b == std::string::npos) {
        throw UsageError(std::string(context) + ": empty number");
    }
    tmp = tmp.substr(b, e - b + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(tmp, &used);
    } catch (const std::exception&) {
        throw UsageError(std::string(context) + ": cannot parse number '" + tmp + "'");
    }
    if (used != tmp.size()) {
        throw UsageError(std::string(context) + ": trailing characters in '" + tmp + "'");
    }
    return value;
}

} // namespace detail

inline Weight Weight::table_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("table weight: cannot open '" + path + "'");
    }
    std::vector<Knot> knots;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw UsageError("table weight: expected 'r,v' in line '" + line + "'");
        }
        try {
            const double r = detail::parse_double(std::string_view(line).substr(0, comma), "table weight");
            const double v = detail::parse_double(std::string_view(line).substr(comma + 1), "table weight");
            knots.push_back({r, v});
        } catch (const UsageError&) {
            if (!first) {
                throw;
            }
        }
        first = false;
    }
    Weight w = table(std::move(knots));
    w.descriptor_ = "table:" + path;
    return w;
}

inline Weight Weight::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw UsageError("weight descriptor '" + std::string(text) + "' needs the form family:parameter");
    }
    const std::string_view family = text.substr(0, colon);
    const std::string_view arg = text.substr(colon + 1);
    Weight w = [&] {
        if (family == "power") {
            return power(detail::parse_double(arg, "power weight"));
        }
        if (family == "expdecay") {
            return expdecay(detail::parse_double(arg, "expdecay weight"));
        }
        if (family == "constant") {
            return constant(detail::parse_double(arg, "constant weight"));
        }
        if (family == "table") {
            return table_from_csv(std::string(arg));
        }
        throw UsageError("unknown weight family '" + std::string(family) + "'");
    }();
    if (family != "table") {
        w.descriptor_ = std::string(text);
    }
    return w;
}

inline double weight_eval(const Weight& w, double r) {
    return w(r);
}

struct ConditionIEntry {
    double radius;
    double minimum; // may underflow to 0 for fast-decaying profiles
    double log_minimum;
    double argmin;
};

struct ConditionIReport {
    bool passed = true;
    std::vector<ConditionIEntry> entries;
    /// Radius where a non-positive value was found (only meaningful when !passed).
    double offending_radius = 0.0;
};

/// inf of v over [0, r] must be positive, checked on a 512-point grid (plus
/// table knots) for r in {0.9, 0.99, 0.999}. Positivity is judged on log v so
/// that values below the double range still count as positive.
inline ConditionIReport condition_I_check(const Weight& w) {
    ConditionIReport out;
    for (double r : {0.9, 0.99, 0.999}) {
        std::vector<double> grid;
        for (int j = 0; j <= 512; ++j) {
            grid.push_back(r * j / 512.0);
        }
        for (const Knot& k : w.knots()) {
            if (k.r <= r) {
                grid.push_back(k.r);
            }
        }
        ConditionIEntry e{r, 0.0, std::numeric_limits<double>::infinity(), 0.0};
        for (double x : grid) {
            const double lv = w.log_at(x);
            if (lv < e.log_minimum || std::isnan(lv)) {
                e.log_minimum = lv;
                e.argmin = x;
            }
        }
        e.minimum = w(e.argmin);
        if (!(e.log_minimum > -std::numeric_limits<double>::infinity()) && out.passed) {
            out.passed = false;
            out.offending_radius = e.argmin;
        }
        out.entries.push_back(e);
    }
    return out;
}

} // namespace triple_lab

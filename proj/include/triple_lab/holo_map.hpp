#pragma once

// Built-in holomorphic self-maps of the open unit ball of a triple model:
// identity, contractive linear maps, Möbius maps, the monomial powers
// x -> x_1^{k-1} x (z^k on the disc; x_1 is the first coordinate, so
// ||phi(x)|| <= ||x||^k), and compositions of these.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "triple_lab/mobius.hpp"
#include "triple_lab/weight.hpp"

namespace triple_lab {

enum class MapKind { identity, linear, mobius, monomial_power, compose };

class HoloMap {
public:
    static HoloMap identity(const TripleModel& m) { return HoloMap(MapKind::identity, m, "identity"); }

    /// x -> L x in coordinates; rejected unless the operator-norm estimate is <= 1.
    static HoloMap linear(const TripleModel& m, const CMatrix& l, std::string descriptor = "linear") {
        if (l.rows() != m.coord_dim() || l.cols() != m.coord_dim()) {
            throw UsageError("linear map: expected a " + std::to_string(m.coord_dim()) + "x" +
                             std::to_string(m.coord_dim()) + " coordinate matrix for " + m.descriptor());
        }
        if (!l.allFinite()) {
            throw UsageError("linear map: non-finite entry");
        }
        const OpNormEstimate est = op_norm_triple(l, m);
        if (est.estimate > 1.0 + 1e-12) {
            throw InvalidMapError("linear map has operator norm estimate " + std::to_string(est.estimate) +
                                  " > 1 and does not map the ball into itself");
        }
        HoloMap h(MapKind::linear, m, std::move(descriptor));
        h.linear_ = std::make_shared<const CMatrix>(l);
        h.certified_ = est.certified;
        return h;
    }

    static HoloMap scale(const TripleModel& m, Complex c) {
        std::ostringstream os;
        os.precision(17);
        os << "scale:" << c.real();
        if (c.imag() != 0.0) {
            os << (c.imag() < 0 ? "" : "+") << c.imag() << "i";
        }
        const int n = m.coord_dim();
        return linear(m, c * CMatrix::Identity(n, n), os.str());
    }

    static HoloMap mobius(const TripleElement& center) {
        HoloMap h(MapKind::mobius, center.model, "mobius");
        h.mobius_ = std::make_shared<const MobiusMap>(center);
        std::ostringstream os;
        os.precision(15);
        os << "mobius[norm " << triple_norm(center) << "]";
        h.descriptor_ = os.str();
        return h;
    }

    static HoloMap monomial_power(const TripleModel& m, int k) {
        if (k < 1) {
            throw UsageError("monomial power needs k >= 1");
        }
        HoloMap h(MapKind::monomial_power, m, "pow:" + std::to_string(k));
        h.power_ = k;
        return h;
    }

    /// parts[0] o parts[1] o ... (the last part is applied first).
    static HoloMap compose(std::vector<HoloMap> parts) {
        if (parts.empty()) {
            throw UsageError("compose: empty list");
        }
        std::string desc = "compose:[";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (!(parts[i].model_ == parts[0].model_)) {
                throw UsageError("compose: parts live on different models");
            }
            desc += (i ? "," : "") + parts[i].descriptor_;
        }
        desc += "]";
        HoloMap h(MapKind::compose, parts[0].model_, desc);
        h.certified_ = std::all_of(parts.begin(), parts.end(), [](const HoloMap& p) { return p.certified_; });
        h.parts_ = std::make_shared<const std::vector<HoloMap>>(std::move(parts));
        return h;
    }

    /// "identity", "mobius:T" (center T e_1, T real or "a+bi"), "pow:K",
    /// "scale:C", "linear:PATH" (CSV of coordinate-matrix rows, entries "a+bi"),
    /// "compose:[D1,D2,...]".
    static HoloMap parse(std::string_view text, const TripleModel& m);

    MapKind kind() const noexcept { return kind_; }
    const TripleModel& domain_model() const noexcept { return model_; }
    const TripleModel& codomain_model() const noexcept { return model_; }
    const std::string& descriptor() const noexcept { return descriptor_; }
    /// False when a linear factor was validated only by a sampled norm estimate.
    bool certified() const noexcept { return certified_; }
    const MobiusMap* mobius_map() const noexcept { return mobius_.get(); }
    int power() const noexcept { return power_; }
    const std::vector<HoloMap>& parts() const {
        static const std::vector<HoloMap> none;
        return parts_ ? *parts_ : none;
    }

    /// Raw evaluation; no ball checks.
    TripleElement operator()(const TripleElement& x) const {
        require_same_model(x, TripleElement::zero(model_), "map_apply");
        switch (kind_) {
        case MapKind::identity: return x;
        case MapKind::linear: return {model_, *linear_ * x.coords};
        case MapKind::mobius: return (*mobius_)(x);
        case MapKind::monomial_power: {
            Complex f = 1.0;
            for (int k = 1; k < power_; ++k) {
                f *= x.coords(0);
            }
            return {model_, f * x.coords};
        }
        case MapKind::compose: {
            TripleElement y = x;
            for (auto it = parts_->rbegin(); it != parts_->rend(); ++it) {
                y = (*it)(y);
            }
            return y;
        }
        }
        return x;
    }

private:
    HoloMap(MapKind kind, const TripleModel& m, std::string desc)
        : kind_(kind), model_(m), descriptor_(std::move(desc)) {}

    MapKind kind_;
    TripleModel model_;
    std::string descriptor_;
    bool certified_ = true;
    int power_ = 1;
    std::shared_ptr<const CMatrix> linear_;
    std::shared_ptr<const MobiusMap> mobius_;
    std::shared_ptr<const std::vector<HoloMap>> parts_;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// "a", "bi", "a+bi", "a-bi", "i", "-i".
inline Complex parse_complex(std::string_view text) {
    const std::string s = trim(text);
    if (s.empty()) {
        throw UsageError("complex number: empty entry");
    }
    if (s.back() != 'i') {
        return {parse_double(s, "complex number"), 0.0};
    }
    const std::string body = s.substr(0, s.size() - 1);
    // split at the last sign that is not the leading one or an exponent sign
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_part = [](const std::string& t) {
        if (t.empty() || t == "+") {
            return 1.0;
        }
        if (t == "-") {
            return -1.0;
        }
        return parse_double(t, "complex number");
    };
    if (split == std::string::npos) {
        return {0.0, imag_part(body)};
    }
    return {parse_double(body.substr(0, split), "complex number"), imag_part(body.substr(split))};
}

/// Splits at commas outside brackets.
inline std::vector<std::string> split_top_level(std::string_view s) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '[') {
            ++depth;
        } else if (s[i] == ']') {
            --depth;
            if (depth < 0) {
                throw UsageError("map descriptor: unbalanced ']'");
            }
        } else if (s[i] == ',' && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (depth != 0) {
        throw UsageError("map descriptor: unbalanced '['");
    }
    out.push_back(trim(s.substr(start)));
    return out;
}

inline CMatrix read_complex_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("linear map: cannot open '" + path + "'");
    }
    std::vector<std::vector<Complex>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        std::vector<Complex> row;
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(parse_complex(cell));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw UsageError("linear map: '" + path + "' has no rows");
    }
    CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) {
            throw UsageError("linear map: ragged rows in '" + path + "'");
        }
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

} // namespace detail

inline HoloMap HoloMap::parse(std::string_view text, const TripleModel& m) {
    const std::string t = detail::trim(text);
    if (t == "identity") {
        return identity(m);
    }
    const auto colon = t.find(':');
    if (colon == std::string::npos) {
        throw UsageError("unknown map descriptor '" + t + "'");
    }
    const std::string kind = t.substr(0, colon);
    const std::string arg = t.substr(colon + 1);
    if (kind == "mobius") {
        const Complex c = detail::parse_complex(arg);
        if (!(std::abs(c) < 1.0)) {
            throw UsageError("mobius map: center must lie in the open unit ball");
        }
        HoloMap h = mobius(TripleElement::along_first(m, c));
        h.descriptor_ = t;
        return h;
    }
    if (kind == "pow") {
        HoloMap h = monomial_power(m, detail::parse_positive_int(arg, "power"));
        h.descriptor_ = t;
        return h;
    }
    if (kind == "scale") {
        const Complex c = detail::parse_complex(arg);
        if (!(std::abs(c) <= 1.0)) {
            throw UsageError("scale map: factor must have modulus <= 1");
        }
        HoloMap h = scale(m, c);
        h.descriptor_ = t;
        return h;
    }
    if (kind == "linear") {
        return linear(m, detail::read_complex_csv(arg), t);
    }
    if (kind == "compose") {
        if (arg.size() < 2 || arg.front() != '[' || arg.back() != ']') {
            throw UsageError("compose descriptor needs the form compose:[D1,D2,...]");
        }
        std::vector<HoloMap> parts;
        for (const std::string& p : detail::split_top_level(std::string_view(arg).substr(1, arg.size() - 2))) {
            parts.push_back(parse(p, m));
        }
        HoloMap h = compose(std::move(parts));
        h.descriptor_ = t;
        return h;
    }
    throw UsageError("unknown map kind '" + kind + "'");
}

/// phi(x) for ||x|| < 1; the map is rejected when the image leaves the open ball.
inline TripleElement map_apply(const HoloMap& phi, const TripleElement& x) {
    if (!(triple_norm(x) < 1.0)) {
        throw DomainError("map_apply: argument norm " + std::to_string(triple_norm(x)) + " is not below 1");
    }
    TripleElement y = phi(x);
    const double ny = triple_norm(y);
    if (!(ny < 1.0)) {
        throw InvalidMapError("map " + phi.descriptor() + " sends a point of norm " + std::to_string(triple_norm(x)) +
                              " to norm " + std::to_string(ny));
    }
    return y;
}

struct NormalizedMap {
    HoloMap psi;
    TripleElement a;
};

/// a = phi(0) and psi = g_{-a} o phi, so that psi(0) = 0 and phi = g_a o psi.
inline NormalizedMap normalize_at_origin(const HoloMap& phi) {
    TripleElement a = map_apply(phi, TripleElement::zero(phi.domain_model()));
    if (a.coords.isZero(0.0)) {
        return {phi, std::move(a)};
    }
    HoloMap psi = HoloMap::compose({HoloMap::mobius(-a), phi});
    return {std::move(psi), std::move(a)};
}

inline ElementMap as_element_map(const HoloMap& phi) {
    return [phi](const TripleElement& x) { return phi(x); };
}

} // namespace triple_lab

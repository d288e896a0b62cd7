// triple-lab: command-line front end for the triple_lab library.
//
// Exit status: 0 all checks passed (verdicts such as "diverging" are report
// content), 1 a checked invariant was violated, 2 usage error, 3 numerical
// failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "report.hpp"
#include "triple_lab/axioms.hpp"
#include "triple_lab/compop.hpp"

using namespace triple_lab;
using triple_lab::cli::Cell;
using triple_lab::cli::Format;
using triple_lab::cli::Report;
using triple_lab::cli::Table;

namespace {

constexpr const char* kVersion = TRIPLE_LAB_VERSION;

struct RunConfig {
    std::string command;
    std::string model = "disc";
    std::uint64_t seed = 0;
    long long trials = 0; // 0: command default
    double tol = 0.0;     // 0: command default
    double center_norm = 0.5;
    std::optional<double> r;
    long long samples = 0; // 0: command default
    std::string weight = "power:1";
    std::string weight_x;
    std::string weight_z;
    bool doubling = false;
    std::string map = "mobius:0.5";
    double r0 = 0.9;
    double s0 = 0.25;
    int shells = 20;
    std::string spot_centers = "0.4";
    std::string format = "human";
    std::string out;
    std::string config;
};

// Applies "key = value" lines; every key is a long flag name.
void apply_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("config: cannot open '" + path + "'");
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        auto num = [&] { return detail::parse_double(val, "config field '" + key + "'"); };
        auto integer = [&] {
            const double d = num();
            if (d != std::floor(d) || d < 0) {
                throw UsageError("config field '" + key + "': expected a non-negative integer");
            }
            return static_cast<long long>(d);
        };
        if (key == "model") c.model = val;
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(std::stoull(val));
        else if (key == "trials") c.trials = integer();
        else if (key == "tol") c.tol = num();
        else if (key == "center-norm") c.center_norm = num();
        else if (key == "r") c.r = num();
        else if (key == "samples") c.samples = integer();
        else if (key == "weight") c.weight = val;
        else if (key == "weight-x") c.weight_x = val;
        else if (key == "weight-z") c.weight_z = val;
        else if (key == "doubling") c.doubling = (val == "true" || val == "1");
        else if (key == "map") c.map = val;
        else if (key == "r0") c.r0 = num();
        else if (key == "s0") c.s0 = num();
        else if (key == "shells") c.shells = static_cast<int>(integer());
        else if (key == "spot-centers") c.spot_centers = val;
        else if (key == "format") c.format = val;
        else if (key == "out") c.out = val;
        else throw UsageError("config: unknown field '" + key + "'");
    }
}

// Shortest decimal form that round-trips.
std::string num(double v) {
    for (int digits = 1; digits < 17; ++digits) {
        const std::string s = cli::format_double(v, digits);
        if (std::strtod(s.c_str(), nullptr) == v) {
            return s;
        }
    }
    return cli::format_double(v, 17);
}

std::vector<double> parse_list(const std::string& s, const char* field) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(detail::parse_double(item, field));
    }
    return out;
}

TripleModel model_of(const RunConfig& c) {
    try {
        return TripleModel::parse(c.model);
    } catch (const UsageError& e) {
        throw UsageError(std::string("--model: ") + e.what());
    }
}

Weight weight_of(const std::string& text, const char* field) {
    try {
        return Weight::parse(text);
    } catch (const UsageError& e) {
        throw UsageError(std::string(field) + ": " + e.what());
    }
}

struct Outcome {
    int status = 0;
    void fail() { status = std::max(status, 1); }
};

// ---------------------------------------------------------------- commands

void run_axioms(const RunConfig& c, const TripleModel& m, Report& rep, Outcome& res) {
    const std::size_t trials = c.trials ? static_cast<std::size_t>(c.trials) : 1000;
    const double tol = c.tol > 0 ? c.tol : 1e-10;
    const AxiomReport a = axiom_suite(m, trials, c.seed, tol);
    Table t{"axioms." + m.descriptor(), {"index", "model", "axiom", "passed", "worst_residual", "worst_trial", "tol"}, {}};
    long long i = 0;
    for (const AxiomResult& r : a.axioms) {
        t.add({i++, m.descriptor(), r.name, r.passed, r.worst_residual, static_cast<long long>(r.worst_trial), tol});
        if (!r.passed) {
            res.fail();
        }
    }
    rep.tables.push_back(std::move(t));
}

void run_mobius(const RunConfig& c, const TripleModel& m, Report& rep, Outcome& res) {
    const std::size_t trials = c.trials ? static_cast<std::size_t>(c.trials) : 1000;
    const double tol = c.tol > 0 ? c.tol : 1e-9;
    if (!(c.center_norm >= 0.0 && c.center_norm < 1.0)) {
        throw UsageError("--center-norm must lie in [0,1)");
    }
    struct Worst {
        double value = 0.0;
        long long trial = -1;
    };
    std::vector<std::string> names = {"origin_to_center", "inverse_group_law", "quasi_inverse_route",
                                      "series_route", "symmetry_fixes_center", "symmetry_involution"};
    std::vector<std::vector<double>> values(trials, std::vector<double>(names.size()));
    parallel_for(trials, [&](std::size_t i) {
        auto rng = derive_stream(c.seed, 0x6d6fu, i);
        std::uniform_real_distribution<double> radius(0.0, 0.95);
        const TripleElement a = random_element(m, rng, c.center_norm);
        const TripleElement x = random_element(m, rng, radius(rng));
        const MobiusMap g(a);
        const TripleElement gx = g(x);
        values[i][0] = (g(TripleElement::zero(m)).coords - a.coords).norm();
        values[i][1] = mobius_inverse_residual(g, x);
        values[i][2] = (g.apply_quasi_inverse(x).coords - gx.coords).norm();
        values[i][3] = (g.apply_series(x, 400).coords - gx.coords).norm();
        values[i][4] = (symmetry_apply(a, a).coords - a.coords).norm();
        values[i][5] = (symmetry_apply(a, symmetry_apply(a, x)).coords - x.coords).norm();
    });
    std::vector<Worst> worst(names.size());
    for (std::size_t i = 0; i < trials; ++i) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (values[i][j] > worst[j].value || worst[j].trial < 0) {
                worst[j] = {values[i][j], static_cast<long long>(i)};
            }
        }
    }
    Table t{"mobius." + m.descriptor(), {"index", "model", "check", "passed", "worst_residual", "worst_trial", "tol"}, {}};
    for (std::size_t j = 0; j < names.size(); ++j) {
        const bool ok = worst[j].value <= tol;
        if (!ok) {
            res.fail();
        }
        t.add({static_cast<long long>(j), m.descriptor(), names[j], ok, worst[j].value, worst[j].trial, tol});
    }
    rep.tables.push_back(std::move(t));
}

void run_lemma_sup(const RunConfig& c, const TripleModel& m, Report& rep, Outcome& res) {
    const double tol = c.tol > 0 ? c.tol : 1e-9;
    if (!(c.center_norm > 0.0 && c.center_norm < 1.0)) {
        throw UsageError("--center-norm must lie in (0,1)");
    }
    std::vector<double> radii;
    if (c.r) {
        if (!(*c.r > 0.0 && *c.r < 1.0)) {
            throw UsageError("--r must lie in (0,1)");
        }
        radii.push_back(*c.r);
    } else {
        for (int k = 1; k <= 9; ++k) {
            radii.push_back(k / 10.0);
        }
    }
    auto rng = derive_stream(c.seed, 0x6c73u, 0);
    const TripleElement a = random_element(m, rng, c.center_norm);
    SamplingBudget budget;
    budget.samples = c.samples ? static_cast<std::size_t>(c.samples) : 10000;
    budget.seed = c.seed;
    Table t{"lemma_sup." + m.descriptor() + ".center_norm=" + num(c.center_norm),
            {"index", "model", "center_norm", "r", "formula", "witness_value", "max_sample", "sup_estimate",
             "witness_match", "samples_below_formula"},
            {}};
    long long i = 0;
    for (double r : radii) {
        const SphereSupResult s = sphere_sup(a, r, budget);
        const bool match = std::abs(s.witness_value - s.formula_value) <= tol;
        const bool below = s.max_sample_value <= s.formula_value + tol;
        if (!match || !below) {
            res.fail();
        }
        t.add({i++, m.descriptor(), triple_norm(a), r, s.formula_value, s.witness_value, s.max_sample_value,
               s.sup_estimate, match, below});
    }
    rep.tables.push_back(std::move(t));
}

void run_eq1(const RunConfig& c, const TripleModel& m, Report& rep, Outcome& res) {
    const std::size_t trials = c.trials ? static_cast<std::size_t>(c.trials) : 100;
    const double tol = c.tol > 0 ? c.tol : 1e-10;
    SamplingBudget budget;
    budget.samples = c.samples ? static_cast<std::size_t>(c.samples) : 10000;
    Table t{"eq1." + m.descriptor(),
            {"index", "model", "norm_x", "target", "estimate", "ratio", "certified", "passed"}, {}};
    std::vector<InverseNormBracket> out(trials);
    std::vector<double> norms(trials);
    parallel_for(trials, [&](std::size_t i) {
        auto rng = derive_stream(c.seed, 0x6531u, i);
        std::uniform_real_distribution<double> radius(0.0, 0.95);
        const TripleElement x = random_element(m, rng, radius(rng));
        SamplingBudget b = budget;
        b.seed = c.seed + i;
        norms[i] = triple_norm(x);
        out[i] = bergman_inverse_norm(x, b);
    });
    for (std::size_t i = 0; i < trials; ++i) {
        const InverseNormBracket& e = out[i];
        const bool ok = e.certified ? std::abs(e.estimate - e.target) <= tol * std::max(1.0, e.target)
                                    : (e.ratio >= 0.95 && e.ratio <= 1.001);
        if (!ok) {
            res.fail();
        }
        t.add({static_cast<long long>(i), m.descriptor(), norms[i], e.target, e.estimate, e.ratio, e.certified, ok});
    }
    rep.tables.push_back(std::move(t));
    if (!m.has_euclidean_norm()) {
        rep.notes.push_back("eq1 on " + m.descriptor() +
                            ": spectral-norm operator norm is a sampled lower estimate; pass means ratio in [0.95, 1.001]");
    }
}

void run_weights(const RunConfig& c, Report& rep, Outcome& res) {
    const Weight w = weight_of(c.weight, "--weight");
    const std::string d = w.descriptor();

    const ConditionIReport ci = condition_I_check(w);
    Table cit{"condition_I." + d, {"index", "radius", "minimum", "log_minimum", "argmin", "passed"}, {}};
    for (std::size_t i = 0; i < ci.entries.size(); ++i) {
        const ConditionIEntry& e = ci.entries[i];
        cit.add({static_cast<long long>(i), e.radius, e.minimum, e.log_minimum, e.argmin,
                 e.log_minimum > -std::numeric_limits<double>::infinity()});
    }
    rep.tables.push_back(std::move(cit));
    if (!ci.passed) {
        rep.notes.push_back("weight " + d + " fails Condition I at r = " + num(ci.offending_radius));
        return;
    }

    const AssociatedWeightEstimate est = associated_estimate(w, 22);
    Table at{"associated." + d,
             {"index", "r", "log_v", "log_upper_mono", "log_upper_lp", "log_chosen", "lp_validated_norm"}, {}};
    std::vector<double> radii = {0.1, 0.3, 0.5, 0.7, 0.9};
    for (int k = 4; k <= 20; k += 2) {
        radii.push_back(1.0 - std::ldexp(1.0, -k));
    }
    const MomentCache cache(w);
    long long i = 0;
    for (double r : radii) {
        const double gap = 1.0 - r;
        const double log_v = w.log_at_gap(gap);
        const double mono = mono_envelope_at_gap(cache, gap, order_cap_for_gap(gap, 512)).log_value;
        double lp_log = std::numeric_limits<double>::infinity();
        double lp_norm = std::numeric_limits<double>::quiet_NaN();
        if (r <= 0.9) {
            const LpEstimate lp = associated_upper_lp(w, r, {}, &cache);
            lp_log = std::max(std::log(lp.value), log_v);
            lp_norm = lp.validated_norm;
            const double mono_same_degree = mono_envelope_at_gap(cache, gap, 128).log_value;
            if (lp.validated_norm > 1.0 + 1e-9 || lp.value > std::exp(mono_same_degree) + 1e-9) {
                res.fail();
            }
        }
        const double chosen = std::min({est.log_value_at_gap(gap), mono, lp_log});
        if (chosen < log_v - 1e-12) {
            res.fail();
        }
        const bool has_lp = r <= 0.9;
        at.add({i++, r, log_v, mono, has_lp ? Cell(lp_log) : Cell(std::string("NA")), chosen,
                has_lp ? Cell(lp_norm) : Cell(std::string("NA"))});
    }
    rep.tables.push_back(std::move(at));

    if (!c.doubling) {
        return;
    }
    DoublingOptions dopts;
    dopts.s0 = c.s0;
    Table dt{"doubling." + d, {"index", "source", "m_estimate", "log_m_estimate", "verdict", "s0"}, {}};
    Table bt{"boundary." + d, {"index", "source", "s", "log_l", "log_ratio_to_half"}, {}};
    long long di = 0;
    long long bi = 0;
    for (BoundarySource src : {BoundarySource::associated_estimate, BoundarySource::raw_weight}) {
        const BoundaryFunction l =
            src == BoundarySource::raw_weight ? boundary_l(w, src) : boundary_l(est, dyadic_s_grid());
        const DoublingReport dr = doubling_check(l, dopts);
        for (std::size_t k = 0; k < l.s.size(); ++k) {
            const Cell ratio = k < dr.log_ratios.size() ? Cell(dr.log_ratios[k]) : Cell(std::string("NA"));
            bt.add({bi++, to_string(src), l.s[k], l.log_l[k], ratio});
        }
        dt.add({di++, to_string(src), dr.m_estimate, dr.log_m_estimate, to_string(dr.verdict), c.s0});
        for (std::size_t k = 1; k < l.log_l.size(); ++k) {
            if (w.non_increasing() && l.log_l[k] > l.log_l[k - 1] + 1e-12) {
                res.fail(); // l must be non-decreasing in s
            }
        }
    }
    rep.tables.push_back(std::move(bt));
    rep.tables.push_back(std::move(dt));
    rep.notes.push_back("doubling source 'raw-weight proxy' evaluates l on v itself and is reported alongside, not "
                        "substituted for, the associated estimate");
}

void add_continuity(Table& summary, Table& shells, long long& si, const ContinuityReport& r, const std::string& tag) {
    summary.add({static_cast<long long>(summary.rows.size()), tag, r.criterion, r.map, r.weight_x, r.weight_z,
                 r.sup_estimate, r.log_sup_estimate, r.sup_infinite, static_cast<long long>(r.samples),
                 to_string(r.verdict), r.map_certified});
    for (const ShellTrend& t : r.boundary_trend) {
        shells.add({si++, tag, r.criterion, static_cast<long long>(t.k), t.radius, static_cast<long long>(t.samples),
                    t.max_ratio, t.log_max_ratio, t.image_norm_at_max});
    }
}

void run_compop(const RunConfig& c, const TripleModel& m, Report& rep, Outcome& res) {
    const Weight vx = weight_of(c.weight_x.empty() ? c.weight : c.weight_x, "--weight-x");
    const Weight vz = weight_of(c.weight_z.empty() ? c.weight : c.weight_z, "--weight-z");
    HoloMap phi = [&] {
        try {
            return HoloMap::parse(c.map, m);
        } catch (const UsageError& e) {
            throw UsageError(std::string("--map: ") + e.what());
        }
    }();
    if (!(c.r0 > 0.0 && c.r0 < 1.0)) {
        throw UsageError("--r0 must lie in (0,1)");
    }
    ShellOptions opts;
    opts.shells = c.shells;
    opts.samples_per_shell = c.samples ? static_cast<std::size_t>(c.samples) : 128;
    opts.seed = c.seed;

    const std::string tag = c.map + "|" + vx.descriptor() + "|" + vz.descriptor();
    Table summary{"criteria", {"index", "case", "criterion", "map", "weight_x", "weight_z", "sup_estimate",
                               "log_sup_estimate", "sup_infinite", "samples", "verdict", "map_certified"},
                  {}};
    Table shells{"shells", {"index", "case", "criterion", "k", "radius", "samples", "max_ratio", "log_max_ratio",
                            "image_norm_at_max"},
                 {}};
    long long si = 0;

    const ShellSamples probe = sample_shells(phi, opts);
    const AssociatedWeightEstimate assoc = associated_estimate(vz, std::max(22, octaves_for_gap(probe.min_image_gap)));
    const ContinuityReport sup = criterion_sup_ratio(phi, vx, vz, assoc, opts);
    const ContinuityReport tail = criterion_tail(phi, vx, vz, assoc, c.r0, opts);
    add_continuity(summary, shells, si, sup, tag);
    add_continuity(summary, shells, si, tail, tag);
    if (sup.verdict != ContinuityVerdict::inconclusive && tail.verdict != ContinuityVerdict::inconclusive &&
        sup.verdict != tail.verdict) {
        res.fail();
        rep.notes.push_back("sup-ratio and tail criteria disagree");
    }

    const TheoremReport th = theorem_verdict(vx, vz, assoc, c.s0);
    Table tt{"theorem", {"index", "weight_x", "weight_z", "verdict", "vz_non_increasing", "condition_I", "K",
                         "witness_r", "s0", "m_estimate", "doubling", "raw_m_estimate", "raw_doubling", "reasons"},
             {}};
    std::string reasons;
    for (const std::string& r : th.reasons) {
        reasons += (reasons.empty() ? "" : "; ") + r;
    }
    tt.add({0LL, vx.descriptor(), vz.descriptor(), to_string(th.verdict), th.vz_non_increasing,
            th.condition_i_x && th.condition_i_z, th.domination.k, th.domination.witness_r, c.s0,
            th.doubling ? Cell(th.doubling->m_estimate) : Cell(std::string("NA")),
            th.doubling ? Cell(to_string(th.doubling->verdict)) : Cell(std::string("NA")),
            th.raw_doubling ? Cell(th.raw_doubling->m_estimate) : Cell(std::string("NA")),
            th.raw_doubling ? Cell(to_string(th.raw_doubling->verdict)) : Cell(std::string("NA")), reasons});
    if (th.verdict == TheoremVerdict::all_continuous && sup.verdict == ContinuityVerdict::not_continuous) {
        res.fail();
        rep.notes.push_back("per-map criterion contradicts the theorem verdict");
    }

    if (vx.descriptor() == vz.descriptor()) {
        for (const MobiusSpotRow& row : spot_check_mobius_family(vz, m, parse_list(c.spot_centers, "--spot-centers"), opts)) {
            add_continuity(summary, shells, si, row.report, "spot|center_norm=" + num(row.center_norm));
        }
    }
    rep.tables.push_back(std::move(summary));
    rep.tables.push_back(std::move(shells));
    rep.tables.push_back(std::move(tt));
    rep.notes.push_back(sup.notes.front());
}

void run_all(const RunConfig& c, Report& rep, Outcome& res) {
    const std::vector<TripleModel> models = {TripleModel::disc(), TripleModel::hilbert(2), TripleModel::hilbert(3),
                                             TripleModel::matrix(2, 2), TripleModel::matrix(2, 3)};
    for (const TripleModel& m : models) {
        run_axioms(c, m, rep, res);
    }
    for (const TripleModel& m : models) {
        run_mobius(c, m, rep, res);
    }
    for (const TripleModel& m : models) {
        for (double a : {0.2, 0.4, 0.6, 0.8}) {
            RunConfig cc = c;
            cc.center_norm = a;
            cc.samples = c.samples ? c.samples : 2000;
            run_lemma_sup(cc, m, rep, res);
        }
    }
    for (const TripleModel& m : models) {
        RunConfig cc = c;
        if (!m.has_euclidean_norm()) {
            cc.trials = c.trials ? c.trials : 10;
        }
        run_eq1(cc, m, rep, res);
    }
    for (const char* w : {"power:1", "expdecay:1"}) {
        RunConfig cc = c;
        cc.weight = w;
        cc.doubling = true;
        run_weights(cc, rep, res);
    }
    for (const char* w : {"power:1", "expdecay:1"}) {
        RunConfig cc = c;
        cc.weight = w;
        cc.weight_x.clear();
        cc.weight_z.clear();
        cc.map = "mobius:0.5";
        RunConfig disc = cc;
        disc.model = "disc";
        Report sub;
        run_compop(disc, TripleModel::disc(), sub, res);
        for (Table& t : sub.tables) {
            t.name = std::string("compop.") + w + "." + t.name;
            rep.tables.push_back(std::move(t));
        }
    }
}

std::vector<std::pair<std::string, std::string>> resolved(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> out = {{"model", c.model},
                                                            {"seed", std::to_string(c.seed)},
                                                            {"trials", std::to_string(c.trials)},
                                                            {"tol", num(c.tol)},
                                                            {"samples", std::to_string(c.samples)},
                                                            {"center-norm", num(c.center_norm)},
                                                            {"r", c.r ? num(*c.r) : std::string("sweep")},
                                                            {"weight", c.weight},
                                                            {"weight-x", c.weight_x.empty() ? c.weight : c.weight_x},
                                                            {"weight-z", c.weight_z.empty() ? c.weight : c.weight_z},
                                                            {"doubling", c.doubling ? "true" : "false"},
                                                            {"map", c.map},
                                                            {"r0", num(c.r0)},
                                                            {"s0", num(c.s0)},
                                                            {"shells", std::to_string(c.shells)},
                                                            {"spot-centers", c.spot_centers},
                                                            {"format", c.format}};
    return out;
}

constexpr const char* kSchemas = R"(Exit status: 0 ok (verdicts are report content), 1 invariant violated,
2 usage error, 3 numerical failure. trials/tol/samples = 0 select command defaults.

CSV output: '#' header lines (version, command, seed, resolved config), then one
block per table: '# table NAME', a header row, data rows. Every row starts with
seed and the table's index column; numbers carry 17 significant digits.
  axioms.MODEL     index,model,axiom,passed,worst_residual,worst_trial,tol
  mobius.MODEL     index,model,check,passed,worst_residual,worst_trial,tol
  lemma_sup.*      index,model,center_norm,r,formula,witness_value,max_sample,
                   sup_estimate,witness_match,samples_below_formula
  eq1.MODEL        index,model,norm_x,target,estimate,ratio,certified,passed
  condition_I.W    index,radius,minimum,log_minimum,argmin,passed
  associated.W     index,r,log_v,log_upper_mono,log_upper_lp,log_chosen,
                   lp_validated_norm
  boundary.W       index,source,s,log_l,log_ratio_to_half
  doubling.W       index,source,m_estimate,log_m_estimate,verdict,s0
  criteria         index,case,criterion,map,weight_x,weight_z,sup_estimate,
                   log_sup_estimate,sup_infinite,samples,verdict,map_certified
  shells           index,case,criterion,k,radius,samples,max_ratio,
                   log_max_ratio,image_norm_at_max
  theorem          index,weight_x,weight_z,verdict,vz_non_increasing,
                   condition_I,K,witness_r,s0,m_estimate,doubling,
                   raw_m_estimate,raw_doubling,reasons
Config file (--config): 'key = value' lines using the long flag names; values
override the command line. TRIPLE_LAB_THREADS caps the worker count.)";

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Numerical laboratory for JB*-triples, Möbius maps, weights and composition operators", "triple-lab"};
    app.footer(kSchemas);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    auto common = [&](CLI::App* sub) {
        sub->add_option("--model", cfg.model, "disc | hilbert:N | matrix:PxQ");
        sub->add_option("--seed", cfg.seed, "64-bit seed");
        sub->add_option("--trials", cfg.trials, "number of random trials");
        sub->add_option("--tol", cfg.tol, "tolerance");
        sub->add_option("--samples", cfg.samples, "sampling budget (per shell for compop)");
        sub->add_option("--center-norm", cfg.center_norm, "norm of the Möbius center");
        sub->add_option("--r", cfg.r, "sphere radius (lemma-sup); sweep 0.1..0.9 if absent");
        sub->add_option("--weight", cfg.weight, "power:A | expdecay:B | constant:C | table:PATH");
        sub->add_option("--weight-x", cfg.weight_x, "domain weight (default --weight)");
        sub->add_option("--weight-z", cfg.weight_z, "codomain weight (default --weight)");
        sub->add_flag("--doubling", cfg.doubling, "run the doubling test");
        sub->add_option("--map", cfg.map, "identity | mobius:T | pow:K | scale:C | linear:PATH | compose:[...]");
        sub->add_option("--r0", cfg.r0, "tail radius for the tail criterion");
        sub->add_option("--s0", cfg.s0, "doubling threshold s0");
        sub->add_option("--shells", cfg.shells, "number of shells 1 - 2^-k");
        sub->add_option("--spot-centers", cfg.spot_centers, "comma-separated Möbius center norms");
        sub->add_option("--format", cfg.format, "human | csv | structured");
        sub->add_option("--out", cfg.out, "write the report to this file");
        sub->add_option("--config", cfg.config, "key = value file overriding flags");
    };
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"axioms", "triple axiom suite"},
             {"mobius", "Möbius map identities"},
             {"lemma-sup", "sup of ||g_a(x)|| over a sphere"},
             {"eq1", "norm of the inverse Bergman square root"},
             {"weights", "Condition I, associated weights, doubling"},
             {"compop", "composition-operator criteria and theorem verdict"},
             {"all", "full battery"}}) {
        common(app.add_subcommand(name, help));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (!cfg.config.empty()) {
            apply_config_file(cfg, cfg.config);
        }
        Format format = Format::human;
        if (cfg.format == "csv") {
            format = Format::csv;
        } else if (cfg.format == "structured") {
            format = Format::structured;
        } else if (cfg.format != "human") {
            throw UsageError("--format: unknown format '" + cfg.format + "'");
        }
        if (cfg.shells < 1 || cfg.trials < 0 || cfg.samples < 0 || cfg.tol < 0) {
            throw UsageError("--shells must be >= 1 and --trials, --samples, --tol non-negative");
        }

        Report rep;
        rep.command = cfg.command;
        rep.seed = cfg.seed;
        rep.config = resolved(cfg);
        Outcome res;
        const std::string& cmd = cfg.command;
        if (cmd == "axioms") {
            run_axioms(cfg, model_of(cfg), rep, res);
        } else if (cmd == "mobius") {
            run_mobius(cfg, model_of(cfg), rep, res);
        } else if (cmd == "lemma-sup") {
            run_lemma_sup(cfg, model_of(cfg), rep, res);
        } else if (cmd == "eq1") {
            run_eq1(cfg, model_of(cfg), rep, res);
        } else if (cmd == "weights") {
            run_weights(cfg, rep, res);
        } else if (cmd == "compop") {
            run_compop(cfg, model_of(cfg), rep, res);
        } else {
            run_all(cfg, rep, res);
        }

        if (cfg.out.empty()) {
            cli::write_report(std::cout, rep, format, kVersion);
        } else {
            std::ofstream os(cfg.out, std::ios::binary);
            if (!os) {
                throw UsageError("--out: cannot write '" + cfg.out + "'");
            }
            cli::write_report(os, rep, format, kVersion);
        }
        return res.status;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidMapError& e) {
        std::cerr << "usage error: map rejected: " << e.what() << "\n";
        return 2;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

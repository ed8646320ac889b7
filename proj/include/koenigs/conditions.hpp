#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "koenigs/catalog.hpp"
#include "koenigs/engine.hpp"
#include "koenigs/norms.hpp"

namespace koenigs {

/// Inequality margins above this count as violations.
inline constexpr double kPointTolerance = 1e-9;

enum class Verdict { HoldsOnGrid, Violated, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::HoldsOnGrid: return "holds-on-grid";
        case Verdict::Violated: return "violated";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "";
}

/// Left and right side of a pointwise inequality lhs <= rhs.
struct PointCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin() const noexcept { return lhs - rhs; }
};

struct ConditionSample {
    cplx z;
    std::optional<PointCheck> check;  // empty on evaluation failure
};

struct NamedEstimate {
    std::string id;
    SeminormEstimate estimate;
};

struct ConditionReport {
    std::string id;
    std::map<std::string, double> parameters;
    Verdict verdict = Verdict::Inconclusive;
    /// Verdict wording; differs from to_string(verdict) for the boundedness test.
    std::string label;
    /// Max over evaluated points of lhs - rhs; absent for sup-estimate checks.
    std::optional<double> worst_margin;
    cplx witness{};
    double coverage = 0.0;
    std::vector<ConditionSample> samples;
    std::vector<NamedEstimate> quantities;
    std::vector<std::string> notes;
};

// ---------------------------------------------------------------------------
// Pointwise forms. The checkers sweep these; a stored witness re-evaluates
// through the same function.

/// |phi^(h_alpha)(phi_m(z))| against |phi'(0)|.
inline PointCheck condition_A_point(const MapExpr& map, double alpha, int m, cplx z) {
    const cplx w = iterate(map, z, m).value;
    return {hyperbolic_alpha_derivative(map, alpha, w), std::abs(map.eval(cplx{0.0, 0.0}).derivative)};
}

namespace detail {

/// log(2 / (1 - r)) with 1 - r formed directly.
inline double log_two_over(double one_minus_r) { return std::log(2.0 / one_minus_r); }

inline Jet eval_inside(const MapExpr& map, cplx z) {
    const Jet p = map.eval(z);
    if (std::abs(p.value) >= 1.0) {
        throw DomainError("map value outside the open unit disk");
    }
    return p;
}

}  // namespace detail

/// (1-|z|^2)/(1-|phi|^2) * log(2/(1-|z|)) / log(2/(1-|phi|)) * |phi'(z)| against |phi'(0)|.
inline PointCheck eq12_point(const MapExpr& map, cplx z) {
    const Jet p = detail::eval_inside(map, z);
    const double rz = std::abs(z);
    const double rp = std::abs(p.value);
    const double lhs = one_minus_abs2(z) / one_minus_abs2(p.value) * detail::log_two_over(1.0 - rz) /
                       detail::log_two_over(1.0 - rp) * std::abs(p.derivative);
    return {lhs, std::abs(map.eval(cplx{0.0, 0.0}).derivative)};
}

enum class BetaVariant { Plain, LogWeighted };

inline const char* to_string(BetaVariant v) { return v == BetaVariant::Plain ? "plain" : "log-weighted"; }

/// Hypothesis (i) of the weighted-beta theorems: |u| ((1-|z|^2)/(1-|phi|^2))^beta,
/// times log(2/(1-|z|)^beta) / log(2/(1-|phi|)^beta) for the log-weighted
/// variant, against |u(0)|.
inline PointCheck weighted_beta_point(const MapExpr& map, const MapExpr& weight, double beta, BetaVariant variant,
                                      cplx z) {
    const Jet p = detail::eval_inside(map, z);
    const double u = std::abs(weight(z));
    double lhs = u * std::pow(one_minus_abs2(z) / one_minus_abs2(p.value), beta);
    if (variant == BetaVariant::LogWeighted) {
        // log(2/(1-x)^beta) = log 2 - beta log(1 - x)
        const double num = std::log(2.0) - beta * std::log(1.0 - std::abs(z));
        const double den = std::log(2.0) - beta * std::log(1.0 - std::abs(p.value));
        lhs *= num / den;
    }
    return {lhs, std::abs(weight(cplx{0.0, 0.0}))};
}

/// Hypothesis (ii) of the log-weighted theorem:
/// |phi^(h)(z)| log(2/(1-|z|)) / log(2/(1-|phi|)) against |phi'(0)|.
inline PointCheck log_weighted_second_point(const MapExpr& map, cplx z) { return eq12_point(map, z); }

namespace detail {

template <class PointFn>
void sweep(ConditionReport& rep, const DiskGrid& grid, PointFn&& fn) {
    std::size_t ok = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (cplx z : grid.points()) {
        try {
            const PointCheck c = fn(z);
            if (!std::isfinite(c.lhs) || !std::isfinite(c.rhs)) {
                rep.samples.push_back({z, std::nullopt});
                continue;
            }
            rep.samples.push_back({z, c});
            ++ok;
            if (c.margin() > worst) {
                worst = c.margin();
                rep.witness = z;
            }
        } catch (const Error&) {
            rep.samples.push_back({z, std::nullopt});
        }
    }
    rep.coverage = grid.size() ? static_cast<double>(ok) / grid.size() : 0.0;
    if (ok == 0) {
        rep.verdict = Verdict::Inconclusive;
    } else {
        rep.worst_margin = worst;
        if (worst > kPointTolerance) {
            rep.verdict = Verdict::Violated;
        } else {
            rep.verdict = rep.coverage >= 0.99 ? Verdict::HoldsOnGrid : Verdict::Inconclusive;
        }
    }
    rep.label = to_string(rep.verdict);
}

inline MapExpr unit_weight() { return parse_map("1").with_name("1"); }

}  // namespace detail

// ---------------------------------------------------------------------------

/// Condition (A): |phi^(h_alpha)(phi_m(z))| <= |phi'(0)| on every grid point.
inline ConditionReport check_condition_A(const MapExpr& map, double alpha, int m,
                                         const DiskGrid& grid = DiskGrid::standard()) {
    if (!(alpha > 0.0) || m < 0) {
        throw RangeError("condition (A) needs alpha > 0 and m >= 0");
    }
    require_admissible(map);
    ConditionReport rep;
    rep.id = "condition_A";
    rep.parameters = {{"alpha", alpha}, {"m", static_cast<double>(m)}};
    detail::sweep(rep, grid, [&](cplx z) { return condition_A_point(map, alpha, m, z); });
    return rep;
}

/// The logarithmically weighted hyperbolic-derivative bound, evaluated literally.
inline ConditionReport check_eq12(const MapExpr& map, const DiskGrid& grid = DiskGrid::standard()) {
    require_admissible(map);
    ConditionReport rep;
    rep.id = "eq12";
    detail::sweep(rep, grid, [&](cplx z) { return eq12_point(map, z); });
    return rep;
}

/// Boundedness quantities for u C_phi on B_alpha, one sup estimate per
/// displayed quantity. Labels: bounded-evidence when every estimate
/// converged, unbounded-evidence when any diverges.
inline ConditionReport check_zh21(const MapExpr& map, const std::optional<MapExpr>& weight, double alpha,
                                  const RefinementPolicy& policy = {}) {
    if (!(alpha > 0.0)) {
        throw RangeError("alpha must be positive");
    }
    const MapExpr u = weight.value_or(detail::unit_weight());
    ConditionReport rep;
    rep.id = "zh21";
    rep.parameters = {{"alpha", alpha}};

    auto weighted_hyperbolic = [&](cplx z) {
        const Jet p = detail::eval_inside(map, z);
        return std::abs(u(z)) * std::pow(one_minus_abs2(z) / one_minus_abs2(p.value), alpha) *
               std::abs(p.derivative);
    };
    if (alpha < 1.0) {
        rep.quantities.push_back({"1:u_seminorm", bloch_seminorm(as_function(u), alpha, policy)});
        rep.quantities.push_back({"1:sup", estimate_sup(weighted_hyperbolic, policy, alpha)});
    } else if (alpha == 1.0) {
        rep.quantities.push_back({"2a", estimate_sup(
                                            [&](cplx z) {
                                                const Jet p = detail::eval_inside(map, z);
                                                return std::abs(u.eval(z).derivative) * one_minus_abs2(z) *
                                                       std::log(1.0 / one_minus_abs2(p.value));
                                            },
                                            policy, alpha)});
        rep.quantities.push_back({"2b", estimate_sup(weighted_hyperbolic, policy, alpha)});
    } else {
        rep.quantities.push_back({"3a", estimate_sup(
                                            [&](cplx z) {
                                                const Jet p = detail::eval_inside(map, z);
                                                return std::abs(u.eval(z).derivative) *
                                                       std::pow(one_minus_abs2(z), alpha) /
                                                       std::pow(one_minus_abs2(p.value), alpha - 1.0);
                                            },
                                            policy, alpha)});
        rep.quantities.push_back({"3b", estimate_sup(weighted_hyperbolic, policy, alpha)});
    }
    bool all_converged = true;
    bool any_diverging = false;
    double worst_cov = 1.0;
    double biggest = -1.0;
    for (const auto& q : rep.quantities) {
        all_converged = all_converged && q.estimate.converged();
        any_diverging = any_diverging || q.estimate.diverging();
        worst_cov = std::min(worst_cov, q.estimate.coverage);
        if (q.estimate.value > biggest) {
            biggest = q.estimate.value;
            rep.witness = q.estimate.witness;
        }
    }
    rep.coverage = worst_cov;
    if (any_diverging) {
        rep.verdict = Verdict::Violated;
        rep.label = "unbounded-evidence";
    } else if (all_converged) {
        rep.verdict = Verdict::HoldsOnGrid;
        rep.label = "bounded-evidence";
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.label = "inconclusive";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Compactness

enum class Trend { TendsToZero, BoundedAway, Inconclusive, Vacuous };

inline const char* to_string(Trend t) {
    switch (t) {
        case Trend::TendsToZero: return "->0";
        case Trend::BoundedAway: return "bounded-away";
        case Trend::Inconclusive: return "inconclusive";
        case Trend::Vacuous: return "vacuous";
    }
    return "";
}

struct CompactnessReport {
    std::string quantity;
    std::vector<double> delta_levels;
    /// (|phi(z)|, quantity) for points with |phi(z)| > 1 - max(delta), ascending in |phi|.
    std::vector<std::pair<double, double>> samples;
    /// Max of the quantity over {|phi(z)| > 1 - delta}; empty when no point qualifies.
    std::vector<std::optional<double>> tail_max;
    Trend trend = Trend::Inconclusive;
    /// Last tail maximum used by the trend classification.
    double plateau = 0.0;
};

struct CompactnessOptions {
    int depth = 20;
    int angular_base = 64;
    int angular_cap = 8192;
};

namespace detail {

/// Trend of nested tail maxima (outermost first). With fewer than three
/// nonempty delta tails, the deepest tail is split further by |phi| rank.
inline void classify_trend(CompactnessReport& rep) {
    std::vector<double> seq;
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < rep.tail_max.size(); ++i) {
        if (rep.tail_max[i]) {
            seq.push_back(*rep.tail_max[i]);
            deepest = i;
        }
    }
    if (seq.empty()) {
        rep.trend = Trend::Vacuous;
        return;
    }
    if (seq.size() < 3) {
        const double cut = 1.0 - rep.delta_levels[deepest];
        std::vector<double> tail;
        for (const auto& [a, q] : rep.samples) {
            if (a > cut) {
                tail.push_back(q);
            }
        }
        for (std::size_t keep = tail.size() / 2; keep >= 4 && seq.size() < 3; keep /= 2) {
            seq.push_back(*std::max_element(tail.end() - static_cast<std::ptrdiff_t>(keep), tail.end()));
        }
    }
    const double first = seq.front();
    const double last = seq.back();
    rep.plateau = last;
    if (seq.size() < 2) {
        rep.trend = last <= kPointTolerance ? Trend::TendsToZero : Trend::Inconclusive;
    } else if (last <= kPointTolerance) {
        rep.trend = Trend::TendsToZero;
    } else if (last >= 0.5 * first) {
        rep.trend = Trend::BoundedAway;
    } else if (last <= 0.1 * first) {
        rep.trend = Trend::TendsToZero;
    } else {
        rep.trend = Trend::Inconclusive;
    }
}

}  // namespace detail

/// Limits of the compactness quantities as |phi(z)| -> 1, taken as maxima
/// over the tails {|phi(z)| > 1 - delta}. One report per quantity of the
/// applicable alpha case.
inline std::vector<CompactnessReport> check_compactness(const MapExpr& map, const std::optional<MapExpr>& weight,
                                                        double alpha,
                                                        std::vector<double> delta_levels = {1e-1, 1e-2, 1e-3, 1e-4,
                                                                                            1e-5},
                                                        const CompactnessOptions& opt = {}) {
    if (!(alpha > 0.0)) {
        throw RangeError("alpha must be positive");
    }
    if (delta_levels.empty() || !std::is_sorted(delta_levels.rbegin(), delta_levels.rend()) ||
        !(delta_levels.back() > 0.0) || !(delta_levels.front() < 1.0)) {
        throw RangeError("delta levels must descend within (0, 1)");
    }
    const MapExpr u = weight.value_or(detail::unit_weight());
    std::vector<std::string> ids;
    if (alpha < 1.0) {
        ids = {"1"};
    } else if (alpha == 1.0) {
        ids = {"2a", "2b"};
    } else {
        ids = {"3a", "3b"};
    }
    auto quantity = [&](const std::string& id, cplx z, const Jet& p) {
        const double wz = one_minus_abs2(z);
        const double wp = one_minus_abs2(p.value);
        if (id == "2a") {
            return std::abs(u.eval(z).derivative) * wz * std::log(1.0 / wp);
        }
        if (id == "3a") {
            return std::abs(u.eval(z).derivative) * std::pow(wz, alpha) / std::pow(wp, alpha - 1.0);
        }
        return std::abs(u(z)) * std::pow(wz / wp, alpha) * std::abs(p.derivative);
    };

    const DiskGrid grid = DiskGrid::ladder(opt.depth, opt.angular_base, opt.angular_cap);
    const double outer_cut = 1.0 - delta_levels.front();
    std::vector<CompactnessReport> out;
    for (const auto& id : ids) {
        CompactnessReport rep;
        rep.quantity = id;
        rep.delta_levels = delta_levels;
        for (cplx z : grid.points()) {
            try {
                const Jet p = detail::eval_inside(map, z);
                const double a = std::abs(p.value);
                if (a > outer_cut) {
                    const double q = quantity(id, z, p);
                    if (std::isfinite(q)) {
                        rep.samples.emplace_back(a, q);
                    }
                }
            } catch (const Error&) {
            }
        }
        std::stable_sort(rep.samples.begin(), rep.samples.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        for (double delta : delta_levels) {
            std::optional<double> mx;
            for (const auto& [a, q] : rep.samples) {
                if (a > 1.0 - delta) {
                    mx = std::max(mx.value_or(q), q);
                }
            }
            rep.tail_max.push_back(mx);
        }
        detail::classify_trend(rep);
        out.push_back(std::move(rep));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Growth conditions on circles

struct Th23Sample {
    double r = 0.0;
    double m_r = 0.0;
    double a_r = 0.0;
    /// log(1 - r) log M_r
    double growth = 0.0;
    /// log a_r - epsilon * growth; negative when hypothesis (ii) holds here.
    double margin = 0.0;
};

struct Th23Report {
    ConditionReport report;
    std::vector<Th23Sample> samples;
    bool condition_i_diverges = false;
};

/// True when values increase strictly and either end above 10 or keep
/// increments from shrinking below half the first increment.
inline bool diverges_to_infinity(const std::vector<double>& v) {
    if (v.size() < 2) {
        return false;
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            return false;
        }
    }
    const double first_step = v[1] - v[0];
    const double last_step = v.back() - v[v.size() - 2];
    return v.back() > 10.0 || last_step >= 0.5 * first_step;
}

inline Th23Report check_th23(const MapExpr& map, const MapExpr& weight, double epsilon, std::vector<double> r_samples,
                             int angles = 512, const RefinementPolicy& policy = {}) {
    if (!(epsilon > 0.0)) {
        throw RangeError("epsilon must be positive");
    }
    if (r_samples.empty() || !std::is_sorted(r_samples.begin(), r_samples.end()) || !(r_samples.front() > 0.0) ||
        !(r_samples.back() < 1.0)) {
        throw RangeError("radius samples must ascend within (0, 1)");
    }
    require_admissible(map);
    if (std::abs(weight(cplx{0.0, 0.0})) <= 1e-12) {
        throw RangeError("weight must not vanish at the origin");
    }
    const double phi_sup = sup_norm(as_function(map), policy).value;
    if (!(epsilon * std::log(phi_sup) > -1.0)) {
        throw RangeError("epsilon * log ||phi||_inf must exceed -1");
    }
    Th23Report out;
    ConditionReport& rep = out.report;
    rep.id = "th23";
    rep.parameters = {{"epsilon", epsilon}, {"phi_sup_estimate", phi_sup}};
    std::vector<double> growth;
    std::size_t ok = 0;
    std::size_t total = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (double r : r_samples) {
        Th23Sample s;
        s.r = r;
        cplx a_witness{};
        for (cplx z : DiskGrid::circle(r, angles).points()) {
            ++total;
            try {
                const Jet p = map.eval(z);
                const Jet w = weight.eval(z);
                s.m_r = std::max(s.m_r, std::abs(p.value));
                const double a = std::abs(w.derivative * p.value) + std::abs(w.value * p.derivative);
                if (a > s.a_r) {
                    s.a_r = a;
                    a_witness = z;
                }
                ++ok;
            } catch (const Error&) {
            }
        }
        s.growth = std::log(1.0 - r) * std::log(s.m_r);
        s.margin = std::log(s.a_r) - epsilon * s.growth;
        growth.push_back(s.growth);
        if (s.margin > worst) {
            worst = s.margin;
            rep.witness = a_witness;
        }
        out.samples.push_back(s);
    }
    rep.coverage = total ? static_cast<double>(ok) / total : 0.0;
    rep.worst_margin = worst;
    out.condition_i_diverges = diverges_to_infinity(growth);
    if (worst >= 0.0) {
        rep.verdict = Verdict::Violated;
    } else if (out.condition_i_diverges) {
        rep.verdict = Verdict::HoldsOnGrid;
    } else {
        rep.verdict = Verdict::Inconclusive;
    }
    rep.label = to_string(rep.verdict);
    return out;
}

struct IterateSupReport {
    ConditionReport report;
    /// sups[k-1] = max over |z| = r_probe of |phi_k(z)|
    std::vector<double> sups;
    std::optional<int> first_k;
};

/// Least k <= k_max with max_{|z| = r_probe} |phi_k(z)| <= 1 - margin.
inline IterateSupReport check_iterate_supnorm(const MapExpr& map, int k_max, double r_probe = 0.999,
                                              int angles = 512, double margin = 1e-3) {
    if (k_max < 1 || !(r_probe > 0.0 && r_probe < 1.0)) {
        throw RangeError("need k_max >= 1 and 0 < r_probe < 1");
    }
    require_admissible(map);
    IterateSupReport out;
    ConditionReport& rep = out.report;
    rep.id = "iterate_supnorm";
    rep.parameters = {{"k_max", static_cast<double>(k_max)}, {"r_probe", r_probe}, {"margin", margin}};
    const DiskGrid circle = DiskGrid::circle(r_probe, angles);
    std::vector<Jet> w;
    for (cplx z : circle.points()) {
        w.push_back(Jet::variable(z));
    }
    std::vector<bool> alive(w.size(), true);
    for (int k = 1; k <= k_max; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!alive[i]) {
                continue;
            }
            try {
                w[i] = map.eval(w[i]);
                if (std::abs(w[i].value) > s) {
                    s = std::abs(w[i].value);
                    if (!out.first_k) {
                        rep.witness = circle.points()[i];
                    }
                }
            } catch (const Error&) {
                alive[i] = false;
            }
        }
        out.sups.push_back(s);
        if (!out.first_k && s <= 1.0 - margin) {
            out.first_k = k;
        }
    }
    const auto n_alive = static_cast<double>(std::count(alive.begin(), alive.end(), true));
    rep.coverage = n_alive / static_cast<double>(alive.size());
    rep.verdict = out.first_k ? Verdict::HoldsOnGrid : Verdict::Inconclusive;
    rep.label = out.first_k ? "found" : "not found";
    if (out.first_k) {
        rep.parameters["first_k"] = *out.first_k;
    }
    return out;
}

/// Weighted-beta hypotheses, evaluated literally per grid point. The
/// log-weighted variant also checks the second hypothesis; the margin is the
/// larger of the two.
inline ConditionReport check_weighted_beta(const MapExpr& map, const MapExpr& weight, double beta, BetaVariant variant,
                                           const DiskGrid& grid = DiskGrid::standard_with_interior()) {
    if (!(beta > 0.0)) {
        throw RangeError("beta must be positive");
    }
    if (std::abs(weight(cplx{0.0, 0.0})) <= 1e-12) {
        throw RangeError("weight must not vanish at the origin");
    }
    require_admissible(map);
    ConditionReport rep;
    rep.id = "weighted_beta";
    rep.parameters = {{"beta", beta}};
    rep.notes.push_back(std::string("variant ") + to_string(variant));
    if (variant == BetaVariant::LogWeighted && std::trunc(beta) != beta) {
        rep.notes.push_back("log-weighted form is stated for integer beta; evaluated for real beta as given");
    }
    detail::sweep(rep, grid, [&](cplx z) {
        const PointCheck first = weighted_beta_point(map, weight, beta, variant, z);
        if (variant == BetaVariant::Plain) {
            return first;
        }
        const PointCheck second = log_weighted_second_point(map, z);
        return first.margin() >= second.margin() ? first : second;
    });
    return rep;
}

}  // namespace koenigs

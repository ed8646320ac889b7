#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "koenigs/engine.hpp"
#include "koenigs/grid.hpp"

namespace koenigs {

/// Any evaluator returning f(z) and f'(z).
using JetFn = std::function<Jet(cplx)>;

inline JetFn as_function(const MapExpr& f) {
    return [f](cplx z) { return f.eval(z); };
}
inline JetFn as_function(const KoenigsApproximation& a) {
    return [a](cplx z) { return koenigs_eval(a, z); };
}
inline JetFn as_function(const WeightedKoenigs& wk) {
    return [wk](cplx z) { return weighted_eval(wk, z); };
}
inline JetFn power_of(JetFn f, int n) {
    return [f = std::move(f), n](cplx z) { return pow(f(z), n); };
}

/// Nested-grid sup estimation near the boundary.
///
/// Level j sweeps the shell r_{j-1} < |z| <= r_j, r_j = 1 - 2^-j (r_0 = 0, the
/// origin is part of level 1), at `radial_substeps` radii with
/// angular_base * 2^ceil(j/2) angles (capped). The reported per-level values
/// are cumulative sups over |z| <= r_j.
struct RefinementPolicy {
    int max_level = 12;
    int angular_base = 64;
    int angular_cap = 8192;
    int radial_substeps = 16;
    double rel_tol = 1e-3;
    double growth_factor = 1.05;
    double min_coverage = 0.99;
};

enum class Refinement { Converged, Diverging, Inconclusive };

inline const char* to_string(Refinement r) {
    switch (r) {
        case Refinement::Converged: return "converged";
        case Refinement::Diverging: return "diverging";
        case Refinement::Inconclusive: return "inconclusive";
    }
    return "";
}

struct SeminormEstimate {
    double alpha = 0.0;
    double value = 0.0;
    cplx witness{};
    std::vector<double> level_sups;
    Refinement state = Refinement::Inconclusive;
    double coverage = 1.0;

    bool converged() const noexcept { return state == Refinement::Converged; }
    bool diverging() const noexcept { return state == Refinement::Diverging; }
};

/// Converged: last two levels agree to rel_tol. Diverging: last three levels
/// grow by at least growth_factor each step. Otherwise inconclusive.
inline Refinement classify_levels(const std::vector<double>& s, double rel_tol, double growth) {
    const std::size_t n = s.size();
    if (n >= 2) {
        const double a = s[n - 2];
        const double b = s[n - 1];
        if (std::abs(b - a) <= rel_tol * std::max(std::abs(a), std::abs(b))) {
            return Refinement::Converged;
        }
    }
    if (n >= 3 && s[n - 3] > 0.0 && s[n - 2] >= growth * s[n - 3] && s[n - 1] >= growth * s[n - 2]) {
        return Refinement::Diverging;
    }
    return Refinement::Inconclusive;
}

/// Sup of a non-negative pointwise quantity over the disk. Points where the
/// integrand throws a library Error or returns a non-finite value are skipped;
/// fewer than min_coverage evaluable points raise CoverageError.
template <class Integrand>
SeminormEstimate estimate_sup(Integrand&& integrand, const RefinementPolicy& policy, double alpha = 0.0) {
    if (policy.max_level < 3 || policy.radial_substeps < 1 || policy.angular_base < 1) {
        throw RangeError("refinement policy needs at least 3 levels and positive sample counts");
    }
    SeminormEstimate est;
    est.alpha = alpha;
    est.value = -1.0;
    std::size_t total = 0;
    std::size_t ok = 0;
    auto visit = [&](cplx z) {
        ++total;
        try {
            const double q = integrand(z);
            if (!std::isfinite(q)) {
                return;
            }
            ++ok;
            if (q > est.value) {
                est.value = q;
                est.witness = z;
            }
        } catch (const Error&) {
        }
    };
    visit(cplx{0.0, 0.0});
    double r_prev = 0.0;
    for (int j = 1; j <= policy.max_level; ++j) {
        const double r_j = 1.0 - std::ldexp(1.0, -j);
        const int n = DiskGrid::ladder_count(j, policy.angular_base, policy.angular_cap);
        for (int s = 1; s <= policy.radial_substeps; ++s) {
            const double r = r_prev + (r_j - r_prev) * s / policy.radial_substeps;
            for (int m = 0; m < n; ++m) {
                visit(std::polar(r, 2.0 * std::numbers::pi * m / n));
            }
        }
        est.level_sups.push_back(std::max(est.value, 0.0));
        r_prev = r_j;
    }
    est.coverage = static_cast<double>(ok) / static_cast<double>(total);
    if (est.coverage < policy.min_coverage) {
        throw CoverageError("too few evaluable points for a sup estimate", est.coverage);
    }
    est.value = std::max(est.value, 0.0);
    est.state = classify_levels(est.level_sups, policy.rel_tol, policy.growth_factor);
    return est;
}

/// sup (1 - |z|^2)^alpha |f'(z)|.
inline SeminormEstimate bloch_seminorm(const JetFn& f, double alpha, const RefinementPolicy& policy = {}) {
    if (!(alpha > 0.0)) {
        throw RangeError("Bloch exponent alpha must be positive");
    }
    return estimate_sup([&](cplx z) { return std::pow(one_minus_abs2(z), alpha) * std::abs(f(z).derivative); },
                        policy, alpha);
}

/// |f(0)| + sup (1 - |z|^2)^alpha |f'(z)|.
inline double bloch_norm(const JetFn& f, double alpha, const RefinementPolicy& policy = {}) {
    const SeminormEstimate s = bloch_seminorm(f, alpha, policy);
    return std::abs(f(cplx{0.0, 0.0}).value) + s.value;
}

/// sup (1 - |z|^2)^(alpha - 1) |f(z)|, the equivalent norm for alpha > 1.
inline SeminormEstimate lipschitz_type_norm(const JetFn& f, double alpha, const RefinementPolicy& policy = {}) {
    if (!(alpha > 1.0)) {
        throw RangeError("Lipschitz-type norm needs alpha > 1");
    }
    return estimate_sup([&](cplx z) { return std::pow(one_minus_abs2(z), alpha - 1.0) * std::abs(f(z).value); },
                        policy, alpha);
}

/// sup |f| on circles approaching the boundary.
inline SeminormEstimate sup_norm(const JetFn& f, const RefinementPolicy& policy = {}) {
    return estimate_sup([&](cplx z) { return std::abs(f(z).value); }, policy, 0.0);
}

/// |(1 - |z|^2)^alpha phi'(z) / (1 - |phi(z)|^2)^alpha|.
inline double hyperbolic_alpha_derivative(const MapExpr& map, double alpha, cplx z) {
    const Jet p = map.eval(z);
    if (std::abs(p.value) >= 1.0) {
        throw DomainError("map value outside the open unit disk");
    }
    return std::pow(one_minus_abs2(z) / one_minus_abs2(p.value), alpha) * std::abs(p.derivative);
}

struct BlochNumberEstimate {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    /// Evaluated exponents in ascending order with their verdicts.
    std::vector<std::pair<double, Refinement>> evidence;
    /// False if a converged verdict precedes a diverging one.
    bool consistent = true;
};

/// Bracket the infimum of alpha with f in B_alpha by bisecting the sorted
/// alpha grid on the diverging and converged verdicts of bloch_seminorm.
/// With no diverging exponent the lower edge is 0.
inline BlochNumberEstimate bloch_number(const JetFn& f, const std::vector<double>& alpha_grid,
                                        const RefinementPolicy& policy = {}) {
    if (alpha_grid.empty() || !(alpha_grid.front() > 0.0) ||
        !std::is_sorted(alpha_grid.begin(), alpha_grid.end()) ||
        std::adjacent_find(alpha_grid.begin(), alpha_grid.end()) != alpha_grid.end()) {
        throw RangeError("alpha grid must be positive and strictly ascending");
    }
    const int n = static_cast<int>(alpha_grid.size());
    std::map<int, Refinement> seen;
    auto verdict = [&](int i) {
        auto it = seen.find(i);
        if (it == seen.end()) {
            it = seen.emplace(i, bloch_seminorm(f, alpha_grid[i], policy).state).first;
        }
        return it->second;
    };
    // First index that is not diverging.
    int lo = -1, hi = n;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (verdict(mid) == Refinement::Diverging ? lo : hi) = mid;
    }
    const int last_diverging = lo;
    // First index that is converged.
    lo = last_diverging;
    hi = n;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (verdict(mid) == Refinement::Converged ? hi : lo) = mid;
    }
    const int first_converged = hi;

    BlochNumberEstimate out;
    out.lower = last_diverging >= 0 ? alpha_grid[last_diverging] : 0.0;
    out.upper = first_converged < n ? alpha_grid[first_converged] : std::numeric_limits<double>::infinity();
    bool seen_converged = false;
    for (const auto& [i, v] : seen) {
        out.evidence.emplace_back(alpha_grid[i], v);
        if (v == Refinement::Converged) {
            seen_converged = true;
        } else if (v == Refinement::Diverging && seen_converged) {
            out.consistent = false;
        }
    }
    return out;
}

}  // namespace koenigs

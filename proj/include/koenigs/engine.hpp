#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "koenigs/grid.hpp"
#include "koenigs/validate.hpp"

namespace koenigs {

struct IterationOptions {
    double tol = 1e-10;
    int k_max = 200;
    double control_radius = 0.7;
    int control_points = 256;
};

/// Converged Koenigs approximant sigma_k = phi_k / lambda^k at depth k.
struct KoenigsApproximation {
    MapExpr map;
    cplx lambda;
    int depth = 0;
    double cauchy_gap = 0.0;
    double control_radius = 0.0;
    /// gap_history[k] = sup over the control circle of |sigma_{k+1} - sigma_k|.
    std::vector<double> gap_history;
};

/// Converged principal eigenfunction v_k of u C_phi, eigenvalue u(0).
struct WeightedKoenigs {
    MapExpr map;
    MapExpr weight;
    cplx eigenvalue;
    int depth = 0;
    double cauchy_gap = 0.0;
    double control_radius = 0.0;
    std::vector<double> gap_history;
};

/// phi_k(z) with phi_k'(z) accumulated by the chain rule; k = 0 gives (z, 1).
inline Jet iterate(const MapExpr& map, cplx z, int k) {
    if (k < 0) {
        throw RangeError("iterate count must be non-negative");
    }
    Jet w = Jet::variable(z);
    for (int j = 0; j < k; ++j) {
        w = map.eval(w);
    }
    return w;
}

namespace detail {

inline void check_control(double tol, int k_max, double radius) {
    if (!(tol > 0.0)) {
        throw RangeError("tolerance must be positive");
    }
    if (k_max < 1) {
        throw RangeError("k_max must be at least 1");
    }
    if (!(radius > 0.0 && radius < 1.0)) {
        throw RangeError("control radius must lie in (0, 1)");
    }
}

inline cplx next_scale(cplx scale, cplx inv_lambda) {
    const cplx s = scale * inv_lambda;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || std::abs(s) > 1e300) {
        throw DomainError("lambda^-k scaling overflowed");
    }
    return s;
}

/// Runs the Cauchy loop for sigma_k. With stop_at_tol false it records all
/// k_max + 1 gaps. Returns the stopping depth or -1.
inline int koenigs_gaps(const MapExpr& map, cplx lambda, const IterationOptions& opt, bool stop_at_tol,
                        std::vector<double>& gaps) {
    const DiskGrid circle = DiskGrid::circle(opt.control_radius, opt.control_points);
    const cplx inv_lambda = 1.0 / lambda;
    std::vector<Jet> w;
    std::vector<cplx> sigma;
    for (cplx z : circle.points()) {
        w.push_back(Jet::variable(z));
        sigma.push_back(z);
    }
    cplx scale{1.0, 0.0};
    for (int k = 0; k <= opt.k_max; ++k) {
        scale = next_scale(scale, inv_lambda);
        double gap = 0.0;
        for (std::size_t m = 0; m < w.size(); ++m) {
            w[m] = map.eval(w[m]);
            const cplx next = w[m].value * scale;
            gap = std::max(gap, std::abs(next - sigma[m]));
            sigma[m] = next;
        }
        gaps.push_back(gap);
        if (stop_at_tol && k >= 1 && gap <= opt.tol) {
            return k;
        }
    }
    return -1;
}

}  // namespace detail

/// Least k in [1, k_max] with sup_{|z| = radius} |sigma_{k+1} - sigma_k| <= tol.
/// Throws ConvergenceError if none exists.
inline KoenigsApproximation koenigs_approx(const MapExpr& map, const IterationOptions& opt = {}) {
    detail::check_control(opt.tol, opt.k_max, opt.control_radius);
    require_admissible(map);
    KoenigsApproximation a{map, map.eval(cplx{0.0, 0.0}).derivative, 0, 0.0, opt.control_radius, {}};
    const int k = detail::koenigs_gaps(map, a.lambda, opt, true, a.gap_history);
    if (k < 0) {
        throw ConvergenceError("Koenigs iteration did not converge", opt.k_max, a.gap_history.back());
    }
    a.depth = k;
    a.cauchy_gap = a.gap_history.back();
    return a;
}

inline KoenigsApproximation koenigs_approx(const MapExpr& map, double tol, int k_max, double control_radius) {
    IterationOptions opt;
    opt.tol = tol;
    opt.k_max = k_max;
    opt.control_radius = control_radius;
    return koenigs_approx(map, opt);
}

/// Gap sequence for k = 0..k_max without early stopping.
inline std::vector<double> koenigs_gap_sequence(const MapExpr& map, int k_max, double control_radius = 0.7,
                                                int control_points = 256) {
    require_admissible(map);
    IterationOptions opt;
    opt.k_max = k_max;
    opt.control_radius = control_radius;
    opt.control_points = control_points;
    std::vector<double> gaps;
    detail::koenigs_gaps(map, map.eval(cplx{0.0, 0.0}).derivative, opt, false, gaps);
    return gaps;
}

/// sigma_{k*}(z) and its derivative phi_{k*}'(z) / lambda^{k*}.
inline Jet koenigs_eval(const KoenigsApproximation& a, cplx z) {
    const cplx inv_lambda = 1.0 / a.lambda;
    Jet w = Jet::variable(z);
    cplx scale{1.0, 0.0};
    for (int j = 0; j < a.depth; ++j) {
        w = a.map.eval(w);
        scale = detail::next_scale(scale, inv_lambda);
    }
    return {w.value * scale, w.derivative * scale};
}

namespace detail {

inline Jet weighted_factor(const MapExpr& weight, const Jet& w, cplx u0) {
    const Jet u = weight.eval(w);
    if (std::abs(u.value) < kTinyModulus) {
        throw DomainError("weight vanishes at an iterate point");
    }
    return {u.value / u0, u.derivative / u0};
}

}  // namespace detail

/// Partial products v_k = prod_{j<k} u(phi_j) / u(0) with the same Cauchy
/// stopping rule as koenigs_approx.
inline WeightedKoenigs weighted_principal(const MapExpr& map, const MapExpr& weight, const IterationOptions& opt = {}) {
    detail::check_control(opt.tol, opt.k_max, opt.control_radius);
    require_admissible(map);
    const cplx u0 = weight.eval(cplx{0.0, 0.0}).value;
    if (std::abs(u0) <= 1e-12) {
        throw RangeError("weight must not vanish at the origin");
    }
    WeightedKoenigs wk{map, weight, u0, 0, 0.0, opt.control_radius, {}};
    const DiskGrid circle = DiskGrid::circle(opt.control_radius, opt.control_points);
    std::vector<Jet> w;
    std::vector<Jet> v;
    for (cplx z : circle.points()) {
        w.push_back(Jet::variable(z));
        v.push_back(Jet::constant(1.0));
    }
    for (int k = 0; k <= opt.k_max; ++k) {
        double gap = 0.0;
        for (std::size_t m = 0; m < w.size(); ++m) {
            const Jet next = v[m] * detail::weighted_factor(weight, w[m], u0);
            gap = std::max(gap, std::abs(next.value - v[m].value));
            v[m] = next;
            w[m] = map.eval(w[m]);
        }
        wk.gap_history.push_back(gap);
        if (k >= 1 && gap <= opt.tol) {
            wk.depth = k;
            wk.cauchy_gap = gap;
            return wk;
        }
    }
    throw ConvergenceError("weighted eigenfunction iteration did not converge", opt.k_max, wk.gap_history.back());
}

inline WeightedKoenigs weighted_principal(const MapExpr& map, const MapExpr& weight, double tol, int k_max,
                                          double control_radius) {
    IterationOptions opt;
    opt.tol = tol;
    opt.k_max = k_max;
    opt.control_radius = control_radius;
    return weighted_principal(map, weight, opt);
}

/// v_{k*}(z) with derivative.
inline Jet weighted_eval(const WeightedKoenigs& wk, cplx z) {
    Jet w = Jet::variable(z);
    Jet v = Jet::constant(1.0);
    for (int j = 0; j < wk.depth; ++j) {
        v = v * detail::weighted_factor(wk.weight, w, wk.eigenvalue);
        w = wk.map.eval(w);
    }
    return v;
}

struct EigenJet {
    Jet jet;
    cplx eigenvalue;
};

/// f = v sigma^n (or sigma^n without a weight) with eigenvalue u(0) lambda^n.
inline EigenJet eigenfunction_eval(const KoenigsApproximation& a, const WeightedKoenigs* weighted, int n, cplx z) {
    if (n < 0) {
        throw RangeError("eigenfunction power must be non-negative");
    }
    if (weighted != nullptr && weighted->map.source() != a.map.source()) {
        throw RangeError("weighted eigenfunction was built for a different map");
    }
    Jet f = pow(koenigs_eval(a, z), n);
    cplx eigenvalue = std::pow(a.lambda, n);
    if (weighted != nullptr) {
        f = weighted_eval(*weighted, z) * f;
        eigenvalue *= weighted->eigenvalue;
    }
    return {f, eigenvalue};
}

struct ResidualSample {
    cplx z;
    std::optional<double> residual;  // empty on evaluation failure
};

struct ResidualReport {
    double sup = 0.0;
    cplx witness{};
    double coverage = 0.0;
    std::vector<ResidualSample> samples;
};

namespace detail {

template <class PointResidual>
ResidualReport residual_sweep(const DiskGrid& grid, PointResidual&& residual) {
    ResidualReport rep;
    std::size_t ok = 0;
    for (cplx z : grid.points()) {
        try {
            const double r = residual(z);
            rep.samples.push_back({z, r});
            ++ok;
            if (r > rep.sup) {
                rep.sup = r;
                rep.witness = z;
            }
        } catch (const Error&) {
            rep.samples.push_back({z, std::nullopt});
        }
    }
    rep.coverage = grid.size() ? static_cast<double>(ok) / grid.size() : 0.0;
    return rep;
}

}  // namespace detail

/// sup over the grid of |sigma(phi(z)) - lambda sigma(z)|.
inline ResidualReport schroder_residual(const KoenigsApproximation& a, const DiskGrid& grid) {
    return detail::residual_sweep(grid, [&](cplx z) {
        const cplx lhs = koenigs_eval(a, a.map(z)).value;
        return std::abs(lhs - a.lambda * koenigs_eval(a, z).value);
    });
}

/// sup over the grid of |u(z) v(phi(z)) - u(0) v(z)|.
inline ResidualReport weighted_residual(const WeightedKoenigs& wk, const DiskGrid& grid) {
    return detail::residual_sweep(grid, [&](cplx z) {
        const cplx lhs = wk.weight(z) * weighted_eval(wk, wk.map(z)).value;
        return std::abs(lhs - wk.eigenvalue * weighted_eval(wk, z).value);
    });
}

}  // namespace koenigs

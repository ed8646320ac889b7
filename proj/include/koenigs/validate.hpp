#pragma once

#include <string>
#include <vector>

#include "koenigs/expr.hpp"
#include "koenigs/grid.hpp"

namespace koenigs {

inline constexpr double kOriginTolerance = 1e-12;
inline constexpr double kDerivativeMargin = 1e-9;

enum class ValidationFailure {
    OriginNotFixed,
    DerivativeZero,
    DerivativeTooLarge,
    LeavesDisk,
    EvaluationFailed,
};

inline const char* describe(ValidationFailure f) {
    switch (f) {
        case ValidationFailure::OriginNotFixed: return "origin not fixed";
        case ValidationFailure::DerivativeZero: return "derivative at origin is zero";
        case ValidationFailure::DerivativeTooLarge: return "derivative at origin has modulus at least 1";
        case ValidationFailure::LeavesDisk: return "image leaves the unit disk on the grid";
        case ValidationFailure::EvaluationFailed: return "evaluation failed at some grid points";
    }
    return "";
}

struct ValidationReport {
    cplx phi_at_zero{};
    cplx phi_prime_at_zero{};
    double sup_abs_on_grid = 0.0;
    bool is_schroder_admissible = false;
    std::vector<ValidationFailure> failures;
    /// Points of the grid that could not be evaluated.
    std::size_t failed_points = 0;
    /// A grid cannot certify an open condition: sup < 1 on the grid is evidence only.
    bool grid_evidence_only = true;
    std::string reduction_order = "sequential by index";
};

/// Check the Koenigs hypotheses phi(0) = 0, 0 < |phi'(0)| < 1 and, on the grid,
/// |phi| < 1. Evaluation errors are recorded, never thrown.
inline ValidationReport validate_self_map(const MapExpr& map, const DiskGrid& grid) {
    ValidationReport rep;
    bool origin_ok = true;
    try {
        const Jet at0 = map.eval(cplx{0.0, 0.0});
        rep.phi_at_zero = at0.value;
        rep.phi_prime_at_zero = at0.derivative;
    } catch (const Error&) {
        origin_ok = false;
        rep.failures.push_back(ValidationFailure::EvaluationFailed);
    }
    const double lam = std::abs(rep.phi_prime_at_zero);
    if (origin_ok) {
        if (std::abs(rep.phi_at_zero) > kOriginTolerance) {
            rep.failures.push_back(ValidationFailure::OriginNotFixed);
        }
        if (lam == 0.0) {
            rep.failures.push_back(ValidationFailure::DerivativeZero);
        } else if (lam >= 1.0 - kDerivativeMargin) {
            rep.failures.push_back(ValidationFailure::DerivativeTooLarge);
        }
    }
    for (const cplx z : grid.points()) {
        try {
            rep.sup_abs_on_grid = std::max(rep.sup_abs_on_grid, std::abs(map.eval(z).value));
        } catch (const Error&) {
            ++rep.failed_points;
        }
    }
    if (rep.failed_points > 0 && origin_ok) {
        rep.failures.push_back(ValidationFailure::EvaluationFailed);
    }
    if (rep.sup_abs_on_grid >= 1.0) {
        rep.failures.push_back(ValidationFailure::LeavesDisk);
    }
    rep.is_schroder_admissible = origin_ok && std::abs(rep.phi_at_zero) <= kOriginTolerance && lam > 0.0 &&
                                 lam < 1.0 - kDerivativeMargin && rep.sup_abs_on_grid < 1.0;
    return rep;
}

/// Throws RangeError naming the first failure if `map` is not admissible.
inline void require_admissible(const MapExpr& map, const DiskGrid& grid = DiskGrid::standard()) {
    const ValidationReport rep = validate_self_map(map, grid);
    if (!rep.is_schroder_admissible) {
        std::string why;
        for (auto f : rep.failures) {
            if (f != ValidationFailure::EvaluationFailed) {
                why = describe(f);
                break;
            }
        }
        throw RangeError("map " + map.name() + " is not Schroder-admissible: " + why);
    }
}

}  // namespace koenigs

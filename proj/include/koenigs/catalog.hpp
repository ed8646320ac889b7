#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "koenigs/expr.hpp"

namespace koenigs {

/// Lens maps are evaluated only on |z| <= this radius; gamma degenerates at z = +-1.
inline constexpr double kLensMaxModulus = 0.9999;

/// Lens map phi_t = (gamma^t - 1)/(gamma^t + 1) with gamma(z) = (1+z)/(1-z).
struct LensMap {
    double t;
    MapExpr map;
};

/// phi(z) = lambda z / (1 - (1 - lambda) z), whose Koenigs function is z/(1-z).
struct MoebiusModel {
    double lambda;
    MapExpr map;

    /// sigma(z) = z/(1-z) with sigma'(z) = 1/(1-z)^2.
    static Jet known_koenigs(cplx z) {
        const cplx d = 1.0 - z;
        if (std::abs(d) < kTinyModulus) {
            throw DomainError("Koenigs function of the Moebius model has a pole at z = 1");
        }
        return {z / d, 1.0 / (d * d)};
    }
};

inline LensMap lens_map(double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw RangeError("lens parameter t must lie in (0, 1)");
    }
    const std::string g = "((1 + z)/(1 - z))^" + detail::format_number(t);
    MapExpr m = parse_map("(" + g + " - 1)/(" + g + " + 1)")
                    .with_name("lens(" + detail::format_number(t) + ")")
                    .with_univalent(true)
                    .with_max_modulus(kLensMaxModulus);
    return {t, std::move(m)};
}

inline MoebiusModel moebius_model(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw RangeError("Moebius parameter lambda must lie in (0, 1)");
    }
    const std::string l = detail::format_number(lambda);
    const std::string c = detail::format_number(1.0 - lambda);
    MapExpr m = parse_map(l + "*z/(1 - " + c + "*z)").with_name("moebius(" + l + ")").with_univalent(true);
    return {lambda, std::move(m)};
}

/// The map z -> lambda z. Any nonzero real lambda is accepted; admissibility is
/// the caller's concern.
inline MapExpr linear_map(double lambda) {
    const std::string l = detail::format_number(lambda);
    return parse_map(l + "*z").with_name("linear(" + l + ")").with_univalent(lambda != 0.0);
}

/// t cos(theta) / cos(t theta) with theta = arg gamma(z); equals the modulus of
/// the hyperbolic derivative of the lens map.
inline double lens_hyperbolic_derivative_closed_form(double t, cplx z) {
    if (!(t > 0.0 && t < 1.0)) {
        throw RangeError("lens parameter t must lie in (0, 1)");
    }
    if (std::abs(z) > kLensMaxModulus) {
        throw DomainError("point outside the evaluable radius of the lens map");
    }
    const cplx gamma = (1.0 + z) / (1.0 - z);
    const double theta = std::atan2(gamma.imag(), gamma.real());
    return t * std::cos(theta) / std::cos(t * theta);
}

namespace detail {

inline std::optional<std::pair<std::string, double>> split_call(std::string_view s) {
    const auto open = s.find('(');
    if (open == std::string_view::npos || s.empty() || s.back() != ')') {
        return std::nullopt;
    }
    std::string_view name = s.substr(0, open);
    std::string_view arg = s.substr(open + 1, s.size() - open - 2);
    while (!arg.empty() && arg.front() == ' ') arg.remove_prefix(1);
    while (!arg.empty() && arg.back() == ' ') arg.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
        return std::nullopt;
    }
    return std::make_pair(std::string(name), value);
}

}  // namespace detail

/// Resolve "lens(t)", "moebius(lambda)" or "linear(lambda)"; nullopt otherwise.
inline std::optional<MapExpr> catalog_map(std::string_view spec) {
    const auto call = detail::split_call(spec);
    if (!call) {
        return std::nullopt;
    }
    if (call->first == "lens") {
        return lens_map(call->second).map;
    }
    if (call->first == "moebius") {
        return moebius_model(call->second).map;
    }
    if (call->first == "linear") {
        return linear_map(call->second);
    }
    return std::nullopt;
}

/// Catalog name or raw expression.
inline MapExpr map_from_spec(std::string_view spec) {
    if (auto m = catalog_map(spec)) {
        return *m;
    }
    return parse_map(spec).with_name(std::string(spec));
}

}  // namespace koenigs

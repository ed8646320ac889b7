#pragma once

#include <cmath>
#include <complex>

#include "koenigs/error.hpp"

namespace koenigs {

using cplx = std::complex<double>;

/// Value of a holomorphic function together with its complex derivative.
///
/// Arithmetic propagates the derivative by the sum, product, quotient and
/// chain rules, so composing jets gives first derivatives exact to roundoff.
struct Jet {
    cplx value{0.0, 0.0};
    cplx derivative{0.0, 0.0};

    static constexpr Jet constant(cplx c) { return {c, cplx{0.0, 0.0}}; }
    static constexpr Jet variable(cplx z) { return {z, cplx{1.0, 0.0}}; }
};

/// Denominators below this modulus are treated as zero.
inline constexpr double kTinyModulus = 1e-300;

inline Jet operator+(const Jet& a, const Jet& b) { return {a.value + b.value, a.derivative + b.derivative}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.value - b.value, a.derivative - b.derivative}; }
inline Jet operator-(const Jet& a) { return {-a.value, -a.derivative}; }

inline Jet operator*(const Jet& a, const Jet& b) {
    return {a.value * b.value, a.derivative * b.value + a.value * b.derivative};
}

inline Jet operator/(const Jet& a, const Jet& b) {
    if (std::abs(b.value) < kTinyModulus) {
        throw DomainError("division by a near-zero denominator");
    }
    const cplx q = a.value / b.value;
    return {q, (a.derivative - q * b.derivative) / b.value};
}

inline Jet exp(const Jet& a) {
    const cplx e = std::exp(a.value);
    return {e, e * a.derivative};
}

/// Principal logarithm; the cut is the closed negative real axis including 0.
inline Jet log(const Jet& a) {
    const cplx w = a.value;
    if (std::abs(w) < kTinyModulus || (w.imag() == 0.0 && w.real() < 0.0)) {
        throw DomainError("logarithm argument on the principal branch cut");
    }
    return {std::log(w), a.derivative / w};
}

/// Integer power by repeated squaring; negative exponents go through a quotient.
inline Jet pow(const Jet& a, int n) {
    if (n == 0) {
        return Jet::constant(1.0);
    }
    if (n < 0) {
        return Jet::constant(1.0) / pow(a, -n);
    }
    cplx base = a.value;
    cplx result{1.0, 0.0};
    cplx below{1.0, 0.0};  // a^(n-1)
    unsigned e = static_cast<unsigned>(n - 1);
    while (e != 0) {
        if (e & 1u) {
            below *= base;
        }
        base *= base;
        e >>= 1u;
    }
    result = below * a.value;
    return {result, static_cast<double>(n) * below * a.derivative};
}

/// Real power through the principal branch, w^t = exp(t Log w).
inline Jet pow(const Jet& a, double t) {
    const Jet l = log(a);
    return exp(Jet{t * l.value, t * l.derivative});
}

/// Chain rule: given g = inner jet at z and the jet of f at g(z), return f∘g at z.
inline Jet chain(const Jet& outer_at_inner, const Jet& inner) {
    return {outer_at_inner.value, outer_at_inner.derivative * inner.derivative};
}

/// 1 - |z|^2 computed as (1 - |z|)(1 + |z|) to keep relative accuracy near the circle.
inline double one_minus_abs2(cplx z) {
    const double r = std::abs(z);
    return (1.0 - r) * (1.0 + r);
}

}  // namespace koenigs

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

namespace thinspec {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    cplx x{}, y{};

    double norm() const { return std::sqrt(std::norm(x) + std::norm(y)); }
};

/// 2x2 complex matrix [[a, b], [c, d]]. Carrier for transfer, monodromy and
/// SU(1,1) elements.
struct ComplexMat2 {
    cplx a{1.0}, b{}, c{}, d{1.0};

    static constexpr ComplexMat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr ComplexMat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }
    static ComplexMat2 diag(cplx p, cplx q) { return {p, 0.0, 0.0, q}; }

    cplx det() const { return a * d - b * c; }
    cplx trace() const { return a + d; }

    /// Inverse via the adjugate; valid for any invertible matrix.
    ComplexMat2 inverse() const {
        const cplx inv = 1.0 / det();
        return {d * inv, -b * inv, -c * inv, a * inv};
    }

    ComplexMat2 adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }

    double max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }

    /// Hilbert-Schmidt (Frobenius) norm.
    double hs_norm() const { return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d)); }

    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    ComplexMat2& operator*=(const ComplexMat2& o) {
        *this = ComplexMat2{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
        return *this;
    }
    ComplexMat2& operator*=(cplx s) {
        a *= s; b *= s; c *= s; d *= s;
        return *this;
    }
    ComplexMat2& operator+=(const ComplexMat2& o) {
        a += o.a; b += o.b; c += o.c; d += o.d;
        return *this;
    }
    ComplexMat2& operator-=(const ComplexMat2& o) {
        a -= o.a; b -= o.b; c -= o.c; d -= o.d;
        return *this;
    }
};

inline ComplexMat2 operator*(ComplexMat2 l, const ComplexMat2& r) { return l *= r; }
inline ComplexMat2 operator*(ComplexMat2 m, cplx s) { return m *= s; }
inline ComplexMat2 operator*(cplx s, ComplexMat2 m) { return m *= s; }
inline ComplexMat2 operator+(ComplexMat2 l, const ComplexMat2& r) { return l += r; }
inline ComplexMat2 operator-(ComplexMat2 l, const ComplexMat2& r) { return l -= r; }

inline ComplexMat2 commutator(const ComplexMat2& x, const ComplexMat2& y) { return x * y - y * x; }

/// Non-negative integer power by repeated squaring.
inline ComplexMat2 power(ComplexMat2 m, long long n) {
    ComplexMat2 out = ComplexMat2::identity();
    while (n > 0) {
        if (n & 1) out *= m;
        m *= m;
        n >>= 1;
    }
    return out;
}

/// Max-entry distance.
inline double distance(const ComplexMat2& x, const ComplexMat2& y) { return (x - y).max_abs(); }

inline std::ostream& operator<<(std::ostream& os, const ComplexMat2& m) {
    return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
}

/// A matrix-valued function and its derivative in one scalar parameter.
struct DualMat2 {
    ComplexMat2 v = ComplexMat2::identity();
    ComplexMat2 d = ComplexMat2::zero();
};

inline DualMat2 operator*(const DualMat2& l, const DualMat2& r) { return {l.v * r.v, l.d * r.v + l.v * r.d}; }

inline DualMat2 power(DualMat2 m, long long n) {
    DualMat2 out;
    while (n > 0) {
        if (n & 1) out = m * out;
        m = m * m;
        n >>= 1;
    }
    return out;
}

// Named constants. -j, -J and script-J are the Pauli matrices sigma_3, sigma_2, sigma_1.
inline ComplexMat2 j_form() { return ComplexMat2::diag(-1.0, 1.0); }
inline ComplexMat2 big_j() { return {0.0, kI, -kI, 0.0}; }
inline ComplexMat2 script_j() { return {0.0, 1.0, 1.0, 0.0}; }

}  // namespace thinspec

#pragma once

#include <vector>

#include "thinspec/bandset.hpp"
#include "thinspec/mat2.hpp"

namespace thinspec {

struct Segment {
    double length = 1.0;
    cplx value{};

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Periodic piecewise-constant operator data. The period is the left-to-right
/// floating-point sum of the segment lengths, so it is reproducible exactly.
class PiecewisePotential {
public:
    PiecewisePotential() = default;
    explicit PiecewisePotential(std::vector<Segment> segments);

    static PiecewisePotential constant(double period, cplx value);
    /// Blocks laid end to end from x = 0.
    static PiecewisePotential concatenate(const std::vector<PiecewisePotential>& blocks);

    const std::vector<Segment>& segments() const { return segments_; }
    std::size_t size() const { return segments_.size(); }
    double period() const { return period_; }
    double sup_norm() const;

    /// Start of segment k within the period; offset(size()) == period().
    double offset(std::size_t k) const { return offsets_[k]; }
    /// Index of the segment containing the local coordinate r in [0, period).
    std::size_t segment_at(double r) const;
    /// Value at x, extended periodically; segments are half-open [start, end).
    cplx operator()(double x) const;

    /// Every segment split into k equal parts; the function is unchanged.
    PiecewisePotential subdivided(int k) const;
    /// The same data repeated `count` times, as a potential of count * period.
    PiecewisePotential repeated(long long count) const;

    friend bool operator==(const PiecewisePotential& l, const PiecewisePotential& r) {
        return l.segments_ == r.segments_;
    }

private:
    std::vector<Segment> segments_;
    std::vector<double> offsets_{0.0};
    double period_ = 0.0;
};

/// sup |phi - psi| over one common period. Both must have the same period
/// (to 1e-12 relative); breakpoints of both are taken into account.
double sup_distance(const PiecewisePotential& phi, const PiecewisePotential& psi);

/// Data given as blocks repeated in order, as produced by concatenation
/// constructions. Monodromies use powers of block monodromies.
struct BlockPotential {
    struct Block {
        PiecewisePotential data;
        long long count = 1;
    };
    std::vector<Block> blocks;

    double period() const;
    double sup_norm() const;
    PiecewisePotential flatten() const;
};

// ---------------------------------------------------------------------------
// Transfer matrices

/// e^{l B(z, c)}, B(z, c) = [[-iz, ic], [-i conj(c), iz]].
ComplexMat2 step_matrix(cplx c, cplx z, double length);
/// Step matrix and its derivative in z.
DualMat2 step_matrix_dual(cplx c, cplx z, double length);

/// A_z(y, x): propagates solutions from x to y.
ComplexMat2 transfer(const PiecewisePotential& phi, double x, double y, cplx z);
/// M_z(x) = A_z(x + T, x).
ComplexMat2 monodromy(const PiecewisePotential& phi, cplx z, double base = 0.0);
/// Monodromy at base 0 with its z-derivative.
DualMat2 monodromy_dual(const PiecewisePotential& phi, cplx z);
ComplexMat2 monodromy(const BlockPotential& phi, cplx z);
DualMat2 monodromy_dual(const BlockPotential& phi, cplx z);

/// Imaginary part of a real-energy trace allowed, relative to max(1, |M|).
inline constexpr double kRealTraceTolerance = 1e-9;

/// Tr M_lambda for real lambda. Throws NumericalAssertion when the trace is
/// not real to tolerance.
double discriminant(const PiecewisePotential& phi, double lambda);
double discriminant(const BlockPotential& phi, double lambda);

/// 2 (T/pi (R + |phi|_inf) + 1).
double band_count_bound(double period, double window, double sup_norm);

/// Spectrum inside [-R, R] as connected components of {|D| <= 2}. Throws
/// NumericalAssertion if the band count bound is violated.
BandSet bands(const PiecewisePotential& phi, double window, double tol = 1e-10);
BandSet bands(const BlockPotential& phi, double window, double tol = 1e-10);

/// Individual Floquet bands in [-R, R]: like bands(), but components are split
/// at closed gaps, where |D| touches 2 at an extremum.
std::vector<Interval> floquet_bands(const PiecewisePotential& phi, double window, double tol = 1e-10);

/// (1/T) log spr M_z.
double lyapunov(const PiecewisePotential& phi, cplx z);

struct FloquetExponent {
    cplx w;  ///< D = 2 cosh(T w), Re w = -L <= 0
};

FloquetExponent floquet_exponent(const PiecewisePotential& phi, cplx z);

/// Refusal margin of dos_density, in units of |D|.
inline constexpr double kDosMargin = 1e-6;

/// Density of states at a band-interior energy: (1/(pi T)) times the period
/// integral of (1 + |s|^2)/(1 - |s|^2), where s(x) is the disk fixed point of
/// the monodromy at base x, transported from x = 0. Uses `nodes`
/// Gauss-Legendre nodes per segment. Throws NotInBandInterior when
/// |D| >= 2 - margin.
double dos_density(const PiecewisePotential& phi, double lambda, int nodes = 8, double margin = kDosMargin);

/// Integral of dos_density over a band, with lambda = a + (b - a)(1 - cos t)/2
/// removing the inverse square-root edge singularities.
double dos_band_weight(const PiecewisePotential& phi, const Interval& band, int outer = 48, int inner = 8);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

}  // namespace thinspec

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "thinspec/bandset.hpp"
#include "thinspec/mat2.hpp"

namespace thinspec {

/// q-periodic Verblunsky coefficients, each strictly inside the unit disk.
class VerblunskyCycle {
public:
    VerblunskyCycle() = default;
    explicit VerblunskyCycle(std::vector<cplx> values);

    static VerblunskyCycle constant(cplx a, int q = 1);
    static VerblunskyCycle concatenate(const std::vector<VerblunskyCycle>& blocks);

    int period() const { return static_cast<int>(values_.size()); }
    const std::vector<cplx>& values() const { return values_; }
    cplx operator[](long long n) const;
    /// sup |alpha_n|.
    double sup_norm() const;
    VerblunskyCycle repeated(long long count) const;

    friend bool operator==(const VerblunskyCycle&, const VerblunskyCycle&) = default;

private:
    std::vector<cplx> values_;
};

/// A cycle given as blocks repeated in order; monodromies use powers of
/// block monodromies.
struct BlockCycle {
    struct Block {
        VerblunskyCycle data;
        long long count = 1;
    };
    std::vector<Block> blocks;

    long long period() const;
    VerblunskyCycle flatten() const;
};

/// Closed arcs {e^{i theta} : theta in [a, b]} stored with 0 <= a < b <= 2 pi,
/// cut at theta = 0.
struct ArcSet {
    std::vector<Interval> arcs;

    double measure() const;
    std::size_t size() const { return arcs.size(); }
    bool contains(double theta) const;
    /// Arcs with a piece ending at 2 pi and a piece starting at 0 joined into
    /// one arc whose end exceeds 2 pi.
    std::vector<Interval> merged() const;
    /// Euclidean distance from a point of the plane to the arc set.
    double distance_to(cplx z) const;
};

/// (1 - |a|^2)^{-1/2} [[z, -conj(a)], [-a z, 1]].
ComplexMat2 szego_matrix(cplx a, cplx z);

/// e^{-i q theta / 2} A(alpha_{q-1}, z) ... A(alpha_0, z), z = e^{i theta}.
ComplexMat2 cmv_monodromy(const VerblunskyCycle& alpha, double theta);
/// Monodromy with its theta-derivative.
DualMat2 cmv_monodromy_dual(const VerblunskyCycle& alpha, double theta);

ComplexMat2 cmv_monodromy(const BlockCycle& alpha, double theta);
DualMat2 cmv_monodromy_dual(const BlockCycle& alpha, double theta);

/// Real trace of the monodromy, asserted real to 1e-9 times the square of the
/// largest partial product.
double cmv_discriminant(const VerblunskyCycle& alpha, double theta);
double cmv_discriminant(const BlockCycle& alpha, double theta);

ArcSet cmv_bands(const VerblunskyCycle& alpha, double tol = 1e-10);
ArcSet cmv_bands(const BlockCycle& alpha, double tol = 1e-10);

/// (1/q) log spr of the monodromy.
double cmv_lyapunov(const VerblunskyCycle& alpha, double theta);

enum class TruncationBoundary {
    Verbatim,  ///< finite section of the doubly infinite matrix
    Periodic,  ///< the last M-block wraps to index 0; the result is unitary
};

/// 2 copies q x 2 copies q section of the extended CMV matrix LM.
Eigen::MatrixXcd extended_cmv_truncation(const VerblunskyCycle& alpha, int copies,
                                         TruncationBoundary boundary = TruncationBoundary::Verbatim);

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m);

/// sup_n artanh |(alpha_n - beta_n) / (1 - alpha_n conj(beta_n))|.
double poincare_delta(const std::vector<cplx>& alpha, const std::vector<cplx>& beta);
double poincare_delta(const VerblunskyCycle& alpha, const VerblunskyCycle& beta);

/// The point at hyperbolic distance r from a in direction e^{i psi}:
/// (a + w) / (1 + conj(a) w) with w = tanh(r) e^{i psi}.
cplx poincare_offset(cplx a, double r, double psi);

}  // namespace thinspec

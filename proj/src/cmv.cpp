#include "thinspec/cmv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <type_traits>

#include "thinspec/errors.hpp"

namespace thinspec {

namespace {

void require_disk(cplx a) {
    if (!(std::abs(a) < 1.0)) {
        std::ostringstream os;
        os << "Verblunsky coefficient " << a << " is not in the open unit disk";
        throw OutOfDisk(os.str());
    }
}

double rho(cplx a) { return std::sqrt(1.0 - std::norm(a)); }

}  // namespace

VerblunskyCycle::VerblunskyCycle(std::vector<cplx> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error("Verblunsky cycle needs at least one value");
    for (auto a : values_) require_disk(a);
}

VerblunskyCycle VerblunskyCycle::constant(cplx a, int q) {
    return VerblunskyCycle(std::vector<cplx>(static_cast<std::size_t>(q), a));
}

VerblunskyCycle VerblunskyCycle::concatenate(const std::vector<VerblunskyCycle>& blocks) {
    std::vector<cplx> all;
    for (const auto& b : blocks) all.insert(all.end(), b.values_.begin(), b.values_.end());
    return VerblunskyCycle(std::move(all));
}

cplx VerblunskyCycle::operator[](long long n) const {
    const long long q = period();
    return values_[static_cast<std::size_t>(((n % q) + q) % q)];
}

double VerblunskyCycle::sup_norm() const {
    double s = 0.0;
    for (auto a : values_) s = std::max(s, std::abs(a));
    return s;
}

VerblunskyCycle VerblunskyCycle::repeated(long long count) const {
    std::vector<cplx> out;
    out.reserve(values_.size() * static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) out.insert(out.end(), values_.begin(), values_.end());
    return VerblunskyCycle(std::move(out));
}

// ---------------------------------------------------------------------------

double ArcSet::measure() const {
    double s = 0.0;
    for (const auto& a : arcs) s += a.length();
    return s;
}

bool ArcSet::contains(double theta) const {
    const double t = theta - 2.0 * kPi * std::floor(theta / (2.0 * kPi));
    return std::any_of(arcs.begin(), arcs.end(), [&](const Interval& a) { return a.contains(t); });
}

std::vector<Interval> ArcSet::merged() const {
    std::vector<Interval> out = arcs;
    if (out.size() >= 2 && out.front().a <= 0.0 && out.back().b >= 2.0 * kPi) {
        out.back().b = 2.0 * kPi + out.front().b;
        out.erase(out.begin());
    }
    return out;
}

double ArcSet::distance_to(cplx z) const {
    if (arcs.empty()) return std::numeric_limits<double>::infinity();
    double phi = std::arg(z);
    if (phi < 0) phi += 2.0 * kPi;
    if (z != cplx{} && contains(phi)) return std::abs(std::abs(z) - 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : arcs) {
        best = std::min(best, std::abs(z - std::polar(1.0, a.a)));
        best = std::min(best, std::abs(z - std::polar(1.0, a.b)));
    }
    return best;
}

// ---------------------------------------------------------------------------

ComplexMat2 szego_matrix(cplx a, cplx z) {
    require_disk(a);
    const double r = 1.0 / rho(a);
    return {r * z, -r * std::conj(a), -r * a * z, r};
}

namespace {

const ComplexMat2& value(const ComplexMat2& m) { return m; }
const ComplexMat2& value(const DualMat2& m) { return m.v; }

// The products below also record `peak`, the largest entry of any partial
// product. Cancellation after a large partial product loses accuracy in
// proportion to its square, so the realness check of the trace scales with it.
ComplexMat2 product(const VerblunskyCycle& alpha, double theta, double& peak) {
    const cplx z = std::polar(1.0, theta);
    ComplexMat2 p = ComplexMat2::identity();
    for (auto a : alpha.values()) {
        p = szego_matrix(a, z) * p;
        peak = std::max(peak, p.max_abs());
    }
    return p * std::polar(1.0, -0.5 * alpha.period() * theta);
}

DualMat2 product_dual(const VerblunskyCycle& alpha, double theta, double& peak) {
    const cplx z = std::polar(1.0, theta);
    const cplx dz = kI * z;
    DualMat2 p;
    for (auto a : alpha.values()) {
        const double r = 1.0 / rho(a);
        DualMat2 s;
        s.v = szego_matrix(a, z);
        s.d = {r * dz, 0.0, -r * a * dz, 0.0};
        p = s * p;
        peak = std::max(peak, p.v.max_abs());
    }
    const double q = alpha.period();
    const cplx f = std::polar(1.0, -0.5 * q * theta);
    const cplx df = -0.5 * q * kI * f;
    return {p.v * f, p.d * f + p.v * df};
}

// The phase factors of the blocks multiply to that of the whole cycle. Inside
// a power the repeated squares stand in for the partial products.
template <class M, class BlockProduct>
M block_product(const BlockCycle& alpha, double theta, double& peak, BlockProduct one) {
    M p;
    if constexpr (std::is_same_v<M, ComplexMat2>) p = ComplexMat2::identity();
    for (const auto& b : alpha.blocks) {
        double inner = 1.0;
        M m = one(b.data, theta, inner);
        const double before = std::max(1.0, value(p).max_abs());
        peak = std::max(peak, before * inner);
        M acc;
        if constexpr (std::is_same_v<M, ComplexMat2>) acc = ComplexMat2::identity();
        for (long long n = b.count; n > 0; n >>= 1) {
            if (n & 1) acc = m * acc;
            peak = std::max(peak, before * value(m).max_abs());
            if (n > 1) m = m * m;
        }
        p = acc * p;
        peak = std::max(peak, value(p).max_abs());
    }
    return p;
}

ComplexMat2 product(const BlockCycle& alpha, double theta, double& peak) {
    return block_product<ComplexMat2>(alpha, theta, peak, [](const VerblunskyCycle& c, double t, double& k) {
        return product(c, t, k);
    });
}

DualMat2 product_dual(const BlockCycle& alpha, double theta, double& peak) {
    return block_product<DualMat2>(alpha, theta, peak, [](const VerblunskyCycle& c, double t, double& k) {
        return product_dual(c, t, k);
    });
}

}  // namespace

ComplexMat2 cmv_monodromy(const VerblunskyCycle& alpha, double theta) {
    double peak = 1.0;
    return product(alpha, theta, peak);
}

DualMat2 cmv_monodromy_dual(const VerblunskyCycle& alpha, double theta) {
    double peak = 1.0;
    return product_dual(alpha, theta, peak);
}

long long BlockCycle::period() const {
    long long q = 0;
    for (const auto& b : blocks) q += b.data.period() * b.count;
    return q;
}

VerblunskyCycle BlockCycle::flatten() const {
    std::vector<VerblunskyCycle> parts;
    for (const auto& b : blocks) parts.push_back(b.data.repeated(b.count));
    return VerblunskyCycle::concatenate(parts);
}

ComplexMat2 cmv_monodromy(const BlockCycle& alpha, double theta) {
    double peak = 1.0;
    return product(alpha, theta, peak);
}

DualMat2 cmv_monodromy_dual(const BlockCycle& alpha, double theta) {
    double peak = 1.0;
    return product_dual(alpha, theta, peak);
}

namespace {

double real_trace(const ComplexMat2& m, double peak) {
    const cplx tr = m.trace();
    if (!(std::abs(tr.imag()) <= 1e-9 * peak * peak)) {
        std::ostringstream os;
        os << "non-real CMV discriminant: " << tr << " with partial products up to " << peak;
        throw NumericalAssertion(os.str());
    }
    return tr.real();
}

template <class Cycle>
double discriminant_of(const Cycle& alpha, double theta) {
    double peak = 1.0;
    const ComplexMat2 m = product(alpha, theta, peak);
    return real_trace(m, peak);
}

template <class Cycle>
ArcSet scan_circle(const Cycle& alpha, double period, double tol) {
    auto f = [&](double theta) {
        double peak = 1.0;
        const DualMat2 m = product_dual(alpha, theta, peak);
        return std::pair{real_trace(m.v, peak), m.d.trace().real()};
    };
    ScanOptions opt;
    opt.lo = 0.0;
    opt.hi = 2.0 * kPi;
    opt.step = kPi / (16.0 * period);
    opt.tol = tol;
    return ArcSet{scan_level_set(f, opt)};
}

}  // namespace

double cmv_discriminant(const VerblunskyCycle& alpha, double theta) { return discriminant_of(alpha, theta); }

double cmv_discriminant(const BlockCycle& alpha, double theta) { return discriminant_of(alpha, theta); }

ArcSet cmv_bands(const VerblunskyCycle& alpha, double tol) {
    return scan_circle(alpha, static_cast<double>(alpha.period()), tol);
}

ArcSet cmv_bands(const BlockCycle& alpha, double tol) {
    return scan_circle(alpha, static_cast<double>(alpha.period()), tol);
}

double cmv_lyapunov(const VerblunskyCycle& alpha, double theta) {
    const double d = cmv_discriminant(alpha, theta);
    return std::acosh(std::max(1.0, std::abs(d) / 2.0)) / alpha.period();
}

Eigen::MatrixXcd extended_cmv_truncation(const VerblunskyCycle& alpha, int copies, TruncationBoundary boundary) {
    if (copies < 1) throw Error("truncation needs at least one copy");
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(copies) * alpha.period();
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    // Theta(a) = [[conj(a), rho], [rho, -a]] on consecutive index pairs.
    auto place = [](Eigen::MatrixXcd& x, Eigen::Index i, Eigen::Index j, cplx a) {
        const double r = rho(a);
        x(i, i) = std::conj(a);
        x(i, j) = r;
        x(j, i) = r;
        x(j, j) = -a;
    };
    for (Eigen::Index k = 0; k < n; k += 2) place(l, k, k + 1, alpha[k]);
    for (Eigen::Index k = 1; k + 1 < n; k += 2) place(m, k, k + 1, alpha[k]);
    const cplx edge = alpha[n - 1];
    if (boundary == TruncationBoundary::Periodic) {
        place(m, n - 1, 0, edge);
    } else {
        m(n - 1, n - 1) = std::conj(edge);
        m(0, 0) = -alpha[-1];
    }
    return l * m;
}

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    if (solver.info() != Eigen::Success) throw NumericalAssertion("eigenvalue solver did not converge");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

// ---------------------------------------------------------------------------

double poincare_delta(const std::vector<cplx>& alpha, const std::vector<cplx>& beta) {
    if (alpha.size() != beta.size()) throw Error("poincare_delta needs sequences of equal length");
    double best = 0.0;
    for (std::size_t n = 0; n < alpha.size(); ++n) {
        require_disk(alpha[n]);
        require_disk(beta[n]);
        const double r = std::abs((alpha[n] - beta[n]) / (1.0 - alpha[n] * std::conj(beta[n])));
        best = std::max(best, std::atanh(std::min(r, 1.0)));
    }
    return best;
}

double poincare_delta(const VerblunskyCycle& alpha, const VerblunskyCycle& beta) {
    const long long q = std::lcm<long long>(alpha.period(), beta.period());
    std::vector<cplx> a, b;
    a.reserve(static_cast<std::size_t>(q));
    b.reserve(static_cast<std::size_t>(q));
    for (long long n = 0; n < q; ++n) {
        a.push_back(alpha[n]);
        b.push_back(beta[n]);
    }
    return poincare_delta(a, b);
}

cplx poincare_offset(cplx a, double r, double psi) {
    const cplx w = std::polar(std::tanh(r), psi);
    return (a + w) / (1.0 + std::conj(a) * w);
}

}  // namespace thinspec

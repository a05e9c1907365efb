#include "thinspec/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/math/special_functions/legendre.hpp>

#include "thinspec/errors.hpp"
#include "thinspec/su11.hpp"

namespace thinspec {

PiecewisePotential::PiecewisePotential(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw Error("potential needs at least one segment");
    offsets_.reserve(segments_.size() + 1);
    for (const auto& s : segments_) {
        if (!(s.length > 0.0) || !std::isfinite(s.length)) throw Error("segment lengths must be positive");
        if (!std::isfinite(s.value.real()) || !std::isfinite(s.value.imag())) {
            throw Error("segment values must be finite");
        }
        period_ += s.length;
        offsets_.push_back(period_);
    }
}

PiecewisePotential PiecewisePotential::constant(double period, cplx value) {
    return PiecewisePotential({{period, value}});
}

PiecewisePotential PiecewisePotential::concatenate(const std::vector<PiecewisePotential>& blocks) {
    std::vector<Segment> all;
    for (const auto& b : blocks) all.insert(all.end(), b.segments_.begin(), b.segments_.end());
    return PiecewisePotential(std::move(all));
}

double PiecewisePotential::sup_norm() const {
    double s = 0.0;
    for (const auto& seg : segments_) s = std::max(s, std::abs(seg.value));
    return s;
}

std::size_t PiecewisePotential::segment_at(double r) const {
    auto it = std::upper_bound(offsets_.begin() + 1, offsets_.end(), r);
    const auto k = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return std::min(k, segments_.size() - 1);
}

cplx PiecewisePotential::operator()(double x) const {
    double r = x - std::floor(x / period_) * period_;
    if (r >= period_ || r < 0.0) r = 0.0;
    return segments_[segment_at(r)].value;
}

PiecewisePotential PiecewisePotential::subdivided(int k) const {
    if (k < 1) throw Error("subdivision factor must be positive");
    std::vector<Segment> out;
    out.reserve(segments_.size() * static_cast<std::size_t>(k));
    for (const auto& s : segments_) {
        const double piece = s.length / k;
        double used = 0.0;
        for (int i = 0; i + 1 < k; ++i) {
            out.push_back({piece, s.value});
            used += piece;
        }
        out.push_back({s.length - used, s.value});
    }
    return PiecewisePotential(std::move(out));
}

PiecewisePotential PiecewisePotential::repeated(long long count) const {
    if (count < 1) throw Error("repeat count must be positive");
    std::vector<Segment> out;
    out.reserve(segments_.size() * static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) out.insert(out.end(), segments_.begin(), segments_.end());
    return PiecewisePotential(std::move(out));
}

double sup_distance(const PiecewisePotential& phi, const PiecewisePotential& psi) {
    const double t = phi.period();
    if (std::abs(t - psi.period()) > 1e-12 * std::max(1.0, t)) {
        throw Error("sup_distance needs equal periods");
    }
    std::vector<double> cuts;
    cuts.reserve(phi.size() + psi.size() + 2);
    for (std::size_t k = 0; k <= phi.size(); ++k) cuts.push_back(phi.offset(k));
    for (std::size_t k = 0; k <= psi.size(); ++k) cuts.push_back(std::min(psi.offset(k), t));
    std::sort(cuts.begin(), cuts.end());
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        best = std::max(best, std::abs(phi.segments()[phi.segment_at(mid)].value -
                                       psi.segments()[psi.segment_at(mid)].value));
    }
    return best;
}

double BlockPotential::period() const {
    double t = 0.0;
    for (const auto& b : blocks) t += b.data.period() * static_cast<double>(b.count);
    return t;
}

double BlockPotential::sup_norm() const {
    double s = 0.0;
    for (const auto& b : blocks) s = std::max(s, b.data.sup_norm());
    return s;
}

PiecewisePotential BlockPotential::flatten() const {
    std::vector<PiecewisePotential> parts;
    for (const auto& b : blocks) parts.push_back(b.data.repeated(b.count));
    return PiecewisePotential::concatenate(parts);
}

// ---------------------------------------------------------------------------

namespace {

// C = cosh(l mu), S = sinh(l mu)/mu as entire functions of x = mu^2, with
// their x-derivatives.
struct EvenOdd {
    cplx c, s, dc, ds;
};

EvenOdd series(cplx x, double l) {
    const cplx y = l * l * x;
    cplx c = 0.0, s = 0.0, ds = 0.0;
    cplx yk = 1.0;     // y^k
    cplx ykm1 = 0.0;   // y^(k-1)
    double fe = 1.0;   // (2k)!
    double fo = 1.0;   // (2k+1)!
    for (int k = 0; k < 30; ++k) {
        if (k > 0) {
            fe = fo * (2 * k);
            fo = fe * (2 * k + 1);
        }
        c += yk / fe;
        s += yk / fo;
        if (k > 0) ds += static_cast<double>(k) * ykm1 / fo;
        if (std::abs(yk) < 1e-18 * fe) break;
        ykm1 = yk;
        yk *= y;
    }
    EvenOdd e;
    e.c = c;
    e.s = l * s;
    e.dc = 0.5 * l * e.s;
    e.ds = l * l * l * ds;
    return e;
}

EvenOdd even_odd(cplx x, double l) {
    const double y = l * l * std::abs(x);
    if (y < 1.0) return series(x, l);
    EvenOdd e;
    if (x.imag() == 0.0) {
        const double xr = x.real();
        if (xr > 0.0) {
            const double m = std::sqrt(xr);
            e.c = std::cosh(l * m);
            e.s = std::sinh(l * m) / m;
        } else {
            const double m = std::sqrt(-xr);
            e.c = std::cos(l * m);
            e.s = std::sin(l * m) / m;
        }
    } else {
        // Scaling and squaring: C(2l) = C^2 + x S^2, S(2l) = 2 C S.
        const int k = static_cast<int>(std::ceil(std::log2(y) / 2.0)) + 1;
        const EvenOdd small = series(x, std::ldexp(l, -k));
        cplx c = small.c, s = small.s;
        for (int i = 0; i < k; ++i) {
            const cplx c2 = c * c + x * s * s;
            s = 2.0 * c * s;
            c = c2;
        }
        e.c = c;
        e.s = s;
    }
    e.dc = 0.5 * l * e.s;
    e.ds = (l * e.c - e.s) / (2.0 * x);
    return e;
}

cplx energy_square(cplx c, cplx z) {
    return z.imag() == 0.0 ? cplx{std::norm(c) - z.real() * z.real(), 0.0} : std::norm(c) - z * z;
}

ComplexMat2 generator(cplx c, cplx z) { return {-kI * z, kI * c, -kI * std::conj(c), kI * z}; }

}  // namespace

ComplexMat2 step_matrix(cplx c, cplx z, double length) {
    const EvenOdd e = even_odd(energy_square(c, z), length);
    ComplexMat2 m = generator(c, z) * e.s;
    m.a += e.c;
    m.d += e.c;
    return m;
}

DualMat2 step_matrix_dual(cplx c, cplx z, double length) {
    const EvenOdd e = even_odd(energy_square(c, z), length);
    const ComplexMat2 b = generator(c, z);
    DualMat2 out;
    out.v = b * e.s;
    out.v.a += e.c;
    out.v.d += e.c;
    const cplx dx = -2.0 * z;
    out.d = b * (e.ds * dx);
    out.d.a += e.dc * dx - kI * e.s;
    out.d.d += e.dc * dx + kI * e.s;
    return out;
}

namespace {

// Ordered product of step matrices over [x, y], y >= x, without period skipping.
ComplexMat2 walk(const PiecewisePotential& phi, double x, double y, cplx z) {
    const double t = phi.period();
    ComplexMat2 p = ComplexMat2::identity();
    double n = std::floor(x / t);
    double base = n * t;
    std::size_t k = phi.segment_at(std::clamp(x - base, 0.0, t));
    double pos = x;
    while (pos < y) {
        const double end = std::min(base + phi.offset(k + 1), y);
        if (end > pos) p = step_matrix(phi.segments()[k].value, z, end - pos) * p;
        pos = std::max(pos, end);
        if (++k == phi.size()) {
            k = 0;
            n += 1.0;
            base = n * t;
        }
    }
    return p;
}

ComplexMat2 full_period(const PiecewisePotential& phi, cplx z) {
    ComplexMat2 p = ComplexMat2::identity();
    for (const auto& s : phi.segments()) p = step_matrix(s.value, z, s.length) * p;
    return p;
}

}  // namespace

ComplexMat2 transfer(const PiecewisePotential& phi, double x, double y, cplx z) {
    if (x == y) return ComplexMat2::identity();
    if (y < x) return transfer(phi, y, x, z).inverse();
    const double t = phi.period();
    if (y - x <= 2.0 * t) return walk(phi, x, y, z);
    const double first = (std::floor(x / t) + 1.0) * t;
    const auto k = static_cast<long long>(std::floor((y - first) / t));
    const double resume = first + static_cast<double>(k) * t;
    return walk(phi, resume, y, z) * power(full_period(phi, z), k) * walk(phi, x, first, z);
}

ComplexMat2 monodromy(const PiecewisePotential& phi, cplx z, double base) {
    const double t = phi.period();
    double r = base - std::floor(base / t) * t;
    if (!(r < t) || r < 0.0) r = 0.0;
    if (r == 0.0) return full_period(phi, z);
    const std::size_t k0 = phi.segment_at(r);
    const auto& segs = phi.segments();
    ComplexMat2 p = ComplexMat2::identity();
    const double head = phi.offset(k0 + 1) - r;
    if (head > 0.0) p = step_matrix(segs[k0].value, z, head) * p;
    for (std::size_t i = 1; i < segs.size(); ++i) {
        const std::size_t k = (k0 + i) % segs.size();
        p = step_matrix(segs[k].value, z, segs[k].length) * p;
    }
    const double tail = r - phi.offset(k0);
    if (tail > 0.0) p = step_matrix(segs[k0].value, z, tail) * p;
    return p;
}

DualMat2 monodromy_dual(const PiecewisePotential& phi, cplx z) {
    DualMat2 p;
    for (const auto& s : phi.segments()) p = step_matrix_dual(s.value, z, s.length) * p;
    return p;
}

ComplexMat2 monodromy(const BlockPotential& phi, cplx z) {
    ComplexMat2 p = ComplexMat2::identity();
    for (const auto& b : phi.blocks) p = power(full_period(b.data, z), b.count) * p;
    return p;
}

DualMat2 monodromy_dual(const BlockPotential& phi, cplx z) {
    DualMat2 p;
    for (const auto& b : phi.blocks) p = power(monodromy_dual(b.data, z), b.count) * p;
    return p;
}

namespace {

double real_trace(const ComplexMat2& m) {
    const cplx tr = m.trace();
    if (!(std::abs(tr.imag()) <= kRealTraceTolerance * std::max(1.0, m.max_abs()))) {
        std::ostringstream os;
        os << "non-real trace at real energy: " << tr;
        throw NumericalAssertion(os.str());
    }
    return tr.real();
}

BandSet scan(const DualFunction& f, double period, double window, double sup, double tol,
             bool split = false) {
    ScanOptions opt;
    opt.split_at_extrema = split;
    opt.lo = -window;
    opt.hi = window;
    opt.step = kPi / (8.0 * period * (1.0 + sup));
    opt.tol = tol;
    BandSet out;
    out.window = window;
    out.intervals = scan_level_set(f, opt);
    const double bound = band_count_bound(period, window, sup);
    if (static_cast<double>(out.intervals.size()) > bound) {
        std::ostringstream os;
        os << "band count " << out.intervals.size() << " exceeds the Floquet bound " << bound;
        throw NumericalAssertion(os.str());
    }
    return out;
}

}  // namespace

double discriminant(const PiecewisePotential& phi, double lambda) { return real_trace(monodromy(phi, lambda)); }

double discriminant(const BlockPotential& phi, double lambda) { return real_trace(monodromy(phi, lambda)); }

double band_count_bound(double period, double window, double sup_norm) {
    return 2.0 * (period / kPi * (window + sup_norm) + 1.0);
}

BandSet bands(const PiecewisePotential& phi, double window, double tol) {
    auto f = [&](double x) {
        const DualMat2 m = monodromy_dual(phi, x);
        return std::pair{real_trace(m.v), m.d.trace().real()};
    };
    return scan(f, phi.period(), window, phi.sup_norm(), tol);
}

std::vector<Interval> floquet_bands(const PiecewisePotential& phi, double window, double tol) {
    auto f = [&](double x) {
        const DualMat2 m = monodromy_dual(phi, x);
        return std::pair{real_trace(m.v), m.d.trace().real()};
    };
    return scan(f, phi.period(), window, phi.sup_norm(), tol, true).intervals;
}

BandSet bands(const BlockPotential& phi, double window, double tol) {
    auto f = [&](double x) {
        const DualMat2 m = monodromy_dual(phi, x);
        return std::pair{real_trace(m.v), m.d.trace().real()};
    };
    return scan(f, phi.period(), window, phi.sup_norm(), tol);
}

namespace {

// Eigenvalue of largest modulus of a determinant-one matrix with trace t.
cplx dominant_eigenvalue(cplx t) {
    cplx root = std::sqrt(t * t - 4.0);
    if ((std::conj(t) * root).real() < 0.0) root = -root;
    return 0.5 * (t + root);
}

}  // namespace

double lyapunov(const PiecewisePotential& phi, cplx z) {
    const double t = phi.period();
    if (z.imag() == 0.0) {
        const double d = discriminant(phi, z.real());
        return std::acosh(std::max(1.0, std::abs(d) / 2.0)) / t;
    }
    return std::max(0.0, std::log(std::abs(dominant_eigenvalue(monodromy(phi, z).trace()))) / t);
}

FloquetExponent floquet_exponent(const PiecewisePotential& phi, cplx z) {
    const cplx rho = dominant_eigenvalue(monodromy(phi, z).trace());
    return {-std::log(rho) / phi.period()};
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    if (n < 1) throw Error("quadrature order must be positive");
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule rule;
    for (double x : boost::math::legendre_p_zeros<double>(n)) {
        const double dp = boost::math::legendre_p_prime(n, x);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.x.push_back(x);
        rule.w.push_back(w);
        if (x != 0.0) {
            rule.x.push_back(-x);
            rule.w.push_back(w);
        }
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

double dos_density(const PiecewisePotential& phi, double lambda, int nodes, double margin) {
    const ComplexMat2 m0 = monodromy(phi, lambda);
    const double d = real_trace(m0);
    if (!(std::abs(d) < 2.0 - margin)) {
        std::ostringstream os;
        os << "energy " << lambda << " is not inside a band (D = " << d << ")";
        throw NotInBandInterior(os.str());
    }
    const cplx s0 = inner_fixed_point(m0);
    const GaussRule& rule = gauss_legendre(nodes);
    ComplexMat2 p = ComplexMat2::identity();
    double integral = 0.0;
    for (const auto& seg : phi.segments()) {
        const double half = 0.5 * seg.length;
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
            const ComplexMat2 a = step_matrix(seg.value, lambda, half * (1.0 + rule.x[i])) * p;
            const cplx s = mobius_apply(a, s0);
            const double r = std::norm(s);
            integral += rule.w[i] * half * (1.0 + r) / (1.0 - r);
        }
        p = step_matrix(seg.value, lambda, seg.length) * p;
    }
    return integral / (kPi * phi.period());
}

double dos_band_weight(const PiecewisePotential& phi, const Interval& band, int outer, int inner) {
    const GaussRule& rule = gauss_legendre(outer);
    const double w = band.b - band.a;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double t = 0.5 * kPi * (1.0 + rule.x[i]);
        const double lambda = band.a + 0.5 * w * (1.0 - std::cos(t));
        const double jac = 0.5 * w * std::sin(t) * 0.5 * kPi;
        sum += rule.w[i] * jac * dos_density(phi, lambda, inner, 0.0);
    }
    return sum;
}

}  // namespace thinspec

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "thinspec/dirac.hpp"
#include "thinspec/errors.hpp"
#include "thinspec/su11.hpp"

using namespace thinspec;

namespace {

PiecewisePotential random_potential(std::mt19937_64& rng, int segments, double amp = 1.5) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Segment> s;
    for (int k = 0; k < segments; ++k) s.push_back({0.1 + u(rng), std::polar(amp * u(rng), 2 * kPi * u(rng))});
    return PiecewisePotential(s);
}

// Independent oracle for e^{l B}: Eigen's matrix exponential.
ComplexMat2 expm_oracle(cplx c, cplx z, double l) {
    Eigen::Matrix2cd b;
    b << -kI * z * l, kI * c * l, -kI * std::conj(c) * l, kI * z * l;
    const Eigen::Matrix2cd e = b.exp();
    return {e(0, 0), e(0, 1), e(1, 0), e(1, 1)};
}

double rel(const ComplexMat2& x, const ComplexMat2& y) { return distance(x, y) / std::max(1.0, y.max_abs()); }

}  // namespace

TEST_CASE("PiecewisePotential") {
    const PiecewisePotential p({{0.5, 1.0}, {0.25, 2.0}, {0.25, 3.0}});
    CHECK(p.period() == 1.0);
    CHECK(p.sup_norm() == 3.0);
    CHECK(p(0.0) == cplx{1.0});
    CHECK(p(0.5) == cplx{2.0});
    CHECK(p(0.8) == cplx{3.0});
    CHECK(p(-0.1) == cplx{3.0});
    CHECK(p(2.6) == cplx{2.0});
    const auto s = p.subdivided(4);
    CHECK(s.size() == 12);
    CHECK(s.period() == p.period());
    CHECK(sup_distance(p, s) == 0.0);
    CHECK(p.repeated(3).period() == 3.0);
    CHECK_THROWS(PiecewisePotential({{0.0, 1.0}}));

    const PiecewisePotential q({{0.3, 1.0}, {0.7, 2.5}});
    CHECK(sup_distance(p, q) == doctest::Approx(1.5));
}

TEST_CASE("step_matrix") {
    SUBCASE("free") {
        const double lambda = 0.83;
        const ComplexMat2 m = step_matrix(0.0, lambda, 1.7);
        CHECK(distance(m, ComplexMat2::diag(std::polar(1.0, -lambda * 1.7), std::polar(1.0, lambda * 1.7))) < 1e-14);
    }
    SUBCASE("c = 1, z = 0") {
        const ComplexMat2 m = step_matrix(1.0, 0.0, 1.0);
        const ComplexMat2 expect = std::cosh(1.0) * ComplexMat2::identity() + std::sinh(1.0) * big_j();
        CHECK(distance(m, expect) < 1e-14);
    }
    SUBCASE("matches the matrix exponential") {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int i = 0; i < 500; ++i) {
            const cplx c{u(rng), u(rng)};
            const cplx z = i % 2 ? cplx{u(rng), 0.0} : cplx{u(rng), u(rng) / 3.0};
            const double l = 0.01 + std::abs(u(rng));
            const ComplexMat2 m = step_matrix(c, z, l);
            CHECK(rel(m, expm_oracle(c, z, l)) < 1e-12);
            CHECK(std::abs(m.det() - 1.0) < 1e-12 * std::max(1.0, m.max_abs() * m.max_abs()));
        }
    }
    SUBCASE("near mu = 0") {
        for (double eps : {0.0, 1e-12, 1e-6, 1e-3, -1e-6}) {
            const double z = std::sqrt(1.0 + eps);
            CHECK(rel(step_matrix(1.0, z, 2.0), expm_oracle(1.0, z, 2.0)) < 1e-12);
        }
    }
    SUBCASE("derivative matches a central difference") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int i = 0; i < 100; ++i) {
            const cplx c{u(rng), u(rng)};
            const double z = u(rng);
            const double l = 0.05 + std::abs(u(rng));
            const double h = 1e-6;
            const ComplexMat2 fd = (step_matrix(c, z + h, l) - step_matrix(c, z - h, l)) * cplx{0.5 / h};
            const DualMat2 d = step_matrix_dual(c, z, l);
            CHECK(distance(d.v, step_matrix(c, z, l)) < 1e-14);
            CHECK(rel(d.d, fd) < 1e-7);
        }
    }
}

TEST_CASE("transfer and monodromy") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    SUBCASE("identity and free propagation") {
        const auto free = PiecewisePotential::constant(1.0, 0.0);
        CHECK(distance(transfer(free, 0.3, 0.3, 1.2), ComplexMat2::identity()) == 0.0);
        const double l = 0.9;
        CHECK(distance(transfer(free, 0.0, 2.0, l),
                       ComplexMat2::diag(std::polar(1.0, -2 * l), std::polar(1.0, 2 * l))) < 1e-14);
        const cplx z{0.4, 0.3};
        CHECK(distance(monodromy(free, z), ComplexMat2::diag(std::exp(-kI * z), std::exp(kI * z))) < 1e-14);
    }
    SUBCASE("composition of segments") {
        const auto p = random_potential(rng, 3);
        const double lambda = 0.7;
        ComplexMat2 expect = ComplexMat2::identity();
        for (const auto& s : p.segments()) expect = expm_oracle(s.value, lambda, s.length) * expect;
        CHECK(rel(transfer(p, 0.0, p.period(), lambda), expect) < 1e-12);
        CHECK(rel(monodromy(p, lambda), expect) < 1e-12);
    }
    SUBCASE("cocycle identity") {
        for (int i = 0; i < 300; ++i) {
            const auto p = random_potential(rng, 1 + i % 5);
            const double t = p.period();
            double x = 4 * t * (u(rng) - 0.5), y = 4 * t * (u(rng) - 0.5), s = 4 * t * (u(rng) - 0.5);
            const cplx z = i % 3 ? cplx{4 * u(rng) - 2, 0.0} : cplx{4 * u(rng) - 2, 0.2 * u(rng)};
            const ComplexMat2 lhs = transfer(p, x, y, z);
            const ComplexMat2 ys = transfer(p, s, y, z);
            const ComplexMat2 sx = transfer(p, x, s, z);
            // Rounding scales with the norms of the two factors.
            CHECK(distance(lhs, ys * sx) < 1e-10 * std::max(1.0, ys.max_abs() * sx.max_abs()));
        }
    }
    SUBCASE("long spans use period powers") {
        const auto p = random_potential(rng, 4);
        const double t = p.period();
        const double lambda = 1.3;
        ComplexMat2 step = ComplexMat2::identity();
        for (int k = 0; k < 9; ++k) step = transfer(p, (0.3 + k) * t, (1.3 + k) * t, lambda) * step;
        CHECK(rel(transfer(p, 0.3 * t, 9.3 * t, lambda), step) < 1e-10);
    }
    SUBCASE("trace is independent of the base point") {
        for (int i = 0; i < 100; ++i) {
            const auto p = random_potential(rng, 4);
            const double lambda = 6 * u(rng) - 3;
            const cplx a = monodromy(p, lambda).trace();
            const cplx b = monodromy(p, lambda, 0.37 * p.period()).trace();
            CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
            CHECK(rel(monodromy(p, lambda, 0.37 * p.period()),
                      transfer(p, 0.37 * p.period(), 1.37 * p.period(), lambda)) < 1e-10);
        }
    }
    SUBCASE("SU(1,1) and determinant at real energies") {
        for (int i = 0; i < 500; ++i) {
            const auto p = random_potential(rng, 1 + i % 6, 1.0);
            const double lambda = 10 * u(rng) - 5;
            const double x = p.period() * (u(rng) - 0.5);
            const ComplexMat2 m = transfer(p, x, x + p.period() * u(rng), lambda);
            CHECK(su11_defect(m) <= 1e-9);
            CHECK(std::abs(m.det() - 1.0) <= 1e-10);
            // Over long spans the defect is relative to |M|^2.
            const ComplexMat2 big = transfer(p, -3 * u(rng), 5 * u(rng), lambda);
            CHECK(su11_defect(big) <= 1e-9 * std::max(1.0, big.max_abs() * big.max_abs()));
        }
    }
    SUBCASE("constant data: trace above 2 inside |z| < |c|") {
        const auto p = PiecewisePotential::constant(1.0, cplx{0.6, 0.8});
        for (double z : {0.0, 0.3, -0.9}) {
            CHECK(discriminant(p, z) == doctest::Approx(2 * std::cosh(std::sqrt(1.0 - z * z))).epsilon(1e-13));
        }
    }
    SUBCASE("block potentials agree with their flattening") {
        BlockPotential b;
        b.blocks.push_back({random_potential(rng, 3), 4});
        b.blocks.push_back({random_potential(rng, 2), 3});
        const auto flat = b.flatten();
        CHECK(flat.period() == doctest::Approx(b.period()).epsilon(1e-15));
        for (double lambda : {-1.1, 0.2, 2.5}) {
            CHECK(rel(monodromy(b, lambda), monodromy(flat, lambda)) < 1e-10);
            const DualMat2 d1 = monodromy_dual(b, lambda);
            const DualMat2 d2 = monodromy_dual(flat, lambda);
            CHECK(rel(d1.d, d2.d) < 1e-9);
        }
    }
}

TEST_CASE("discriminant") {
    const auto free = PiecewisePotential::constant(1.0, 0.0);
    for (int i = 0; i <= 100; ++i) {
        const double l = -5.0 + 0.1 * i;
        CHECK(std::abs(discriminant(free, l) - 2 * std::cos(l)) < 1e-12);
    }
    const auto one = PiecewisePotential::constant(1.0, 1.0);
    CHECK(discriminant(one, 0.0) == doctest::Approx(2 * std::cosh(1.0)).epsilon(1e-14));
    CHECK(discriminant(one, 2.0) == doctest::Approx(2 * std::cos(std::sqrt(3.0))).epsilon(1e-13));
    CHECK(discriminant(one, 2.0) == doctest::Approx(-0.3212).epsilon(1e-3));
}

TEST_CASE("bands") {
    SUBCASE("free data: bands abut and fill the window") {
        const auto b = bands(PiecewisePotential::constant(1.0, 0.0), 3.0, 1e-8);
        REQUIRE(b.size() == 1);
        CHECK(b.intervals[0].a == -3.0);
        CHECK(b.intervals[0].b == 3.0);
        CHECK(b.measure() == doctest::Approx(6.0).epsilon(1e-12));
    }
    SUBCASE("constant c = 1 opens the gap (-1, 1)") {
        const auto b = bands(PiecewisePotential::constant(1.0, 1.0), 3.0, 1e-8);
        REQUIRE(b.size() == 2);
        CHECK(b.intervals[0].a == -3.0);
        CHECK(std::abs(b.intervals[0].b + 1.0) <= 1e-8);
        CHECK(std::abs(b.intervals[1].a - 1.0) <= 1e-8);
        CHECK(b.intervals[1].b == 3.0);
    }
    SUBCASE("period two free data still abuts") {
        const auto b = bands(PiecewisePotential::constant(2.0, 0.0), 4.0, 1e-10);
        CHECK(b.size() == 1);
    }
    SUBCASE("random data: count bound, Lyapunov sign and edge accuracy") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 30; ++i) {
            const auto p = random_potential(rng, 3);
            const double r = 4.0;
            const auto b = bands(p, r, 1e-10);
            CHECK(b.size() <= band_count_bound(p.period(), r, p.sup_norm()));
            for (const auto& iv : b.intervals) {
                if (iv.a > -r) CHECK(std::abs(std::abs(discriminant(p, iv.a)) - 2.0) < 1e-6);
                if (iv.b < r) CHECK(std::abs(std::abs(discriminant(p, iv.b)) - 2.0) < 1e-6);
                CHECK(lyapunov(p, 0.5 * (iv.a + iv.b)) < 1e-8);
            }
            for (int k = 0; k < 50; ++k) {
                const double x = (2 * u(rng) - 1) * r;
                if (b.distance_to(x) > 1e-6) CHECK(lyapunov(p, x) > 0.0);
                if (b.contains(x)) CHECK(lyapunov(p, x) == 0.0);
            }
        }
    }
}

TEST_CASE("lyapunov and floquet exponent") {
    const auto free = PiecewisePotential::constant(1.0, 0.0);
    CHECK(lyapunov(free, 1.234) == 0.0);
    CHECK(lyapunov(PiecewisePotential::constant(1.0, 1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lyapunov(free, cplx{0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));

    const auto w = floquet_exponent(free, cplx{0.0, 1.0});
    CHECK(std::abs(w.w - cplx{-1.0, 0.0}) < 1e-14);

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_potential(rng, 3);
        const cplx z{6 * u(rng) - 3, 0.01 + 2 * u(rng)};
        const cplx d = monodromy(p, z).trace();
        const cplx fw = floquet_exponent(p, z).w;
        CHECK(fw.real() <= 0.0);
        CHECK(std::abs(d - 2.0 * std::cosh(p.period() * fw)) <= 1e-9 * std::max(1.0, std::abs(d)));
        CHECK(std::abs(lyapunov(p, z) + fw.real()) <= 1e-9);
    }
}

TEST_CASE("density of states") {
    const auto free = PiecewisePotential::constant(1.0, 0.0);
    CHECK(dos_density(free, 1.0) == doctest::Approx(1.0 / kPi).epsilon(1e-13));
    CHECK_THROWS_AS(dos_density(free, kPi), NotInBandInterior);
    CHECK_THROWS_AS(dos_density(PiecewisePotential::constant(1.0, 1.0), 0.0), NotInBandInterior);

    SUBCASE("free band weight") {
        CHECK(dos_band_weight(free, {0.0, kPi}) == doctest::Approx(1.0).epsilon(1e-10));
        const auto two = PiecewisePotential::constant(2.0, 0.0);
        CHECK(dos_band_weight(two, {0.0, kPi / 2}) == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("constant data band weights") {
        // D = 2 cos sqrt(lambda^2 - 1) outside the gap: the first band is
        // [1, sqrt(1 + pi^2)], closed off by a touching extremum.
        const auto one = PiecewisePotential::constant(1.0, 1.0);
        const auto fb = floquet_bands(one, 4.0, 1e-12);
        REQUIRE(fb.size() == 4);
        CHECK(std::abs(fb[2].a - 1.0) < 1e-10);
        CHECK(std::abs(fb[2].b - std::sqrt(1 + kPi * kPi)) < 1e-6);
        CHECK(dos_band_weight(one, fb[1]) == doctest::Approx(1.0).epsilon(0.01));
        CHECK(dos_band_weight(one, fb[2]) == doctest::Approx(1.0).epsilon(0.01));
        CHECK(bands(one, 4.0).size() == 2);
    }
    SUBCASE("transported fixed point matches the direct one") {
        std::mt19937_64 rng(8);
        const auto p = random_potential(rng, 3);
        const auto b = bands(p, 3.0, 1e-12);
        REQUIRE_FALSE(b.empty());
        const double lambda = 0.5 * (b.intervals[0].a + b.intervals[0].b);
        const cplx s0 = disk_fixed_point(monodromy(p, lambda));
        for (double x : {0.13, 0.5, 0.77}) {
            const double at = x * p.period();
            const cplx direct = disk_fixed_point(monodromy(p, lambda, at));
            const cplx moved = mobius_apply(transfer(p, 0.0, at, lambda), s0);
            CHECK(std::abs(direct - moved) < 1e-9);
        }
    }
    SUBCASE("density agrees with the rotation-number derivative") {
        // Independent route: rho' = |D'| / (pi T sqrt(4 - D^2)).
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 20; ++i) {
            const auto p = random_potential(rng, 3);
            const auto b = bands(p, 3.0, 1e-12);
            for (const auto& iv : b.intervals) {
                const double lambda = iv.a + (0.2 + 0.6 * u(rng)) * iv.length();
                const double d = discriminant(p, lambda);
                if (std::abs(d) > 1.99) continue;
                const double h = 1e-6;
                const double dd = (discriminant(p, lambda + h) - discriminant(p, lambda - h)) / (2 * h);
                const double oracle = std::abs(dd) / (kPi * p.period() * std::sqrt(4 - d * d));
                CHECK(dos_density(p, lambda, 16) == doctest::Approx(oracle).epsilon(1e-6));
            }
        }
    }
    SUBCASE("lower bound through the conjugacy norm") {
        std::mt19937_64 rng(10);
        const auto p = random_potential(rng, 3);
        const auto b = bands(p, 3.0, 1e-12);
        for (const auto& iv : b.intervals) {
            const double lambda = 0.5 * (iv.a + iv.b);
            if (std::abs(discriminant(p, lambda)) > 1.99) continue;
            // (1/(4 pi T)) * integral of |B(x)|_2^2 over one period, by midpoint rule.
            const int n = 400;
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                const double x = (k + 0.5) * p.period() / n;
                const ComplexMat2 bx = conjugate_to_rotation(monodromy(p, lambda, x));
                acc += bx.hs_norm() * bx.hs_norm() * p.period() / n;
            }
            const double bound = acc / (4 * kPi * p.period());
            CHECK(dos_density(p, lambda, 16) >= bound * (1 - 1e-3));
        }
    }
}

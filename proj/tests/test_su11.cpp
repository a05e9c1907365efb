#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "thinspec/errors.hpp"
#include "thinspec/su11.hpp"

using namespace thinspec;

namespace {

ComplexMat2 rotation(double theta) { return ComplexMat2::diag(std::polar(1.0, theta), std::polar(1.0, -theta)); }

// SU(1,1) element sending 0 to xi.
ComplexMat2 boost_to(cplx xi) {
    const double s = 1.0 / std::sqrt(1.0 - std::norm(xi));
    return {s, s * xi, s * std::conj(xi), s};
}

ComplexMat2 random_su11(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const cplx xi = std::polar(0.9 * u(rng), 2 * kPi * u(rng));
    const double theta = 2 * kPi * u(rng);
    const double r = 1.5 * u(rng);
    const ComplexMat2 h{std::cosh(r), std::sinh(r), std::sinh(r), std::cosh(r)};
    return boost_to(xi) * h * rotation(theta);
}

ComplexMat2 random_elliptic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const cplx xi = std::polar(0.8 * u(rng), 2 * kPi * u(rng));
    const ComplexMat2 g = boost_to(xi);
    return g * rotation(0.05 + (kPi - 0.1) * u(rng)) * g.inverse();
}

// Brute-force oracle: every word over {A, B} of length <= n, by breadth.
double max_word_trace(const ComplexMat2& a, const ComplexMat2& b, int n) {
    std::vector<ComplexMat2> layer{ComplexMat2::identity()};
    double best = 0.0;
    for (int len = 1; len <= n; ++len) {
        std::vector<ComplexMat2> next;
        next.reserve(layer.size() * 2);
        for (const auto& m : layer) {
            next.push_back(a * m);
            next.push_back(b * m);
        }
        for (const auto& m : next) best = std::max(best, std::abs(m.trace().real()));
        layer = std::move(next);
    }
    return best;
}

}  // namespace

TEST_CASE("su11_defect") {
    CHECK(su11_defect(ComplexMat2::identity()) == 0.0);
    CHECK(su11_defect(rotation(0.7)) < 1e-15);
    // [[1,1],[0,1]]* j [[1,1],[0,1]] - j = [[0,-1],[-1,0]].
    CHECK(su11_defect({1.0, 1.0, 0.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("classify") {
    const auto e = classify(rotation(kPi / 3));
    REQUIRE(std::holds_alternative<Elliptic>(e));
    CHECK(std::get<Elliptic>(e).angle == doctest::Approx(kPi / 3));

    CHECK_THROWS_AS(classify(ComplexMat2::diag(2.0, 0.5)), NotInGroup);
    const auto h = classify({1.25, 0.75, 0.75, 1.25});
    REQUIRE(std::holds_alternative<Hyperbolic>(h));
    CHECK(std::get<Hyperbolic>(h).multiplier == doctest::Approx(2.0));

    const auto p = classify(ComplexMat2::identity());
    REQUIRE(std::holds_alternative<Parabolic>(p));
    CHECK(std::get<Parabolic>(p).sign == 1);
    CHECK(std::get<Parabolic>(classify(ComplexMat2::diag(-1.0, -1.0))).sign == -1);
}

TEST_CASE("mobius_apply") {
    CHECK(std::abs(mobius_apply(rotation(1.1), cplx{0.0})) == 0.0);
    const cplx z{0.3, -0.2};
    CHECK(mobius_apply(ComplexMat2::identity(), z) == z);
    const auto p = mobius_apply(big_j(), RiemannPoint::infinity());
    CHECK_FALSE(p.infinite);
    CHECK(std::abs(p.value) == 0.0);
    CHECK(mobius_apply(ComplexMat2{0.0, 1.0, 1.0, 0.0}, RiemannPoint::finite(0.0)).infinite);
}

TEST_CASE("disk_fixed_point") {
    CHECK(std::abs(disk_fixed_point(rotation(0.4))) < 1e-15);
    const ComplexMat2 b = boost_to({0.3, 0.4});
    const ComplexMat2 m = b.inverse() * rotation(1.3) * b;
    const cplx expect = mobius_apply(b.inverse(), cplx{0.0});
    CHECK(std::abs(disk_fixed_point(m) - expect) < 1e-12);
    CHECK_THROWS_AS(disk_fixed_point({1.25, 0.75, 0.75, 1.25}), NotElliptic);
}

TEST_CASE("conjugate_to_rotation") {
    CHECK(distance(conjugate_to_rotation(rotation(0.9)), ComplexMat2::identity()) < 1e-15);

    // xi = 0.5: |B|_2^2 = 2 (1.25) / 0.75.
    const ComplexMat2 m = boost_to(0.5) * rotation(0.8) * boost_to(0.5).inverse();
    const ComplexMat2 b = conjugate_to_rotation(m);
    CHECK(b.hs_norm() * b.hs_norm() == doctest::Approx(10.0 / 3.0));

    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const ComplexMat2 e = random_elliptic(rng);
        const double theta = std::get<Elliptic>(classify(e)).angle;
        const ComplexMat2 c = conjugate_to_rotation(e);
        CHECK(su11_defect(c) < 1e-9);
        const ComplexMat2 r = c * e * c.inverse();
        // Either orientation of the rotation is a valid conjugate.
        const double d = std::min(distance(r, rotation(theta)), distance(r, rotation(-theta)));
        CHECK(d < 1e-9);
    }
}

TEST_CASE("fixed points transform equivariantly") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const ComplexMat2 m = random_elliptic(rng);
        const ComplexMat2 g = random_su11(rng);
        const cplx lhs = disk_fixed_point(g * m * g.inverse());
        const cplx rhs = mobius_apply(g, disk_fixed_point(m));
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("cayley_to_sl2r") {
    CHECK(distance(cayley_to_sl2r(ComplexMat2::identity()), ComplexMat2::identity()) < 1e-15);

    const double t = 0.6;
    const ComplexMat2 r = cayley_to_sl2r(rotation(t));
    const ComplexMat2 rot{std::cos(t), -std::sin(t), std::sin(t), std::cos(t)};
    const ComplexMat2 rot_t{std::cos(t), std::sin(t), -std::sin(t), std::cos(t)};
    CHECK(std::min(distance(r, rot), distance(r, rot_t)) < 1e-14);

    std::mt19937_64 rng(3);
    const ComplexMat2 w = cayley_matrix();
    for (int i = 0; i < 1000; ++i) {
        const ComplexMat2 m = random_su11(rng);
        const ComplexMat2 s = cayley_to_sl2r(m);
        for (cplx e : {s.a, s.b, s.c, s.d}) CHECK(std::abs(e.imag()) <= 1e-12 * std::max(1.0, s.max_abs()));
        CHECK(std::abs(s.det() - 1.0) < 1e-12 * std::max(1.0, s.max_abs() * s.max_abs()));
        CHECK(distance(w * s * w.adjoint(), m) < 1e-12 * std::max(1.0, m.max_abs()));
    }
    CHECK_THROWS_AS(cayley_to_sl2r({1.0, 1.0, 0.0, 1.0}), NotInGroup);
}

TEST_CASE("gordon_lower_bounds") {
    const auto g = gordon_lower_bounds(ComplexMat2::identity(), {1.0, 0.0});
    CHECK(g.m3 == 1.0);
    CHECK(g.m2 == 1.0);

    // Trace zero: M^2 = -I.
    const ComplexMat2 m{0.0, 2.0, -0.5, 0.0};
    const auto z = gordon_lower_bounds(m, {std::sqrt(0.5), cplx{0.0, std::sqrt(0.5)}});
    CHECK(z.m2 >= 1.0 - 1e-15);
    CHECK(z.m3 >= 1.0 - 1e-15);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        ComplexMat2 a{{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}};
        a *= 1.0 / std::sqrt(a.det());
        const Vec2 v{{n(rng), n(rng)}, {n(rng), n(rng)}};
        const auto b = gordon_lower_bounds(a, v);
        CHECK(b.m3 >= 0.5 * v.norm() * (1 - 1e-12));
        const double tr = std::abs(a.trace());
        CHECK(b.m2 >= 0.5 * std::min(1.0, 1.0 / tr) * v.norm() * (1 - 1e-12));
    }
}

TEST_CASE("SemigroupWord") {
    const SemigroupWord w({{0, 2}, {0, 1}, {1, 3}});
    CHECK(w.runs().size() == 2);
    CHECK(w.total_power() == 6);
    CHECK(w.to_string() == "A^3 B^3");
    CHECK(SemigroupWord::parse("A^3 B^3") == w);
    CHECK(SemigroupWord::parse("A B A^2").to_string() == "A^1 B^1 A^2");

    const ComplexMat2 a = rotation(0.3);
    const ComplexMat2 b = boost_to(0.4) * rotation(0.5) * boost_to(0.4).inverse();
    // Runs act in order: the product is B^3 A^3.
    CHECK(distance(w.evaluate(a, b), power(b, 3) * power(a, 3)) < 1e-14);
}

TEST_CASE("best_inverse_power") {
    // diag(e^{2 pi i/7}, e^{-2 pi i/7}) has order 7, so A^6 = A^{-1}.
    CHECK(best_inverse_power(rotation(2 * kPi / 7), 256) == 6);
}

TEST_CASE("hyperbolic_in_semigroup") {
    SUBCASE("commuting inputs") {
        CHECK(hyperbolic_in_semigroup(rotation(0.4), rotation(1.1)).status == SearchStatus::CommutingInput);
        const ComplexMat2 a = random_elliptic(*std::make_unique<std::mt19937_64>(2));
        CHECK(hyperbolic_in_semigroup(a, a * a).status == SearchStatus::CommutingInput);
    }
    SUBCASE("distinct fixed points, generic angles") {
        const ComplexMat2 a = rotation(0.9);
        const ComplexMat2 g = boost_to(0.5);
        const ComplexMat2 b = g * rotation(1.7) * g.inverse();
        const double oracle = max_word_trace(a, b, 12);
        REQUIRE(oracle > 2.05);
        const auto s = hyperbolic_in_semigroup(a, b);
        REQUIRE(s.status == SearchStatus::Found);
        const double t = s.word.evaluate(a, b).trace().real();
        CHECK(std::abs(t) >= 2.05);
        CHECK(t == doctest::Approx(s.trace).epsilon(1e-10));
        CHECK(s.word.total_power() <= 12);
    }
    SUBCASE("never returns a word inside the margin") {
        std::mt19937_64 rng(23);
        for (int i = 0; i < 40; ++i) {
            const ComplexMat2 a = random_elliptic(rng);
            const ComplexMat2 b = random_elliptic(rng);
            const auto s = hyperbolic_in_semigroup(a, b);
            if (s.status != SearchStatus::Found) continue;
            CHECK(std::abs(s.word.evaluate(a, b).trace().real()) > 2.05);
        }
    }
    SUBCASE("small rotations need the inverse tokens or long words") {
        const ComplexMat2 a = rotation(0.05);
        const ComplexMat2 g = boost_to(0.2);
        const ComplexMat2 b = g * rotation(0.07) * g.inverse();
        const auto s = hyperbolic_in_semigroup(a, b);
        if (s.status == SearchStatus::Found) {
            CHECK(std::abs(s.word.evaluate(a, b).trace().real()) > 2.05);
        }
    }
    SUBCASE("total filter") {
        const ComplexMat2 a = rotation(0.9);
        const ComplexMat2 b = boost_to(0.5) * rotation(1.7) * boost_to(0.5).inverse();
        SemigroupBudget budget;
        budget.accept_total = [](long long k) { return k % 2 == 0; };
        const auto s = hyperbolic_in_semigroup(a, b, budget);
        REQUIRE(s.status == SearchStatus::Found);
        CHECK(s.word.total_power() % 2 == 0);
    }
}

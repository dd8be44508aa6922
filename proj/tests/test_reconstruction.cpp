#include <doctest.h>

#include <random>

#include "core/reconstruction.hpp"
#include "test_util.hpp"

using namespace weaver;
using namespace testutil;

TEST_CASE("thickness at the introductory point") {
    const auto m = intro_model();
    const SimplexPoint p(std::vector<double>{0.4, 0.4, 0.2});
    const auto tau = thickness(m, p);
    REQUIRE(tau.size() == 1);
    CHECK(tau[0] == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("thickness scales inversely with the evaluation point") {
    std::mt19937_64 rng(7);
    const auto m = playboard_model();
    for (int rep = 0; rep < 20; ++rep) {
        const auto x = random_interior_point(rng, m.n());
        const auto base = thickness(m, x);
        for (double c : {0.5, 2.0, -3.0, 20.0}) {
            std::vector<double> y(x);
            for (auto& v : y) v *= c;
            const auto scaled = thickness(m, y);
            for (std::size_t j = 0; j < base.size(); ++j)
                CHECK(scaled[j] == doctest::Approx(base[j] / c).epsilon(1e-12));
        }
    }
}

TEST_CASE("thickness of the three-slice product along its axis") {
    const auto m = pi1_model();
    const std::vector<double> y{2, 3, 4, 5, 6};

    // unnormalized evaluation: each union term carries its slice co-thickness
    const auto tau_raw = thickness(m, y);
    const std::vector<double> expected_raw{1, 1, -1, -1};
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(tau_raw[j] == doctest::Approx(expected_raw[j]).epsilon(1e-13));
    // the ionic slice shares co-thickness 2 across all coordinates
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(m.ionic_counts()[i] / y[i] == doctest::Approx(2.0).epsilon(1e-13));

    // on the simplex the same point is y / 20
    const SimplexPoint p(y);
    const auto tau = thickness(m, p);
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(tau[j] == doctest::Approx(20.0 * expected_raw[j]).epsilon(1e-13));
}

TEST_CASE("thickness rejects a vanishing event mass") {
    const auto m = make_model({1, 1, 1}, {2}, {"110"});
    const std::vector<double> x{1e-320, 1e-320, 1.0};
    CHECK_THROWS_AS(thickness(m, x), Error);
}

TEST_CASE("tau0* at the published game answer") {
    const auto m = playboard_model();
    const SimplexPoint p(playboard_published_p());
    CHECK(std::abs(tau0_star(m, p) - 87.41) <= 0.01);
}

TEST_CASE("tau0* for a pure multinomial is the total count") {
    const auto m = make_model({3, 7, 10}, {}, {});
    const SimplexPoint x(std::vector<double>{3, 7, 10});
    CHECK(tau0_star(m, x) == doctest::Approx(20.0).epsilon(1e-13));
    CHECK(sse(m, x, 20.0) <= 1e-24);
}

TEST_CASE("tau0* at the introductory point") {
    const auto m = intro_model();
    const SimplexPoint p(std::vector<double>{0.4, 0.4, 0.2});
    CHECK(tau0_star(m, p) == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("reconstruction recovers the ionic counts at the answers") {
    const auto pb = playboard_model();
    const SimplexPoint p(playboard_published_p());
    const auto r = reconstruct(pb, p, 87.41);
    for (std::size_t i = 0; i < pb.n(); ++i)
        CHECK(std::abs(r[i] - pb.ionic_counts()[i]) <= 0.01);

    const auto intro = intro_model();
    const auto ri = reconstruct(intro, SimplexPoint(std::vector<double>{0.4, 0.4, 0.2}), 5.0);
    for (double v : ri) CHECK(v == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("reconstruction with no unions is a pure scaling") {
    const auto m = make_model({2, 5}, {}, {});
    const std::vector<double> x{0.3, 0.7};
    const auto r = reconstruct(m, x, 11.0);
    CHECK(r[0] == doctest::Approx(3.3).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(7.7).epsilon(1e-14));
}

TEST_CASE("error at the published answer is already tiny") {
    const auto m = playboard_model();
    const SimplexPoint p(playboard_published_p());
    CHECK(sse(m, p, tau0_star(m, p)) <= 1e-4);
}

TEST_CASE("quadratic coefficients match a three-point parabola fit") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 25; ++rep) {
        const auto m = random_model(rng, 4, 5, false);
        const auto x = random_interior_point(rng, m.n());
        const auto c = quadratic_coeffs(m, x);
        // independent fit through sse at tau0 = 0, 1, 2
        const double f0 = sse(m, x, 0.0), f1 = sse(m, x, 1.0), f2 = sse(m, x, 2.0);
        const double a2 = 0.5 * (f2 - 2.0 * f1 + f0);
        const double a1 = f1 - f0 - a2;
        const double a0 = f0;
        const double scale = std::max({1.0, std::abs(a0), std::abs(a1), std::abs(a2)});
        CHECK(std::abs(c.a2 - a2) <= 1e-10 * scale);
        CHECK(std::abs(c.a1 - a1) <= 1e-10 * scale);
        CHECK(std::abs(c.a0 - a0) <= 1e-10 * scale);
    }
}

TEST_CASE("leading coefficient is the squared norm") {
    const auto m = playboard_model();
    const std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
    CHECK(quadratic_coeffs(m, uniform).a2 == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("the quadratic identity holds everywhere") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 25; ++rep) {
        const auto m = random_model(rng, 5, 6, false);
        const auto x = random_interior_point(rng, m.n());
        const auto c = quadratic_coeffs(m, x);
        for (double tau0 : {-10.0, -1.0, 0.0, 0.7, 7.0, 123.0}) {
            const double direct = sse(m, x, tau0);
            const double via = c.eval(tau0);
            CHECK(std::abs(direct - via) <= 1e-9 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("tau0* minimizes the reconstruction error") {
    std::mt19937_64 rng(17);
    const auto m = playboard_model();
    for (int rep = 0; rep < 5; ++rep) {
        const auto x = random_interior_point(rng, m.n());
        const double star = tau0_star(m, x);
        const double at_star = sse(m, x, star);
        std::uniform_real_distribution<double> shift(-100.0, 100.0);
        for (int k = 0; k < 100; ++k) CHECK(at_star <= sse(m, x, star + shift(rng)) + 1e-12);
    }
}

TEST_CASE("sse at the uniform point agrees with the quadratic route") {
    const auto m = playboard_model();
    const std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
    const double t0 = tau0_star(m, uniform);
    CHECK(sse(m, uniform, t0) ==
          doctest::Approx(quadratic_coeffs(m, uniform).eval(t0)).epsilon(1e-12));
}

TEST_CASE("exact reconstruction satisfies both counting rules") {
    // sse == 0 forces b_j = tau_j (delta_j' p) by construction of tau and
    // a_i = p_i (tau0 + excluded tau) by the vanishing deviation
    const auto m = intro_model();
    const SimplexPoint p(std::vector<double>{0.4, 0.4, 0.2});
    const double t0 = tau0_star(m, p);
    REQUIRE(sse(m, p, t0) <= 1e-24);
    const auto tau = thickness(m, p);
    for (std::size_t j = 0; j < m.q(); ++j)
        CHECK(tau[j] * m.patterns()[j].dot(p) == doctest::Approx(m.union_counts()[j]).epsilon(1e-13));
    const auto r = reconstruct(m, p, t0);
    for (std::size_t i = 0; i < m.n(); ++i)
        CHECK(r[i] == doctest::Approx(m.ionic_counts()[i]).epsilon(1e-12));
}

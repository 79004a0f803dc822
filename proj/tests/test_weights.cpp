#include <doctest.h>

#include <cmath>

#include "kinetic/weights.hpp"

using namespace kinetic;
using nlohmann::json;

TEST_CASE("weight classes") {
    const auto p = WeightFunction::polynomial(40);
    CHECK(p(0.0) == doctest::Approx(1.0));
    CHECK(p(Vec3(1, 0, 0)) == doctest::Approx(std::pow(2.0, 20)));
    CHECK(p.confinement() == Confinement::Weak);
    CHECK(WeightFunction::inverse_gaussian(0.3).confinement() == Confinement::Strong);
    CHECK(WeightFunction::inverse_gaussian(0.2).confinement() == Confinement::Weak);
    CHECK(WeightFunction::inverse_gaussian(0.3)(2.0) == doctest::Approx(std::exp(1.2)));
    CHECK_THROWS_AS(WeightFunction::inverse_gaussian(0.5), WeightError);
    CHECK_THROWS_AS(WeightFunction::stretched_exp(0.3, 2.5), WeightError);
}

TEST_CASE("C0 is at least one and tracks sup omega M") {
    for (double q : {2.0, 10.0, 40.0}) {
        const auto w = WeightFunction::polynomial(q);
        double sup = 0;
        for (double r = 0; r < 40; r += 0.001) sup = std::max(sup, w(r) * std::exp(-0.5 * r * r) / (2 * kPi));
        CHECK(w.C0() == doctest::Approx(std::max(1.0, sup)).epsilon(1e-6));
    }
}

TEST_CASE("polynomial admissibility") {
    const auto a = admissibility(WeightFunction::polynomial(30), BoundaryAssumption::RH1, 1.0);
    CHECK_FALSE(a.admissible);
    CHECK(a.q_star > 30);
    CHECK(admissibility(WeightFunction::inverse_gaussian(0.3), BoundaryAssumption::RH2, 1.0).admissible);
}

TEST_CASE("json round trip") {
    for (const json& j : {json{{"class", "polynomial"}, {"q", 12}}, json{{"class", "inverse_gaussian"}, {"zeta", 0.3}},
                          json{{"class", "stretched_exp"}, {"zeta", 0.5}, {"s", 1.0}}}) {
        const auto w = WeightFunction::from_json(j);
        const auto w2 = WeightFunction::from_json(w.to_json());
        CHECK(w2(3.0) == doctest::Approx(w(3.0)));
    }
    CHECK_THROWS_AS(WeightFunction::from_json({{"class", "gaussian"}}), WeightError);
}

TEST_CASE("cutoff and modified weight") {
    CHECK(xi_cutoff(0.5) == 1.0);
    CHECK(xi_cutoff(2.5) == 0.0);
    double prev = 1.0;
    for (double t = 1.0; t <= 2.0; t += 0.01) {
        CHECK(xi_cutoff(t) <= prev + 1e-15);
        prev = xi_cutoff(t);
    }
    const auto w = WeightFunction::inverse_gaussian(0.3);
    CHECK(modified_weight(w, 4.0, 1.0) == doctest::Approx(1.0 / wall_maxwellian(Vec3(1, 0, 0))));
    CHECK(modified_weight(w, 4.0, 9.0) == doctest::Approx(w(9.0)));
    // Theta_A falls towards 1 as the cutoff radius grows.
    const double t4 = theta_A(w, 4.0).value, t8 = theta_A(w, 8.0).value;
    CHECK(t8 <= t4);
    CHECK(std::abs(t8 - 1.0) < 1e-3);
    // C_omega = 4 pi int r^3 / omega.
    const auto p = WeightFunction::polynomial(10);
    // 4 pi int r^3 <r>^-10 dr = 2 pi B(2, 3) = pi / 6.
    CHECK(weight_flux_constant(p).value == doctest::Approx(kPi / 6).epsilon(1e-9));
}

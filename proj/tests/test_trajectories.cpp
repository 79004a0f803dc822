#include <doctest.h>

#include <cmath>

#include "kinetic/collision.hpp"
#include "kinetic/trajectories.hpp"

using namespace kinetic;

TEST_CASE("specular reflection") {
    CHECK((reflect_specular(Vec3(0, 0, 1), Vec3(1, 2, 3)) - Vec3(1, 2, -3)).norm() < 1e-15);
    CHECK((reflect_specular(Vec3(0, 0, 1), Vec3(1, 2, 0)) - Vec3(1, 2, 0)).norm() < 1e-15);
    const Vec3 n = Vec3(1, 1, 0) / std::sqrt(2.0);
    CHECK((reflect_specular(n, Vec3(1, 0, 0)) - Vec3(0, -1, 0)).norm() < 1e-15);
}

TEST_CASE("diffuse sampler matches the wall flux density") {
    Stream s(3, hash_id("diffuse"));
    const Vec3 n = Vec3(0.3, -0.4, 0.5).normalized();
    const int N = 1000000;
    double mean_n = 0;
    Vec3 tang = Vec3::Zero();
    for (int i = 0; i < N; ++i) {
        const Vec3 u = sample_diffuse(s, n);
        const double un = n.dot(u);
        REQUIRE(un > 0.0);  // outgoing in the backward convention x - t v
        mean_n += un / N;
        tang += (u - un * n) / N;
    }
    // Normal component is Rayleigh(1): mean sqrt(pi / 2).
    CHECK(mean_n == doctest::Approx(std::sqrt(kPi / 2)).epsilon(1e-2));
    CHECK(tang.norm() < 5e-3);
}

TEST_CASE("trace backwards") {
    const Domain c = Domain::cylinder(1, 1, 0.5);
    Stream s(1, 1);
    auto r = trace_backwards(c, {1.0, Vec3::Zero(), Vec3(1, 0, 0)}, 1.0, s);
    CHECK(r.terminated_by == Termination::ReachedTimeZero);
    CHECK(r.events.empty());
    r = trace_backwards(c, {5.0, Vec3::Zero(), Vec3(1, 0, 0)}, 5.0, s);
    REQUIRE_FALSE(r.events.empty());
    CHECK(r.events[0].t == doctest::Approx(3.0));
    CHECK(r.events[0].cls.tag == BoundaryTag::Cap1);
    CHECK(r.events[0].reflection == Reflection::Diffuse);
}

TEST_CASE("specular chains in the disk") {
    const Domain c = Domain::cylinder(1, 1, 0.5, Accommodation::constant(0.0));
    // Square orbit: start on the wall, 45 degrees to the normal (backward flight x - t v).
    const Vec3 x0(0.0, 2.0, 0.0);
    const Vec3 v0 = Vec3(0.0, 1.0, 1.0).normalized() * 0.7 + Vec3(0.01, 0, 0);
    auto sq = verify_circle_chain(c, x0, v0, 8);
    CHECK(sq.passed());
    // Diameter orbit.
    auto dia = verify_circle_chain(c, x0, Vec3(0.0, 1.0, 0.0), 6);
    CHECK(dia.passed());
    CHECK(verify_circle_chain_random(c, 20, 50, 11).passed());
}

TEST_CASE("jacobian of the direct map") {
    const Domain c = Domain::cylinder(1, 1, 0.2);
    // No bounce for a short, slow flight from the centre: det = -(t - s)^3.
    const auto j = jacobian_det(c, Vec3(0, 0, 0), 2.0, 0.0, Vec3(0.1, 0.05, 0.0));
    CHECK_FALSE(j.bounced);
    CHECK(j.det == doctest::Approx(-8.0).epsilon(1e-9));
    CHECK(jacobian_det(c, Vec3(0, 0, 0), 1.0, 1.0, Vec3(0.1, 0, 0)).det == doctest::Approx(0.0));
}

TEST_CASE("cap lemma: slow particles never cross") {
    // eps_D = 2 L / (M T) grows as M falls; eps = 3 is admissible at M = 0.6.
    const Domain c = Domain::cylinder(1, 1, 3.0);
    auto r = verify_single_bounce_cap(c, 0.5, 0.6, 1.0, 20000, 5);
    CHECK(r.constants.at("eps_D").value > 3.0);
    CHECK(r.counts.at("violations") == 0);
    CHECK(r.passed());
    CHECK_THROWS_AS(verify_single_bounce_cap(c, 0.5, 0.1, 1.0, 10, 5), TrajectoryError);
}

#include <doctest.h>

#include "kinetic/geometry.hpp"

using namespace kinetic;

TEST_CASE("contains") {
    const Domain c = Domain::cylinder(1, 1, 0.5);
    CHECK(c.contains(Vec3(0, 0, 0)));
    CHECK_FALSE(c.contains(Vec3(2, 0, 0)));  // on the cap
    CHECK(Domain::ball(1, 0.25).contains(Vec3(3.9, 0, 0)));
    CHECK_FALSE(Domain::ball(1, 0.25).contains(Vec3(4.1, 0, 0)));
}

TEST_CASE("outward normal and boundary class") {
    const Domain c = Domain::cylinder(1, 1, 0.5);
    auto lat = c.outward_normal(Vec3(0, 2, 0));
    CHECK(lat.tag == BoundaryTag::Lateral);
    CHECK((lat.normal - Vec3(0, 1, 0)).norm() < 1e-14);
    auto cap = c.outward_normal(Vec3(-2, 0.3, 0.1));
    CHECK(cap.tag == BoundaryTag::Cap1);
    CHECK((cap.normal - Vec3(-1, 0, 0)).norm() < 1e-14);
    CHECK(c.outward_normal(Vec3(2, 2, 0)).tag == BoundaryTag::SingularEdge);
    CHECK_THROWS_AS(c.outward_normal(Vec3(0, 0, 0)), GeometryError);
}

TEST_CASE("exit time") {
    const Domain c = Domain::cylinder(1, 1, 0.5);
    // Backward exit: x - t_b v on the boundary.
    auto e = c.exit_time(Vec3(0, 0, 0), Vec3(1, 0, 0));
    CHECK(e.t_b == doctest::Approx(2.0));
    CHECK((e.x_exit - Vec3(-2, 0, 0)).norm() < 1e-12);
    CHECK(e.cls.tag == BoundaryTag::Cap1);
    e = c.exit_time(Vec3(0, 0, 0), Vec3(0, -1, 0));
    CHECK(e.t_b == doctest::Approx(2.0));
    CHECK((e.x_exit - Vec3(0, 2, 0)).norm() < 1e-12);
    CHECK(e.cls.tag == BoundaryTag::Lateral);
    // |x - t v| = 1 from x = (0.5, 0, 0), v = (1, 0, 0): t = 1.5.
    e = Domain::ball(1, 1).exit_time(Vec3(0.5, 0, 0), Vec3(1, 0, 0));
    CHECK(e.t_b == doctest::Approx(1.5));
    CHECK((e.x_exit - Vec3(-1, 0, 0)).norm() < 1e-12);
    CHECK_THROWS_AS(c.exit_time(Vec3(0, 0, 0), Vec3(0, 0, 0)), GeometryError);
}

TEST_CASE("invalid domains are rejected") {
    CHECK_THROWS_AS(Domain::cylinder(1, 1, 0.0), GeometryError);
    CHECK_THROWS_AS(Domain::cylinder(-1, 1, 0.5), GeometryError);
    CHECK_THROWS_AS(Domain::ball(0, 0.5), GeometryError);
}

TEST_CASE("property: exit points lie on the boundary") {
    const Domain c = Domain::cylinder(1, 0.7, 0.3);
    for (int i = 0; i < 200; ++i) {
        const double a = 0.37 * i, b = 0.11 * i;
        const Vec3 x(std::sin(a) * 2.0, 0.9 * std::cos(b), 0.9 * std::sin(b) * 0.5);
        const Vec3 v(std::cos(1.3 * a), std::sin(0.7 * b), std::cos(a + b));
        if (!c.contains(x)) continue;
        const auto e = c.exit_time(x, v);
        CHECK(e.t_b > 0);
        CHECK(std::abs(c.signed_distance(e.x_exit)) < 1e-9 * c.diameter());
    }
}

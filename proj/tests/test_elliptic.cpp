#include <doctest.h>

#include <cmath>

#include "kinetic/collision.hpp"
#include "kinetic/elliptic.hpp"

using namespace kinetic;

TEST_CASE("homogeneous data give zero") {
    const CutCellGrid g(Domain::cylinder(1, 1, 1), 8, 12);
    EllipticProblem p{g, BcMode::P1, Eigen::VectorXd::Zero(g.size())};
    CHECK(solve_poisson(p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one-dimensional Neumann mode") {
    // xi = cos(pi x / L) on the scaled cylinder: w = (L / pi)^2 cos(pi x / L).
    double prev = 0.0;
    for (int nx : {16, 32}) {
        const Domain d = Domain::cylinder(1, 1, 0.5);
        const CutCellGrid g(d, nx, 12);
        const double L = d.half_length();
        EllipticProblem p{g, BcMode::P2, g.sample([&](const Vec3& x) { return std::cos(kPi * x[0] / L); })};
        p.project_source();
        const Eigen::VectorXd w = solve_poisson(p);
        const Eigen::VectorXd exact = g.sample([&](const Vec3& x) { return std::pow(L / kPi, 2) * std::cos(kPi * x[0] / L); });
        const double err = g.l2(w - exact) / g.l2(exact);
        CHECK(err < 2e-2);
        if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
        prev = err;
    }
}

TEST_CASE("incompatible Neumann data are rejected") {
    const CutCellGrid g(Domain::cylinder(1, 1, 1), 8, 12);
    EllipticProblem p{g, BcMode::P2, Eigen::VectorXd::Ones(g.size())};
    CHECK_THROWS_AS(solve_poisson(p), EllipticError);
    CHECK_THROWS_AS(CutCellGrid(Domain::cylinder(1, 1, 1), 8, 4), EllipticError);
}

TEST_CASE("assembled matrix is symmetric and the Robin term is positive") {
    const CutCellGrid g(Domain::cylinder(1, 1, 0.5), 8, 12);
    EllipticReport r;
    EllipticProblem p{g, BcMode::P1, slow_mode_source(g)};
    (void)solve_poisson(p, &r);
    CHECK(r.symmetry_error == 0.0);
    const Eigen::SparseMatrix<double> A1 = assemble(g, BcMode::P1), A2 = assemble(g, BcMode::P2);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(g.size());
    CHECK(std::abs(one.dot(A2 * one)) < 1e-10);
    CHECK(one.dot(A1 * one) > 0);
}

TEST_CASE("reflection extension") {
    const CutCellGrid g(Domain::cylinder(1, 1, 0.5), 8, 12);
    const Eigen::VectorXd u = g.sample([](const Vec3& x) { return x[0] + 0.1 * x[1]; });
    const Extended e = reflect_extend(g, u);
    CHECK(e.grid.size() == 2 * g.size());
    CHECK(e.grid.nx() == 16);
    // Even across both caps: the extension of x is |x| reflected about +-L.
    double s = 0;
    for (std::size_t c = 0; c < e.grid.size(); ++c) s += e.values[c] * e.grid.volume(c);
    CHECK(std::isfinite(s));
    CHECK_THROWS_AS(reflect_extend(CutCellGrid(Domain::cylinder(1, 1, 0.5), 7, 12), Eigen::VectorXd::Zero(7 * 1)),
                    EllipticError);
}

TEST_CASE("manufactured solution converges at second order") {
    const auto cs = manufactured_convergence(Domain::cylinder(1, 1, 1), {12, 24});
    CHECK(cs.order == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("cut-cell geometry") {
    const CutCellGrid g(Domain::cylinder(1, 1, 1), 4, 24);
    double vol = 0;
    for (std::size_t c = 0; c < g.size(); ++c) vol += g.volume(c);
    CHECK(vol == doctest::Approx(2.0 * kPi).epsilon(1e-10));
}

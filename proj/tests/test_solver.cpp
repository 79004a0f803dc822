#include <doctest.h>

#include <cmath>

#include "kinetic/bilinear.hpp"
#include "kinetic/solver.hpp"
#include "kinetic/transport.hpp"

using namespace kinetic;

namespace {
struct Setup {
    Domain d = Domain::cylinder(1.0, 0.5, 0.5);
    CylinderGrid x{d, 8, 2};
    VelocityGrid v{6, 3.5};
};

PhaseMatrix smooth(const CylinderGrid& x, const VelocityGrid& v) {
    return PhaseGridFunction::from_function(x, v, [&](const Vec3& p, const Vec3& u) {
        return (1.0 + 0.5 * std::cos(0.9 * p[0])) * std::exp(-0.5 * u.squaredNorm());
    });
}
}

TEST_CASE("transport semigroup") {
    Setup s;
    const PhaseMatrix f = smooth(s.x, s.v);
    CHECK((transport_semigroup(s.x, s.v, f, 0.0) - f).cwiseAbs().maxCoeff() == 0.0);
    // S(t) S(s) against S(t + s), within the interpolation error of two steps.
    const PhaseMatrix two = transport_semigroup(s.x, s.v, transport_semigroup(s.x, s.v, f, 0.1), 0.1);
    const PhaseMatrix one = transport_semigroup(s.x, s.v, f, 0.2);
    const PhaseMatrix ref = transport_semigroup(s.x, s.v, f, 0.1);
    const double interp = (transport_semigroup(s.x, s.v, ref, 0.0) - ref).cwiseAbs().maxCoeff() + 1e-3 * f.maxCoeff();
    CHECK((two - one).cwiseAbs().maxCoeff() <= 2 * interp + 0.05 * f.maxCoeff());
}

TEST_CASE("remap conserves mass with full re-emission") {
    Setup s;
    const TransportRemap tr(s.x, s.v, 0.5, 1.0);
    const PhaseMatrix f = smooth(s.x, s.v);
    TransportRemap::Flux fl;
    const PhaseMatrix g = tr.apply(f, &fl);
    CHECK(PhaseGridFunction(s.x, s.v, g).mass() == doctest::Approx(PhaseGridFunction(s.x, s.v, f).mass()).epsilon(1e-13));
    CHECK(fl.outgoing > 0);
    CHECK(fl.incoming == doctest::Approx(fl.outgoing).epsilon(1e-13));
    // With alpha < 1 the caps absorb a fraction.
    const TransportRemap damped(s.x, s.v, 0.5, 0.9);
    CHECK(PhaseGridFunction(s.x, s.v, damped.apply(f)).mass() < PhaseGridFunction(s.x, s.v, f).mass());
    CHECK(tr.apply(PhaseMatrix::Zero(f.rows(), f.cols())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("absorbing walls without gain: closed-form free transport") {
    Setup s;
    const PhaseMatrix f = smooth(s.x, s.v);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(s.v.size(), s.v.size());
    for (std::size_t j = 0; j < s.v.size(); ++j) B(j, j) = -collision_frequency_closed(s.v.node(j).norm());
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 0.05;
    cfg.alpha = 1e-12;
    const LinearKineticSolver lin(s.x, s.v, B, cfg, WeightFunction::polynomial(2));
    const PhaseMatrix num = lin.solve(f, nullptr, true).states.back();
    const PhaseMatrix exact = transport_semigroup(s.x, s.v, f, 0.05);
    CHECK((num - exact).cwiseAbs().maxCoeff() <= 0.1 * f.maxCoeff());
}

TEST_CASE("zero data give zero solutions") {
    Setup s;
    const LatticeCollisionModel q(s.v, 100000000);
    SolverConfig cfg;
    cfg.dt = 0.5;
    cfg.horizon = 2.0;
    const auto w = WeightFunction::inverse_gaussian(0.2);
    const LinearKineticSolver lin(s.x, s.v, q.linearized(), cfg, w);
    const PhaseMatrix zero = PhaseMatrix::Zero(s.x.size(), s.v.size());
    CHECK(lin.duhamel_step(zero, nullptr, nullptr).cwiseAbs().maxCoeff() == 0.0);
    const auto pr = solve_nonlinear(lin, q, zero, 0.1, 1.0);
    CHECK(pr.converged);
    CHECK(pr.iterations == 1);
    const auto sr = solve_split(s.x, s.v, q, zero, cfg, w, 0.0, false);
    CHECK(sr.converged);
    CHECK(sr.f1.back().cwiseAbs().maxCoeff() == 0.0);
    CHECK(sr.f2.back().cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(solve_split(s.x, s.v, q, zero, cfg, w, 0.0, true), SolverError);
}

TEST_CASE("smallness is enforced") {
    Setup s;
    const LatticeCollisionModel q(s.v, 100000000);
    SolverConfig cfg;
    cfg.horizon = 1.0;
    const LinearKineticSolver lin(s.x, s.v, q.linearized(), cfg, WeightFunction::inverse_gaussian(0.2));
    CHECK_THROWS_AS(solve_nonlinear(lin, q, smooth(s.x, s.v), 0.0, 1e-3), SolverError);
}

TEST_CASE("collision propagator") {
    const VelocityGrid v(6, 3.5);
    const LatticeCollisionModel q(v, 100000000);
    const auto P = CollisionPropagator::self_adjoint(q.linearized(), v.maxwellian(), 0.5);
    CHECK(P.gap() > 0);
    CHECK(P.clamped_eigenvalue() < 1e-10);
    // Collision invariants are fixed.
    const GridFunction M = v.maxwellian();
    PhaseMatrix f(1, v.size());
    f.row(0) = M.transpose();
    CHECK((P.apply(f) - f).cwiseAbs().maxCoeff() < 1e-10 * M.maxCoeff());
    const auto G = CollisionPropagator::general(q.linearized(), 0.5);
    CHECK((G.matrix() - P.matrix()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("solver config validation") {
    CHECK_THROWS_AS(SolverConfig::from_json({{"alpha", 1.5}}), SolverError);
    CHECK_THROWS_AS(SolverConfig::from_json({{"dt", 0.0}}), SolverError);
    CHECK_THROWS_AS(SolverConfig::from_json({{"scheme", "rk4"}}), SolverError);
    const auto c = SolverConfig::from_json({{"dt", 0.25}, {"horizon", 1.0}, {"scheme", "split_system"}});
    CHECK(c.steps() == 4);
    CHECK(SolverConfig::from_json(c.to_json()).scheme == Scheme::SplitSystem);
}

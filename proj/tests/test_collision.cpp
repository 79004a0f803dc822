#include <doctest.h>

#include <cmath>

#include "kinetic/bilinear.hpp"
#include "kinetic/collision.hpp"
#include "kinetic/rng.hpp"

using namespace kinetic;

TEST_CASE("collision frequency oracles") {
    // nu(0) = 2 pi E|Z| for a standard 3-D Gaussian.
    CHECK(collision_frequency(0.0).value == doctest::Approx(2 * kPi * 2 * std::sqrt(2 / kPi)).epsilon(1e-12));
    CHECK(collision_frequency(0.0).value == doctest::Approx(10.0265).epsilon(1e-5));
    CHECK(std::abs(collision_frequency(20.0).value - 2 * kPi * 20.0) < 0.01 * 2 * kPi * 20.0);
    for (double r : {0.01, 0.5, 1.0, 3.0, 7.5, 12.0})
        CHECK(collision_frequency(r).value == doctest::Approx(collision_frequency_closed(r)).epsilon(1e-12));
    // Monte Carlo of 2 pi int |v - u| M(u) du at |v| = 1.3.
    Stream s(9, hash_id("nu-mc"));
    double acc = 0;
    const int N = 400000;
    for (int i = 0; i < N; ++i) acc += (Vec3(1.3, 0, 0) - Vec3(s.normal(), s.normal(), s.normal())).norm() / N;
    CHECK(2 * kPi * acc == doctest::Approx(collision_frequency_closed(1.3)).epsilon(5e-3));
}

TEST_CASE("collision frequency bounds") {
    for (double r = 0.0; r < 30.0; r += 0.25) {
        const double ratio = collision_frequency_closed(r) / std::sqrt(1 + r * r);
        CHECK(ratio >= nu0());
        CHECK(ratio <= nu1());
    }
    CHECK(nu_star() == doctest::Approx(nu1() / nu0()));
}

TEST_CASE("kernel symmetry after Maxwellian conjugation") {
    Stream s(4, hash_id("ksym"));
    for (int i = 0; i < 100; ++i) {
        const Vec3 v(2 * s.normal(), 2 * s.normal(), 2 * s.normal()), w(2 * s.normal(), 2 * s.normal(), 2 * s.normal());
        const double e = 0.25 * (v.squaredNorm() - w.squaredNorm());
        const double a = kernel_k(v, w) * std::exp(e), b = kernel_k(w, v) * std::exp(-e);
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
    CHECK_THROWS_AS(kernel_k(Vec3(1, 0, 0), Vec3(1, 0, 0)), CollisionError);
    // The two normalisations differ by a factor of 2 in the loss and gain parts.
    const Vec3 v(0.3, 0.1, 0), w(-0.2, 0.4, 1.0);
    CHECK(kernel_k_printed(v, w) != doctest::Approx(kernel_k(v, w)));
}

TEST_CASE("K M = nu M pointwise") {
    for (double r : {0.0, 0.7, 2.0, 4.0}) {
        const Vec3 v(r, 0.2, -0.1);
        const double km = apply_K_point(v, maxwellian).value;
        CHECK(km == doctest::Approx(collision_frequency(v).value * maxwellian(v)).epsilon(1e-3));
    }
}

TEST_CASE("K f agrees with the sigma form of the collision operator") {
    // (Q(M, f) + Q(f, M))(v) + nu f(v) by Monte Carlo over v* and the sphere.
    const Vec3 a0(0.3, -0.2, 0.1);
    auto f = [&](const Vec3& u) { return std::exp(-0.5 * (u - a0).squaredNorm()); };
    for (const Vec3& v : {Vec3(0.2, 0.1, -0.3), Vec3(1.5, 0, 0.4)}) {
        Stream s(1, hash_id("sigma-mc"));
        const long N = 4000000;
        const double sd = 1.2;
        double sum = 0;
        for (long n = 0; n < N; ++n) {
            const Vec3 vs = sd * Vec3(s.normal(), s.normal(), s.normal());
            const double p = std::exp(-vs.squaredNorm() / (2 * sd * sd)) / std::pow(2 * kPi * sd * sd, 1.5);
            const Vec3 w = Vec3(s.normal(), s.normal(), s.normal()).normalized();
            const double uw = (v - vs).dot(w);
            const Vec3 vp = v - uw * w, vsp = vs + uw * w;
            sum += std::abs(uw) * (maxwellian(vp) * f(vsp) + f(vp) * maxwellian(vsp) - maxwellian(v) * f(vs)) *
                   4 * kPi / p;
        }
        CHECK(sum / N == doctest::Approx(apply_K_point(v, f).value).epsilon(1e-3));
    }
}

TEST_CASE("truncated kernel") {
    CHECK(kernel_km(5, 1.0, Vec3(6, 0, 0), Vec3(0, 0, 0)) == 0.0);
    CHECK(kernel_km(5, 1.0, Vec3(0, 0, 0), Vec3(0.1, 0, 0)) == 0.0);
    CHECK(kernel_km(5, 1.0, Vec3(0, 0, 0), Vec3(1, 0, 0)) == doctest::Approx(2.0));
    CHECK_THROWS_AS(kernel_km(0.5, 1.0, Vec3(0, 0, 0), Vec3(1, 0, 0)), CollisionError);
    // Support radius only ever removes mass.
    auto one = [](const Vec3&) { return 1.0; };
    const double full = apply_Km_point(5, 1.0, Vec3(0.5, 0, 0), one);
    const double cut = apply_Km_point(5, 1.0, Vec3(0.5, 0, 0), one, {}, 2.0);
    CHECK(cut < full);
    CHECK(cut > 0);
}

TEST_CASE("c_k fit dominates the sampled ratio") {
    const CkFit fit = fit_ck(20000);
    CHECK(fit.c_k > 0);
    CHECK(fit.spread >= 0);
    CHECK(kernel_k_tilde(fit.argmax_v, fit.argmax_vs) <=
          fit.c_k * kernel_k_bar(fit.argmax_v, fit.argmax_vs) * (1 + 1e-12));
}

TEST_CASE("moment projector") {
    const VelocityGrid g(10, 5.0);
    const MomentProjector P(g);
    Stream s(2, hash_id("proj"));
    GridFunction f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = s.normal() * maxwellian(g.node(i));
    const GridFunction perp = P.perp(f);
    const GridFunction M = g.maxwellian();
    for (int k = 0; k < 5; ++k) {
        GridFunction phiM(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Vec3 v = g.node(i);
            const double phi[5] = {1.0, v[0], v[1], v[2], v.squaredNorm()};
            phiM[i] = phi[k] * M[i];
        }
        CHECK(std::abs(P.inner(perp, phiM)) < 1e-8);
    }
    CHECK((P.project(P.project(f)) - P.project(f)).cwiseAbs().maxCoeff() < 1e-12 * f.cwiseAbs().maxCoeff());
}

TEST_CASE("q_star") {
    const double ns = nu_star(), d = 8 * ns - 3;
    CHECK(q_star(BoundaryAssumption::RH1, 1.0, 1.0) ==
          doctest::Approx((5 + 8 * ns + std::sqrt(128 * kPi * ns + d * d)) / 2));
    double prev = INFINITY;
    for (int i = 1; i <= 20; ++i) {
        const double q = q_star(BoundaryAssumption::RH1, i / 20.0, 2.0);
        CHECK(q < prev);
        prev = q;
    }
    CHECK_THROWS_AS(q_star(BoundaryAssumption::RH1, 0.0, 1.0), CollisionError);
    CHECK_THROWS_AS(q_star(BoundaryAssumption::RH2, 1.0, 0.5), CollisionError);
}

TEST_CASE("lattice collision operator") {
    const VelocityGrid g(8, 4.0);
    const LatticeCollisionModel q(g, 100000000);
    const Eigen::MatrixXd C = q.linearized();
    const GridFunction M = g.maxwellian();
    // Collision invariants are in the kernel: <-C f, f> = 0 for f = M, v1 M.
    GridFunction v1M(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v1M[i] = g.node(i)[0] * M[i];
    for (const GridFunction& f : {M, v1M}) {
        const GridFunction w = f.cwiseQuotient(M);
        CHECK(std::abs(w.dot(C * f)) * g.cell_volume() < 1e-6);
    }
    // Dissipation: <-C f, f / M> >= 0.
    Stream s(5, hash_id("coerc"));
    for (int t = 0; t < 10; ++t) {
        GridFunction f(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) f[i] = s.normal() * M[i];
        CHECK(-(f.cwiseQuotient(M)).dot(C * f) >= -1e-10);
    }
    CHECK(q.Q(M, M).q.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.bound_CQ(WeightFunction::inverse_gaussian(0.3)) > 0);
    const Eigen::MatrixXd G = Eigen::MatrixXd::Random(g.size(), 3);
    const Eigen::MatrixXd QB = q.Q_batch(G);
    for (int c = 0; c < 3; ++c)
        CHECK((QB.col(c) - q.Q(G.col(c), G.col(c)).q).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(q.Q_batch(G.transpose()), std::invalid_argument);
}

TEST_CASE("split of the gain operator") {
    SplitParams sp{0.1};
    CHECK(sp.chi(Vec3(0, 0, 0), Vec3(1, 0, 0)) == doctest::Approx(1.0));
    CHECK(sp.chi(Vec3(0, 0, 0), Vec3(0.001, 0, 0)) == doctest::Approx(0.0));
    CHECK(sp.chi(Vec3(100, 0, 0), Vec3(1, 0, 0)) == doctest::Approx(0.0));
}

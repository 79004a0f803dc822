#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "kinetic/geometry.hpp"
#include "kinetic/velocity_grid.hpp"

namespace kinetic {

inline constexpr double kPi = std::numbers::pi;

double nu0();      // 4 pi sqrt(2 / (e pi))
double nu1();      // 16 pi
double nu_star();  // nu1 / nu0 = 2 sqrt(2 e pi)

inline double bracket(const Vec3& v) { return std::sqrt(1.0 + v.squaredNorm()); }

double maxwellian(const Vec3& v);
double wall_maxwellian(const Vec3& v);

class CollisionError : public std::runtime_error {
public:
    enum class Code { DiagonalSingularity, QuadratureBudgetExceeded, InvalidArgument };
    CollisionError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
    Code code;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// nu(v) = 2 pi int |v - v*| M(v*) dv*, by adaptive radial quadrature.
QuadResult collision_frequency(double speed);
inline QuadResult collision_frequency(const Vec3& v) { return collision_frequency(v.norm()); }
// Closed form 2 pi [sqrt(2/pi) e^{-r^2/2} + (r + 1/r) erf(r / sqrt 2)].
double collision_frequency_closed(double speed);

// Hard-sphere kernel normalised so that int k(v, v*) M(v*) dv* = nu(v) M(v).
double kernel_k(const Vec3& v, const Vec3& vs);
// The two-term formula with prefactors sqrt(2/pi) and 1/2 as printed.
double kernel_k_printed(const Vec3& v, const Vec3& vs);
// k = k_tilde * exp(-|v|^2/4 + |v*|^2/4).
double kernel_k_tilde(const Vec3& v, const Vec3& vs);
double kernel_k_bar(const Vec3& v, const Vec3& vs);
double kernel_km(double m, double c_k, const Vec3& v, const Vec3& vs);

// Product rule on spheres around a centre: Gauss-Legendre in cos(theta)
// about a chosen axis, trapezoid in phi, Gauss-Legendre radial panels.
struct SphericalRule {
    int n_theta = 16;
    int n_phi = 20;
    double panel = 0.5;
    int panel_points = 4;

    SphericalRule refined() const { return {2 * n_theta, 2 * n_phi, panel / 2, panel_points}; }

    // int_{rmin <= |y - c| <= rmax} g(y, |y - c|) dy.
    double integrate(const Vec3& centre, const Vec3& axis, double rmin, double rmax,
                     const std::function<double(const Vec3&, double)>& g) const;
};

using VelocityFunction = std::function<double(const Vec3&)>;

// Kf(v) = int k(v, v*) f(v*) dv*. The error is the difference to the refined rule.
QuadResult apply_K_point(const Vec3& v, const VelocityFunction& f, double reach = 14.0,
                         const SphericalRule& rule = {}, bool estimate_error = true);
// K_m g(v) with the truncated kernel.
double apply_Km_point(double m, double c_k, const Vec3& v, const VelocityFunction& g,
                      const SphericalRule& rule = {}, double support = INFINITY);

struct CkFit {
    double c_k = 0.0;
    double spread = 0.0;  // max ratio minus the 99.9th percentile
    long samples = 0;
    double radius = 0.0;
    Vec3 argmax_v = Vec3::Zero();
    Vec3 argmax_vs = Vec3::Zero();
};

// Max of |k_tilde| / k_bar over quasi-random pairs in the ball of radius
// `radius`, stratified log-uniformly in |v - v*|.
CkFit fit_ck(long samples, double radius = 12.0);

struct K1Fit {
    double zeta = 0.0;
    double c_k = 0.0;
    double C1 = 0.0;        // sup_v (1 + |v|) int k_bar e^{...} sigma(v)/sigma(v*) dv*
    double C1_argmax = 0.0; // |v| of the sup
    int N = 0;
    double m = 0.0;         // max(N c_k C1, 1)
};
K1Fit fit_k1(double zeta, double c_k, int N, double vmax_scan = 12.0, int scan_points = 25);

// Smooth cut-off with 1_{E1} <= chi <= 1_{E2} in |v| and |v - v*|.
struct SplitParams {
    double delta = 0.1;
    double chi(const Vec3& v, const Vec3& vs) const;
};

// Dense K on a velocity grid: rows by spherical quadrature around each node,
// f evaluated as M times the tricubic interpolant of f/M.
class KernelOperator {
public:
    KernelOperator(const VelocityGrid& grid, const SphericalRule& rule = {12, 16, 0.5, 4},
                   const SplitParams* split = nullptr, double reach = 14.0);

    const VelocityGrid& grid() const { return grid_; }
    const Eigen::MatrixXd& matrix() const { return K_; }
    bool has_split() const { return has_split_; }
    const Eigen::MatrixXd& matrix_A() const { return A_; }
    const Eigen::MatrixXd& matrix_Kdelta() const { return Kd_; }
    const GridFunction& nu() const { return nu_; }
    double nu_error() const { return nu_err_; }

    GridFunction apply(const GridFunction& f) const { return K_ * f; }
    GridFunction apply_A(const GridFunction& f) const { return A_ * f; }
    GridFunction apply_K_delta(const GridFunction& f) const { return Kd_ * f; }
    // C = K - nu.
    GridFunction apply_C(const GridFunction& f) const;
    // max |K M - nu M| / max |nu M|, the quadrature error estimate.
    double maxwellian_residual() const;

private:
    const VelocityGrid& grid_;
    Eigen::MatrixXd K_, A_, Kd_;
    GridFunction nu_;
    double nu_err_ = 0.0;
    bool has_split_ = false;
};

// Projection onto span{M, v M, |v|^2 M}, orthonormalised in the discrete
// M^{-1} inner product of the grid.
class MomentProjector {
public:
    explicit MomentProjector(const VelocityGrid& grid);

    GridFunction project(const GridFunction& f) const;
    GridFunction perp(const GridFunction& f) const { return f - project(f); }
    // Coefficients a, b1..b3, c of the displayed projection (continuum form).
    std::array<double, 5> coefficients(const GridFunction& f) const;
    double inner(const GridFunction& f, const GridFunction& g) const;
    const Eigen::MatrixXd& basis() const { return E_; }

private:
    const VelocityGrid& grid_;
    GridFunction M_;
    Eigen::MatrixXd E_;  // orthonormal columns
};

enum class BoundaryAssumption { RH1, RH2 };
double q_star(BoundaryAssumption a, double iota0, double C0);

} // namespace kinetic

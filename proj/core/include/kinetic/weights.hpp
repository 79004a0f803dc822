#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "kinetic/collision.hpp"

namespace kinetic {

enum class WeightClass { Polynomial, StretchedExp, InverseGaussian };
enum class Confinement { Weak, Strong };

class WeightError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Radial velocity weight: <v>^q, exp(zeta <v>^s) or exp(zeta |v|^2). Constructors validate the class parameters and
// compute sup_v omega(v) M^M(v) once.
class WeightFunction {
public:
    static WeightFunction polynomial(double q);
    static WeightFunction stretched_exp(double zeta, double s);
    static WeightFunction inverse_gaussian(double zeta);
    static WeightFunction from_json(const nlohmann::json& j);

    WeightClass weight_class() const { return cls_; }
    Confinement confinement() const;
    double q() const { return q_; }
    double zeta() const { return zeta_; }
    double s() const { return s_; }

    double operator()(double speed) const { return std::exp(log_value(speed)); }
    double operator()(const Vec3& v) const { return (*this)(v.norm()); }
    double log_value(double speed) const;

    // max(1, sup omega M^M); the raw supremum is kept separately.
    double C0() const { return std::max(1.0, sup_); }
    double sup_weighted_wall_maxwellian() const { return sup_; }
    double sup_argmax() const { return argmax_; }

    std::string describe() const;
    nlohmann::json to_json() const;

private:
    WeightFunction(WeightClass c, double q, double zeta, double s);
    WeightClass cls_;
    double q_ = 0.0, zeta_ = 0.0, s_ = 0.0;
    double sup_ = 0.0, argmax_ = 0.0;
};

struct Admissibility {
    bool admissible = false;
    double q = 0.0;
    double q_star = 0.0;
    double C0 = 0.0;
    std::string note;
};

// Polynomial weights need q > q*(C0(q)); other classes are admissible by
// their parameter ranges.
Admissibility admissibility(const WeightFunction& w, BoundaryAssumption a, double iota0);

// C^2 cut-off with 1_[0,1] <= xi <= 1_[0,2].
double xi_cutoff(double t);
// omega_1^A = xi_A / M^M + (1 - xi_A) omega_1.
double modified_weight(const WeightFunction& w, double A, double speed);
// Theta_A = int M^M(u) (n.u)_+ (xi_A + (1 - xi_A) omega M^M)^{-1} du.
QuadResult theta_A(const WeightFunction& w, double A);

// C_omega = int omega^{-1}(u) |u| du (4 pi / (q - 4) bound for polynomials).
QuadResult weight_flux_constant(const WeightFunction& w);

} // namespace kinetic

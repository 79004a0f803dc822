#include "kinetic/weights.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

namespace kinetic {

WeightFunction::WeightFunction(WeightClass c, double q, double zeta, double s) : cls_(c), q_(q), zeta_(zeta), s_(s) {
    // log(omega M^M) is unimodal in |v| for every class.
    auto neg = [this](double r) { return -(log_value(r) - 0.5 * r * r); };
    const double hi = cls_ == WeightClass::Polynomial ? std::sqrt(std::max(q_, 1.0)) + 20.0 : 30.0;
    boost::uintmax_t iters = 500;
    const auto [r, f] = boost::math::tools::brent_find_minima(neg, 0.0, hi, 40, iters);
    argmax_ = r;
    sup_ = std::exp(-f) / (2.0 * kPi);
    if (neg(0.0) <= f) {
        argmax_ = 0.0;
        sup_ = std::exp(-neg(0.0)) / (2.0 * kPi);
    }
}

WeightFunction WeightFunction::polynomial(double q) {
    if (!(q > 0.0)) throw WeightError("polynomial weight: q must be positive");
    return WeightFunction(WeightClass::Polynomial, q, 0.0, 0.0);
}

WeightFunction WeightFunction::stretched_exp(double zeta, double s) {
    if (!(zeta > 0.0)) throw WeightError("stretched exponential weight: zeta must be positive");
    if (!(s > 0.0 && s < 2.0)) throw WeightError("stretched exponential weight: s must lie in (0, 2)");
    return WeightFunction(WeightClass::StretchedExp, 0.0, zeta, s);
}

WeightFunction WeightFunction::inverse_gaussian(double zeta) {
    if (!(zeta > 0.0 && zeta < 0.5)) throw WeightError("inverse Gaussian weight: zeta must lie in (0, 1/2)");
    return WeightFunction(WeightClass::InverseGaussian, 0.0, zeta, 2.0);
}

WeightFunction WeightFunction::from_json(const nlohmann::json& j) {
    const std::string c = j.at("class").get<std::string>();
    if (c == "polynomial") return polynomial(j.at("q").get<double>());
    if (c == "stretched_exp") return stretched_exp(j.at("zeta").get<double>(), j.at("s").get<double>());
    if (c == "inverse_gaussian") return inverse_gaussian(j.at("zeta").get<double>());
    throw WeightError("unknown weight class '" + c + "'");
}

Confinement WeightFunction::confinement() const {
    return cls_ == WeightClass::InverseGaussian && zeta_ > 0.25 ? Confinement::Strong : Confinement::Weak;
}

double WeightFunction::log_value(double r) const {
    switch (cls_) {
        case WeightClass::Polynomial: return 0.5 * q_ * std::log1p(r * r);
        case WeightClass::StretchedExp: return zeta_ * std::pow(1.0 + r * r, 0.5 * s_);
        case WeightClass::InverseGaussian: return zeta_ * r * r;
    }
    return 0.0;
}

std::string WeightFunction::describe() const {
    std::ostringstream os;
    switch (cls_) {
        case WeightClass::Polynomial: os << "polynomial(q=" << q_ << ")"; break;
        case WeightClass::StretchedExp: os << "stretched_exp(zeta=" << zeta_ << ", s=" << s_ << ")"; break;
        case WeightClass::InverseGaussian: os << "inverse_gaussian(zeta=" << zeta_ << ")"; break;
    }
    return os.str();
}

nlohmann::json WeightFunction::to_json() const {
    nlohmann::json j;
    switch (cls_) {
        case WeightClass::Polynomial: j = {{"class", "polynomial"}, {"q", q_}}; break;
        case WeightClass::StretchedExp: j = {{"class", "stretched_exp"}, {"zeta", zeta_}, {"s", s_}}; break;
        case WeightClass::InverseGaussian: j = {{"class", "inverse_gaussian"}, {"zeta", zeta_}}; break;
    }
    j["confinement"] = confinement() == Confinement::Strong ? "strong" : "weak";
    j["C0"] = C0();
    return j;
}

Admissibility admissibility(const WeightFunction& w, BoundaryAssumption a, double iota0) {
    Admissibility r;
    r.C0 = w.C0();
    if (w.weight_class() != WeightClass::Polynomial) {
        r.admissible = true;
        r.note = "admissible by parameter range";
        return r;
    }
    r.q = w.q();
    r.q_star = q_star(a, iota0, r.C0);
    r.admissible = r.q > r.q_star;
    if (!r.admissible)
        r.note = "q <= q*(C0(q)); C0 grows like q^{q/2} e^{-q/2}, so the threshold moves with q";
    return r;
}

double xi_cutoff(double t) {
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    const double x = t - 1.0;
    // Quintic smoothstep, C^2.
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double modified_weight(const WeightFunction& w, double A, double r) {
    const double xi = xi_cutoff(r / A);
    return xi / wall_maxwellian(Vec3(r, 0, 0)) + (1.0 - xi) * w(r);
}

QuadResult theta_A(const WeightFunction& w, double A) {
    using boost::math::quadrature::gauss_kronrod;
    // int (n.u)_+ g(|u|) du = pi int r^3 g(r) dr.
    auto integrand = [&](double r) {
        const double xi = xi_cutoff(r / A);
        if (xi == 0.0) return kPi * r * r * r * std::exp(-w.log_value(r));
        const double mm = std::exp(-0.5 * r * r) / (2.0 * kPi);
        const double den = xi + (1.0 - xi) * std::exp(w.log_value(r) - 0.5 * r * r) / (2.0 * kPi);
        return kPi * r * r * r * mm / den;
    };
    double e1 = 0.0, e2 = 0.0;
    const double a = gauss_kronrod<double, 31>::integrate(integrand, 0.0, 2.0 * A, 15, 1e-12, &e1);
    const double b = gauss_kronrod<double, 31>::integrate(integrand, 2.0 * A, std::numeric_limits<double>::infinity(),
                                                          15, 1e-12, &e2);
    return {a + b, std::abs(a) * e1 + std::abs(b) * e2};
}

} // namespace kinetic

namespace kinetic {

QuadResult weight_flux_constant(const WeightFunction& w) {
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [&](double r) { return 4.0 * kPi * r * r * r * std::exp(-w.log_value(r)); };
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 15,
                                                          1e-12, &err);
    return {v, std::abs(v) * err};
}

} // namespace kinetic

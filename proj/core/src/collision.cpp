#include "kinetic/collision.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "quadrature.hpp"

namespace kinetic {

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / kPi);
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

// Orthonormal frame (e1, e2, axis).
void frame(const Vec3& axis, Vec3& e1, Vec3& e2, Vec3& e3) {
    e3 = axis.norm() > 1e-12 ? Vec3(axis.normalized()) : Vec3(0, 0, 1);
    const Vec3 t = std::abs(e3[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    e1 = (t - t.dot(e3) * e3).normalized();
    e2 = e3.cross(e1);
}

// (|v*|^2 - |v|^2)^2 / (8 |u|^2) + |u|^2 / 8 with u = v - v*.
double gaussian_exponent(const Vec3& v, const Vec3& vs, double u2) {
    const double d = vs.squaredNorm() - v.squaredNorm();
    return d * d / (8.0 * u2) + u2 / 8.0;
}

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * (3.0 - 2.0 * t);
}

} // namespace

double nu0() { return 4.0 * kPi * std::sqrt(2.0 / (std::numbers::e * kPi)); }
double nu1() { return 16.0 * kPi; }
double nu_star() { return 2.0 * std::sqrt(2.0 * std::numbers::e * kPi); }

double maxwellian(const Vec3& v) { return std::pow(2.0 * kPi, -1.5) * std::exp(-0.5 * v.squaredNorm()); }
double wall_maxwellian(const Vec3& v) { return std::exp(-0.5 * v.squaredNorm()) / (2.0 * kPi); }

QuadResult collision_frequency(double r) {
    using boost::math::quadrature::gauss_kronrod;
    // Angular mean of |v - rho w| over the sphere, written without cancellation.
    auto mean_dist = [r](double rho) {
        if (rho >= r) return rho + (rho > 0 ? r * r / (3.0 * rho) : 0.0);
        return r + rho * rho / (3.0 * r);
    };
    auto integrand = [&](double rho) { return rho * rho * std::exp(-0.5 * rho * rho) * mean_dist(rho); };
    double e1 = 0.0, e2 = 0.0;
    const double tol = 1e-13;
    double a = 0.0;
    if (r > 0) a = gauss_kronrod<double, 31>::integrate(integrand, 0.0, r, 15, tol, &e1);
    const double b = gauss_kronrod<double, 31>::integrate(integrand, r, std::numeric_limits<double>::infinity(), 15,
                                                          tol, &e2);
    const double pref = 2.0 * kPi * 4.0 * kPi * std::pow(2.0 * kPi, -1.5);
    QuadResult q{pref * (a + b), pref * (std::abs(e1 * a) + std::abs(e2 * b))};
    if (!(q.error <= 1e-8 * q.value))
        throw CollisionError(CollisionError::Code::QuadratureBudgetExceeded, "collision_frequency: error budget");
    return q;
}

double collision_frequency_closed(double r) {
    if (r < 1e-8) return 2.0 * kPi * 2.0 * kSqrt2OverPi;
    return 2.0 * kPi * (kSqrt2OverPi * std::exp(-0.5 * r * r) + (r + 1.0 / r) * std::erf(r / std::sqrt(2.0)));
}

double kernel_k(const Vec3& v, const Vec3& vs) {
    const double u2 = (v - vs).squaredNorm();
    if (u2 < 1e-24) throw CollisionError(CollisionError::Code::DiagonalSingularity, "kernel_k: v == v*");
    const double u = std::sqrt(u2);
    const double e = -gaussian_exponent(v, vs, u2) - 0.25 * v.squaredNorm() + 0.25 * vs.squaredNorm();
    return 2.0 * kSqrt2OverPi / u * std::exp(e) - kInvSqrt2Pi * u * std::exp(-0.5 * v.squaredNorm());
}

double kernel_k_printed(const Vec3& v, const Vec3& vs) {
    const double u2 = (v - vs).squaredNorm();
    if (u2 < 1e-24) throw CollisionError(CollisionError::Code::DiagonalSingularity, "kernel_k_printed: v == v*");
    const double u = std::sqrt(u2);
    const double e = -gaussian_exponent(v, vs, u2) - 0.25 * v.squaredNorm() + 0.25 * vs.squaredNorm();
    return kSqrt2OverPi / u * std::exp(e) - 0.5 * u * std::exp(-0.5 * v.squaredNorm());
}

double kernel_k_tilde(const Vec3& v, const Vec3& vs) {
    const double u2 = (v - vs).squaredNorm();
    if (u2 < 1e-24) throw CollisionError(CollisionError::Code::DiagonalSingularity, "kernel_k_tilde: v == v*");
    const double u = std::sqrt(u2);
    return 2.0 * kSqrt2OverPi / u * std::exp(-gaussian_exponent(v, vs, u2)) -
           kInvSqrt2Pi * u * std::exp(-0.25 * (v.squaredNorm() + vs.squaredNorm()));
}

double kernel_k_bar(const Vec3& v, const Vec3& vs) {
    const double u2 = (v - vs).squaredNorm();
    if (u2 < 1e-24) throw CollisionError(CollisionError::Code::DiagonalSingularity, "kernel_k_bar: v == v*");
    const double u = std::sqrt(u2);
    return (u + 1.0 / u) * std::exp(-gaussian_exponent(v, vs, u2));
}

double kernel_km(double m, double c_k, const Vec3& v, const Vec3& vs) {
    if (m < 1.0) throw CollisionError(CollisionError::Code::InvalidArgument, "kernel_km: m < 1");
    const double u = (v - vs).norm();
    if (v.norm() > m || vs.norm() > m || u < 1.0 / m) return 0.0;
    return c_k * (u + 1.0 / u);
}

double SphericalRule::integrate(const Vec3& c, const Vec3& axis, double rmin, double rmax,
                                const std::function<double(const Vec3&, double)>& g) const {
    if (rmax <= rmin) return 0.0;
    Vec3 e1, e2, e3;
    frame(axis, e1, e2, e3);
    const auto& gt = detail::gauss_legendre(n_theta);
    const auto& gr = detail::gauss_legendre(panel_points);
    std::vector<Vec3> dirs;
    std::vector<double> dw;
    dirs.reserve(gt.x.size() * n_phi);
    for (std::size_t a = 0; a < gt.x.size(); ++a) {
        const double ct = gt.x[a], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int b = 0; b < n_phi; ++b) {
            const double ph = 2.0 * kPi * (b + 0.5) / n_phi;
            dirs.push_back(st * std::cos(ph) * e1 + st * std::sin(ph) * e2 + ct * e3);
            dw.push_back(gt.w[a] * 2.0 * kPi / n_phi);
        }
    }
    const int panels = std::max(1, static_cast<int>(std::ceil((rmax - rmin) / panel)));
    const double width = (rmax - rmin) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = rmin + p * width;
        for (std::size_t q = 0; q < gr.x.size(); ++q) {
            const double rho = lo + 0.5 * width * (gr.x[q] + 1.0);
            const double wr = 0.5 * width * gr.w[q] * rho * rho;
            double shell = 0.0;
            for (std::size_t d = 0; d < dirs.size(); ++d) shell += dw[d] * g(c + rho * dirs[d], rho);
            total += wr * shell;
        }
    }
    return total;
}

QuadResult apply_K_point(const Vec3& v, const VelocityFunction& f, double reach, const SphericalRule& rule,
                         bool estimate_error) {
    auto integrand = [&](const Vec3& y, double rho) {
        if (rho < 1e-12) return 0.0;
        return kernel_k(v, y) * f(y);
    };
    QuadResult q;
    q.value = rule.integrate(v, v, 0.0, reach, integrand);
    if (estimate_error) q.error = std::abs(rule.refined().integrate(v, v, 0.0, reach, integrand) - q.value);
    return q;
}

double apply_Km_point(double m, double c_k, const Vec3& v, const VelocityFunction& g, const SphericalRule& rule,
                      double support) {
    if (v.norm() > m) return 0.0;
    const double reach = std::min(m, support);
    auto integrand = [&](const Vec3& y, double rho) {
        if (y.norm() > reach) return 0.0;
        return c_k * (rho + 1.0 / rho) * g(y);
    };
    return rule.integrate(v, v, 1.0 / m, v.norm() + reach, integrand);
}

CkFit fit_ck(long samples, double radius) {
    // R_6 additive recurrence (generalised golden ratio).
    double phi = 1.5;
    for (int it = 0; it < 60; ++it) phi -= (std::pow(phi, 7) - phi - 1.0) / (7.0 * std::pow(phi, 6) - 1.0);
    double alpha[6];
    for (int d = 0; d < 6; ++d) alpha[d] = std::fmod(std::pow(1.0 / phi, d + 1), 1.0);
    auto sphere_dir = [](double a, double b) {
        const double z = 2.0 * a - 1.0, s = std::sqrt(std::max(0.0, 1.0 - z * z)), p = 2.0 * kPi * b;
        return Vec3(s * std::cos(p), s * std::sin(p), z);
    };
    CkFit fit;
    fit.radius = radius;
    std::vector<double> ratios;
    ratios.reserve(samples);
    const double lmin = std::log(1e-4), lmax = std::log(2.0 * radius);
    for (long n = 1; static_cast<long>(ratios.size()) < samples; ++n) {
        double x[6];
        for (int d = 0; d < 6; ++d) x[d] = std::fmod(0.5 + n * alpha[d], 1.0);
        const Vec3 v = radius * std::cbrt(x[0]) * sphere_dir(x[1], x[2]);
        const double un = std::exp(lmin + x[5] * (lmax - lmin));
        const Vec3 vs = v - un * sphere_dir(x[3], x[4]);
        if (vs.norm() > radius) continue;
        // |k_tilde| / k_bar with the common Gaussian factor cancelled.
        const double u2 = un * un;
        const double rest = std::exp(gaussian_exponent(v, vs, u2) - 0.25 * (v.squaredNorm() + vs.squaredNorm()));
        const double r = std::abs(2.0 * kSqrt2OverPi / un - kInvSqrt2Pi * un * rest) / (un + 1.0 / un);
        ratios.push_back(r);
        if (r > fit.c_k) {
            fit.c_k = r;
            fit.argmax_v = v;
            fit.argmax_vs = vs;
        }
    }
    fit.samples = samples;
    const std::size_t k = static_cast<std::size_t>(0.999 * (ratios.size() - 1));
    std::nth_element(ratios.begin(), ratios.begin() + k, ratios.end());
    fit.spread = fit.c_k - ratios[k];
    return fit;
}

K1Fit fit_k1(double zeta, double c_k, int N, double vmax_scan, int scan_points) {
    K1Fit f;
    f.zeta = zeta;
    f.c_k = c_k;
    f.N = N;
    const SphericalRule rule{16, 20, 0.5, 6};
    for (int i = 0; i < scan_points; ++i) {
        const double r = vmax_scan * i / (scan_points - 1);
        const Vec3 v(0, 0, r);
        auto integrand = [&](const Vec3& y, double rho) {
            if (rho < 1e-12) return 0.0;
            const double u2 = rho * rho;
            const double q = -gaussian_exponent(v, y, u2) - 0.25 * v.squaredNorm() + 0.25 * y.squaredNorm() +
                             zeta * (v.squaredNorm() - y.squaredNorm());
            return (rho + 1.0 / rho) * std::exp(q);
        };
        const double I = rule.integrate(v, Vec3(0, 0, 1), 0.0, 16.0, integrand);
        if ((1.0 + r) * I > f.C1) {
            f.C1 = (1.0 + r) * I;
            f.C1_argmax = r;
        }
    }
    f.m = std::max(N * c_k * f.C1, 1.0);
    return f;
}

double SplitParams::chi(const Vec3& v, const Vec3& vs) const {
    const double d = delta;
    const double sv = 1.0 - smoothstep((v.norm() - 1.0 / d) * d);
    const double u = (v - vs).norm();
    const double su = smoothstep((u - d) / d) * (1.0 - smoothstep((u - 1.0 / d) * d));
    return sv * su;
}

KernelOperator::KernelOperator(const VelocityGrid& grid, const SphericalRule& rule, const SplitParams* split,
                               double reach)
    : grid_(grid), has_split_(split != nullptr) {
    const std::size_t n = grid.size();
    K_ = Eigen::MatrixXd::Zero(n, n);
    if (has_split_) {
        A_ = Eigen::MatrixXd::Zero(n, n);
        Kd_ = Eigen::MatrixXd::Zero(n, n);
    }
    nu_.resize(n);
    const double box_reach = std::sqrt(3.0) * grid.vmax();
    const GridFunction inv_m = grid.maxwellian().cwiseInverse();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 v = grid.node(i);
        const QuadResult nq = collision_frequency(v);
        nu_[i] = nq.value;
        nu_err_ = std::max(nu_err_, nq.error);
        const double rmax = std::min(reach, v.norm() + box_reach);
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n), rowA, rowK;
        if (has_split_) {
            rowA = Eigen::RowVectorXd::Zero(n);
            rowK = Eigen::RowVectorXd::Zero(n);
        }
        VelocityGrid::Stencil s;
        auto deposit = [&](const Vec3& y, double wq) {
            if (!grid.stencil(y, s)) return;
            const double kv = wq * kernel_k(v, y) * maxwellian(y);
            const double chi = has_split_ ? split->chi(v, y) : 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    for (int c = 0; c < 4; ++c) {
                        const std::size_t j = grid.index(s.base[0] + a, s.base[1] + b, s.base[2] + c);
                        const double w = kv * s.w[0][a] * s.w[1][b] * s.w[2][c] * inv_m[j];
                        row[j] += w;
                        if (has_split_) {
                            rowK[j] += chi * w;
                            rowA[j] += (1.0 - chi) * w;
                        }
                    }
        };
        Vec3 e1, e2, e3;
        frame(v, e1, e2, e3);
        const auto& gt = detail::gauss_legendre(rule.n_theta);
        const auto& gr = detail::gauss_legendre(rule.panel_points);
        const int panels = std::max(1, static_cast<int>(std::ceil(rmax / rule.panel)));
        const double width = rmax / panels;
        for (int p = 0; p < panels; ++p)
            for (std::size_t q = 0; q < gr.x.size(); ++q) {
                const double rho = p * width + 0.5 * width * (gr.x[q] + 1.0);
                const double wr = 0.5 * width * gr.w[q] * rho * rho;
                for (std::size_t a = 0; a < gt.x.size(); ++a) {
                    const double ct = gt.x[a], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                    for (int b = 0; b < rule.n_phi; ++b) {
                        const double ph = 2.0 * kPi * (b + 0.5) / rule.n_phi;
                        deposit(v + rho * (st * std::cos(ph) * e1 + st * std::sin(ph) * e2 + ct * e3),
                                wr * gt.w[a] * 2.0 * kPi / rule.n_phi);
                    }
                }
            }
        K_.row(i) = row;
        if (has_split_) {
            A_.row(i) = rowA;
            Kd_.row(i) = rowK;
        }
    }
}

GridFunction KernelOperator::apply_C(const GridFunction& f) const { return K_ * f - nu_.cwiseProduct(f); }

double KernelOperator::maxwellian_residual() const {
    const GridFunction M = grid_.maxwellian();
    const GridFunction nuM = nu_.cwiseProduct(M);
    return (K_ * M - nuM).cwiseAbs().maxCoeff() / nuM.cwiseAbs().maxCoeff();
}

MomentProjector::MomentProjector(const VelocityGrid& grid) : grid_(grid), M_(grid.maxwellian()) {
    const std::size_t n = grid.size();
    E_.resize(n, 5);
    for (std::size_t a = 0; a < n; ++a) {
        const Vec3 v = grid.node(a);
        E_(a, 0) = M_[a];
        for (int d = 0; d < 3; ++d) E_(a, 1 + d) = v[d] * M_[a];
        E_(a, 4) = (v.squaredNorm() - 3.0) / std::sqrt(6.0) * M_[a];
    }
    for (int k = 0; k < 5; ++k) {
        for (int pass = 0; pass < 2; ++pass)
            for (int l = 0; l < k; ++l) {
                const GridFunction ek = E_.col(k), el = E_.col(l);
                E_.col(k) -= inner(ek, el) * el;
            }
        const GridFunction ek = E_.col(k);
        E_.col(k) /= std::sqrt(inner(ek, ek));
    }
}

double MomentProjector::inner(const GridFunction& f, const GridFunction& g) const {
    return (f.array() * g.array() / M_.array()).sum() * grid_.cell_volume();
}

GridFunction MomentProjector::project(const GridFunction& f) const {
    GridFunction out = GridFunction::Zero(f.size());
    for (int k = 0; k < 5; ++k) {
        const GridFunction ek = E_.col(k);
        out += inner(f, ek) * ek;
    }
    return out;
}

std::array<double, 5> MomentProjector::coefficients(const GridFunction& f) const {
    std::array<double, 5> c{};
    const double dv = grid_.cell_volume();
    for (std::size_t a = 0; a < grid_.size(); ++a) {
        const Vec3 v = grid_.node(a);
        c[0] += f[a];
        for (int d = 0; d < 3; ++d) c[1 + d] += v[d] * f[a];
        c[4] += (v.squaredNorm() - 3.0) / std::sqrt(6.0) * f[a];
    }
    for (double& x : c) x *= dv;
    return c;
}

double q_star(BoundaryAssumption a, double iota0, double C0) {
    if (!(C0 >= 1.0)) throw CollisionError(CollisionError::Code::InvalidArgument, "q_star: C0 < 1");
    const double ns = nu_star();
    if (a == BoundaryAssumption::RH1) {
        if (!(iota0 > 0.0 && iota0 <= 1.0))
            throw CollisionError(CollisionError::Code::InvalidArgument, "q_star: iota0 outside (0, 1]");
        const double d = 8.0 * ns - 3.0 * iota0;
        return (5.0 * iota0 + 8.0 * ns + std::sqrt(128.0 * kPi * C0 * iota0 * ns + d * d)) / (2.0 * iota0);
    }
    return (5.0 + 16.0 * ns + std::sqrt(9.0 + 160.0 * ns + 256.0 * ns * (1.0 + kPi * C0) + 256.0 * ns * ns)) / 2.0;
}

} // namespace kinetic

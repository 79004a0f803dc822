#include "kinetic/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "kinetic/collision.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

namespace {

// Area of [x0, x1] x [y0, y1] inside the disk of radius R, divided by the rectangle area.
double rect_in_disk(double x0, double x1, double y0, double y1, double R) {
    auto chord = [&](double x) {
        const double s = std::sqrt(std::max(R * R - x * x, 0.0));
        return std::max(0.0, std::min(y1, s) - std::max(y0, -s));
    };
    const double corner = std::max(std::abs(x0), std::abs(x1));
    const double cy = std::max(std::abs(y0), std::abs(y1));
    if (corner * corner + cy * cy <= R * R) return 1.0;
    const double area = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(chord, x0, x1, 12, 1e-13);
    return std::clamp(area / ((x1 - x0) * (y1 - y0)), 0.0, 1.0);
}

bool full(double f) { return f > 1.0 - 1e-12; }

} // namespace

CutCellGrid::CutCellGrid(const Domain& d, int nx, int nd) : d_(d), nx_(nx), nd_(nd) {
    if (d.kind() != DomainKind::Cylinder) throw EllipticError(EllipticError::Code::InvalidGrid, "cylinder only");
    if (nd < 12) throw EllipticError(EllipticError::Code::InvalidGrid, "need at least 12 cells across the disk");
    if (nx < 2) throw EllipticError(EllipticError::Code::InvalidGrid, "need at least 2 axial cells");
    const double L = d.half_length(), R = d.disk_radius();
    hx_ = 2.0 * L / nx;
    hd_ = 2.0 * R / nd;
    frac_.assign(static_cast<std::size_t>(nd) * nd, 0.0);
    disk_index_.assign(frac_.size(), -1);
    std::vector<int> active;
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
            const int k = i * nd + j;
            frac_[k] = rect_in_disk(-R + i * hd_, -R + (i + 1) * hd_, -R + j * hd_, -R + (j + 1) * hd_, R);
            if (frac_[k] > 1e-10) {
                disk_index_[k] = static_cast<int>(active.size());
                active.push_back(k);
            }
        }
    cells_.reserve(active.size() * nx);
    for (int a = 0; a < nx; ++a)
        for (int k : active) cells_.push_back({a, k / nd, k % nd, k});
}

int CutCellGrid::index(int a, int i, int j) const {
    if (a < 0 || a >= nx_ || i < 0 || i >= nd_ || j < 0 || j >= nd_) return -1;
    const int k = disk_index_[i * nd_ + j];
    if (k < 0) return -1;
    const int per = static_cast<int>(cells_.size()) / nx_;
    return a * per + k;
}

Vec3 CutCellGrid::centre(std::size_t c) const {
    const auto& s = cells_[c];
    const double R = d_.disk_radius();
    return {-d_.half_length() + (s.a + 0.5) * hx_, -R + (s.i + 0.5) * hd_, -R + (s.j + 0.5) * hd_};
}

double CutCellGrid::aperture(int i, int j, int dir) const {
    const double R = d_.disk_radius();
    const double x = -R + (dir == 0 ? i + 1 : j + 1) * hd_;
    const double y0 = -R + (dir == 0 ? j : i) * hd_;
    const double s = std::sqrt(std::max(R * R - x * x, 0.0));
    return std::max(0.0, std::min(y0 + hd_, s) - std::max(y0, -s)) / hd_;
}

Eigen::VectorXd CutCellGrid::sample(const std::function<double(const Vec3&)>& f) const {
    Eigen::VectorXd u(size());
    for (std::size_t c = 0; c < size(); ++c) u[c] = f(centre(c));
    return u;
}

double CutCellGrid::integrate(const Eigen::VectorXd& u) const {
    double s = 0.0;
    for (std::size_t c = 0; c < size(); ++c) s += volume(c) * u[c];
    return s;
}

double CutCellGrid::l2(const Eigen::VectorXd& u) const {
    double s = 0.0;
    for (std::size_t c = 0; c < size(); ++c) s += volume(c) * u[c] * u[c];
    return std::sqrt(s);
}

void EllipticProblem::project_source() {
    double vol = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) vol += grid.volume(c);
    xi.array() -= grid.integrate(xi) / vol;
}

double EllipticProblem::compatibility_residual() const {
    double vol = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) vol += grid.volume(c);
    return std::abs(grid.integrate(xi)) / vol;
}

namespace {

Eigen::SparseMatrix<double> assemble_impl(const CutCellGrid& g, bool caps, double beta) {
    using T = Eigen::Triplet<double>;
    std::vector<T> t;
    t.reserve(g.size() * 7);
    auto couple = [&](int p, int q, double c) {
        if (c <= 0.0) return;
        t.emplace_back(p, p, c);
        t.emplace_back(q, q, c);
        t.emplace_back(p, q, -c);
        t.emplace_back(q, p, -c);
    };
    const double hx = g.hx(), hd = g.hd();
    for (std::size_t c = 0; c < g.size(); ++c) {
        const int a = g.axial(c), i = g.disk_i(c), j = g.disk_j(c);
        const int p = static_cast<int>(c);
        const double f = g.disk_fraction(c);
        if (int q = g.index(a + 1, i, j); q >= 0) couple(p, q, f * hd * hd / hx);
        if (int q = g.index(a, i + 1, j); q >= 0) couple(p, q, hx * g.aperture(i, j, 0));
        if (int q = g.index(a, i, j + 1); q >= 0) couple(p, q, hx * g.aperture(i, j, 1));
        if (caps && (a == 0 || a == g.nx() - 1))
            t.emplace_back(p, p, f * hd * hd * beta / (1.0 + beta * hx / 2.0));
    }
    Eigen::SparseMatrix<double> A(g.size(), g.size());
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

} // namespace

Eigen::SparseMatrix<double> assemble(const CutCellGrid& g, BcMode mode) {
    const double alpha = 1.0;
    return assemble_impl(g, mode == BcMode::P1, alpha / (2.0 - alpha));
}

Eigen::SparseMatrix<double> assemble_gradient(const CutCellGrid& g) { return assemble_impl(g, false, 0.0); }

Eigen::VectorXd solve_poisson(const EllipticProblem& p, EllipticReport* report, double tol) {
    const auto& g = p.grid;
    if (static_cast<std::size_t>(p.xi.size()) != g.size())
        throw EllipticError(EllipticError::Code::InvalidGrid, "source size does not match the grid");
    const double compat = p.compatibility_residual();
    if (p.mode == BcMode::P2 && compat > 1e-12 * std::max(1.0, p.xi.cwiseAbs().maxCoeff()))
        throw EllipticError(EllipticError::Code::SingularSystem, "P2 source has nonzero mean; call project_source()");
    const Eigen::SparseMatrix<double> A = assemble(g, p.mode);
    Eigen::VectorXd b(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) b[c] = g.volume(c) * p.xi[c];
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(static_cast<Eigen::Index>(20 * g.size() + 100));
    cg.compute(A);
    Eigen::VectorXd w = cg.solve(b);
    if (cg.info() != Eigen::Success)
        throw EllipticError(EllipticError::Code::NoConvergence, "CG did not reach the tolerance");
    if (p.mode == BcMode::P2) {
        double vol = 0.0;
        for (std::size_t c = 0; c < g.size(); ++c) vol += g.volume(c);
        w.array() -= g.integrate(w) / vol;
    }
    if (report) {
        report->iterations = static_cast<int>(cg.iterations());
        report->residual = cg.error();
        report->compatibility = compat;
        const Eigen::SparseMatrix<double> D = A - Eigen::SparseMatrix<double>(A.transpose());
        for (Eigen::Index k = 0; k < D.nonZeros(); ++k)
            report->symmetry_error = std::max(report->symmetry_error, std::abs(D.valuePtr()[k]));
    }
    return w;
}

Norms norms(const CutCellGrid& g, const Eigen::VectorXd& u) {
    Norms n;
    n.l2 = g.l2(u);
    const Eigen::SparseMatrix<double> G = assemble_gradient(g);
    const double grad2 = u.dot(G * u);
    n.h1 = std::sqrt(n.l2 * n.l2 + grad2);
    const double hx = g.hx(), hd = g.hd();
    double second = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const int a = g.axial(c), i = g.disk_i(c), j = g.disk_j(c);
        bool ok = true;
        for (int di = -2; di <= 2 && ok; ++di)
            for (int dj = -2; dj <= 2 && ok; ++dj) {
                const int q = g.index(a, i + di, j + dj);
                ok = q >= 0 && full(g.disk_fraction(q));
            }
        if (!ok || g.index(a - 2, i, j) < 0 || g.index(a + 2, i, j) < 0) continue;
        auto U = [&](int da, int di, int dj) { return u[g.index(a + da, i + di, j + dj)]; };
        const double u0 = U(0, 0, 0);
        const double dxx = (U(1, 0, 0) - 2 * u0 + U(-1, 0, 0)) / (hx * hx);
        const double dyy = (U(0, 1, 0) - 2 * u0 + U(0, -1, 0)) / (hd * hd);
        const double dzz = (U(0, 0, 1) - 2 * u0 + U(0, 0, -1)) / (hd * hd);
        const double dxy = (U(1, 1, 0) - U(1, -1, 0) - U(-1, 1, 0) + U(-1, -1, 0)) / (4 * hx * hd);
        const double dxz = (U(1, 0, 1) - U(1, 0, -1) - U(-1, 0, 1) + U(-1, 0, -1)) / (4 * hx * hd);
        const double dyz = (U(0, 1, 1) - U(0, 1, -1) - U(0, -1, 1) + U(0, -1, -1)) / (4 * hd * hd);
        second += g.volume(c) * (dxx * dxx + dyy * dyy + dzz * dzz + 2 * (dxy * dxy + dxz * dxz + dyz * dyz));
        ++n.h2_cells;
    }
    n.h2 = std::sqrt(n.h1 * n.h1 + second);
    return n;
}

double interior_residual(const CutCellGrid& g, const Eigen::VectorXd& u, const Eigen::VectorXd& xi) {
    const double hx = g.hx(), hd = g.hd();
    double worst = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const int a = g.axial(c), i = g.disk_i(c), j = g.disk_j(c);
        const int n[6] = {g.index(a - 1, i, j), g.index(a + 1, i, j), g.index(a, i - 1, j),
                          g.index(a, i + 1, j), g.index(a, i, j - 1), g.index(a, i, j + 1)};
        bool ok = full(g.disk_fraction(c));
        for (int q : n) ok = ok && q >= 0 && full(g.disk_fraction(q));
        if (!ok) continue;
        const double lap = (u[n[0]] - 2 * u[c] + u[n[1]]) / (hx * hx) + (u[n[2]] - 2 * u[c] + u[n[3]]) / (hd * hd) +
                           (u[n[4]] - 2 * u[c] + u[n[5]]) / (hd * hd);
        worst = std::max(worst, std::abs(lap + xi[c]));
    }
    return worst;
}

Extended reflect_extend(const CutCellGrid& g, const Eigen::VectorXd& u) {
    const Domain& d = g.domain();
    if (g.nx() % 2) throw EllipticError(EllipticError::Code::InvalidGrid, "reflection needs an even axial count");
    const Domain big = Domain::cylinder(2.0 * d.half_length_base(), d.disk_radius_base(), d.epsilon(),
                                        d.accommodation());
    Extended e{CutCellGrid(big, 2 * g.nx(), g.nd()), Eigen::VectorXd()};
    const int nx = g.nx(), half = nx / 2;
    const std::size_t per = g.size() / nx;
    e.values.resize(e.grid.size());
    for (int b = 0; b < 2 * nx; ++b) {
        int a;
        if (b < half) a = half - b - 1;                // x in (-2L, -L): u(-2L - x)
        else if (b < half + nx) a = b - half;          // u(x)
        else a = 5 * half - b - 1;                     // x in (L, 2L): u(2L - x)
        e.values.segment(b * per, per) = u.segment(a * per, per);
    }
    return e;
}

double coercivity_constant(const CutCellGrid& g, BcMode mode) {
    const Eigen::MatrixXd A = Eigen::MatrixXd(assemble(g, mode));
    Eigen::MatrixXd H = Eigen::MatrixXd(assemble_gradient(g));
    for (std::size_t c = 0; c < g.size(); ++c) H(c, c) += g.volume(c);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, H, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double eps = g.domain().epsilon();
    // P2: the first eigenvalue belongs to the constants.
    return lam[mode == BcMode::P2 ? 1 : 0] / (eps * eps);
}

Eigen::VectorXd band_limited_source(const CutCellGrid& g, std::uint64_t seed, std::uint64_t trial, int modes) {
    Stream rng(seed, hash_id("band_limited_source"), trial);
    const Domain& d = g.domain();
    const double L = d.half_length_base(), R = d.disk_radius_base(), eps = d.epsilon();
    struct Mode { double amp, kx, ky, kz, phase; };
    std::vector<Mode> m(modes);
    for (auto& t : m)
        t = {rng.normal(), rng.uniform(0.0, 1.0) * kPi / L, rng.uniform(-0.5, 0.5) * kPi / R,
             rng.uniform(-0.5, 0.5) * kPi / R, rng.uniform(0.0, 2.0 * kPi)};
    return g.sample([&](const Vec3& x) {
        const Vec3 X = eps * x;
        double s = 0.0;
        for (const auto& t : m) s += t.amp * std::cos(t.kx * X[0] + t.ky * X[1] + t.kz * X[2] + t.phase);
        return s;
    });
}

Eigen::VectorXd slow_mode_source(const CutCellGrid& g) {
    const double L = g.domain().half_length();
    return g.sample([&](const Vec3& x) { return std::sin(kPi * x[0] / (2.0 * L)); });
}

ExperimentReport verify_epsilon_scaling(BcMode mode, const ScalingOptions& opt) {
    ExperimentReport rep;
    rep.experiment = "poisson-scaling";
    rep.seed = opt.seed;
    rep.params = {{"mode", mode == BcMode::P1 ? "P1" : "P2"}, {"eps", opt.eps}, {"trials", opt.trials},
                  {"nx", opt.nx}, {"nd", opt.nd}, {"half_length", opt.half_length}, {"radius", opt.radius}};
    rep.table.columns = {"eps", "trial", "xi_l2", "w_h1", "w_h2", "ratio_h1", "ratio_h2"};
    std::vector<double> r1(opt.eps.size(), 0.0), r2(opt.eps.size(), 0.0), raw(opt.eps.size(), 0.0);
    double worst_cg = 0.0;
    for (std::size_t e = 0; e < opt.eps.size(); ++e) {
        const double eps = opt.eps[e];
        const Domain d = Domain::cylinder(opt.half_length, opt.radius, eps);
        const CutCellGrid g(d, opt.nx, opt.nd);
        for (int t = 0; t < opt.trials; ++t) {
            // Trial 0 is the slowest axial Neumann mode sin(pi X / 2L), where the bound is sharpest.
            EllipticProblem p{g, mode,
                              t == 0 ? slow_mode_source(g) : band_limited_source(g, opt.seed, t)};
            if (mode == BcMode::P2) p.project_source();
            EllipticReport er;
            const Eigen::VectorXd w = solve_poisson(p, &er);
            worst_cg = std::max(worst_cg, er.residual);
            const Norms n = norms(g, w);
            const double xl = g.l2(p.xi);
            const double a = eps * eps * n.h1 / xl, b = eps * eps * n.h2 / xl;
            r1[e] = std::max(r1[e], a);
            r2[e] = std::max(r2[e], b);
            raw[e] = std::max(raw[e], n.h2 / xl);
            rep.table.add({eps, double(t), xl, n.h1, n.h2, a, b});
        }
    }
    auto spread = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
    };
    // Least-squares slope of log(|w|_H2 / |xi|) against log(1 / eps).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(opt.eps.size());
    for (std::size_t e = 0; e < opt.eps.size(); ++e) {
        const double x = -std::log(opt.eps[e]), y = std::log(raw[e]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = k > 1 ? (k * sxy - sx * sy) / (k * sxx - sx * sx) : 0.0;
    rep.measure("ratio_spread_h1", spread(r1));
    rep.measure("ratio_spread_h2", spread(r2));
    rep.measure("growth_exponent", slope);
    rep.measure("cg_residual", worst_cg);
    rep.check("h1_ratio_spread<=3", spread(r1) <= 3.0, format_short(spread(r1)));
    rep.check("h2_ratio_spread<=3", spread(r2) <= 3.0, format_short(spread(r2)));
    rep.check("growth_exponent<=2.3", slope <= 2.3, format_short(slope));
    rep.counts["solves"] = static_cast<std::int64_t>(opt.eps.size()) * opt.trials;
    return rep;
}

ConvergenceStudy manufactured_convergence(const Domain& d, const std::vector<int>& nd_levels) {
    ConvergenceStudy s;
    const double L = d.half_length(), R = d.disk_radius();
    const double k = boost::math::cyl_bessel_j_zero(1.0, 1) / R;  // J0'(kR) = -J1(kR) = 0
    auto exact = [&](const Vec3& x) {
        return std::cos(kPi * x[0] / L) * boost::math::cyl_bessel_j(0, k * std::hypot(x[1], x[2]));
    };
    const double lam = kPi * kPi / (L * L) + k * k;
    for (int nd : nd_levels) {
        const int nx = std::max(2, static_cast<int>(std::lround(nd * L / R)));
        const CutCellGrid g(d, nx + nx % 2, nd);
        EllipticProblem p{g, BcMode::P2, lam * g.sample(exact)};
        p.project_source();
        const Eigen::VectorXd w = solve_poisson(p, nullptr, 1e-12);
        Eigen::VectorXd ref = g.sample(exact);
        double vol = 0.0;
        for (std::size_t c = 0; c < g.size(); ++c) vol += g.volume(c);
        ref.array() -= g.integrate(ref) / vol;
        s.h.push_back(g.hd());
        s.error.push_back(g.l2(w - ref) / std::sqrt(vol));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(s.h.size());
    for (std::size_t i = 0; i < s.h.size(); ++i) {
        const double x = std::log(s.h[i]), y = std::log(s.error[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    s.order = n > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    return s;
}

} // namespace kinetic

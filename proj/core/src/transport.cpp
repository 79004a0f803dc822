#include "kinetic/transport.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kinetic/collision.hpp"

namespace kinetic {

namespace {

using Triplet = Eigen::Triplet<double>;

// Trilinear sharing of an arbitrary velocity between grid nodes.
int velocity_weights(const VelocityGrid& g, const Vec3& v, std::array<std::size_t, 8>& ids,
                     std::array<double, 8>& w) {
    int i0[3];
    double f[3];
    for (int d = 0; d < 3; ++d) {
        double t = (v[d] + g.vmax()) / g.h() - 0.5;
        t = std::clamp(t, 0.0, static_cast<double>(g.n() - 1));
        i0[d] = std::min(static_cast<int>(std::floor(t)), g.n() - 2);
        f[d] = t - i0[d];
    }
    int k = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const double wt = (a ? f[0] : 1 - f[0]) * (b ? f[1] : 1 - f[1]) * (c ? f[2] : 1 - f[2]);
                if (wt <= 1e-15) continue;
                ids[k] = g.index(i0[0] + a, i0[1] + b, i0[2] + c);
                w[k] = wt;
                ++k;
            }
    double s = 0.0;
    for (int q = 0; q < k; ++q) s += w[q];
    for (int q = 0; q < k; ++q) w[q] /= s;
    return k;
}

// Spatial deposit of weight `mass` at point p for velocity node j.
void deposit(const CylinderGrid& x, std::size_t nv, const Vec3& p, std::size_t j, double mass, std::size_t col,
             std::vector<Triplet>& out) {
    int a0, a1;
    double w0, w1;
    x.axial_weights(p[0], a0, w0, a1, w1);
    std::array<int, 4> ids;
    std::array<double, 4> wd;
    const int nk = x.disk_weights(p[1], p[2], ids, wd);
    const std::size_t nd = x.disk_size();
    for (int q = 0; q < nk; ++q) {
        out.emplace_back((a0 * nd + ids[q]) * nv + j, col, mass * w0 * wd[q]);
        if (w1 > 0.0) out.emplace_back((a1 * nd + ids[q]) * nv + j, col, mass * w1 * wd[q]);
    }
}

} // namespace

TransportRemap::TransportRemap(const CylinderGrid& x, const VelocityGrid& v, double dt, double alpha)
    : x_(x), v_(v), dt_(dt), alpha_(alpha) {
    const std::size_t ns = x.size(), nv = v.size(), nd = x.disk_size();
    const std::size_t n = ns * nv;
    const double L = x.half_length(), R = x.radius();
    std::vector<Triplet> direct, collect, emit;
    direct.reserve(n * 8);

    for (std::size_t s = 0; s < ns; ++s) {
        const Vec3 xs = x.centre(s);
        for (std::size_t j = 0; j < nv; ++j) {
            const std::size_t col = s * nv + j;
            Vec3 p = xs, u = v.node(j);
            double tau = dt, weight = 1.0;
            bool reflected = false;
            int cap = -1;
            for (int bounce = 0; bounce < 1000; ++bounce) {
                double t_cap = std::numeric_limits<double>::infinity();
                if (u[0] > 0) t_cap = (L - p[0]) / u[0];
                if (u[0] < 0) t_cap = (-L - p[0]) / u[0];
                double t_lat = std::numeric_limits<double>::infinity();
                const double a = u[1] * u[1] + u[2] * u[2];
                if (a > 0) {
                    const double b = p[1] * u[1] + p[2] * u[2];
                    const double c = std::min(p[1] * p[1] + p[2] * p[2] - R * R, 0.0);
                    t_lat = (-b + std::sqrt(b * b - a * c)) / a;
                    if (t_lat < 1e-14 * R / std::sqrt(a)) t_lat = 0.0;
                }
                if (std::min(t_cap, t_lat) >= tau) {
                    p += tau * u;
                    break;
                }
                if (t_cap <= t_lat) {
                    p += t_cap * u;
                    cap = u[0] > 0 ? 1 : 0;
                    break;
                }
                p += t_lat * u;
                tau -= t_lat;
                const Vec3 nrm = Vec3(0, p[1], p[2]) / std::hypot(p[1], p[2]);
                u -= 2.0 * nrm.dot(u) * nrm;
                weight *= alpha;
                reflected = true;
            }
            if (cap >= 0) {
                std::array<int, 4> ids;
                std::array<double, 4> wd;
                const int nk = x.disk_weights(p[1], p[2], ids, wd);
                for (int q = 0; q < nk; ++q) collect.emplace_back(cap * nd + ids[q], col, weight * wd[q]);
                continue;
            }
            if (!reflected) {
                deposit(x, nv, p, j, weight, col, direct);
                continue;
            }
            std::array<std::size_t, 8> vid;
            std::array<double, 8> vw;
            const int nk = velocity_weights(v, u, vid, vw);
            for (int q = 0; q < nk; ++q) deposit(x, nv, p, vid[q], weight * vw[q], col, direct);
        }
    }

    // Re-emission profile: incoming nodes weighted by M^M(u) |u_x|.
    std::vector<double> prof(nv, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
        const Vec3 u = v.node(j);
        if (u[0] > 0) prof[j] = wall_maxwellian(u) * u[0];
        wall_norm_ += prof[j];
    }
    const double total = wall_norm_;
    wall_norm_ *= v.cell_volume();
    for (int cap = 0; cap < 2; ++cap) {
        for (std::size_t k = 0; k < nd; ++k) {
            const auto& bc = x.disk_node(k);
            const Vec3 base(cap == 0 ? -L : L, x.disk_coord(bc[0]), x.disk_coord(bc[1]));
            for (std::size_t j = 0; j < nv; ++j) {
                if (prof[j] == 0.0) continue;
                // Mirror the profile for the right cap: index of -u_x.
                const auto ijk = v.ijk(j);
                const std::size_t jj = cap == 0 ? j : v.index(v.n() - 1 - ijk[0], ijk[1], ijk[2]);
                const Vec3 u = v.node(jj);
                deposit(x, nv, base + 0.5 * dt * u, jj, prof[j] / total, cap * nd + k, emit);
            }
        }
    }
    T_.resize(n, n);
    T_.setFromTriplets(direct.begin(), direct.end());
    C_.resize(2 * nd, n);
    C_.setFromTriplets(collect.begin(), collect.end());
    E_.resize(n, 2 * nd);
    E_.setFromTriplets(emit.begin(), emit.end());
}

PhaseMatrix TransportRemap::apply(const PhaseMatrix& in, Flux* flux) const {
    const Eigen::Map<const Eigen::VectorXd> xin(in.data(), in.size());
    const Eigen::VectorXd c = C_ * xin;
    Eigen::VectorXd y = T_ * xin + alpha_ * (E_ * c);
    if (flux) {
        const double unit = x_.cell_volume() * v_.cell_volume();
        flux->outgoing = c.sum() * unit;
        flux->incoming = alpha_ * (E_ * c).sum() * unit;
    }
    PhaseMatrix out(in.rows(), in.cols());
    Eigen::Map<Eigen::VectorXd>(out.data(), out.size()) = y;
    return out;
}

PhaseMatrix transport_semigroup(const CylinderGrid& x, const VelocityGrid& v, const PhaseMatrix& f, double t) {
    PhaseMatrix out = PhaseMatrix::Zero(f.rows(), f.cols());
    const Domain& d = x.domain();
    const std::size_t nd = x.disk_size();
    for (std::size_t s = 0; s < x.size(); ++s) {
        const Vec3 xs = x.centre(s);
        for (std::size_t j = 0; j < v.size(); ++j) {
            const Vec3 u = v.node(j);
            const Vec3 y = xs - t * u;
            if (t > 0 && !d.contains(y)) continue;
            int a0, a1;
            double w0, w1;
            x.axial_weights(y[0], a0, w0, a1, w1);
            std::array<int, 4> ids;
            std::array<double, 4> wd;
            const int nk = x.disk_weights(y[1], y[2], ids, wd);
            double val = 0.0;
            for (int q = 0; q < nk; ++q) {
                val += w0 * wd[q] * f(a0 * nd + ids[q], j);
                if (w1 > 0.0) val += w1 * wd[q] * f(a1 * nd + ids[q], j);
            }
            out(s, j) = std::exp(-collision_frequency_closed(u.norm()) * t) * val;
        }
    }
    return out;
}

} // namespace kinetic

#include "kinetic/phase_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kinetic/collision.hpp"

namespace kinetic {

CylinderGrid::CylinderGrid(const Domain& d, int nx, int nd) : domain_(d), nx_(nx), nd_(nd) {
    if (d.kind() != DomainKind::Cylinder) throw std::invalid_argument("CylinderGrid: cylinder domain required");
    if (nx < 2 || nd < 1) throw std::invalid_argument("CylinderGrid: need nx >= 2, nd >= 1");
    L_ = d.half_length();
    R_ = d.disk_radius();
    hx_ = 2.0 * L_ / nx;
    hd_ = 2.0 * R_ / nd;
    disk_lookup_.assign(static_cast<std::size_t>(nd) * nd, -1);
    for (int b = 0; b < nd; ++b)
        for (int c = 0; c < nd; ++c) {
            const double y = disk_coord(b), z = disk_coord(c);
            if (y * y + z * z < R_ * R_) {
                disk_lookup_[b * nd + c] = static_cast<int>(disk_.size());
                disk_.push_back({b, c});
            }
        }
    for (int a = 0; a < nx; ++a)
        for (const auto& bc : disk_) nodes_.push_back({a, bc[0], bc[1]});
}

int CylinderGrid::disk_id(int b, int c) const {
    if (b < 0 || c < 0 || b >= nd_ || c >= nd_) return -1;
    return disk_lookup_[b * nd_ + c];
}

int CylinderGrid::id(int a, int b, int c) const {
    if (a < 0 || a >= nx_) return -1;
    const int k = disk_id(b, c);
    return k < 0 ? -1 : a * static_cast<int>(disk_.size()) + k;
}

Vec3 CylinderGrid::centre(std::size_t id) const {
    const auto& n = nodes_[id];
    return {axial_coord(n[0]), disk_coord(n[1]), disk_coord(n[2])};
}

void CylinderGrid::axial_weights(double x, int& a0, double& w0, int& a1, double& w1) const {
    const double t = (x + L_) / hx_ - 0.5;
    if (t <= 0.0) {
        a0 = a1 = 0;
        w0 = 1.0;
        w1 = 0.0;
        return;
    }
    if (t >= nx_ - 1) {
        a0 = a1 = nx_ - 1;
        w0 = 1.0;
        w1 = 0.0;
        return;
    }
    a0 = static_cast<int>(std::floor(t));
    a1 = a0 + 1;
    w1 = t - a0;
    w0 = 1.0 - w1;
}

int CylinderGrid::disk_weights(double y, double z, std::array<int, 4>& ids, std::array<double, 4>& w) const {
    auto axis = [this](double p, int& i0, double& f) {
        double t = (p + R_) / hd_ - 0.5;
        t = std::clamp(t, 0.0, static_cast<double>(nd_ - 1));
        i0 = std::min(static_cast<int>(std::floor(t)), std::max(nd_ - 2, 0));
        f = t - i0;
    };
    int b0, c0;
    double fb, fc;
    axis(y, b0, fb);
    axis(z, c0, fc);
    int count = 0;
    double total = 0.0;
    for (int db = 0; db < 2; ++db)
        for (int dc = 0; dc < 2; ++dc) {
            const double wt = (db ? fb : 1.0 - fb) * (dc ? fc : 1.0 - fc);
            const int k = disk_id(b0 + db, c0 + dc);
            if (k < 0 || wt <= 0.0) continue;
            ids[count] = k;
            w[count] = wt;
            total += wt;
            ++count;
        }
    if (count == 0) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < disk_.size(); ++k) {
            const double dy = disk_coord(disk_[k][0]) - y, dz = disk_coord(disk_[k][1]) - z;
            if (dy * dy + dz * dz < best) {
                best = dy * dy + dz * dz;
                ids[0] = static_cast<int>(k);
            }
        }
        w[0] = 1.0;
        return 1;
    }
    for (int k = 0; k < count; ++k) w[k] /= total;
    return count;
}

PhaseGridFunction::PhaseGridFunction(const CylinderGrid& x, const VelocityGrid& v)
    : x_(&x), v_(&v), f_(PhaseMatrix::Zero(x.size(), v.size())) {}

PhaseGridFunction::PhaseGridFunction(const CylinderGrid& x, const VelocityGrid& v, PhaseMatrix values, double t)
    : x_(&x), v_(&v), f_(std::move(values)), t_(t) {
    if (f_.rows() != static_cast<Eigen::Index>(x.size()) || f_.cols() != static_cast<Eigen::Index>(v.size()))
        throw std::invalid_argument("PhaseGridFunction: shape mismatch");
}

double PhaseGridFunction::mass() const { return f_.sum() * x_->cell_volume() * v_->cell_volume(); }

double PhaseGridFunction::l1() const { return f_.cwiseAbs().sum() * x_->cell_volume() * v_->cell_volume(); }

std::array<double, 5> PhaseGridFunction::moments() const {
    const GridFunction col = f_.colwise().sum().transpose() * x_->cell_volume();
    return v_->moments(col);
}

double PhaseGridFunction::sup_weighted(const WeightFunction& w) const {
    double best = 0.0;
    for (Eigen::Index j = 0; j < f_.cols(); ++j) {
        const double om = w(v_->node(j));
        best = std::max(best, om * f_.col(j).cwiseAbs().maxCoeff());
    }
    return best;
}

double PhaseGridFunction::sup_weighted_nu(const WeightFunction& w) const {
    double best = 0.0;
    for (Eigen::Index j = 0; j < f_.cols(); ++j) {
        const Vec3 v = v_->node(j);
        best = std::max(best, w(v) / collision_frequency_closed(v.norm()) * f_.col(j).cwiseAbs().maxCoeff());
    }
    return best;
}

double PhaseGridFunction::h_norm() const {
    double s = 0.0;
    for (Eigen::Index j = 0; j < f_.cols(); ++j) s += f_.col(j).squaredNorm() / maxwellian(v_->node(j));
    return std::sqrt(s * x_->cell_volume() * v_->cell_volume());
}

PhaseMatrix PhaseGridFunction::from_function(const CylinderGrid& x, const VelocityGrid& v,
                                             const std::function<double(const Vec3&, const Vec3&)>& f) {
    PhaseMatrix m(x.size(), v.size());
    for (std::size_t s = 0; s < x.size(); ++s) {
        const Vec3 xs = x.centre(s);
        for (std::size_t j = 0; j < v.size(); ++j) m(s, j) = f(xs, v.node(j));
    }
    return m;
}

} // namespace kinetic

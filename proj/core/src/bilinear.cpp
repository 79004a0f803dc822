#include "kinetic/bilinear.hpp"

#include <cmath>
#include <stdexcept>

namespace kinetic {

LatticeCollisionModel::LatticeCollisionModel(const VelocityGrid& grid, std::size_t cache_limit) : grid_(grid) {
    if (grid.size() <= cache_limit) {
        enumerate([this](const LatticeCollision& c) { cache_.push_back(c); },
                  [this](const LatticeCollision& c) { dropped_.push_back(c); });
        cached_ = true;
    }
}

std::size_t LatticeCollisionModel::collision_count() const {
    if (cached_) return cache_.size();
    std::size_t n = 0;
    for_each([&n](const LatticeCollision&) { ++n; });
    return n;
}

LatticeCollisionModel::QResult LatticeCollisionModel::Q(const GridFunction& g, const GridFunction& h) const {
    QResult r;
    r.q = GridFunction::Zero(grid_.size());
    double kept = 0.0;
    for_each([&](const LatticeCollision& c) {
        const double gain = g[c.jp] * h[c.ip] + h[c.jp] * g[c.ip];
        const double loss = g[c.j] * h[c.i] + h[c.j] * g[c.i];
        const double b = 0.5 * c.w * (gain - loss);
        r.q[c.i] += b;
        r.q[c.j] += b;
        kept += c.w * std::abs(loss);
    });
    double dropped = 0.0;
    for_each_dropped([&](const LatticeCollision& c) {
        dropped += c.w * std::abs(g[c.j] * h[c.i] + h[c.j] * g[c.i]);
    });
    const double dv = grid_.cell_volume();
    r.clip_mass = dropped * dv;
    r.total_mass = (kept + dropped) * dv;
    return r;
}

Eigen::MatrixXd LatticeCollisionModel::Q_batch(const Eigen::MatrixXd& G) const {
    if (G.rows() != Eigen::Index(grid_.size()))
        throw std::invalid_argument("Q_batch: rows must match the velocity grid");
    const Eigen::Index m = G.cols();
    Eigen::MatrixXd Gt = G.transpose();  // velocity index becomes the column
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, G.rows());
    for_each([&](const LatticeCollision& c) {
        const double* gi = Gt.col(c.i).data();
        const double* gj = Gt.col(c.j).data();
        const double* gip = Gt.col(c.ip).data();
        const double* gjp = Gt.col(c.jp).data();
        double* oi = out.col(c.i).data();
        double* oj = out.col(c.j).data();
        for (Eigen::Index s = 0; s < m; ++s) {
            const double b = c.w * (gjp[s] * gip[s] - gj[s] * gi[s]);
            oi[s] += b;
            oj[s] += b;
        }
    });
    return out.transpose();
}

Eigen::MatrixXd LatticeCollisionModel::linearized() const {
    const GridFunction M = grid_.maxwellian();
    const std::size_t n = grid_.size();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for_each([&](const LatticeCollision& c) {
        for (const std::int32_t t : {c.i, c.j}) {
            C(t, c.ip) += c.w * M[c.jp];
            C(t, c.jp) += c.w * M[c.ip];
            C(t, c.i) -= c.w * M[c.j];
            C(t, c.j) -= c.w * M[c.i];
        }
    });
    return C;
}

GridFunction LatticeCollisionModel::loss_frequency() const {
    const GridFunction M = grid_.maxwellian();
    GridFunction nu = GridFunction::Zero(grid_.size());
    for_each([&](const LatticeCollision& c) {
        nu[c.i] += c.w * M[c.j];
        nu[c.j] += c.w * M[c.i];
    });
    return nu;
}

double LatticeCollisionModel::bound_CQ(const WeightFunction& w) const {
    const std::size_t n = grid_.size();
    GridFunction inv(n), acc = GridFunction::Zero(n);
    for (std::size_t a = 0; a < n; ++a) inv[a] = std::exp(-w.log_value(grid_.node(a).norm()));
    for_each([&](const LatticeCollision& c) {
        const double s = c.w * (inv[c.ip] * inv[c.jp] + inv[c.i] * inv[c.j]);
        acc[c.i] += s;
        acc[c.j] += s;
    });
    double best = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const double r = grid_.node(a).norm();
        best = std::max(best, acc[a] / (inv[a] * collision_frequency_closed(r)));
    }
    return best;
}

} // namespace kinetic

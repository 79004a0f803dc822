#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "kinetic/velocity_grid.hpp"
#include "kinetic/weights.hpp"

namespace kinetic {

// One binary collision (v_i, v_j) -> (v_ip, v_jp) of the lattice model,
// with w = B dsigma dv* already multiplied in.
struct LatticeCollision {
    std::int32_t i, j, ip, jp;
    double w;
};

// Discrete-velocity hard-sphere model on the grid. Scattering directions are
// the 26 Lebedev points restricted per pair to those mapping nodes to nodes;
// face and body diagonals carry the multiplicity that restores the rule on
// average. Collisions leaving the box are dropped as a whole, so mass,
// momentum and energy are conserved exactly and Q(M, M) = 0.
class LatticeCollisionModel {
public:
    explicit LatticeCollisionModel(const VelocityGrid& grid, std::size_t cache_limit = 1000);

    const VelocityGrid& grid() const { return grid_; }
    std::size_t collision_count() const;

    struct QResult {
        GridFunction q;
        double clip_mass = 0.0;   // |loss| carried by dropped collisions
        double total_mass = 0.0;  // |loss| over all collisions
    };
    QResult Q(const GridFunction& g, const GridFunction& h) const;

    // Q(g, g) for many functions at once: column s of G (size x count).
    Eigen::MatrixXd Q_batch(const Eigen::MatrixXd& G) const;

    // C f = Q(M, f) + Q(f, M).
    Eigen::MatrixXd linearized() const;
    // Loss frequency sum_j W M(j).
    GridFunction loss_frequency() const;
    // max_i omega(i) nu(i)^{-1} sum W [omega^{-1}(i')omega^{-1}(j') + omega^{-1}(i)omega^{-1}(j)].
    double bound_CQ(const WeightFunction& w) const;

    template <class F>
    void for_each(F&& f) const;
    template <class F>
    void for_each_dropped(F&& f) const;

private:
    template <class F, class D>
    void enumerate(F&& keep, D&& drop) const;

    const VelocityGrid& grid_;
    std::vector<LatticeCollision> cache_, dropped_;
    bool cached_ = false;
};

template <class F, class D>
void LatticeCollisionModel::enumerate(F&& keep, D&& drop) const {
    static constexpr int dirs[13][3] = {{1, 0, 0},  {0, 1, 0},  {0, 0, 1},  {1, 1, 0},  {1, -1, 0},
                                        {1, 0, 1},  {1, 0, -1}, {0, 1, 1},  {0, 1, -1}, {1, 1, 1},
                                        {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
    // 4 pi * Lebedev weight * 2 (for -sigma) * lattice multiplicity / |s|.
    const double pi4 = 4.0 * kPi;
    const double cls[4] = {0.0, pi4 * 2.0 * (1.0 / 21.0) * 1.0 / 1.0, pi4 * 2.0 * (4.0 / 105.0) * 2.0 / std::sqrt(2.0),
                           pi4 * 2.0 * (9.0 / 280.0) * 3.0 / std::sqrt(3.0)};
    const int n = grid_.n();
    const double h = grid_.h();
    const double scale = h * grid_.cell_volume();
    const std::size_t N = grid_.size();
    for (std::size_t i = 0; i < N; ++i) {
        const auto a = grid_.ijk(i);
        for (std::size_t j = i + 1; j < N; ++j) {
            const auto b = grid_.ijk(j);
            const int d[3] = {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
            for (const auto& s : dirs) {
                const int n2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
                const int p = s[0] * d[0] + s[1] * d[1] + s[2] * d[2];
                if (p == 0 || p % n2 != 0) continue;
                const int t = p / n2;
                const int ip[3] = {a[0] - t * s[0], a[1] - t * s[1], a[2] - t * s[2]};
                const int jp[3] = {b[0] + t * s[0], b[1] + t * s[1], b[2] + t * s[2]};
                const double w = cls[n2] * std::abs(p) * scale;
                if (ip[0] < 0 || ip[0] >= n || ip[1] < 0 || ip[1] >= n || ip[2] < 0 || ip[2] >= n || jp[0] < 0 ||
                    jp[0] >= n || jp[1] < 0 || jp[1] >= n || jp[2] < 0 || jp[2] >= n) {
                    drop(LatticeCollision{static_cast<std::int32_t>(i), static_cast<std::int32_t>(j), -1, -1, w});
                    continue;
                }
                keep(LatticeCollision{static_cast<std::int32_t>(i), static_cast<std::int32_t>(j),
                                      static_cast<std::int32_t>(grid_.index(ip[0], ip[1], ip[2])),
                                      static_cast<std::int32_t>(grid_.index(jp[0], jp[1], jp[2])), w});
            }
        }
    }
}

template <class F>
void LatticeCollisionModel::for_each(F&& f) const {
    if (cached_) {
        for (const auto& c : cache_) f(c);
        return;
    }
    enumerate(f, [](const LatticeCollision&) {});
}

template <class F>
void LatticeCollisionModel::for_each_dropped(F&& f) const {
    if (cached_) {
        for (const auto& c : dropped_) f(c);
        return;
    }
    enumerate([](const LatticeCollision&) {}, f);
}

} // namespace kinetic

#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "kinetic/geometry.hpp"
#include "kinetic/velocity_grid.hpp"
#include "kinetic/weights.hpp"

namespace kinetic {

using PhaseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Cell-centred Cartesian grid on the rescaled cylinder: nx cells along the
// axis on (-L, L), an nd x nd box over the disk, masked to cells whose centre
// lies inside the disk.
class CylinderGrid {
public:
    CylinderGrid(const Domain& d, int nx, int nd);

    const Domain& domain() const { return domain_; }
    int nx() const { return nx_; }
    int nd() const { return nd_; }
    double hx() const { return hx_; }
    double hd() const { return hd_; }
    double half_length() const { return L_; }
    double radius() const { return R_; }
    double cell_volume() const { return hx_ * hd_ * hd_; }

    std::size_t size() const { return nodes_.size(); }
    std::size_t disk_size() const { return disk_.size(); }
    const std::array<int, 3>& node(std::size_t id) const { return nodes_[id]; }
    // -1 when (a, b, c) is outside the box or the mask.
    int id(int a, int b, int c) const;
    int disk_id(int b, int c) const;
    const std::array<int, 2>& disk_node(std::size_t k) const { return disk_[k]; }
    Vec3 centre(std::size_t id) const;
    double axial_coord(int a) const { return -L_ + (a + 0.5) * hx_; }
    double disk_coord(int b) const { return -R_ + (b + 0.5) * hd_; }

    // Linear deposit weights: axial hat functions clamped at the ends.
    void axial_weights(double x, int& a0, double& w0, int& a1, double& w1) const;
    // Bilinear weights on in-mask disk nodes, renormalised; nearest in-mask
    // node when the whole stencil is masked out.
    int disk_weights(double y, double z, std::array<int, 4>& ids, std::array<double, 4>& w) const;

private:
    Domain domain_;
    int nx_, nd_;
    double hx_, hd_, L_, R_;
    std::vector<std::array<int, 3>> nodes_;
    std::vector<std::array<int, 2>> disk_;
    std::vector<int> disk_lookup_;
};

// Values on (spatial node, velocity node), row-major by spatial node.
class PhaseGridFunction {
public:
    PhaseGridFunction(const CylinderGrid& x, const VelocityGrid& v);
    PhaseGridFunction(const CylinderGrid& x, const VelocityGrid& v, PhaseMatrix values, double t = 0.0);

    const CylinderGrid& space() const { return *x_; }
    const VelocityGrid& velocity() const { return *v_; }
    PhaseMatrix& values() { return f_; }
    const PhaseMatrix& values() const { return f_; }
    double time() const { return t_; }
    void set_time(double t) { t_ = t; }

    double mass() const;
    std::array<double, 5> moments() const;
    double l1() const;
    // max |omega(v) f(x, v)|.
    double sup_weighted(const WeightFunction& w) const;
    // max |omega(v) nu(v)^{-1} f(x, v)|.
    double sup_weighted_nu(const WeightFunction& w) const;
    // Discrete (int f^2 M^{-1})^{1/2}.
    double h_norm() const;
    double min_value() const { return f_.minCoeff(); }

    static PhaseMatrix from_function(const CylinderGrid& x, const VelocityGrid& v,
                                     const std::function<double(const Vec3&, const Vec3&)>& f);

private:
    const CylinderGrid* x_;
    const VelocityGrid* v_;
    PhaseMatrix f_;
    double t_ = 0.0;
};

} // namespace kinetic

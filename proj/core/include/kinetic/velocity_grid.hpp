#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include <Eigen/Core>

#include "kinetic/geometry.hpp"

namespace kinetic {

using GridFunction = Eigen::VectorXd;

// Uniform cell-centred grid on [-vmax, vmax]^3 with midpoint weights.
class VelocityGrid {
public:
    VelocityGrid(int n, double vmax);

    int n() const { return n_; }
    std::size_t size() const { return size_; }
    double vmax() const { return vmax_; }
    double h() const { return h_; }
    double cell_volume() const { return h_ * h_ * h_; }

    double coord(int i) const { return -vmax_ + (i + 0.5) * h_; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }
    std::array<int, 3> ijk(std::size_t idx) const;
    Vec3 node(std::size_t idx) const;
    bool in_range(int i, int j, int k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < n_ && j < n_ && k < n_;
    }

    GridFunction evaluate(const std::function<double(const Vec3&)>& f) const;
    GridFunction maxwellian() const;
    double integrate(const GridFunction& f) const;
    // Integrals against 1, v1, v2, v3, |v|^2.
    std::array<double, 5> moments(const GridFunction& f) const;

    // Tricubic Lagrange stencil around y. Returns false outside the box.
    struct Stencil {
        std::array<int, 3> base{};
        std::array<std::array<double, 4>, 3> w{};
    };
    bool stencil(const Vec3& y, Stencil& s) const;
    // M(y) * interpolant of f/M, zero outside the box.
    double interpolate_maxwell_normalized(const GridFunction& f_over_m, const Vec3& y) const;

private:
    int n_;
    double vmax_, h_;
    std::size_t size_;
};

} // namespace kinetic

#include "kinetic/velocity_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kinetic/collision.hpp"

namespace kinetic {

VelocityGrid::VelocityGrid(int n, double vmax) : n_(n), vmax_(vmax) {
    if (n < 4 || !(vmax > 0.0)) throw std::invalid_argument("VelocityGrid: need n >= 4 and vmax > 0");
    h_ = 2.0 * vmax / n;
    size_ = static_cast<std::size_t>(n) * n * n;
}

std::array<int, 3> VelocityGrid::ijk(std::size_t idx) const {
    const int k = static_cast<int>(idx % n_);
    const int j = static_cast<int>((idx / n_) % n_);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
    return {i, j, k};
}

Vec3 VelocityGrid::node(std::size_t idx) const {
    auto [i, j, k] = ijk(idx);
    return {coord(i), coord(j), coord(k)};
}

GridFunction VelocityGrid::evaluate(const std::function<double(const Vec3&)>& f) const {
    GridFunction out(size_);
    for (std::size_t a = 0; a < size_; ++a) out[a] = f(node(a));
    return out;
}

GridFunction VelocityGrid::maxwellian() const {
    return evaluate([](const Vec3& v) { return kinetic::maxwellian(v); });
}

double VelocityGrid::integrate(const GridFunction& f) const { return f.sum() * cell_volume(); }

std::array<double, 5> VelocityGrid::moments(const GridFunction& f) const {
    std::array<double, 5> m{};
    for (std::size_t a = 0; a < size_; ++a) {
        const Vec3 v = node(a);
        m[0] += f[a];
        m[1] += v[0] * f[a];
        m[2] += v[1] * f[a];
        m[3] += v[2] * f[a];
        m[4] += v.squaredNorm() * f[a];
    }
    for (double& x : m) x *= cell_volume();
    return m;
}

bool VelocityGrid::stencil(const Vec3& y, Stencil& s) const {
    for (int d = 0; d < 3; ++d) {
        if (std::abs(y[d]) > vmax_) return false;
        const double t = (y[d] + vmax_) / h_ - 0.5;
        int b = static_cast<int>(std::floor(t)) - 1;
        b = std::clamp(b, 0, n_ - 4);
        s.base[d] = b;
        const double x = t - b;
        // Lagrange basis on nodes 0..3.
        s.w[d][0] = -(x - 1) * (x - 2) * (x - 3) / 6.0;
        s.w[d][1] = x * (x - 2) * (x - 3) / 2.0;
        s.w[d][2] = -x * (x - 1) * (x - 3) / 2.0;
        s.w[d][3] = x * (x - 1) * (x - 2) / 6.0;
    }
    return true;
}

double VelocityGrid::interpolate_maxwell_normalized(const GridFunction& g, const Vec3& y) const {
    Stencil s;
    if (!stencil(y, s)) return 0.0;
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const double wab = s.w[0][a] * s.w[1][b];
            const std::size_t row = index(s.base[0] + a, s.base[1] + b, s.base[2]);
            for (int c = 0; c < 4; ++c) acc += wab * s.w[2][c] * g[row + c];
        }
    return acc * kinetic::maxwellian(y);
}

} // namespace kinetic

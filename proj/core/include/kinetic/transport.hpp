#pragma once

#include <Eigen/SparseCore>

#include "kinetic/phase_grid.hpp"

namespace kinetic {

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Conservative forward remap for one time step of free transport on the
// cylinder grid. Each (cell, velocity) packet moves from the cell centre,
// reflects specularly on the lateral wall (off-grid velocities are shared
// trilinearly between velocity nodes) and is deposited with linear weights.
// Packets reaching a cap are collected on the cap nodes and re-emitted with
// the discrete wall-Maxwellian flux profile, scaled by alpha.
class TransportRemap {
public:
    TransportRemap(const CylinderGrid& x, const VelocityGrid& v, double dt, double alpha);

    struct Flux {
        double outgoing = 0.0;  // mass reaching the caps
        double incoming = 0.0;  // mass re-emitted
    };
    PhaseMatrix apply(const PhaseMatrix& in, Flux* flux = nullptr) const;

    double dt() const { return dt_; }
    double alpha() const { return alpha_; }
    // sum_{n.v<0} M^M(v) |n.v| h^3 on the velocity grid (same for both caps).
    double wall_normalisation() const { return wall_norm_; }
    const SparseRM& direct() const { return T_; }
    const SparseRM& collect() const { return C_; }
    const SparseRM& emit() const { return E_; }

private:
    const CylinderGrid& x_;
    const VelocityGrid& v_;
    double dt_, alpha_, wall_norm_ = 0.0;
    SparseRM T_, C_, E_;
};

// e^{-nu(v) t} f(x - v t, v) with linear interpolation in x; zero where the
// backward ray leaves the domain (free flight).
PhaseMatrix transport_semigroup(const CylinderGrid& x, const VelocityGrid& v, const PhaseMatrix& f, double t);

} // namespace kinetic

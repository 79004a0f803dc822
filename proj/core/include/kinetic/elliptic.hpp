#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "kinetic/geometry.hpp"
#include "kinetic/report.hpp"

namespace kinetic {

enum class BcMode {
    P1,  // Robin with alpha = 1 on the caps, Neumann on the lateral wall
    P2   // pure Neumann, zero-mean source
};

class EllipticError : public std::runtime_error {
public:
    enum class Code { SingularSystem, NoConvergence, InvalidGrid };
    EllipticError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
    Code code;
};

// Cell-centred Cartesian grid on the box around the cylinder. Cells cut by
// the lateral wall carry their volume fraction and exact face apertures.
class CutCellGrid {
public:
    // nx cells along the axis, nd across the disk diameter.
    CutCellGrid(const Domain& d, int nx, int nd);

    const Domain& domain() const { return d_; }
    int nx() const { return nx_; }
    int nd() const { return nd_; }
    double hx() const { return hx_; }
    double hd() const { return hd_; }
    std::size_t size() const { return cells_.size(); }  // active cells

    // Active index of (a, i, j), or -1.
    int index(int a, int i, int j) const;
    Vec3 centre(std::size_t c) const;
    double volume(std::size_t c) const { return frac_[cells_[c].disk] * hx_ * hd_ * hd_; }
    double disk_fraction(std::size_t c) const { return frac_[cells_[c].disk]; }
    int axial(std::size_t c) const { return cells_[c].a; }
    int disk_i(std::size_t c) const { return cells_[c].i; }
    int disk_j(std::size_t c) const { return cells_[c].j; }

    // Fraction of the disk-plane face between (i, j) and (i + 1, j) (dir 0)
    // or (i, j + 1) (dir 1) that lies inside the disk.
    double aperture(int i, int j, int dir) const;

    Eigen::VectorXd sample(const std::function<double(const Vec3&)>& f) const;
    double integrate(const Eigen::VectorXd& u) const;
    double l2(const Eigen::VectorXd& u) const;

private:
    struct Cell { int a, i, j, disk; };
    Domain d_;
    int nx_, nd_;
    double hx_, hd_;
    std::vector<double> frac_;     // per disk cell
    std::vector<int> disk_index_;  // disk cell -> position in the active disk list, or -1
    std::vector<Cell> cells_;
};

struct EllipticProblem {
    CutCellGrid grid;
    BcMode mode = BcMode::P1;
    Eigen::VectorXd xi;  // source on active cells

    // Subtract the volume mean of xi (P2 compatibility).
    void project_source();
    double compatibility_residual() const;
};

struct EllipticReport {
    int iterations = 0;
    double residual = 0.0;        // relative CG residual
    double compatibility = 0.0;   // |mean xi| (P2)
    double symmetry_error = 0.0;  // max |A - A^T|
};

// Symmetric finite-volume matrix of a(w, v) = int grad w . grad v + int_caps beta w v,
// beta = alpha / (2 - alpha), with the cap condition closed at the half-cell.
Eigen::SparseMatrix<double> assemble(const CutCellGrid& g, BcMode mode);
// Gradient part only: int |grad u|^2 = u^T G u.
Eigen::SparseMatrix<double> assemble_gradient(const CutCellGrid& g);

// -Delta w = xi, (2 - alpha) d_n w + alpha w = 0.
Eigen::VectorXd solve_poisson(const EllipticProblem& p, EllipticReport* report = nullptr, double tol = 1e-10);

struct Norms {
    double l2 = 0.0, h1 = 0.0, h2 = 0.0;
    std::size_t h2_cells = 0;  // cells at distance >= 2h from the wall used by the second differences
};
Norms norms(const CutCellGrid& g, const Eigen::VectorXd& u);

// Seven-point residual Delta u + xi on full cells whose six neighbours are full.
double interior_residual(const CutCellGrid& g, const Eigen::VectorXd& u, const Eigen::VectorXd& xi);

// Even extension across both caps onto (-2L, 2L) x disk. The axial count
// doubles; the cut-cell structure in the disk plane is unchanged.
struct Extended {
    CutCellGrid grid;
    Eigen::VectorXd values;
};
Extended reflect_extend(const CutCellGrid& g, const Eigen::VectorXd& u);

// a(u, u) / (eps^2 |u|_{H1}^2) minimised over the discrete space (zero mean
// for P2); dense, so small grids only.
double coercivity_constant(const CutCellGrid& g, BcMode mode);

// Random source band-limited in base coordinates (eps x), `modes` plane
// waves with axial wavenumber <= pi / L and transverse <= pi / 2R.
Eigen::VectorXd band_limited_source(const CutCellGrid& g, std::uint64_t seed, std::uint64_t trial, int modes = 4);
// sin(pi x / 2L): the slowest zero-mean axial mode.
Eigen::VectorXd slow_mode_source(const CutCellGrid& g);

struct ScalingOptions {
    std::vector<double> eps{1.0, 0.5, 0.25};
    int trials = 4;
    int nx = 16;    // cells along the axis, independent of eps
    int nd = 16;    // cells across the diameter
    double half_length = 1.0, radius = 1.0;
    std::uint64_t seed = 1;
};
ExperimentReport verify_epsilon_scaling(BcMode mode, const ScalingOptions& opt);

// Manufactured Neumann solution cos(pi x / L) J0(k r), k = j'_{0,1} / R, at
// the given disk resolutions; the observed order is the least-squares slope.
struct ConvergenceStudy {
    std::vector<double> h, error;
    double order = 0.0;
};
ConvergenceStudy manufactured_convergence(const Domain& d, const std::vector<int>& nd_levels);

} // namespace kinetic

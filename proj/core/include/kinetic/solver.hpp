#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinetic/bilinear.hpp"
#include "kinetic/collision.hpp"
#include "kinetic/report.hpp"
#include "kinetic/transport.hpp"

namespace kinetic {

enum class Scheme { MildDuhamel, SplitSystem };

struct SolverConfig {
    double alpha = 1.0;        // damping of the Maxwell boundary operator
    double A = 4.0;            // weight-modification radius
    double tol = 1e-10;        // outer fixed-point tolerance
    int max_iterations = 50;
    double dt = 0.5;
    double horizon = 10.0;
    Scheme scheme = Scheme::MildDuhamel;
    bool collisions = true;    // false: C = -nu
    double delta = 0.1;        // split cut-off

    int steps() const;
    nlohmann::json to_json() const;
    static SolverConfig from_json(const nlohmann::json& j);
};

class SolverError : public std::runtime_error {
public:
    enum class Code { ConfigInvalid, ContractionViolated, MaxIterations, SmallnessViolated, Divergence,
                      DissipativityNotMet };
    SolverError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
    Code code;
};

// exp(dt B) acting on the velocity variable.
class CollisionPropagator {
public:
    // B self-adjoint in the M^{-1} product: exact exponential by the
    // eigendecomposition of M^{-1/2} B M^{1/2}; positive round-off
    // eigenvalues are clamped to zero and reported.
    static CollisionPropagator self_adjoint(const Eigen::MatrixXd& B, const GridFunction& M, double dt);
    static CollisionPropagator general(const Eigen::MatrixXd& B, double dt);

    PhaseMatrix apply(const PhaseMatrix& f) const { return f * E_.transpose(); }
    const Eigen::MatrixXd& matrix() const { return E_; }
    double clamped_eigenvalue() const { return clamped_; }
    // Spectral gap of B on the complement of its kernel (self-adjoint case).
    double gap() const { return gap_; }

private:
    Eigen::MatrixXd E_;
    double clamped_ = 0.0, gap_ = 0.0;
};

struct SeriesRow {
    double t = 0.0;
    double sup_w = 0.0;
    double h_norm = 0.0;
    double mass = 0.0;
    double flux_residual = 0.0;
    double min_density = 0.0;
};

struct Trajectory {
    std::vector<PhaseMatrix> states;  // empty unless requested
    std::vector<SeriesRow> series;
};

Table series_table(const std::vector<SeriesRow>& s);

// Linear problem d_t f + v.grad f = B f + G with the damped Maxwell boundary
// condition. One step is a Lie splitting of remap and collision with the
// source integrated by the trapezoid rule along the step.
class LinearKineticSolver {
public:
    LinearKineticSolver(const CylinderGrid& x, const VelocityGrid& v, const Eigen::MatrixXd& B,
                        const SolverConfig& cfg, const WeightFunction& w1, bool self_adjoint = true);

    const SolverConfig& config() const { return cfg_; }
    const CylinderGrid& space() const { return x_; }
    const VelocityGrid& velocity() const { return v_; }
    const TransportRemap& remap() const { return remap_; }
    const CollisionPropagator& propagator() const { return prop_; }
    const WeightFunction& weight() const { return w1_; }
    int steps() const { return cfg_.steps(); }
    double time(int n) const { return n * cfg_.dt; }

    PhaseMatrix duhamel_step(const PhaseMatrix& psi, const PhaseMatrix* g_now, const PhaseMatrix* g_next,
                             TransportRemap::Flux* flux = nullptr) const;
    Trajectory solve(const PhaseMatrix& f0, const std::vector<PhaseMatrix>* G = nullptr,
                     bool keep_states = false) const;
    SeriesRow measure(const PhaseMatrix& f, double t, double flux_residual) const;

private:
    const CylinderGrid& x_;
    const VelocityGrid& v_;
    SolverConfig cfg_;
    WeightFunction w1_;
    TransportRemap remap_;
    CollisionPropagator prop_;
    GridFunction M_;
};

// sup_n e^{rate t_n} || g_n ||_{inf, omega} (nu-weighted when requested).
double trajectory_norm(const std::vector<PhaseMatrix>& g, const CylinderGrid& x, const VelocityGrid& v,
                       const WeightFunction& w, double rate, double dt, bool nu_weighted = false);

// Q(g_n, g_n) at every time and spatial node.
std::vector<PhaseMatrix> apply_Q(const LatticeCollisionModel& q, const std::vector<PhaseMatrix>& g);

struct PicardResult {
    std::vector<PhaseMatrix> solution;
    std::vector<double> increments;  // [[g^{k+1} - g^k]]
    std::vector<double> norms;       // [[g^k]]
    int iterations = 0;
    bool converged = false;
};

// g^{k+1} = Psi(f0, Q(g^k, g^k)) from g^0 = 0, in the [[.]] norm with
// exponential rate `rate`; every iterate must stay in the ball of radius lambda.
PicardResult solve_nonlinear(const LinearKineticSolver& lin, const LatticeCollisionModel& q, const PhaseMatrix& f0,
                             double rate, double lambda);

struct SplitResult {
    std::vector<PhaseMatrix> f1, f2;
    std::vector<double> increments;
    int iterations = 0;
    bool converged = false;
    double varpi = 0.0;  // || A_delta ||_{inf, omega -> omega nu^{-1}}
    double dissipativity_lhs = 0.0;
};

// Split matrices of the lattice gain operator K = C + nu: A_delta = K (1 - chi),
// K_delta = K chi, elementwise on (v_i, v_j).
void split_gain(const Eigen::MatrixXd& C, const GridFunction& nu, const VelocityGrid& v, const SplitParams& sp,
                Eigen::MatrixXd& A, Eigen::MatrixXd& Kd);
double weighted_operator_norm(const Eigen::MatrixXd& A, const VelocityGrid& v, const WeightFunction& w,
                              bool nu_weighted_target);

SplitResult solve_split(const CylinderGrid& x, const VelocityGrid& v, const LatticeCollisionModel& q,
                        const PhaseMatrix& f0, const SolverConfig& cfg, const WeightFunction& w0, double rate,
                        bool enforce_dissipativity = true);

} // namespace kinetic

#include "kinetic/solver.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace kinetic {

int SolverConfig::steps() const { return static_cast<int>(std::ceil(horizon / dt - 1e-9)); }

nlohmann::json SolverConfig::to_json() const {
    return {{"alpha", alpha},
            {"A", A},
            {"tol", tol},
            {"max_iterations", max_iterations},
            {"dt", dt},
            {"horizon", horizon},
            {"scheme", scheme == Scheme::MildDuhamel ? "mild_duhamel" : "split_system"},
            {"collisions", collisions},
            {"delta", delta}};
}

SolverConfig SolverConfig::from_json(const nlohmann::json& j) {
    SolverConfig c;
    c.alpha = j.value("alpha", c.alpha);
    c.A = j.value("A", c.A);
    c.tol = j.value("tol", c.tol);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.dt = j.value("dt", c.dt);
    c.horizon = j.value("horizon", c.horizon);
    const std::string s = j.value("scheme", std::string("mild_duhamel"));
    if (s == "mild_duhamel") c.scheme = Scheme::MildDuhamel;
    else if (s == "split_system") c.scheme = Scheme::SplitSystem;
    else throw SolverError(SolverError::Code::ConfigInvalid, "unknown scheme '" + s + "'");
    c.collisions = j.value("collisions", c.collisions);
    c.delta = j.value("delta", c.delta);
    if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw SolverError(SolverError::Code::ConfigInvalid, "alpha outside (0, 1]");
    if (!(c.dt > 0.0) || !(c.horizon > 0.0)) throw SolverError(SolverError::Code::ConfigInvalid, "dt, horizon > 0");
    return c;
}

CollisionPropagator CollisionPropagator::self_adjoint(const Eigen::MatrixXd& B, const GridFunction& M, double dt) {
    const Eigen::VectorXd s = M.cwiseSqrt(), is = s.cwiseInverse();
    Eigen::MatrixXd S = is.asDiagonal() * B * s.asDiagonal();
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    Eigen::VectorXd lam = es.eigenvalues();
    CollisionPropagator p;
    const double scale = lam.cwiseAbs().maxCoeff();
    p.gap_ = scale;
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        if (lam[k] > 0) {
            p.clamped_ = std::max(p.clamped_, lam[k]);
            lam[k] = 0.0;
        }
        if (lam[k] < -1e-9 * scale) p.gap_ = std::min(p.gap_, -lam[k]);
        lam[k] = std::exp(dt * lam[k]);
    }
    const Eigen::MatrixXd& V = es.eigenvectors();
    p.E_ = s.asDiagonal() * (V * lam.asDiagonal() * V.transpose()) * is.asDiagonal();
    return p;
}

CollisionPropagator CollisionPropagator::general(const Eigen::MatrixXd& B, double dt) {
    CollisionPropagator p;
    p.E_ = (dt * B).exp();
    return p;
}

Table series_table(const std::vector<SeriesRow>& s) {
    Table t;
    t.columns = {"t", "sup_weighted", "h_norm", "mass", "flux_residual", "min_density"};
    for (const auto& r : s) t.add({r.t, r.sup_w, r.h_norm, r.mass, r.flux_residual, r.min_density});
    return t;
}

LinearKineticSolver::LinearKineticSolver(const CylinderGrid& x, const VelocityGrid& v, const Eigen::MatrixXd& B,
                                         const SolverConfig& cfg, const WeightFunction& w1, bool self_adjoint)
    : x_(x), v_(v), cfg_(cfg), w1_(w1), remap_(x, v, cfg.dt, cfg.alpha),
      prop_(self_adjoint ? CollisionPropagator::self_adjoint(B, v.maxwellian(), cfg.dt)
                         : CollisionPropagator::general(B, cfg.dt)),
      M_(v.maxwellian()) {}

PhaseMatrix LinearKineticSolver::duhamel_step(const PhaseMatrix& psi, const PhaseMatrix* g_now,
                                              const PhaseMatrix* g_next, TransportRemap::Flux* flux) const {
    PhaseMatrix y = prop_.apply(remap_.apply(psi, flux));
    if (g_now) y += 0.5 * cfg_.dt * prop_.apply(remap_.apply(*g_now));
    if (g_next) y += 0.5 * cfg_.dt * *g_next;
    return y;
}

SeriesRow LinearKineticSolver::measure(const PhaseMatrix& f, double t, double flux_residual) const {
    const PhaseGridFunction pf(x_, v_, f, t);
    SeriesRow r;
    r.t = t;
    r.sup_w = pf.sup_weighted(w1_);
    r.h_norm = pf.h_norm();
    r.mass = pf.mass();
    r.flux_residual = flux_residual;
    double mn = 0.0;
    for (Eigen::Index j = 0; j < f.cols(); ++j) mn = std::min(mn, M_[j] + f.col(j).minCoeff());
    r.min_density = mn;
    return r;
}

Trajectory LinearKineticSolver::solve(const PhaseMatrix& f0, const std::vector<PhaseMatrix>* G,
                                      bool keep_states) const {
    const int n = steps();
    if (G && static_cast<int>(G->size()) != n + 1)
        throw SolverError(SolverError::Code::ConfigInvalid, "source must have steps + 1 time slices");
    Trajectory tr;
    PhaseMatrix f = f0;
    tr.series.push_back(measure(f, 0.0, 0.0));
    if (keep_states) tr.states.push_back(f);
    for (int k = 0; k < n; ++k) {
        TransportRemap::Flux flux;
        f = duhamel_step(f, G ? &(*G)[k] : nullptr, G ? &(*G)[k + 1] : nullptr, &flux);
        tr.series.push_back(measure(f, time(k + 1), flux.outgoing - flux.incoming));
        if (keep_states) tr.states.push_back(f);
    }
    return tr;
}

double trajectory_norm(const std::vector<PhaseMatrix>& g, const CylinderGrid&, const VelocityGrid& v,
                       const WeightFunction& w, double rate, double dt, bool nu_weighted) {
    Eigen::RowVectorXd om(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const Vec3 u = v.node(j);
        om[j] = w(u) / (nu_weighted ? collision_frequency_closed(u.norm()) : 1.0);
    }
    double best = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double s = (g[n].cwiseAbs().array().rowwise() * om.array()).maxCoeff();
        best = std::max(best, std::exp(rate * n * dt) * s);
    }
    return best;
}

std::vector<PhaseMatrix> apply_Q(const LatticeCollisionModel& q, const std::vector<PhaseMatrix>& g) {
    std::vector<PhaseMatrix> out;
    out.reserve(g.size());
    for (const auto& gn : g) {
        const Eigen::MatrixXd cols = gn.transpose();
        out.emplace_back(q.Q_batch(cols).transpose());
    }
    return out;
}

PicardResult solve_nonlinear(const LinearKineticSolver& lin, const LatticeCollisionModel& q, const PhaseMatrix& f0,
                             double rate, double lambda) {
    const auto& x = lin.space();
    const auto& v = lin.velocity();
    const auto& w = lin.weight();
    const double dt = lin.config().dt;
    const double f0n = PhaseGridFunction(x, v, f0).sup_weighted(w);
    if (f0n > lambda * lambda)
        throw SolverError(SolverError::Code::SmallnessViolated,
                          "initial datum above lambda^2 = " + std::to_string(lambda * lambda));
    PicardResult r;
    std::vector<PhaseMatrix> g(lin.steps() + 1, PhaseMatrix::Zero(x.size(), v.size()));
    for (int k = 0; k < lin.config().max_iterations; ++k) {
        const std::vector<PhaseMatrix> G = apply_Q(q, g);
        std::vector<PhaseMatrix> next = lin.solve(f0, &G, true).states;
        std::vector<PhaseMatrix> diff(next.size());
        for (std::size_t n = 0; n < next.size(); ++n) diff[n] = next[n] - g[n];
        const double inc = trajectory_norm(diff, x, v, w, rate, dt);
        const double nrm = trajectory_norm(next, x, v, w, rate, dt);
        r.increments.push_back(inc);
        r.norms.push_back(nrm);
        g = std::move(next);
        r.iterations = k + 1;
        if (nrm > lambda)
            throw SolverError(SolverError::Code::Divergence, "iterate left the ball of radius lambda");
        if (inc <= lin.config().tol * std::max(nrm, 1e-300) || nrm == 0.0) {
            r.converged = true;
            break;
        }
    }
    r.solution = std::move(g);
    if (!r.converged) throw SolverError(SolverError::Code::MaxIterations, "Picard iteration did not converge");
    return r;
}

void split_gain(const Eigen::MatrixXd& C, const GridFunction& nu, const VelocityGrid& v, const SplitParams& sp,
                Eigen::MatrixXd& A, Eigen::MatrixXd& Kd) {
    const Eigen::MatrixXd K = C + Eigen::MatrixXd(nu.asDiagonal());
    A.resize(K.rows(), K.cols());
    Kd.resize(K.rows(), K.cols());
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        const Vec3 vi = v.node(i);
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            const double chi = sp.chi(vi, v.node(j));
            Kd(i, j) = K(i, j) * chi;
            A(i, j) = K(i, j) - Kd(i, j);
        }
    }
}

double weighted_operator_norm(const Eigen::MatrixXd& A, const VelocityGrid& v, const WeightFunction& w,
                              bool nu_weighted_target) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const Vec3 vi = v.node(i);
        double s = 0.0;
        for (Eigen::Index j = 0; j < A.cols(); ++j) s += std::abs(A(i, j)) / w(v.node(j));
        s *= w(vi) / (nu_weighted_target ? collision_frequency_closed(vi.norm()) : 1.0);
        best = std::max(best, s);
    }
    return best;
}

SplitResult solve_split(const CylinderGrid& x, const VelocityGrid& v, const LatticeCollisionModel& q,
                        const PhaseMatrix& f0, const SolverConfig& cfg, const WeightFunction& w0, double rate,
                        bool enforce_dissipativity) {
    const Eigen::MatrixXd C = q.linearized();
    const GridFunction nu = q.loss_frequency();
    Eigen::MatrixXd A, Kd;
    split_gain(C, nu, v, SplitParams{cfg.delta}, A, Kd);
    SplitResult r;
    r.varpi = weighted_operator_norm(A, v, w0, true);
    const double lhs = 2.0 * nu1() / nu0() * (1.0 + w0.C0() * weight_flux_constant(w0).value) * r.varpi;
    const double iota0 = x.domain().accommodation().iota0;
    r.dissipativity_lhs = lhs;
    if (enforce_dissipativity && !(lhs <= iota0 / 4.0))
        throw SolverError(SolverError::Code::DissipativityNotMet,
                          "2 (nu1/nu0)(1 + C0 C_omega) varpi = " + std::to_string(lhs) + " > iota0/4");
    const Eigen::MatrixXd B1 = A - Eigen::MatrixXd(nu.asDiagonal());
    const LinearKineticSolver s1(x, v, B1, cfg, w0, false);
    const LinearKineticSolver s2(x, v, C, cfg, w0, true);
    const int steps = s1.steps();
    const PhaseMatrix zero = PhaseMatrix::Zero(x.size(), v.size());
    r.f1.assign(steps + 1, zero);
    r.f2.assign(steps + 1, zero);
    for (int k = 0; k < cfg.max_iterations; ++k) {
        std::vector<PhaseMatrix> sum(steps + 1);
        for (int n = 0; n <= steps; ++n) sum[n] = r.f1[n] + r.f2[n];
        const std::vector<PhaseMatrix> G1 = apply_Q(q, sum);
        std::vector<PhaseMatrix> f1 = s1.solve(f0, &G1, true).states;
        std::vector<PhaseMatrix> G2(steps + 1);
        for (int n = 0; n <= steps; ++n) G2[n] = f1[n] * Kd.transpose();
        std::vector<PhaseMatrix> f2 = s2.solve(zero, &G2, true).states;
        std::vector<PhaseMatrix> d1(steps + 1), d2(steps + 1);
        for (int n = 0; n <= steps; ++n) {
            d1[n] = f1[n] - r.f1[n];
            d2[n] = f2[n] - r.f2[n];
        }
        const double inc = trajectory_norm(d1, x, v, w0, rate, cfg.dt) + trajectory_norm(d2, x, v, w0, rate, cfg.dt);
        const double nrm = trajectory_norm(f1, x, v, w0, rate, cfg.dt) + trajectory_norm(f2, x, v, w0, rate, cfg.dt);
        r.f1 = std::move(f1);
        r.f2 = std::move(f2);
        r.increments.push_back(inc);
        r.iterations = k + 1;
        if (!std::isfinite(nrm) || nrm > 1e6 * (1.0 + PhaseGridFunction(x, v, f0).sup_weighted(w0)))
            throw SolverError(SolverError::Code::Divergence, "split iteration diverged");
        if (inc <= cfg.tol * std::max(nrm, 1e-300) || nrm == 0.0) {
            r.converged = true;
            break;
        }
    }
    if (!r.converged) throw SolverError(SolverError::Code::MaxIterations, "split iteration did not converge");
    return r;
}

} // namespace kinetic

#pragma once

#include <vector>

#include "kinetic/geometry.hpp"
#include "kinetic/report.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

struct PhasePoint {
    double t = 0.0;
    Vec3 x = Vec3::Zero();
    Vec3 v = Vec3::Zero();
};

enum class Reflection { Specular, Diffuse, InitialTime, Singular, Grazing };
enum class Termination { ReachedTimeZero, MaxBounces, SingularEdge, Grazing };

const char* to_string(Reflection r);
const char* to_string(Termination t);

struct CollisionEvent {
    double t = 0.0;
    Vec3 x = Vec3::Zero();
    Vec3 v_in = Vec3::Zero();
    Vec3 v_out = Vec3::Zero();
    Reflection reflection = Reflection::Specular;
    BoundaryClass cls;
};

struct TrajectoryRecord {
    PhasePoint origin;
    std::vector<CollisionEvent> events;
    Termination terminated_by = Termination::ReachedTimeZero;
    // Specular events before the first diffuse one.
    int specular_run_length = 0;
};

class TrajectoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Vec3 reflect_specular(const Vec3& n, const Vec3& v);

// u with density M^M(u) (n.u)_+ : Rayleigh normal speed, Gaussian tangential.
Vec3 sample_diffuse(Stream& rng, const Vec3& n);

TrajectoryRecord trace_backwards(const Domain& d, const PhasePoint& start, double horizon, Stream& rng,
                                 int max_bounces = 10000);

// Stretching and geometry checks. Each one samples with per-sample
// substreams of Stream(seed, hash(experiment)).
ExperimentReport verify_single_bounce_cap(const Domain& d, double eta, double M, double T, long samples,
                                          std::uint64_t seed, bool axial_witness = false);
ExperimentReport verify_single_bounce_lateral(const Domain& d, double eta, double M, double T, long samples,
                                              std::uint64_t seed);
ExperimentReport verify_single_bounce_ball(const Domain& d, double eta, double M, double T, long samples,
                                           std::uint64_t seed);
ExperimentReport verify_circle_chain(const Domain& d, const Vec3& x0, const Vec3& v0, int chain_len);
ExperimentReport verify_circle_chain_random(const Domain& d, int chains, int chain_len, std::uint64_t seed);
ExperimentReport verify_diffuse_then_lateral_angle(const Domain& d, double eta, double M, long samples,
                                                   std::uint64_t seed);

struct JacobianResult {
    double det = 0.0;
    double det_half_step = 0.0;
    bool bounced = false;
};

// v* -> x_s - (s - r) v* when the backward ray from x_s stays inside until
// time r, otherwise v* -> x_1 - V_{x_1} v* (s_1 - r).
Vec3 specular_map(const Domain& d, const Vec3& xs, double s, double r, const Vec3& vstar, bool* bounced = nullptr);
JacobianResult jacobian_det(const Domain& d, const Vec3& xs, double s, double r, const Vec3& vstar);

ExperimentReport jacobian_check(double t, double s, double r, const std::vector<double>& eps_sweep,
                                double wall_distance, const Vec3& vstar, double alpha);

double epsilon_U(double alpha, double c0, double c1);

} // namespace kinetic

#include "kinetic/trajectories.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace kinetic {

const char* to_string(Reflection r) {
    switch (r) {
    case Reflection::Specular: return "Specular";
    case Reflection::Diffuse: return "Diffuse";
    case Reflection::InitialTime: return "InitialTime";
    case Reflection::Singular: return "Singular";
    case Reflection::Grazing: return "Grazing";
    }
    return "?";
}

const char* to_string(Termination t) {
    switch (t) {
    case Termination::ReachedTimeZero: return "ReachedTimeZero";
    case Termination::MaxBounces: return "MaxBounces";
    case Termination::SingularEdge: return "SingularEdge";
    case Termination::Grazing: return "Grazing";
    }
    return "?";
}

Vec3 reflect_specular(const Vec3& n, const Vec3& v) {
    if (std::abs(n.squaredNorm() - 1.0) > 2e-12) throw TrajectoryError("reflect_specular: non-unit normal");
    return v - 2.0 * n.dot(v) * n;
}

namespace {

void tangent_frame(const Vec3& n, Vec3& t1, Vec3& t2) {
    Vec3 a = std::abs(n[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    t1 = (a - a.dot(n) * n).normalized();
    t2 = n.cross(t1);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Uniform in the ball |v| <= M subject to n.v > eta.
Vec3 sample_outgoing(Stream& rng, const Vec3& n, double eta, double M) {
    if (!(eta >= 0.0 && eta < M)) throw TrajectoryError("outgoing sampler needs 0 <= eta < M");
    for (;;) {
        Vec3 v(rng.uniform(-M, M), rng.uniform(-M, M), rng.uniform(-M, M));
        if (v.squaredNorm() <= M * M && n.dot(v) > eta) return v;
    }
}

Vec3 sample_disk(Stream& rng, double R) {
    for (;;) {
        double a = rng.uniform(-R, R), b = rng.uniform(-R, R);
        if (a * a + b * b < R * R) return Vec3(0.0, a, b);
    }
}

bool is_cap(BoundaryTag t) { return t == BoundaryTag::Cap1 || t == BoundaryTag::Cap2; }

} // namespace

Vec3 sample_diffuse(Stream& rng, const Vec3& n) {
    Vec3 t1, t2;
    tangent_frame(n, t1, t2);
    double s = std::sqrt(-2.0 * std::log(rng.uniform()));
    double g1 = rng.normal(), g2 = rng.normal();
    return s * n + g1 * t1 + g2 * t2;
}

TrajectoryRecord trace_backwards(const Domain& d, const PhasePoint& start, double horizon, Stream& rng,
                                 int max_bounces) {
    if (!(horizon > 0.0)) throw TrajectoryError("trace_backwards: horizon must be positive");
    TrajectoryRecord rec;
    rec.origin = start;
    double t = std::min(start.t, horizon);
    Vec3 x = start.x, v = start.v;
    bool diffuse_seen = false;
    for (int b = 0;; ++b) {
        if (b >= max_bounces) {
            rec.terminated_by = Termination::MaxBounces;
            return rec;
        }
        ExitResult ex;
        try {
            ex = d.exit_time(x, v);
        } catch (const GeometryError& e) {
            if (e.code != GeometryError::Code::NumericalDegenerate) throw;
            rec.terminated_by = Termination::Grazing;
            return rec;
        }
        double t1 = t - ex.t_b;
        if (t1 <= 0.0) {
            rec.terminated_by = Termination::ReachedTimeZero;
            return rec;
        }
        CollisionEvent ev;
        ev.t = t1;
        ev.x = ex.x_exit;
        ev.v_in = v;
        ev.cls = ex.cls;
        if (ex.cls.tag == BoundaryTag::SingularEdge) {
            ev.reflection = Reflection::Singular;
            ev.v_out = v;
            rec.events.push_back(ev);
            rec.terminated_by = Termination::SingularEdge;
            return rec;
        }
        const Vec3& n = ex.cls.normal;
        if (std::abs(n.dot(v)) <= 1e-12 * v.norm()) {
            ev.reflection = Reflection::Grazing;
            ev.v_out = v;
            rec.events.push_back(ev);
            rec.terminated_by = Termination::Grazing;
            return rec;
        }
        double iota = d.iota(ex.cls.tag);
        bool diffuse = iota >= 1.0 ? true : iota <= 0.0 ? false : rng.bernoulli(iota);
        if (diffuse) {
            ev.reflection = Reflection::Diffuse;
            ev.v_out = sample_diffuse(rng, n);
            diffuse_seen = true;
        } else {
            ev.reflection = Reflection::Specular;
            ev.v_out = reflect_specular(n, v);
            if (!diffuse_seen) ++rec.specular_run_length;
        }
        rec.events.push_back(ev);
        x = ev.x;
        v = ev.v_out;
        t = t1;
    }
}

ExperimentReport verify_single_bounce_cap(const Domain& d, double eta, double M, double T, long samples,
                                          std::uint64_t seed, bool axial_witness) {
    auto t0 = Clock::now();
    ExperimentReport rep;
    rep.experiment = "stretching-cap";
    rep.seed = seed;
    if (d.kind() != DomainKind::Cylinder) throw TrajectoryError("stretching-cap needs a cylinder");
    double eps_D = 2.0 * d.half_length_base() / (M * T);
    rep.params = {{"eps", d.epsilon()}, {"L", d.half_length_base()}, {"r", d.disk_radius_base()},
                  {"eta", eta}, {"M", M}, {"T", T}, {"samples", samples}, {"axial_witness", axial_witness}};
    rep.measure("eps_D", eps_D, 0.0, "2 L / (M T)");
    bool guaranteed = d.epsilon() < eps_D;
    double L = d.half_length(), R = d.disk_radius();
    Stream master(seed, hash_id(rep.experiment));
    long violations = 0, singular = 0, grazing = 0;
    double min_cross = std::numeric_limits<double>::infinity();
    auto run = [&](const PhasePoint& p, Stream& rng) {
        auto rec = trace_backwards(d, p, T, rng);
        if (rec.terminated_by == Termination::SingularEdge) ++singular;
        if (rec.terminated_by == Termination::Grazing) ++grazing;
        for (const auto& ev : rec.events)
            if (is_cap(ev.cls.tag)) {
                ++violations;
                min_cross = std::min(min_cross, p.t - ev.t);
                break;
            }
    };
    for (long i = 0; i < samples; ++i) {
        Stream rng = master.substream(std::uint64_t(i));
        bool cap1 = rng.uniform() < 0.5;
        PhasePoint p;
        p.x = sample_disk(rng, R);
        p.x[0] = cap1 ? -L : L;
        Vec3 n(cap1 ? -1.0 : 1.0, 0.0, 0.0);
        p.v = sample_outgoing(rng, n, eta, M);
        p.t = rng.uniform(0.0, T);
        run(p, rng);
    }
    long total = samples;
    if (axial_witness) {
        Stream rng = master.substream(std::uint64_t(samples));
        PhasePoint p{T, Vec3(-L, 0.0, 0.0), Vec3(-M, 0.0, 0.0)};
        run(p, rng);
        ++total;
    }
    rep.counts = {{"samples", total}, {"violations", violations}, {"singular_edge", singular}, {"grazing", grazing}};
    if (violations) rep.measure("min_cap_to_cap_time", min_cross, 0.0, "observed; bound 2L/(eps M)");
    rep.table.columns = {"eps", "eps_D", "samples", "violations", "singular_edge"};
    rep.table.add({d.epsilon(), eps_D, double(total), double(violations), double(singular)});
    if (guaranteed)
        rep.check("no second cap collision below eps_D", violations == 0,
                  std::to_string(violations) + " of " + std::to_string(total));
    else
        rep.check("threshold not met: report flagged non-guaranteed", true,
                  std::to_string(violations) + " two-cap trajectories");
    rep.params["guaranteed"] = guaranteed;
    rep.seconds = seconds_since(t0);
    return rep;
}

ExperimentReport verify_single_bounce_lateral(const Domain& d, double eta, double M, double T, long samples,
                                              std::uint64_t seed) {
    auto t0 = Clock::now();
    ExperimentReport rep;
    rep.experiment = "stretching-lateral";
    rep.seed = seed;
    if (d.kind() != DomainKind::Cylinder) throw TrajectoryError("stretching-lateral needs a cylinder");
    double eps_S = 2.0 * d.disk_radius_base() * eta / (M * M * T);
    double chord_bound = 2.0 * d.disk_radius_base() / d.epsilon() * eta / (M * M);
    rep.params = {{"eps", d.epsilon()}, {"L", d.half_length_base()}, {"r", d.disk_radius_base()},
                  {"eta", eta}, {"M", M}, {"T", T}, {"samples", samples}};
    rep.measure("eps_S", eps_S, 0.0, "2 r eta / (M^2 T)");
    bool guaranteed = d.epsilon() < eps_S;
    double L = d.half_length(), R = d.disk_radius();
    Stream master(seed, hash_id(rep.experiment));
    long violations = 0, flights = 0, chord_fail = 0, singular = 0;
    double min_flight = std::numeric_limits<double>::infinity();
    for (long i = 0; i < samples; ++i) {
        Stream rng = master.substream(std::uint64_t(i));
        double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        PhasePoint p;
        p.x = Vec3(rng.uniform(-L, L), R * std::cos(th), R * std::sin(th));
        Vec3 n(0.0, std::cos(th), std::sin(th));
        p.v = sample_outgoing(rng, n, eta, M);
        p.t = rng.uniform(0.0, T);
        auto rec = trace_backwards(d, p, T, rng);
        if (rec.terminated_by == Termination::SingularEdge) ++singular;
        double tprev = p.t;
        bool lateral_prev = true, counted = false;
        for (const auto& ev : rec.events) {
            if (ev.reflection == Reflection::Diffuse || ev.reflection == Reflection::Singular) break;
            if (ev.cls.tag == BoundaryTag::Lateral) {
                if (!counted) {
                    ++violations;
                    counted = true;
                }
                if (lateral_prev) {
                    double fl = tprev - ev.t;
                    ++flights;
                    min_flight = std::min(min_flight, fl);
                    if (fl < chord_bound - 1e-9) ++chord_fail;
                }
                lateral_prev = true;
            } else {
                lateral_prev = false;
            }
            tprev = ev.t;
        }
    }
    rep.counts = {{"samples", samples}, {"violations", violations}, {"lateral_flights", flights},
                  {"chord_bound_failures", chord_fail}, {"singular_edge", singular}};
    rep.measure("chord_time_bound", chord_bound, 0.0, "2 r eps^-1 eta / M^2");
    if (flights) rep.measure("min_lateral_flight_time", min_flight);
    rep.table.columns = {"eps", "eps_S", "samples", "violations", "lateral_flights", "min_flight", "chord_bound"};
    rep.table.add({d.epsilon(), eps_S, double(samples), double(violations), double(flights),
                   flights ? min_flight : std::numeric_limits<double>::infinity(), chord_bound});
    if (guaranteed)
        rep.check("no second lateral collision below eps_S", violations == 0,
                  std::to_string(violations) + " of " + std::to_string(samples));
    rep.check("lateral flight time >= 2 r eps^-1 eta / M^2 - 1e-9", chord_fail == 0,
              std::to_string(flights) + " flights observed");
    rep.params["guaranteed"] = guaranteed;
    rep.seconds = seconds_since(t0);
    return rep;
}

ExperimentReport verify_single_bounce_ball(const Domain& d, double eta, double M, double T, long samples,
                                           std::uint64_t seed) {
    auto t0 = Clock::now();
    ExperimentReport rep;
    rep.experiment = "stretching-ball";
    rep.seed = seed;
    if (d.kind() != DomainKind::Ball) throw TrajectoryError("stretching-ball needs a ball");
    rep.params = {{"eps", d.epsilon()}, {"radius", d.radius_base()}, {"eta", eta}, {"M", M}, {"T", T},
                  {"samples", samples}};
    double R = d.radius();
    Stream master(seed, hash_id(rep.experiment));
    long violations = 0;
    double min_chord = std::numeric_limits<double>::infinity();
    for (long i = 0; i < samples; ++i) {
        Stream rng = master.substream(std::uint64_t(i));
        Vec3 n(rng.normal(), rng.normal(), rng.normal());
        n.normalize();
        PhasePoint p{rng.uniform(0.0, T), R * n, Vec3::Zero()};
        p.v = sample_outgoing(rng, n, eta, M);
        min_chord = std::min(min_chord, d.exit_time(p.x, p.v).t_b);
        auto rec = trace_backwards(d, p, T, rng);
        if (!rec.events.empty()) ++violations;
    }
    // Chord times scale like 1/eps, so the largest safe eps is eps * tau_min / T.
    double eps_emp = d.epsilon() * min_chord / T;
    double c_fit = eps_emp * M * M * T / eta;
    rep.counts = {{"samples", samples}, {"violations", violations}};
    rep.measure("min_chord_time", min_chord);
    rep.measure("eps_R_empirical", eps_emp, 0.0, "eps * min chord / T");
    rep.measure("eps_R_constant", c_fit, 0.0, "eps_R = c eta M^-2 T^-1; chord geometry gives c = 2 r");
    rep.table.columns = {"eps", "samples", "violations", "min_chord_time", "eps_R_empirical", "eps_R_constant"};
    rep.table.add({d.epsilon(), double(samples), double(violations), min_chord, eps_emp, c_fit});
    if (d.epsilon() < eps_emp) rep.check("no second bounce below the empirical eps_R", violations == 0);
    rep.check("fitted constant dominates the chord bound 2 r", c_fit >= 2.0 * d.radius_base() * (1 - 1e-12));
    rep.seconds = seconds_since(t0);
    return rep;
}

namespace {

struct ChainStats {
    double speed_dev = 0, nv_dev = 0, time_dev = 0, arc_dev = 0;
    int events = 0;
    bool broken = false;
    Vec3 last_x = Vec3::Zero();
};

ChainStats run_chain(const Domain& d, const Vec3& x0, const Vec3& v0, int chain_len) {
    // Infinitely long specular copy: only the disk dynamics matter.
    Domain inf = Domain::cylinder(1e9, d.disk_radius_base(), d.epsilon(), Accommodation::constant(0.0));
    ChainStats st;
    double R = d.disk_radius();
    Vec3 n0(0.0, x0[1], x0[2]);
    n0 /= n0.norm();
    double nv0 = n0.dot(v0), speed0 = v0.norm();
    Vec3 x = x0, v = v0;
    double prev_dt = -1, prev_arc = -1;
    for (int j = 0; j < chain_len; ++j) {
        ExitResult ex;
        try {
            ex = inf.exit_time(x, v);
        } catch (const GeometryError&) {
            st.broken = true;
            break;
        }
        if (ex.cls.tag != BoundaryTag::Lateral) {
            st.broken = true;
            break;
        }
        Vec3 vout = reflect_specular(ex.cls.normal, v);
        double nv = ex.cls.normal.dot(vout);
        double arc = std::atan2(x[1] * ex.x_exit[2] - x[2] * ex.x_exit[1], x[1] * ex.x_exit[1] + x[2] * ex.x_exit[2]);
        st.speed_dev = std::max(st.speed_dev, std::abs(vout.norm() - speed0) / speed0);
        st.nv_dev = std::max(st.nv_dev, std::abs(nv - nv0));
        if (prev_dt > 0) {
            st.time_dev = std::max(st.time_dev, std::abs(ex.t_b - prev_dt) / prev_dt);
            // Compare on the circle: a diameter gives +pi and -pi alternately.
            double d = std::remainder(arc - prev_arc, 2.0 * std::numbers::pi);
            st.arc_dev = std::max(st.arc_dev, std::abs(d) * R);
        }
        prev_dt = ex.t_b;
        prev_arc = arc;
        x = ex.x_exit;
        v = vout;
        ++st.events;
    }
    st.last_x = x;
    return st;
}

void chain_checks(ExperimentReport& rep, const ChainStats& st, int chain_len) {
    rep.check("chain not broken by the singular edge", !st.broken && st.events == chain_len);
    rep.check("|v| constant to 1e-12", st.speed_dev <= 1e-12);
    rep.check("n.v constant to 1e-10", st.nv_dev <= 1e-10);
    rep.check("inter-collision times equal to 1e-10 relative", st.time_dev <= 1e-10);
    rep.check("footprint arcs equal", st.arc_dev <= 1e-8);
    rep.measure("max_speed_dev", st.speed_dev);
    rep.measure("max_nv_dev", st.nv_dev);
    rep.measure("max_time_dev", st.time_dev);
    rep.measure("max_arc_dev", st.arc_dev);
}

} // namespace

ExperimentReport verify_circle_chain(const Domain& d, const Vec3& x0, const Vec3& v0, int chain_len) {
    auto t0 = Clock::now();
    ExperimentReport rep;
    rep.experiment = "circle-chain";
    rep.params = {{"eps", d.epsilon()}, {"r", d.disk_radius_base()}, {"chain_len", chain_len},
                  {"x0", {x0[0], x0[1], x0[2]}}, {"v0", {v0[0], v0[1], v0[2]}}};
    auto st = run_chain(d, x0, v0, chain_len);
    chain_checks(rep, st, chain_len);
    rep.counts = {{"events", st.events}};
    rep.table.columns = {"events", "speed_dev", "nv_dev", "time_dev", "arc_dev"};
    rep.table.add({double(st.events), st.speed_dev, st.nv_dev, st.time_dev, st.arc_dev});
    rep.seconds = seconds_since(t0);
    return rep;
}

ExperimentReport verify_circle_chain_random(const Domain& d, int chains, int chain_len, std::uint64_t seed) {
    auto t0 = Clock::now();
    ExperimentReport rep;
    rep.experiment = "circle-chain-random";
    rep.seed = seed;
    rep.params = {{"eps", d.epsilon()}, {"r", d.disk_radius_base()}, {"chains", chains}, {"chain_len", chain_len}};
    Stream master(seed, hash_id(rep.experiment));
    ChainStats worst;
    worst.events = chain_len;
    double R = d.disk_radius();
    rep.table.columns = {"chain", "events", "speed_dev", "nv_dev", "time_dev", "arc_dev"};
    for (int c = 0; c < chains; ++c) {
        Stream rng = master.substream(std::uint64_t(c));
        double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        Vec3 n(0.0, std::cos(th), std::sin(th));
        Vec3 x(0.0, R * n[1], R * n[2]);
        Vec3 v = sample_outgoing(rng, n, 0.05, 3.0);
        auto st = run_chain(d, x, v, chain_len);
        worst.speed_dev = std::max(worst.speed_dev, st.speed_dev);
        worst.nv_dev = std::max(worst.nv_dev, st.nv_dev);
        worst.time_dev = std::max(worst.time_dev, st.time_dev);
        worst.arc_dev = std::max(worst.arc_dev, st.arc_dev);
        worst.broken = worst.broken || st.broken;
        worst.events = std::min(worst.events, st.events);
        rep.table.add({double(c), double(st.events), st.speed_dev, st.nv_dev, st.time_dev, st.arc_dev});
    }
    chain_checks(rep, worst, chain_len);
    rep.counts = {{"chains", chains}};
    rep.seconds = seconds_since(t0);
    return rep;
}

ExperimentReport verify_diffuse_then_lateral_angle(const Domain& d, double eta, double M, long samples,
                                                   std::uint64_t seed) {
    auto t0 = Clock::now();
    ExperimentReport rep;
    rep.experiment = "diffuse-lateral-angle";
    rep.seed = seed;
    rep.params = {{"eps", d.epsilon()}, {"eta", eta}, {"M", M}, {"samples", samples}};
    double L = d.half_length(), R = d.disk_radius();
    Stream master(seed, hash_id(rep.experiment));
    double a_all = std::numeric_limits<double>::infinity(), a_tenth = a_all;
    long used = 0;
    for (long i = 0; i < samples; ++i) {
        Stream rng = master.substream(std::uint64_t(i));
        bool cap1 = rng.uniform() < 0.5;
        Vec3 x = sample_disk(rng, R);
        x[0] = cap1 ? -L : L;
        Vec3 n(cap1 ? -1.0 : 1.0, 0.0, 0.0);
        double rho = std::hypot(x[1], x[2]);
        if (rho == 0.0) continue;
        Vec3 frak_n(0.0, x[1] / rho, x[2] / rho);
        Vec3 v = sample_outgoing(rng, n, 1e-6, M);
        if (std::abs(frak_n.dot(v)) <= eta) continue;
        ExitResult ex;
        try {
            ex = d.exit_time(x, v);
        } catch (const GeometryError&) {
            continue;
        }
        if (ex.cls.tag != BoundaryTag::Lateral) continue;
        double a = std::abs(ex.cls.normal.dot(v));
        ++used;
        a_all = std::min(a_all, a);
        if (i < samples / 10) a_tenth = std::min(a_tenth, a);
    }
    rep.counts = {{"samples", samples}, {"lateral_first_hits", used}};
    rep.measure("A_emp", a_all, std::abs(a_tenth - a_all), "uncertainty = change from first tenth of samples");
    rep.measure("A_emp_tenth", a_tenth);
    // |n(x1).v|^2 = |v^|^2 (1 - r^2/R^2) + (r^2/R^2)(n(x).v)^2 >= eta^2 for a chord from radius r.
    rep.measure("A_closed_form", eta, 0.0, "chord identity, diagnostic");
    rep.table.columns = {"eta", "lateral_first_hits", "A_emp", "A_emp_tenth"};
    rep.table.add({eta, double(used), a_all, a_tenth});
    rep.check("A_emp > 0", used > 0 && a_all > 0.0);
    rep.check("A_emp stable within 10% between 1/10 and all samples",
              used > 0 && std::abs(a_tenth - a_all) <= 0.1 * a_all);
    rep.seconds = seconds_since(t0);
    return rep;
}

Vec3 specular_map(const Domain& d, const Vec3& xs, double s, double r, const Vec3& vstar, bool* bounced) {
    auto ex = d.exit_time(xs, vstar);
    if (ex.t_b >= s - r) {
        if (bounced) *bounced = false;
        return xs - (s - r) * vstar;
    }
    if (bounced) *bounced = true;
    double s1 = s - ex.t_b;
    return ex.x_exit - reflect_specular(ex.cls.normal, vstar) * (s1 - r);
}

JacobianResult jacobian_det(const Domain& d, const Vec3& xs, double s, double r, const Vec3& vstar) {
    JacobianResult out;
    specular_map(d, xs, s, r, vstar, &out.bounced);
    auto fd = [&](double h) {
        Eigen::Matrix3d J;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero();
            e[k] = h;
            J.col(k) = (specular_map(d, xs, s, r, vstar + e) - specular_map(d, xs, s, r, vstar - e)) / (2.0 * h);
        }
        return J.determinant();
    };
    double h = 1e-5 * std::max(1.0, vstar.norm());
    out.det = fd(h);
    out.det_half_step = fd(0.5 * h);
    return out;
}

double epsilon_U(double alpha, double c0, double c1) { return std::abs(c0) * alpha * alpha * alpha / (2.0 * std::abs(c1)); }

ExperimentReport jacobian_check(double t, double s, double r, const std::vector<double>& eps_sweep,
                                double wall_distance, const Vec3& vstar, double alpha) {
    auto t0 = Clock::now();
    ExperimentReport rep;
    rep.experiment = "jacobian";
    rep.params = {{"t", t}, {"s", s}, {"r", r}, {"eps", eps_sweep}, {"wall_distance", wall_distance},
                  {"vstar", {vstar[0], vstar[1], vstar[2]}}, {"alpha", alpha}};
    // Direct map v* -> x - (t - s) v*: a far-away wall keeps it bounce free.
    {
        Domain big = Domain::ball(1.0, 1e-6);
        auto jr = jacobian_det(big, Vec3::Zero(), t, s, vstar);
        double expect = std::pow(t - s, 3);
        rep.measure("direct_det", jr.det);
        rep.check("direct map |det| = |t-s|^3 to machine precision",
                  !jr.bounced && std::abs(std::abs(jr.det) - expect) <= 1e-9 * std::max(1.0, expect));
        auto j0 = jacobian_det(big, Vec3::Zero(), s, s, vstar);
        rep.check("s = r gives det = 0", std::abs(j0.det) <= 1e-12);
    }
    double c0 = std::pow(s - r, 3);
    std::vector<double> xs, ys;
    rep.table.columns = {"eps", "det", "det_half_step", "deviation"};
    bool all_bounced = true, richardson_ok = true;
    for (double e : eps_sweep) {
        Domain d = Domain::ball(1.0, e, Accommodation::constant(0.0));
        Vec3 x(d.radius() - wall_distance, 0.0, 0.0);
        auto jr = jacobian_det(d, x, s, r, vstar);
        all_bounced = all_bounced && jr.bounced;
        if (std::abs(jr.det - jr.det_half_step) > 1e-6 * std::max(1.0, std::abs(jr.det))) richardson_ok = false;
        double dev = std::abs(jr.det - c0);
        xs.push_back(e);
        ys.push_back(dev);
        rep.table.add({e, jr.det, jr.det_half_step, dev});
    }
    rep.check("every sweep configuration has one specular bounce", all_bounced);
    rep.check("finite-difference step halving agrees", richardson_ok);
    // Least squares dev = a + b eps.
    std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += xs[i] / n, my += ys[i] / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    double slope = sxx > 0 ? sxy / sxx : 0.0, icpt = my - slope * mx;
    double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
    rep.measure("C1_slope", slope, 0.0, "|det - (s-r)^3| ~ C1 eps");
    rep.measure("intercept", icpt);
    rep.measure("R2", r2);
    rep.check("|det - (s-r)^3| linear in eps with R^2 > 0.9", n >= 3 && r2 > 0.9 && slope > 0);
    double eU = epsilon_U(alpha, c0, slope);
    rep.measure("eps_U", eU, 0.0, "|C0| alpha^3 / (2 |C1|) with fitted C1");
    if (s - r >= alpha) {
        Domain d = Domain::ball(1.0, 0.5 * eU, Accommodation::constant(0.0));
        Vec3 x(d.radius() - wall_distance, 0.0, 0.0);
        auto jr = jacobian_det(d, x, s, r, vstar);
        rep.check("|det| > |C0| alpha^3 / 2 at eps = eps_U / 2", std::abs(jr.det) > 0.5 * c0 * alpha * alpha * alpha);
    }
    rep.seconds = seconds_since(t0);
    return rep;
}

} // namespace kinetic

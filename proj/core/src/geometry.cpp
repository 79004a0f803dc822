#include "kinetic/geometry.hpp"

#include <cmath>
#include <limits>

namespace kinetic {

const char* to_string(BoundaryTag t) {
    switch (t) {
    case BoundaryTag::Cap1: return "Cap1";
    case BoundaryTag::Cap2: return "Cap2";
    case BoundaryTag::Lateral: return "Lateral";
    case BoundaryTag::SmoothWall: return "SmoothWall";
    case BoundaryTag::SingularEdge: return "SingularEdge";
    }
    return "?";
}

double Accommodation::iota(BoundaryTag tag) const {
    if (mode == Mode::Constant) return iota0;
    switch (tag) {
    case BoundaryTag::Cap1:
    case BoundaryTag::Cap2: return 1.0;
    case BoundaryTag::Lateral: return 0.0;
    default: return 1.0;
    }
}

Domain Domain::ball(double radius_base, double eps, Accommodation acc) {
    if (!(eps > 0.0) || !(radius_base > 0.0))
        throw GeometryError(GeometryError::Code::InvalidDomain, "ball: eps and radius must be positive");
    if (acc.mode != Accommodation::Mode::Constant)
        throw GeometryError(GeometryError::Code::InvalidDomain, "ball: accommodation must be constant");
    if (!(acc.iota0 >= 0.0 && acc.iota0 <= 1.0))
        throw GeometryError(GeometryError::Code::InvalidDomain, "ball: iota0 outside [0,1]");
    Domain d;
    d.kind_ = DomainKind::Ball;
    d.eps_ = eps;
    d.rb_ = radius_base;
    d.acc_ = acc;
    return d;
}

Domain Domain::cylinder(double half_length_base, double disk_radius_base, double eps, Accommodation acc) {
    if (!(eps > 0.0) || !(half_length_base > 0.0) || !(disk_radius_base > 0.0))
        throw GeometryError(GeometryError::Code::InvalidDomain, "cylinder: eps, L, r must be positive");
    if (!(acc.iota0 >= 0.0 && acc.iota0 <= 1.0))
        throw GeometryError(GeometryError::Code::InvalidDomain, "cylinder: iota0 outside [0,1]");
    Domain d;
    d.kind_ = DomainKind::Cylinder;
    d.eps_ = eps;
    d.lb_ = half_length_base;
    d.rb_ = disk_radius_base;
    d.acc_ = acc;
    return d;
}

Domain Domain::rescaled(double eps) const {
    return kind_ == DomainKind::Ball ? ball(rb_, eps, acc_) : cylinder(lb_, rb_, eps, acc_);
}

double Domain::diameter() const {
    if (kind_ == DomainKind::Ball) return 2.0 * radius();
    return 2.0 * std::hypot(half_length(), disk_radius());
}

bool Domain::contains(const Vec3& x) const {
    if (kind_ == DomainKind::Ball) return x.squaredNorm() < radius() * radius();
    double L = half_length(), R = disk_radius();
    return std::abs(x[0]) < L && x[1] * x[1] + x[2] * x[2] < R * R;
}

double Domain::signed_distance(const Vec3& x) const {
    if (kind_ == DomainKind::Ball) return radius() - x.norm();
    double da = half_length() - std::abs(x[0]);
    double dr = disk_radius() - std::hypot(x[1], x[2]);
    if (da >= 0.0 && dr >= 0.0) return std::min(da, dr);
    if (da < 0.0 && dr < 0.0) return -std::hypot(da, dr);
    return std::min(da, dr);
}

BoundaryClass Domain::outward_normal(const Vec3& x) const {
    double tol = boundary_tol();
    if (std::abs(signed_distance(x)) > tol)
        throw GeometryError(GeometryError::Code::NotOnBoundary, "point is not on the boundary");
    BoundaryClass bc;
    if (kind_ == DomainKind::Ball) {
        bc.tag = BoundaryTag::SmoothWall;
        bc.normal = x / x.norm();
        return bc;
    }
    double L = half_length(), R = disk_radius();
    double rho = std::hypot(x[1], x[2]);
    double da = std::abs(L - std::abs(x[0]));
    double dr = std::abs(R - rho);
    double etol = edge_tol();
    if (da <= etol && dr <= etol) {
        bc.tag = BoundaryTag::SingularEdge;
        bc.normal = Vec3(x[0] > 0 ? 1.0 : -1.0, 0.0, 0.0);
        return bc;
    }
    if (da <= dr) {
        bc.tag = x[0] < 0 ? BoundaryTag::Cap1 : BoundaryTag::Cap2;
        bc.normal = Vec3(x[0] < 0 ? -1.0 : 1.0, 0.0, 0.0);
    } else {
        bc.tag = BoundaryTag::Lateral;
        bc.normal = Vec3(0.0, x[1] / rho, x[2] / rho);
    }
    return bc;
}

namespace {

// Positive root of a s^2 + b s + c = 0 with c <= 0, without cancellation.
double positive_root(double a, double b, double c, double disc) {
    double sq = std::sqrt(disc);
    if (b < 0.0) return 0.5 * (-b + sq) / a;
    double q = -0.5 * (b + sq);
    return q == 0.0 ? 0.0 : c / q;
}

} // namespace

double Domain::lateral_root(const Vec3& x, const Vec3& v, bool& hit) const {
    double R = kind_ == DomainKind::Ball ? radius() : disk_radius();
    double a, b, c;
    if (kind_ == DomainKind::Ball) {
        a = v.squaredNorm();
        b = -2.0 * x.dot(v);
        c = x.squaredNorm() - R * R;
    } else {
        a = v[1] * v[1] + v[2] * v[2];
        b = -2.0 * (x[1] * v[1] + x[2] * v[2]);
        c = x[1] * x[1] + x[2] * x[2] - R * R;
    }
    hit = false;
    if (a <= 0.0) return std::numeric_limits<double>::infinity();
    // Points on the wall (within tolerance) count as being on it.
    if (c > 0.0) {
        if (c > 2.0 * R * boundary_tol())
            throw GeometryError(GeometryError::Code::NotOnBoundary, "exit_time: point outside domain");
        c = 0.0;
    }
    double disc = b * b - 4.0 * a * c;
    // Grazing: the discriminant vanishes to round-off only for rays tangent
    // to the wall through a wall point.
    if (disc < 1e-14 * 4.0 * a * a * R * R) {
        if (c == 0.0 && b >= 0.0) {
            hit = false;
            return std::numeric_limits<double>::infinity();
        }
        disc = std::max(disc, 0.0);
    }
    double s = positive_root(a, b, c, disc);
    if (c == 0.0 && s <= 0.0) {
        // Sitting on the wall and leaving it backwards: the other root.
        s = -b / a;
        if (s <= 0.0) {
            hit = true;
            return 0.0;
        }
    }
    hit = true;
    return s;
}

ExitResult Domain::exit_time(const Vec3& x, const Vec3& v) const {
    if (v.squaredNorm() == 0.0)
        throw GeometryError(GeometryError::Code::ZeroVelocity, "exit_time: zero velocity");
    ExitResult r;
    bool lat_hit = false;
    double s_lat = lateral_root(x, v, lat_hit);
    if (kind_ == DomainKind::Ball) {
        if (!lat_hit)
            throw GeometryError(GeometryError::Code::NumericalDegenerate, "exit_time: grazing ray in ball");
        r.t_b = s_lat;
        r.x_exit = x - s_lat * v;
        r.x_exit *= radius() / r.x_exit.norm();
        r.cls.tag = BoundaryTag::SmoothWall;
        r.cls.normal = r.x_exit / radius();
        return r;
    }
    double L = half_length(), R = disk_radius();
    double s_cap = std::numeric_limits<double>::infinity();
    BoundaryTag cap = BoundaryTag::Cap1;
    if (v[0] > 0.0) {
        s_cap = std::max(0.0, (x[0] + L) / v[0]);
        cap = BoundaryTag::Cap1;
    } else if (v[0] < 0.0) {
        s_cap = std::max(0.0, (x[0] - L) / v[0]);
        cap = BoundaryTag::Cap2;
    }
    // A point on a cap moving backwards into the domain: skip the zero root.
    if (s_cap == 0.0 && std::abs(std::abs(x[0]) - L) <= boundary_tol()) {
        bool leaving = (cap == BoundaryTag::Cap1 && x[0] < 0) || (cap == BoundaryTag::Cap2 && x[0] > 0);
        if (!leaving) s_cap = std::numeric_limits<double>::infinity();
    }
    if (!lat_hit && !std::isfinite(s_cap))
        throw GeometryError(GeometryError::Code::NumericalDegenerate, "exit_time: no boundary crossing");
    double etol = edge_tol();
    if (s_cap <= s_lat) {
        r.t_b = s_cap;
        r.x_exit = x - s_cap * v;
        r.x_exit[0] = cap == BoundaryTag::Cap1 ? -L : L;
        r.cls.tag = cap;
        r.cls.normal = Vec3(cap == BoundaryTag::Cap1 ? -1.0 : 1.0, 0.0, 0.0);
        if (std::abs(R - std::hypot(r.x_exit[1], r.x_exit[2])) <= etol) r.cls.tag = BoundaryTag::SingularEdge;
    } else {
        r.t_b = s_lat;
        r.x_exit = x - s_lat * v;
        double rho = std::hypot(r.x_exit[1], r.x_exit[2]);
        r.x_exit[1] *= R / rho;
        r.x_exit[2] *= R / rho;
        r.cls.tag = BoundaryTag::Lateral;
        r.cls.normal = Vec3(0.0, r.x_exit[1] / R, r.x_exit[2] / R);
        if (std::abs(L - std::abs(r.x_exit[0])) <= etol) {
            r.cls.tag = BoundaryTag::SingularEdge;
            r.cls.normal = Vec3(r.x_exit[0] > 0 ? 1.0 : -1.0, 0.0, 0.0);
        }
    }
    return r;
}

} // namespace kinetic

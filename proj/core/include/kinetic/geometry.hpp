#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <stdexcept>
#include <string>

namespace kinetic {

using Vec3 = Eigen::Vector3d;

enum class DomainKind { Ball, Cylinder };
enum class BoundaryTag { Cap1, Cap2, Lateral, SmoothWall, SingularEdge };

const char* to_string(BoundaryTag t);

class GeometryError : public std::runtime_error {
public:
    enum class Code { InvalidDomain, NotOnBoundary, ZeroVelocity, NumericalDegenerate };
    GeometryError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
    Code code;
};

struct Accommodation {
    enum class Mode { Constant, CapsDiffuseLateralSpecular };
    Mode mode = Mode::Constant;
    double iota0 = 1.0;

    static Accommodation constant(double iota0) { return {Mode::Constant, iota0}; }
    static Accommodation caps_diffuse() { return {Mode::CapsDiffuseLateralSpecular, 1.0}; }

    double iota(BoundaryTag tag) const;
};

struct BoundaryClass {
    BoundaryTag tag = BoundaryTag::SmoothWall;
    Vec3 normal = Vec3::Zero();
};

struct ExitResult {
    double t_b = 0.0;
    Vec3 x_exit = Vec3::Zero();
    BoundaryClass cls;
};

// Rescaled domain: a ball of radius r/eps, or (-L/eps, L/eps) x disk(rd/eps)
// with x[0] the axial coordinate.
class Domain {
public:
    static Domain ball(double radius_base, double eps, Accommodation acc = Accommodation::constant(1.0));
    static Domain cylinder(double half_length_base, double disk_radius_base, double eps,
                           Accommodation acc = Accommodation::caps_diffuse());

    DomainKind kind() const { return kind_; }
    double epsilon() const { return eps_; }
    double radius_base() const { return rb_; }
    double half_length_base() const { return lb_; }
    double disk_radius_base() const { return rb_; }
    const Accommodation& accommodation() const { return acc_; }

    // Effective (rescaled) sizes.
    double radius() const { return rb_ / eps_; }
    double half_length() const { return lb_ / eps_; }
    double disk_radius() const { return rb_ / eps_; }
    double diameter() const;
    double boundary_tol() const { return 1e-9 * diameter(); }
    double edge_tol() const { return 1e-7 * disk_radius(); }

    bool contains(const Vec3& x) const;
    // Positive inside, distance to the boundary.
    double signed_distance(const Vec3& x) const;
    double iota(BoundaryTag tag) const { return acc_.iota(tag); }

    BoundaryClass outward_normal(const Vec3& x) const;

    // Backwards exit: t_b = inf{s > 0 : x - s v leaves the domain}. x may sit
    // on the boundary; the zero root is then skipped.
    ExitResult exit_time(const Vec3& x, const Vec3& v) const;

    // Same domain with eps replaced.
    Domain rescaled(double eps) const;

private:
    Domain() = default;
    double lateral_root(const Vec3& x, const Vec3& v, bool& hit) const;

    DomainKind kind_ = DomainKind::Ball;
    double eps_ = 1.0, rb_ = 1.0, lb_ = 1.0;
    Accommodation acc_;
};

} // namespace kinetic

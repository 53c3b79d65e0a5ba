#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace corvo {

/// Rigid transform p_out = rotation * p_in + translation.
/// Rotation is stored as a unit quaternion and re-normalized after every
/// composition so long chains do not drift off the group.
struct PoseSE3 {
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static PoseSE3 identity() { return {}; }

    static PoseSE3 from_matrix(const Eigen::Matrix3d& R, const Eigen::Vector3d& t) {
        PoseSE3 p;
        p.rotation = Eigen::Quaterniond(R).normalized();
        p.translation = t;
        return p;
    }

    Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }

    Eigen::Matrix4d matrix() const {
        Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
        m.topLeftCorner<3, 3>() = rotation_matrix();
        m.topRightCorner<3, 1>() = translation;
        return m;
    }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

    PoseSE3 inverse() const {
        PoseSE3 inv;
        inv.rotation = rotation.conjugate();
        inv.translation = -(inv.rotation * translation);
        return inv;
    }

    bool is_valid(double tol = 1e-9) const {
        return std::abs(rotation.norm() - 1.0) <= tol && translation.allFinite();
    }
};

/// a then b is applied as a∘b: (a∘b)(p) = a(b(p)).
inline PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
    PoseSE3 out;
    out.rotation = (a.rotation * b.rotation).normalized();
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

/// Angle of R_a * R_b^T — the natural metric on rotations, in radians.
inline double geodesic_angle(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    const double c = ((a * b.transpose()).trace() - 1.0) * 0.5;
    return std::acos(std::clamp(c, -1.0, 1.0));
}

inline double geodesic_angle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
    return geodesic_angle(a.toRotationMatrix(), b.toRotationMatrix());
}

/// Angle between two direction vectors, safe against rounding at the poles.
inline double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double d = a.normalized().dot(b.normalized());
    return std::acos(std::clamp(d, -1.0, 1.0));
}

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

/// Timestamped camera-to-world pose.
struct TrajectoryEntry {
    double timestamp = 0.0;
    PoseSE3 pose;
};

using Trajectory = std::vector<TrajectoryEntry>;

}  // namespace corvo

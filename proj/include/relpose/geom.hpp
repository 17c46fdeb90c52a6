#pragma once

#include <Eigen/Core>

#include "relpose/errors.hpp"

namespace relpose {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Unit quaternion (w, x, y, z) encoding a 3D rotation. q and -q encode the
// same rotation; canonical form keeps w >= 0 (first nonzero component
// positive when w == 0).
struct Quaternion {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    double norm() const;
    double dot(const Quaternion& other) const;
    static Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }
};

// World-to-camera pose: x_cam = rotation * x_world + translation.
struct AbsolutePose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 center() const { return -rotation.transpose() * translation; }
};

// Relative pose between two cameras: x_2 = R(dq) * x_1 + s * dt for some
// s > 0. dt is a unit direction expressed in camera-2 coordinates; the scale
// of the baseline is not recoverable from two views.
struct RelativePose {
    Quaternion dq;
    Vec3 dt = Vec3::UnitZ();
};

// Scales q to unit length and canonicalizes the hemisphere.
// Throws NearZeroQuaternion when |q| <= 1e-12.
Quaternion quat_normalize(const Quaternion& q);

Mat3 quat_to_rotation(const Quaternion& q);

// Inverse of quat_to_rotation; result is canonical.
// Throws InvalidRotation when R is not orthonormal within 1e-6.
Quaternion rotation_to_quat(const Mat3& r);

bool is_rotation(const Mat3& r, double tol = 1e-6);

// Relative pose of camera j with respect to camera i:
//   R_ij = R_j * R_i^T,  t_ij = t_j - R_ij * t_i  (then normalized).
// Throws DegenerateBaseline when the camera centers coincide within 1e-9.
RelativePose relative_pose(const AbsolutePose& pose_i, const AbsolutePose& pose_j);

// Relative orientation error in degrees: 2*acos(|<q_est, q_gt>|), computed on
// normalized inputs, range [0, 180].
double roe_deg(const Quaternion& q_est, const Quaternion& q_gt);

// Relative translation error in degrees: angle between the two directions,
// range [0, 180]. Throws NearZeroTranslation when a norm is <= 1e-12.
double rte_deg(const Vec3& t_est, const Vec3& t_gt);

}  // namespace relpose

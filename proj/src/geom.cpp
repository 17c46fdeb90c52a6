#include "relpose/geom.hpp"

#include <algorithm>
#include <cmath>

namespace relpose {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kRadToDeg = 180.0 / kPi;
}  // namespace

double Quaternion::norm() const {
    return std::sqrt(w * w + x * x + y * y + z * z);
}

double Quaternion::dot(const Quaternion& other) const {
    return w * other.w + x * other.x + y * other.y + z * other.z;
}

Quaternion quat_normalize(const Quaternion& q) {
    const double n = q.norm();
    if (n <= 1e-12) throw NearZeroQuaternion("geom: quaternion norm below 1e-12");
    Quaternion u{q.w / n, q.x / n, q.y / n, q.z / n};
    // Pick the canonical hemisphere representative.
    bool flip = u.w < 0.0;
    if (u.w == 0.0) {
        if (u.x != 0.0) flip = u.x < 0.0;
        else if (u.y != 0.0) flip = u.y < 0.0;
        else flip = u.z < 0.0;
    }
    if (flip) {
        u.w = -u.w;
        u.x = -u.x;
        u.y = -u.y;
        u.z = -u.z;
    }
    return u;
}

Mat3 quat_to_rotation(const Quaternion& in) {
    const Quaternion q = quat_normalize(in);
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

bool is_rotation(const Mat3& r, double tol) {
    const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Quaternion rotation_to_quat(const Mat3& r) {
    if (!is_rotation(r)) throw InvalidRotation("geom: matrix is not a rotation within 1e-6");
    // Shepperd's method: branch on the largest diagonal combination.
    const double trace = r(0, 0) + r(1, 1) + r(2, 2);
    Quaternion q;
    if (trace > 0.0) {
        double s = std::sqrt(trace + 1.0) * 2.0;
        q.w = 0.25 * s;
        q.x = (r(2, 1) - r(1, 2)) / s;
        q.y = (r(0, 2) - r(2, 0)) / s;
        q.z = (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        q.w = (r(2, 1) - r(1, 2)) / s;
        q.x = 0.25 * s;
        q.y = (r(0, 1) + r(1, 0)) / s;
        q.z = (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        q.w = (r(0, 2) - r(2, 0)) / s;
        q.x = (r(0, 1) + r(1, 0)) / s;
        q.y = 0.25 * s;
        q.z = (r(1, 2) + r(2, 1)) / s;
    } else {
        double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        q.w = (r(1, 0) - r(0, 1)) / s;
        q.x = (r(0, 2) + r(2, 0)) / s;
        q.y = (r(1, 2) + r(2, 1)) / s;
        q.z = 0.25 * s;
    }
    return quat_normalize(q);
}

RelativePose relative_pose(const AbsolutePose& pose_i, const AbsolutePose& pose_j) {
    const Mat3 r_ij = pose_j.rotation * pose_i.rotation.transpose();
    const Vec3 t_ij = pose_j.translation - r_ij * pose_i.translation;
    const double n = t_ij.norm();
    if (n <= 1e-9) throw DegenerateBaseline("geom: camera centers coincide within 1e-9");
    return RelativePose{rotation_to_quat(r_ij), t_ij / n};
}

double roe_deg(const Quaternion& q_est, const Quaternion& q_gt) {
    const Quaternion a = quat_normalize(q_est);
    const Quaternion b = quat_normalize(q_gt);
    const double d = std::clamp(std::abs(a.dot(b)), 0.0, 1.0);
    return 2.0 * std::acos(d) * kRadToDeg;
}

double rte_deg(const Vec3& t_est, const Vec3& t_gt) {
    const double ne = t_est.norm(), ng = t_gt.norm();
    if (ne <= 1e-12 || ng <= 1e-12)
        throw NearZeroTranslation("geom: translation norm below 1e-12");
    const double d = std::clamp(t_est.dot(t_gt) / (ne * ng), -1.0, 1.0);
    return std::acos(d) * kRadToDeg;
}

}  // namespace relpose

#pragma once

#include <cmath>

#include "relpose/geom.hpp"
#include "relpose/prng.hpp"

namespace relpose::testutil {

inline Quaternion random_unit_quaternion(SplitRng& rng) {
    Quaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    while (q.norm() < 1e-6) q = Quaternion{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    return quat_normalize(q);
}

inline Vec3 random_vec3(SplitRng& rng, double scale = 1.0) {
    return scale * Vec3(rng.normal(), rng.normal(), rng.normal());
}

inline AbsolutePose random_pose(SplitRng& rng, double translation_scale = 1.0) {
    return AbsolutePose{quat_to_rotation(random_unit_quaternion(rng)),
                        random_vec3(rng, translation_scale)};
}

// Rotation-matrix route to the orientation error, used as an oracle against
// the quaternion inner-product implementation.
inline double roe_trace_oracle_deg(const Quaternion& a, const Quaternion& b) {
    const Mat3 ra = quat_to_rotation(a);
    const Mat3 rb = quat_to_rotation(b);
    const double arg = ((ra * rb.transpose()).trace() - 1.0) / 2.0;
    return std::acos(std::clamp(arg, -1.0, 1.0)) * 180.0 / 3.14159265358979323846;
}

}  // namespace relpose::testutil

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "relpose/geom.hpp"

namespace relpose {

// Zero-skew pinhole model. Focal lengths and principal point in pixels; the
// image spans [0, width] x [0, height] in continuous pixel coordinates.
struct CameraIntrinsics {
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    int width = 1, height = 1;
};

struct Projection {
    Eigen::Vector2d pixel;
    double depth = 0.0;
    bool behind_camera = false;  // depth <= 0; pixel is still reported
};

Projection project(const CameraIntrinsics& k, const AbsolutePose& pose, const Vec3& x_world);

// Oriented plane n . x + offset = 0; points inside the frustum satisfy
// signed_distance <= 0.
struct Plane {
    Vec3 normal = Vec3::UnitZ();  // unit length
    double offset = 0.0;

    double signed_distance(const Vec3& p) const { return normal.dot(p) + offset; }
};

// Convex hexahedron bounded by near/far planes and the four side planes of a
// pinhole view. Corners 0..3 are the near face, 4..7 the far face, both in
// image-corner order (0,0), (w,0), (w,h), (0,h).
struct Frustum {
    Vec3 apex = Vec3::Zero();  // camera center, world frame
    std::array<Plane, 6> planes;
    std::array<Vec3, 8> corners;

    bool contains(const Vec3& p, double tol = 0.0) const;
};

// Throws InvalidRange unless 0 < near < far.
Frustum build_frustum(const CameraIntrinsics& k, const AbsolutePose& pose,
                      double near, double far);

// Exact separating-axis test over both polytopes' face normals and pairwise
// edge cross products.
bool frustums_overlap(const Frustum& a, const Frustum& b);

// Signed decision margin of the SAT test: smallest projection overlap when
// the frustums intersect, largest projection gap (negated decision) when they
// do not. |margin| close to zero means a borderline configuration.
double frustum_overlap_margin(const Frustum& a, const Frustum& b);

struct SceneCamera {
    std::int64_t id = 0;
    CameraIntrinsics intrinsics;
    AbsolutePose pose;
};

// All index pairs i < j whose frustums overlap. At most n(n-1)/2 pairs.
std::vector<std::pair<int, int>> overlapping_pairs(const std::vector<SceneCamera>& cameras,
                                                   double near, double far);

}  // namespace relpose

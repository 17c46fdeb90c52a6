#include "relpose/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relpose {

Projection project(const CameraIntrinsics& k, const AbsolutePose& pose, const Vec3& x_world) {
    const Vec3 xc = pose.rotation * x_world + pose.translation;
    Projection p;
    p.depth = xc.z();
    p.behind_camera = xc.z() <= 0.0;
    p.pixel = Eigen::Vector2d(k.fx * xc.x() / xc.z() + k.cx,
                              k.fy * xc.y() / xc.z() + k.cy);
    return p;
}

bool Frustum::contains(const Vec3& p, double tol) const {
    for (const Plane& pl : planes)
        if (pl.signed_distance(p) > tol) return false;
    return true;
}

Frustum build_frustum(const CameraIntrinsics& k, const AbsolutePose& pose,
                      double near, double far) {
    if (!(near > 0.0) || !(near < far))
        throw InvalidRange("camera: frustum requires 0 < near < far");

    const Mat3 r_t = pose.rotation.transpose();
    Frustum f;
    f.apex = pose.center();

    // Rays through the four image corners, unit z in the camera frame.
    const double u[4] = {0.0, static_cast<double>(k.width), static_cast<double>(k.width), 0.0};
    const double v[4] = {0.0, 0.0, static_cast<double>(k.height), static_cast<double>(k.height)};
    std::array<Vec3, 4> rays;
    for (int i = 0; i < 4; ++i) {
        const Vec3 dir_cam((u[i] - k.cx) / k.fx, (v[i] - k.cy) / k.fy, 1.0);
        rays[i] = r_t * dir_cam;
    }
    for (int i = 0; i < 4; ++i) {
        f.corners[i] = f.apex + near * rays[i];
        f.corners[4 + i] = f.apex + far * rays[i];
    }

    const Vec3 view_dir = r_t * Vec3::UnitZ();
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& c : f.corners) centroid += c;
    centroid /= 8.0;

    auto make_plane = [&](const Vec3& normal, const Vec3& point) {
        Plane pl;
        pl.normal = normal.normalized();
        pl.offset = -pl.normal.dot(point);
        if (pl.signed_distance(centroid) > 0.0) {
            pl.normal = -pl.normal;
            pl.offset = -pl.offset;
        }
        return pl;
    };

    f.planes[0] = make_plane(view_dir, f.corners[0]);   // near
    f.planes[1] = make_plane(view_dir, f.corners[4]);   // far
    for (int i = 0; i < 4; ++i) {                       // sides through the apex
        const Vec3 n = rays[i].cross(rays[(i + 1) % 4]);
        f.planes[2 + i] = make_plane(n, f.apex);
    }
    return f;
}

namespace {

struct Interval {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
};

Interval project_onto(const Frustum& f, const Vec3& axis) {
    Interval iv;
    for (const Vec3& c : f.corners) {
        const double d = axis.dot(c);
        iv.lo = std::min(iv.lo, d);
        iv.hi = std::max(iv.hi, d);
    }
    return iv;
}

// Unique edge directions of a frustum: the four apex rays plus the four near
// face edges (far face edges are parallel to the near ones).
std::array<Vec3, 8> edge_directions(const Frustum& f) {
    std::array<Vec3, 8> dirs;
    for (int i = 0; i < 4; ++i) {
        dirs[i] = (f.corners[4 + i] - f.corners[i]).normalized();
        dirs[4 + i] = (f.corners[(i + 1) % 4] - f.corners[i]).normalized();
    }
    return dirs;
}

// Smallest projection overlap across all SAT axes; negative if some axis
// separates (then it is minus the largest gap found).
double sat_margin(const Frustum& a, const Frustum& b) {
    double min_overlap = std::numeric_limits<double>::infinity();
    double max_gap = 0.0;
    bool separated = false;

    auto test_axis = [&](const Vec3& axis) {
        const double len = axis.norm();
        if (len < 1e-12) return;  // degenerate cross product
        const Vec3 u = axis / len;
        const Interval ia = project_onto(a, u);
        const Interval ib = project_onto(b, u);
        const double overlap = std::min(ia.hi, ib.hi) - std::max(ia.lo, ib.lo);
        if (overlap < 0.0) {
            separated = true;
            max_gap = std::max(max_gap, -overlap);
        } else {
            min_overlap = std::min(min_overlap, overlap);
        }
    };

    for (const Plane& p : a.planes) test_axis(p.normal);
    for (const Plane& p : b.planes) test_axis(p.normal);
    const auto da = edge_directions(a);
    const auto db = edge_directions(b);
    for (const Vec3& ea : da)
        for (const Vec3& eb : db) test_axis(ea.cross(eb));

    return separated ? -max_gap : min_overlap;
}

}  // namespace

double frustum_overlap_margin(const Frustum& a, const Frustum& b) {
    return sat_margin(a, b);
}

bool frustums_overlap(const Frustum& a, const Frustum& b) {
    return sat_margin(a, b) >= 0.0;
}

std::vector<std::pair<int, int>> overlapping_pairs(const std::vector<SceneCamera>& cameras,
                                                   double near, double far) {
    std::vector<Frustum> frustums;
    frustums.reserve(cameras.size());
    for (const SceneCamera& c : cameras)
        frustums.push_back(build_frustum(c.intrinsics, c.pose, near, far));

    std::vector<std::pair<int, int>> pairs;
    const int n = static_cast<int>(cameras.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (frustums_overlap(frustums[i], frustums[j])) pairs.emplace_back(i, j);
    return pairs;
}

}  // namespace relpose

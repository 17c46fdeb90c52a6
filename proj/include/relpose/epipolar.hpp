#pragma once

#include <cstdint>
#include <vector>

#include "relpose/camera.hpp"
#include "relpose/geom.hpp"

namespace relpose {

// Pixel-coordinate matches between two views of the same scene.
struct CorrespondenceSet {
    // (u1, v1) in image 1 matched to (u2, v2) in image 2
    struct Match {
        double u1 = 0, v1 = 0, u2 = 0, v2 = 0;
    };
    std::vector<Match> matches;
    CameraIntrinsics k1, k2;
    std::vector<bool> true_inliers;  // optional ground-truth mask (empty if unknown)
};

// A match mapped to the unit focal plane of each camera.
struct NormalizedMatch {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

// x = (u - cx)/fx, y = (v - cy)/fy per camera.
std::vector<NormalizedMatch> normalize_points(const CorrespondenceSet& c);

// E = [t]x R up to scale; kept on the essential manifold with singular
// values (1, 1, 0), so the Frobenius norm is sqrt(2).
using EssentialMatrix = Mat3;

// Projects an arbitrary 3x3 matrix to the closest essential matrix.
EssentialMatrix project_to_essential(const Mat3& e);

// Least-squares 8-point solve over >= 8 normalized matches, followed by
// manifold projection. Throws DegenerateSample when the constraint matrix
// drops rank.
EssentialMatrix estimate_essential(const std::vector<NormalizedMatch>& matches);

// Squared first-order geometric residual of the epipolar constraint.
// Returns +inf when the denominator falls below 1e-30.
double sampson_error(const EssentialMatrix& e, const NormalizedMatch& m);

struct RansacResult {
    EssentialMatrix essential;
    std::vector<bool> inliers;
    int iterations = 0;
};

struct RansacConfig {
    double threshold = 1e-3;  // normalized-unit distance; sqrt(sampson) is compared
    double confidence = 0.999;
    int max_iters = 10000;
    std::uint64_t seed = 0;
};

// Best-inlier-count 8-point hypothesis search with the adaptive iteration
// bound N = log(1-p)/log(1-w^8), refit on all inliers at the end.
// Deterministic for a fixed seed; equal scores keep the earlier hypothesis.
RansacResult ransac_essential(const CorrespondenceSet& c, const RansacConfig& cfg = {});

// Linear (DLT) triangulation in normalized coordinates; returns the world
// point and its depth in each camera. Throws RaysParallel when the system is
// rank deficient.
struct Triangulated {
    Vec3 point = Vec3::Zero();
    double depth1 = 0.0, depth2 = 0.0;
};
Triangulated triangulate(const AbsolutePose& pose1, const AbsolutePose& pose2,
                         const NormalizedMatch& m);

// Four-fold decomposition of E with cheirality voting over the inliers;
// throws CheiralityAmbiguous when two candidates tie on positive-depth count.
RelativePose decompose_essential(const EssentialMatrix& e,
                                 const std::vector<NormalizedMatch>& inliers);

// Full baseline: normalize, RANSAC, decompose.
RelativePose estimate_relative_pose(const CorrespondenceSet& c, const RansacConfig& cfg = {});

}  // namespace relpose

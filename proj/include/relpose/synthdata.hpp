#pragma once

#include <string>
#include <utility>

#include "relpose/camera.hpp"
#include "relpose/epipolar.hpp"
#include "relpose/image.hpp"
#include "relpose/manifest.hpp"

namespace relpose {

// Textured infinite plane observed by camera 1 from its canonical pose.
// Points on the plane satisfy normal . X + distance = 0 (camera-1 frame); the
// camera center sits on the positive side, so `distance` > 0 is the distance
// from the origin to the plane.
struct PlanarScene {
    Vec3 normal = -Vec3::UnitZ();
    double distance = 2.0;
    std::uint64_t texture_seed = 0;
};

// Procedural texture at plane coordinates (a, b): multi-scale value noise
// plus a darkened grid pattern. Channels in [0, 1]; defined for all reals.
Vec3 texture_rgb(const PlanarScene& scene, double a, double b);

struct PoseSampleParams {
    double max_rotation_deg = 30.0;
    double max_baseline_ratio = 0.3;  // of the plane distance
    int max_attempts = 100;
};

// Camera 1 canonical (identity), camera 2 rotated by a uniform random
// axis-angle within the bound and translated within the baseline ball, with
// the plane kept fully in view of both cameras (rejection sampling).
// Throws SamplingExhausted after max_attempts rejections.
std::pair<AbsolutePose, AbsolutePose> sample_pair_pose(std::uint64_t seed,
                                                       const PoseSampleParams& params,
                                                       const PlanarScene& scene,
                                                       const CameraIntrinsics& k);

// Renders one view by intersecting each pixel ray with the plane.
// Throws PlaneBehindCamera if any pixel ray misses the plane in front.
Image render_view(const PlanarScene& scene, const AbsolutePose& pose,
                  const CameraIntrinsics& k, int width, int height);

struct RenderedPair {
    Image img1, img2;
    RelativePose ground_truth;
};

RenderedPair render_pair(const PlanarScene& scene, const AbsolutePose& pose1,
                         const AbsolutePose& pose2, const CameraIntrinsics& k, int size);

// Plane-point correspondences: image-1 pixels back-projected onto the plane
// and reprojected into view 2, with Gaussian pixel noise and a fixed count of
// uniform-pixel outliers (round(outlier_ratio * count), recorded in the
// ground-truth inlier mask).
CorrespondenceSet make_correspondences(const PlanarScene& scene, const AbsolutePose& pose1,
                                       const AbsolutePose& pose2, const CameraIntrinsics& k,
                                       int count, double noise_px, double outlier_ratio,
                                       std::uint64_t seed);

// Same contract, but scene points drawn from an axis-aligned 3D box, which
// avoids the planar degeneracy for essential-matrix estimation.
CorrespondenceSet make_correspondences_box(const Vec3& box_center, const Vec3& box_half,
                                           const AbsolutePose& pose1, const AbsolutePose& pose2,
                                           const CameraIntrinsics& k, int count,
                                           double noise_px, double outlier_ratio,
                                           std::uint64_t seed);

struct DatasetConfig {
    int image_size = 64;
    double plane_distance = 2.0;
    PoseSampleParams pose;

    CameraIntrinsics intrinsics() const {
        CameraIntrinsics k;
        k.fx = k.fy = image_size;
        k.cx = k.cy = image_size / 2.0;
        k.width = k.height = image_size;
        return k;
    }
};

struct DatasetResult {
    PairManifest train, val;
    std::string train_manifest_path, val_manifest_path;
};

// Writes PPM pairs plus train/val JSONL manifests under out_dir. Every record
// derives from its own stored seed, so ground truth can be revalidated by
// resampling the poses. Deterministic for a fixed seed.
DatasetResult build_dataset(int n_pairs, double split_ratio, const DatasetConfig& cfg,
                            std::uint64_t seed, const std::string& out_dir);

// The per-record scene and poses behind a manifest record seed; used by
// build_dataset and by ground-truth revalidation.
struct RecordGeometry {
    PlanarScene scene;
    AbsolutePose pose1, pose2;
};
RecordGeometry record_geometry(std::uint64_t record_seed, const DatasetConfig& cfg);

}  // namespace relpose

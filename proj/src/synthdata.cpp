#include "relpose/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include <Eigen/Geometry>

#include "relpose/prng.hpp"

namespace relpose {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double hash_unit(std::uint64_t seed, std::uint64_t salt, std::int64_t ix, std::int64_t iy) {
    std::uint64_t h = SplitRng::mix64(seed + 0x51ED270F1E);
    h = SplitRng::mix64(h ^ (salt * 0xA24BAED4963EE407ULL));
    h = SplitRng::mix64(h ^ (static_cast<std::uint64_t>(ix) * 0x9FB21C651E98DF25ULL));
    h = SplitRng::mix64(h ^ (static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4FULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// One octave of value noise: bilinear smoothstep interpolation on a unit
// lattice of hashed values.
double value_noise(std::uint64_t seed, std::uint64_t salt, double a, double b) {
    const double fa = std::floor(a), fb = std::floor(b);
    const auto ix = static_cast<std::int64_t>(fa);
    const auto iy = static_cast<std::int64_t>(fb);
    const double ta = smoothstep(a - fa), tb = smoothstep(b - fb);
    const double v00 = hash_unit(seed, salt, ix, iy);
    const double v10 = hash_unit(seed, salt, ix + 1, iy);
    const double v01 = hash_unit(seed, salt, ix, iy + 1);
    const double v11 = hash_unit(seed, salt, ix + 1, iy + 1);
    const double top = v00 + (v10 - v00) * ta;
    const double bot = v01 + (v11 - v01) * ta;
    return top + (bot - top) * tb;
}

double octave_noise(std::uint64_t seed, std::uint64_t salt, double a, double b,
                    int octaves, double base_freq) {
    double sum = 0.0, amp = 1.0, amp_total = 0.0, freq = base_freq;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(seed, salt * 16 + static_cast<std::uint64_t>(o), a * freq,
                                 b * freq);
        amp_total += amp;
        amp *= 0.55;
        freq *= 2.0;
    }
    return sum / amp_total;
}

// Orthonormal in-plane basis; plane origin is the foot point closest to the
// camera-1 center.
struct PlaneFrame {
    Vec3 origin, e1, e2;
};

PlaneFrame plane_frame(const PlanarScene& scene) {
    PlaneFrame f;
    f.origin = -scene.distance * scene.normal;
    const Vec3 pick = std::abs(scene.normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    f.e1 = scene.normal.cross(pick).normalized();
    f.e2 = scene.normal.cross(f.e1).normalized();
    return f;
}

// Ray-plane intersection parameter; negative or infinite when the ray does
// not hit the plane in front of its origin.
double ray_plane_param(const PlanarScene& scene, const Vec3& origin, const Vec3& dir) {
    const double denom = scene.normal.dot(dir);
    if (std::abs(denom) < 1e-15) return -1.0;
    return -(scene.normal.dot(origin) + scene.distance) / denom;
}

Vec3 pixel_ray_cam(const CameraIntrinsics& k, double u, double v) {
    return Vec3((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
}

// The plane must be hit in front of the camera along every corner ray.
bool plane_fully_visible(const PlanarScene& scene, const AbsolutePose& pose,
                         const CameraIntrinsics& k) {
    const Vec3 center = pose.center();
    if (scene.normal.dot(center) + scene.distance <= 1e-9) return false;
    const Mat3 r_t = pose.rotation.transpose();
    const double us[4] = {0.0, static_cast<double>(k.width), static_cast<double>(k.width), 0.0};
    const double vs[4] = {0.0, 0.0, static_cast<double>(k.height), static_cast<double>(k.height)};
    for (int i = 0; i < 4; ++i) {
        const Vec3 dir = r_t * pixel_ray_cam(k, us[i], vs[i]);
        if (ray_plane_param(scene, center, dir) <= 0.0) return false;
    }
    return true;
}

}  // namespace

Vec3 texture_rgb(const PlanarScene& scene, double a, double b) {
    const double lum = octave_noise(scene.texture_seed, 0, a, b, 4, 0.9);
    Vec3 rgb;
    for (int c = 0; c < 3; ++c) {
        const double tint =
            octave_noise(scene.texture_seed, static_cast<std::uint64_t>(c) + 1, a, b, 2, 2.3);
        rgb(c) = 0.15 + 0.55 * lum + 0.30 * tint;
    }
    // Dark grid lines give the texture unambiguous orientation cues.
    const double ga = a * 0.85 - std::floor(a * 0.85);
    const double gb = b * 0.85 - std::floor(b * 0.85);
    if (ga < 0.06 || gb < 0.06) rgb *= 0.35;
    return rgb.cwiseMax(0.0).cwiseMin(1.0);
}

std::pair<AbsolutePose, AbsolutePose> sample_pair_pose(std::uint64_t seed,
                                                       const PoseSampleParams& params,
                                                       const PlanarScene& scene,
                                                       const CameraIntrinsics& k) {
    if (!(params.max_rotation_deg > 0.0) || params.max_rotation_deg > 90.0)
        throw InvalidRange("synthdata: max rotation must lie in (0, 90] degrees");
    if (!(params.max_baseline_ratio > 0.0))
        throw InvalidRange("synthdata: max baseline ratio must be positive");

    const AbsolutePose pose1{};  // canonical, facing the plane
    if (!plane_fully_visible(scene, pose1, k))
        throw PlaneBehindCamera("synthdata: plane not visible from the canonical camera");

    SplitRng rng = SplitRng(seed).split(0x706f7365);  // "pose" stream
    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
        // Uniform random rotation axis, angle uniform within the bound.
        const double z = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 axis(rxy * std::cos(phi), rxy * std::sin(phi), z);
        const double angle = rng.uniform(0.0, params.max_rotation_deg * kPi / 180.0);
        const Mat3 rot = Eigen::AngleAxisd(angle, axis).toRotationMatrix();

        // Camera-2 center uniform in the baseline ball.
        const double cz = rng.uniform(-1.0, 1.0);
        const double cphi = rng.uniform(0.0, 2.0 * kPi);
        const double cxy = std::sqrt(std::max(0.0, 1.0 - cz * cz));
        const double radius =
            params.max_baseline_ratio * scene.distance * std::cbrt(rng.uniform());
        const Vec3 center = radius * Vec3(cxy * std::cos(cphi), cxy * std::sin(cphi), cz);
        if (center.norm() < 1e-9 * scene.distance) continue;  // degenerate baseline

        const AbsolutePose pose2{rot, -rot * center};
        if (!plane_fully_visible(scene, pose2, k)) continue;
        return {pose1, pose2};
    }
    throw SamplingExhausted("synthdata: no valid pose pair after " +
                            std::to_string(params.max_attempts) + " attempts");
}

Image render_view(const PlanarScene& scene, const AbsolutePose& pose,
                  const CameraIntrinsics& k, int width, int height) {
    const PlaneFrame frame = plane_frame(scene);
    const Vec3 center = pose.center();
    const Mat3 r_t = pose.rotation.transpose();

    Image img(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const Vec3 dir = r_t * pixel_ray_cam(k, x + 0.5, y + 0.5);
            const double s = ray_plane_param(scene, center, dir);
            if (s <= 0.0)
                throw PlaneBehindCamera("synthdata: pixel ray misses the plane in front");
            const Vec3 hit = center + s * dir;
            const Vec3 rel = hit - frame.origin;
            const Vec3 rgb = texture_rgb(scene, frame.e1.dot(rel), frame.e2.dot(rel));
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = static_cast<std::uint8_t>(std::lround(rgb(c) * 255.0));
        }
    return img;
}

RenderedPair render_pair(const PlanarScene& scene, const AbsolutePose& pose1,
                         const AbsolutePose& pose2, const CameraIntrinsics& k, int size) {
    RenderedPair out;
    out.img1 = render_view(scene, pose1, k, size, size);
    out.img2 = render_view(scene, pose2, k, size, size);
    out.ground_truth = relative_pose(pose1, pose2);
    return out;
}

namespace {

CorrespondenceSet finish_correspondences(std::vector<CorrespondenceSet::Match> matches,
                                         const CameraIntrinsics& k, double noise_px,
                                         double outlier_ratio, SplitRng& rng) {
    const std::size_t count = matches.size();
    if (noise_px > 0.0)
        for (auto& m : matches) {
            m.u1 += noise_px * rng.normal();
            m.v1 += noise_px * rng.normal();
            m.u2 += noise_px * rng.normal();
            m.v2 += noise_px * rng.normal();
        }

    std::vector<bool> inlier(count, true);
    const auto n_outliers =
        static_cast<std::size_t>(std::llround(outlier_ratio * static_cast<double>(count)));
    // Partial Fisher-Yates pick of outlier slots.
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i;
    for (std::size_t i = 0; i < n_outliers; ++i)
        std::swap(idx[i], idx[i + rng.below(count - i)]);
    for (std::size_t i = 0; i < n_outliers; ++i) {
        auto& m = matches[idx[i]];
        m.u2 = rng.uniform(0.0, k.width);
        m.v2 = rng.uniform(0.0, k.height);
        inlier[idx[i]] = false;
    }

    CorrespondenceSet set;
    set.matches = std::move(matches);
    set.k1 = k;
    set.k2 = k;
    set.true_inliers = std::move(inlier);
    return set;
}

}  // namespace

CorrespondenceSet make_correspondences(const PlanarScene& scene, const AbsolutePose& pose1,
                                       const AbsolutePose& pose2, const CameraIntrinsics& k,
                                       int count, double noise_px, double outlier_ratio,
                                       std::uint64_t seed) {
    if (count < 8) throw InsufficientMatches("synthdata: correspondence count must be >= 8");
    SplitRng rng = SplitRng(seed).split(0x6d61746368);  // "match" stream

    const Vec3 c1 = pose1.center();
    const Mat3 r1_t = pose1.rotation.transpose();
    std::vector<CorrespondenceSet::Match> matches;
    matches.reserve(static_cast<std::size_t>(count));

    long attempts = 0;
    const long max_attempts = 200L * count;
    while (matches.size() < static_cast<std::size_t>(count)) {
        if (++attempts > max_attempts)
            throw PlaneBehindCamera("synthdata: plane not visible enough to sample matches");
        const double u1 = rng.uniform(0.0, k.width);
        const double v1 = rng.uniform(0.0, k.height);
        const Vec3 dir = r1_t * pixel_ray_cam(k, u1, v1);
        const double s = ray_plane_param(scene, c1, dir);
        if (s <= 0.0) continue;
        const Vec3 x_world = c1 + s * dir;
        const Projection p2 = project(k, pose2, x_world);
        if (p2.behind_camera || p2.pixel.x() < 0.0 || p2.pixel.x() > k.width ||
            p2.pixel.y() < 0.0 || p2.pixel.y() > k.height)
            continue;
        matches.push_back({u1, v1, p2.pixel.x(), p2.pixel.y()});
    }
    return finish_correspondences(std::move(matches), k, noise_px, outlier_ratio, rng);
}

CorrespondenceSet make_correspondences_box(const Vec3& box_center, const Vec3& box_half,
                                           const AbsolutePose& pose1, const AbsolutePose& pose2,
                                           const CameraIntrinsics& k, int count,
                                           double noise_px, double outlier_ratio,
                                           std::uint64_t seed) {
    if (count < 8) throw InsufficientMatches("synthdata: correspondence count must be >= 8");
    SplitRng rng = SplitRng(seed).split(0x626f78);  // "box" stream

    std::vector<CorrespondenceSet::Match> matches;
    matches.reserve(static_cast<std::size_t>(count));
    long attempts = 0;
    const long max_attempts = 200L * count;
    while (matches.size() < static_cast<std::size_t>(count)) {
        if (++attempts > max_attempts)
            throw PlaneBehindCamera("synthdata: box not visible enough to sample matches");
        const Vec3 x_world = box_center + Vec3(box_half.x() * rng.uniform(-1.0, 1.0),
                                               box_half.y() * rng.uniform(-1.0, 1.0),
                                               box_half.z() * rng.uniform(-1.0, 1.0));
        const Projection p1 = project(k, pose1, x_world);
        const Projection p2 = project(k, pose2, x_world);
        if (p1.behind_camera || p2.behind_camera) continue;
        if (p1.pixel.x() < 0.0 || p1.pixel.x() > k.width || p1.pixel.y() < 0.0 ||
            p1.pixel.y() > k.height)
            continue;
        if (p2.pixel.x() < 0.0 || p2.pixel.x() > k.width || p2.pixel.y() < 0.0 ||
            p2.pixel.y() > k.height)
            continue;
        matches.push_back({p1.pixel.x(), p1.pixel.y(), p2.pixel.x(), p2.pixel.y()});
    }
    return finish_correspondences(std::move(matches), k, noise_px, outlier_ratio, rng);
}

RecordGeometry record_geometry(std::uint64_t record_seed, const DatasetConfig& cfg) {
    RecordGeometry g;
    g.scene.normal = -Vec3::UnitZ();
    g.scene.distance = cfg.plane_distance;
    g.scene.texture_seed = SplitRng(record_seed).split(0x746578).key();  // "tex"
    const auto poses = sample_pair_pose(record_seed, cfg.pose, g.scene, cfg.intrinsics());
    g.pose1 = poses.first;
    g.pose2 = poses.second;
    return g;
}

DatasetResult build_dataset(int n_pairs, double split_ratio, const DatasetConfig& cfg,
                            std::uint64_t seed, const std::string& out_dir) {
    if (n_pairs < 2) throw InvalidRange("synthdata: dataset needs at least 2 pairs");
    if (!(split_ratio > 0.0) || !(split_ratio < 1.0))
        throw InvalidRange("synthdata: split ratio must lie in (0, 1)");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "images", ec);
    if (ec) throw IoFailure("synthdata: cannot create '" + out_dir + "/images'");

    const SplitRng root(seed);
    const CameraIntrinsics k = cfg.intrinsics();

    PairManifest all;
    for (int i = 0; i < n_pairs; ++i) {
        const std::uint64_t record_seed = root.split(static_cast<std::uint64_t>(i)).key();
        const RecordGeometry g = record_geometry(record_seed, cfg);
        const RenderedPair pair = render_pair(g.scene, g.pose1, g.pose2, k, cfg.image_size);

        char name_a[64], name_b[64];
        std::snprintf(name_a, sizeof name_a, "images/pair_%06d_a.ppm", i);
        std::snprintf(name_b, sizeof name_b, "images/pair_%06d_b.ppm", i);
        write_ppm(pair.img1, (fs::path(out_dir) / name_a).string());
        write_ppm(pair.img2, (fs::path(out_dir) / name_b).string());

        all.records.push_back(PairRecord{name_a, name_b, pair.ground_truth, record_seed});
    }

    const auto n_train = static_cast<std::size_t>(
        std::clamp<long long>(std::llround(split_ratio * n_pairs), 1, n_pairs - 1));

    DatasetResult result;
    result.train.records.assign(all.records.begin(),
                                all.records.begin() + static_cast<std::ptrdiff_t>(n_train));
    result.val.records.assign(all.records.begin() + static_cast<std::ptrdiff_t>(n_train),
                              all.records.end());
    result.train_manifest_path = (fs::path(out_dir) / "train.jsonl").string();
    result.val_manifest_path = (fs::path(out_dir) / "val.jsonl").string();
    save_manifest(result.train, result.train_manifest_path);
    save_manifest(result.val, result.val_manifest_path);
    return result;
}

}  // namespace relpose

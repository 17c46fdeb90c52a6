#include "relpose/epipolar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "relpose/prng.hpp"

namespace relpose {

std::vector<NormalizedMatch> normalize_points(const CorrespondenceSet& c) {
    std::vector<NormalizedMatch> out;
    out.reserve(c.matches.size());
    for (const auto& m : c.matches)
        out.push_back(NormalizedMatch{(m.u1 - c.k1.cx) / c.k1.fx, (m.v1 - c.k1.cy) / c.k1.fy,
                                      (m.u2 - c.k2.cx) / c.k2.fx, (m.v2 - c.k2.cy) / c.k2.fy});
    return out;
}

EssentialMatrix project_to_essential(const Mat3& e) {
    Eigen::JacobiSVD<Mat3> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // Equal non-zero singular values; scale fixed so ||E||_F = sqrt(2).
    return svd.matrixU() * Eigen::Vector3d(1.0, 1.0, 0.0).asDiagonal() *
           svd.matrixV().transpose();
}

EssentialMatrix estimate_essential(const std::vector<NormalizedMatch>& matches) {
    const int n = static_cast<int>(matches.size());
    if (n < 8)
        throw InsufficientMatches("epipolar: 8-point solver needs >= 8 matches, got " +
                                  std::to_string(n));

    Eigen::Matrix<double, Eigen::Dynamic, 9> a(n, 9);
    for (int i = 0; i < n; ++i) {
        const auto& m = matches[static_cast<std::size_t>(i)];
        a.row(i) << m.x2 * m.x1, m.x2 * m.y1, m.x2, m.y2 * m.x1, m.y2 * m.y1, m.y2, m.x1,
            m.y1, 1.0;
    }

    Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 9>> svd(
        a, Eigen::ComputeFullV | Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(7) < 1e-10 * sv(0))
        throw DegenerateSample("epipolar: epipolar constraint matrix rank below 8");

    const Eigen::Matrix<double, 9, 1> e = svd.matrixV().col(8);
    Mat3 raw;
    raw << e(0), e(1), e(2), e(3), e(4), e(5), e(6), e(7), e(8);
    return project_to_essential(raw);
}

double sampson_error(const EssentialMatrix& e, const NormalizedMatch& m) {
    const Vec3 x1(m.x1, m.y1, 1.0);
    const Vec3 x2(m.x2, m.y2, 1.0);
    const Vec3 ex1 = e * x1;
    const Vec3 etx2 = e.transpose() * x2;
    const double num = x2.dot(ex1);
    const double den = ex1(0) * ex1(0) + ex1(1) * ex1(1) + etx2(0) * etx2(0) + etx2(1) * etx2(1);
    if (den < 1e-30) return std::numeric_limits<double>::infinity();
    return num * num / den;
}

namespace {

int count_inliers(const EssentialMatrix& e, const std::vector<NormalizedMatch>& matches,
                  double sq_threshold, std::vector<bool>* mask) {
    int count = 0;
    if (mask) mask->assign(matches.size(), false);
    for (std::size_t i = 0; i < matches.size(); ++i)
        if (sampson_error(e, matches[i]) <= sq_threshold) {
            ++count;
            if (mask) (*mask)[i] = true;
        }
    return count;
}

}  // namespace

RansacResult ransac_essential(const CorrespondenceSet& c, const RansacConfig& cfg) {
    constexpr int kSampleSize = 8;
    const std::size_t n = c.matches.size();
    if (n < kSampleSize)
        throw InsufficientMatches("epipolar: RANSAC needs >= 8 matches, got " +
                                  std::to_string(n));

    const std::vector<NormalizedMatch> normalized = normalize_points(c);
    const double sq_threshold = cfg.threshold * cfg.threshold;

    SplitRng rng = SplitRng(cfg.seed).split(0x72616e736163);  // "ransac" stream
    std::vector<std::size_t> picks(kSampleSize);
    std::vector<NormalizedMatch> sample(kSampleSize);

    bool have_model = false;
    EssentialMatrix best_e = EssentialMatrix::Zero();
    int best_count = -1;
    double required = cfg.max_iters;

    int iter = 0;
    for (; iter < cfg.max_iters && iter < required; ++iter) {
        // Sample 8 distinct indices.
        for (int k = 0; k < kSampleSize; ++k) {
            std::size_t candidate;
            bool fresh;
            do {
                candidate = rng.below(n);
                fresh = true;
                for (int j = 0; j < k; ++j)
                    if (picks[static_cast<std::size_t>(j)] == candidate) fresh = false;
            } while (!fresh);
            picks[static_cast<std::size_t>(k)] = candidate;
            sample[static_cast<std::size_t>(k)] = normalized[candidate];
        }

        EssentialMatrix e;
        try {
            e = estimate_essential(sample);
        } catch (const DegenerateSample&) {
            continue;
        }

        const int count = count_inliers(e, normalized, sq_threshold, nullptr);
        if (count > best_count) {
            best_count = count;
            best_e = e;
            have_model = true;
            // Adaptive stop: N = log(1-p) / log(1-w^s)
            const double w = static_cast<double>(count) / static_cast<double>(n);
            const double denom = std::log(1.0 - std::pow(w, kSampleSize));
            if (denom < 0.0)
                required = std::min<double>(cfg.max_iters,
                                            std::ceil(std::log(1.0 - cfg.confidence) / denom));
        }
    }

    if (!have_model)
        throw NoModelFound("epipolar: every RANSAC sample was degenerate");

    RansacResult result;
    result.iterations = iter;
    std::vector<bool> mask;
    count_inliers(best_e, normalized, sq_threshold, &mask);

    // Refit on the full inlier set, then recompute the mask under the refit.
    std::vector<NormalizedMatch> inlier_matches;
    for (std::size_t i = 0; i < n; ++i)
        if (mask[i]) inlier_matches.push_back(normalized[i]);
    if (inlier_matches.size() >= kSampleSize) {
        try {
            best_e = estimate_essential(inlier_matches);
            count_inliers(best_e, normalized, sq_threshold, &mask);
        } catch (const DegenerateSample&) {
            // keep the hypothesis model
        }
    }

    result.essential = best_e;
    result.inliers = std::move(mask);
    return result;
}

Triangulated triangulate(const AbsolutePose& pose1, const AbsolutePose& pose2,
                         const NormalizedMatch& m) {
    Eigen::Matrix<double, 3, 4> p1, p2;
    p1.leftCols<3>() = pose1.rotation;
    p1.col(3) = pose1.translation;
    p2.leftCols<3>() = pose2.rotation;
    p2.col(3) = pose2.translation;

    Eigen::Matrix4d a;
    a.row(0) = m.x1 * p1.row(2) - p1.row(0);
    a.row(1) = m.y1 * p1.row(2) - p1.row(1);
    a.row(2) = m.x2 * p2.row(2) - p2.row(0);
    a.row(3) = m.y2 * p2.row(2) - p2.row(1);

    Eigen::JacobiSVD<Eigen::Matrix4d> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(2) < 1e-12 * sv(0))
        throw RaysParallel("epipolar: triangulation system rank deficient");

    const Eigen::Vector4d x = svd.matrixV().col(3);
    const double norm_xyz = x.head<3>().norm();
    if (std::abs(x(3)) < 1e-12 * std::max(norm_xyz, 1.0))
        throw RaysParallel("epipolar: triangulated point at infinity");

    Triangulated out;
    out.point = x.head<3>() / x(3);
    out.depth1 = (pose1.rotation * out.point + pose1.translation).z();
    out.depth2 = (pose2.rotation * out.point + pose2.translation).z();
    return out;
}

RelativePose decompose_essential(const EssentialMatrix& e,
                                 const std::vector<NormalizedMatch>& inliers) {
    if (inliers.empty())
        throw InsufficientMatches("epipolar: decomposition needs at least one inlier");

    Eigen::JacobiSVD<Mat3> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    Mat3 v = svd.matrixV();
    if (u.determinant() < 0.0) u.col(2) *= -1.0;
    if (v.determinant() < 0.0) v.col(2) *= -1.0;

    Mat3 w;
    w << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    const Mat3 r1 = u * w * v.transpose();
    const Mat3 r2 = u * w.transpose() * v.transpose();
    const Vec3 t = u.col(2);

    const AbsolutePose identity{};
    struct Candidate {
        Mat3 r;
        Vec3 t;
        int votes = 0;
    };
    std::array<Candidate, 4> candidates{Candidate{r1, t}, Candidate{r1, -t},
                                        Candidate{r2, t}, Candidate{r2, -t}};

    for (Candidate& cand : candidates) {
        const AbsolutePose pose2{cand.r, cand.t};
        for (const NormalizedMatch& m : inliers) {
            try {
                const Triangulated tri = triangulate(identity, pose2, m);
                if (tri.depth1 > 0.0 && tri.depth2 > 0.0) ++cand.votes;
            } catch (const RaysParallel&) {
                // no vote from this match
            }
        }
    }

    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (candidates[static_cast<std::size_t>(i)].votes >
            candidates[static_cast<std::size_t>(best)].votes)
            best = i;
    int ties = 0;
    for (const Candidate& cand : candidates)
        if (cand.votes == candidates[static_cast<std::size_t>(best)].votes) ++ties;
    if (ties > 1)
        throw CheiralityAmbiguous("epipolar: positive-depth vote tied across candidates");

    const Candidate& winner = candidates[static_cast<std::size_t>(best)];
    return RelativePose{rotation_to_quat(winner.r), winner.t.normalized()};
}

RelativePose estimate_relative_pose(const CorrespondenceSet& c, const RansacConfig& cfg) {
    const RansacResult r = ransac_essential(c, cfg);
    const std::vector<NormalizedMatch> normalized = normalize_points(c);
    std::vector<NormalizedMatch> inliers;
    for (std::size_t i = 0; i < normalized.size(); ++i)
        if (r.inliers[i]) inliers.push_back(normalized[i]);
    return decompose_essential(r.essential, inliers);
}

}  // namespace relpose

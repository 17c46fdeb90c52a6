#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relpose/geom.hpp"
#include "test_util.hpp"

using namespace relpose;
using testutil::random_pose;
using testutil::random_unit_quaternion;
using testutil::random_vec3;
using testutil::roe_trace_oracle_deg;

TEST_CASE("quat_normalize scales and canonicalizes") {
    const Quaternion a = quat_normalize({2, 0, 0, 0});
    CHECK(a.w == doctest::Approx(1.0));
    CHECK(a.x == 0.0);

    const Quaternion b = quat_normalize({-1, 0, 0, 0});
    CHECK(b.w == doctest::Approx(1.0));

    const Quaternion c = quat_normalize({1, 1, 1, 1});
    CHECK(c.w == doctest::Approx(0.5));
    CHECK(c.x == doctest::Approx(0.5));
    CHECK(c.y == doctest::Approx(0.5));
    CHECK(c.z == doctest::Approx(0.5));

    // w == 0: hemisphere decided by the first nonzero component
    const Quaternion d = quat_normalize({0, -3, 0, 0});
    CHECK(d.x == doctest::Approx(1.0));

    CHECK_THROWS_AS(quat_normalize({1e-13, 0, 0, 0}), NearZeroQuaternion);
}

TEST_CASE("quaternion to rotation round trip") {
    CHECK((quat_to_rotation(Quaternion::identity()) - Mat3::Identity()).norm() == 0.0);

    const double s = std::sqrt(2.0) / 2.0;
    Mat3 rz90;
    rz90 << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    CHECK((quat_to_rotation({s, 0, 0, s}) - rz90).cwiseAbs().maxCoeff() < 1e-12);

    SplitRng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const Quaternion q = random_unit_quaternion(rng);
        const Quaternion back = rotation_to_quat(quat_to_rotation(q));
        CHECK(std::abs(back.w - q.w) < 1e-9);
        CHECK(std::abs(back.x - q.x) < 1e-9);
        CHECK(std::abs(back.y - q.y) < 1e-9);
        CHECK(std::abs(back.z - q.z) < 1e-9);
    }

    Mat3 bad = Mat3::Identity();
    bad(0, 1) = 0.01;
    CHECK_THROWS_AS(rotation_to_quat(bad), InvalidRotation);
}

TEST_CASE("relative_pose basics") {
    const AbsolutePose identity{};
    CHECK_THROWS_AS(relative_pose(identity, identity), DegenerateBaseline);

    AbsolutePose moved{};
    moved.translation = Vec3(1, 0, 0);
    const RelativePose rel = relative_pose(identity, moved);
    CHECK(rel.dq.w == doctest::Approx(1.0));
    CHECK(rel.dt.isApprox(Vec3(1, 0, 0), 1e-12));
}

TEST_CASE("relative_pose maps points between camera frames") {
    SplitRng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const AbsolutePose pi = random_pose(rng);
        const AbsolutePose pj = random_pose(rng);
        if ((pi.center() - pj.center()).norm() < 1e-6) continue;
        const RelativePose rel = relative_pose(pi, pj);
        const Mat3 r_ij = quat_to_rotation(rel.dq);

        const double s = (pj.translation - r_ij * pi.translation).dot(rel.dt);
        for (int p = 0; p < 5; ++p) {
            const Vec3 x_world = random_vec3(rng, 3.0);
            const Vec3 xi = pi.rotation * x_world + pi.translation;
            const Vec3 xj = pj.rotation * x_world + pj.translation;
            CHECK((xj - (r_ij * xi + s * rel.dt)).norm() < 1e-9);
        }

        // pair swapped: rotations must be mutual inverses
        const RelativePose back = relative_pose(pj, pi);
        CHECK((quat_to_rotation(back.dq) * r_ij - Mat3::Identity()).cwiseAbs().maxCoeff() <
              1e-9);
    }
}

TEST_CASE("roe identities and oracle agreement") {
    SplitRng rng(3);
    const Quaternion q = random_unit_quaternion(rng);
    CHECK(roe_deg(q, q) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(roe_deg(q, {-q.w, -q.x, -q.y, -q.z}) == doctest::Approx(0.0).epsilon(1e-12));

    const double s = std::sqrt(2.0) / 2.0;
    CHECK(roe_deg(Quaternion::identity(), {s, 0, 0, s}) == doctest::Approx(90.0).epsilon(1e-9));

    for (int i = 0; i < 2000; ++i) {
        const Quaternion a = random_unit_quaternion(rng);
        const Quaternion b = random_unit_quaternion(rng);
        CHECK(std::abs(roe_deg(a, b) - roe_trace_oracle_deg(a, b)) < 1e-6);
        CHECK(roe_deg(a, b) == doctest::Approx(roe_deg(b, a)).epsilon(1e-12));
    }

    // invariant to positive rescaling
    const Quaternion scaled{3 * q.w, 3 * q.x, 3 * q.y, 3 * q.z};
    CHECK(roe_deg(scaled, q) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rte identities") {
    const Vec3 t(0.3, -0.2, 0.9);
    CHECK(rte_deg(t, t) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rte_deg(Vec3(1, 0, 0), Vec3(0, 1, 0)) == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(rte_deg(t, -t) == doctest::Approx(180.0).epsilon(1e-9));
    CHECK(rte_deg(5.0 * t, t) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(rte_deg(Vec3::Zero(), t), NearZeroTranslation);
}

#include <doctest.h>

#include <random>

#include "mvdepth/geometry.hpp"
#include "mvdepth/synth.hpp"
#include "test_util.hpp"

using namespace mvd;
using testutil::random_pose;
using testutil::ramp_image;
using testutil::test_camera;

namespace {

// Independent route for H u: lift the reference pixel onto the plane, move
// it into the source camera, project.
Eigen::Vector2d project_via_plane(const CameraIntrinsics& K, const Pose& pose,
                                  double d_n, const Eigen::Vector2d& u) {
  const Eigen::Vector3d p = backproject(u, d_n, K);
  const PixelProjection proj = project(p, K, pose);
  return proj.pixel;
}

Eigen::Vector2d apply_homography(const Eigen::Matrix3d& H,
                                 const Eigen::Vector2d& u) {
  const Eigen::Vector3d v = H * Eigen::Vector3d(u.x(), u.y(), 1.0);
  return {v.x() / v.z(), v.y() / v.z()};
}

}  // namespace

TEST_CASE("homography: identity pose gives identity up to scale") {
  const CameraIntrinsics K = test_camera();
  const Eigen::Matrix3d H = homography_for_plane(K, Pose::identity(), 1.7);
  const Eigen::Matrix3d N = H / H(2, 2);
  CHECK((N - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("homography: matches point-wise projection for pure translation") {
  const CameraIntrinsics K(100, 100, 80, 60, 160, 120);
  Pose pose;
  pose.translation = {0, 0, -0.5};
  const double d_n = 2.0;
  const Eigen::Matrix3d H = homography_for_plane(K, pose, d_n);

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ux(0.0, 159.0), uy(0.0, 119.0);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector2d u(ux(rng), uy(rng));
    const Eigen::Vector2d expected = project_via_plane(K, pose, d_n, u);
    const Eigen::Vector2d got = apply_homography(H, u);
    CHECK((got - expected).norm() < 1e-9);
  }
}

TEST_CASE("homography: infinite-depth limit is the pure-rotation homography") {
  const CameraIntrinsics K = test_camera();
  std::mt19937 rng(3);
  const Pose pose = random_pose(rng, 0.3, 0.4);
  const Eigen::Matrix3d H = homography_for_plane(K, pose, 1e9);
  const Eigen::Matrix3d Hrot = K.matrix() * pose.rotation * K.inverse_matrix();
  const Eigen::Matrix3d N = H / H(2, 2);
  const Eigen::Matrix3d Nrot = Hrot / Hrot(2, 2);
  CHECK((N - Nrot).cwiseAbs().maxCoeff() / Nrot.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("homography: rejects bad inputs") {
  const CameraIntrinsics K = test_camera();
  CHECK_THROWS_AS(homography_for_plane(K, Pose::identity(), -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(homography_for_plane(K, Pose::identity(),
                                       std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
  Pose bad;
  bad.rotation(0, 0) = 2.0;
  CHECK_THROWS_AS(homography_for_plane(K, bad, 1.0), std::invalid_argument);
}

TEST_CASE("homography composition agrees with the projection oracle") {
  const CameraIntrinsics K = test_camera();
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ux(10.0, 149.0), uy(10.0, 109.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Pose pose = random_pose(rng, 0.15, 0.2);
    const double d_n = 1.0 + trial * 0.37;
    const Eigen::Matrix3d H = homography_for_plane(K, pose, d_n);
    for (int i = 0; i < 5; ++i) {
      const Eigen::Vector2d u(ux(rng), uy(rng));
      const Eigen::Vector2d expected = project_via_plane(K, pose, d_n, u);
      const Eigen::Vector2d got = apply_homography(H, u);
      CHECK((got - expected).norm() < 1e-8);
    }
  }
}

TEST_CASE("warp: identity homography is bit-exact with full coverage") {
  const Image src = ramp_image(24, 18);
  const WarpedImage w = warp_to_reference_plane(src, Eigen::Matrix3d::Identity());
  CHECK(w.image.data == src.data);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) CHECK(w.is_covered(x, y));
}

TEST_CASE("warp: integer translation samples exactly") {
  const Image src = ramp_image(30, 20);
  Eigen::Matrix3d H = Eigen::Matrix3d::Identity();
  H(0, 2) = 3.0;  // output(x, y) = source(x + 3, y)
  const WarpedImage w = warp_to_reference_plane(src, H);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      if (x + 3 <= src.width - 1) {
        CHECK(w.is_covered(x, y));
        CHECK(w.image.at(x, y) == src.at(x + 3, y));
      } else {
        CHECK(!w.is_covered(x, y));
      }
    }
  }
}

TEST_CASE("warp: rejects a singular homography") {
  const Image src = ramp_image(8, 8);
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  CHECK_THROWS_AS(warp_to_reference_plane(src, H), std::invalid_argument);
}

TEST_CASE("warp: plane-induced warp reproduces the reference image") {
  const CameraIntrinsics K = test_camera();
  const double d_star = 2.5;
  const Scene scene = scenes::fronto_plane(d_star);
  const Pose ref_pose = Pose::identity();
  const Pose src_pose = look_at({0.12, 0.0, 0.0}, {0.12, 0.0, d_star});

  const Image ref = render(scene, K, ref_pose).color;
  const Image src = render(scene, K, src_pose).color;

  const Pose rel = relative_pose(ref_pose, src_pose);
  const Eigen::Matrix3d H = homography_for_plane(K, rel, d_star);
  const WarpedImage w = warp_to_reference_plane(src, H);

  double err = 0.0;
  size_t n = 0;
  for (int y = 0; y < K.height; ++y) {
    for (int x = 0; x < K.width; ++x) {
      if (!w.is_covered(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        err += std::abs(ref.at(x, y, c) - w.image.at(x, y, c));
        ++n;
      }
    }
  }
  REQUIRE(n > 0);
  CHECK(err / n < 1e-3);
}

TEST_CASE("warp is linear in the source image") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  Image a(20, 16, 1), b(20, 16, 1);
  for (auto& v : a.data) v = u(rng);
  for (auto& v : b.data) v = u(rng);
  Image mix(20, 16, 1);
  const float ca = 0.25f, cb = 0.5f;
  for (size_t i = 0; i < mix.data.size(); ++i)
    mix.data[i] = ca * a.data[i] + cb * b.data[i];

  Eigen::Matrix3d H;
  H << 1.01, 0.02, -0.4, -0.015, 0.99, 0.3, 1e-4, -2e-4, 1.0;
  const WarpedImage wa = warp_to_reference_plane(a, H);
  const WarpedImage wb = warp_to_reference_plane(b, H);
  const WarpedImage wm = warp_to_reference_plane(mix, H);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 20; ++x) {
      if (!wm.is_covered(x, y)) continue;
      CHECK(wm.image.at(x, y) ==
            doctest::Approx(ca * wa.image.at(x, y) + cb * wb.image.at(x, y))
                .epsilon(1e-5));
    }
  }
}

TEST_CASE("warp coverage never grows when the source shrinks") {
  const Image big = ramp_image(28, 22);
  Image small(24, 18, 1);
  for (int y = 0; y < small.height; ++y)
    for (int x = 0; x < small.width; ++x) small.at(x, y) = big.at(x, y);

  Eigen::Matrix3d H;
  H << 0.97, 0.03, 1.2, -0.02, 1.02, -0.8, 2e-4, 1e-4, 1.0;
  const WarpedImage wb = warp_to_reference_plane(big, H);
  const WarpedImage ws = warp_to_reference_plane(small, H);
  for (int y = 0; y < small.height; ++y)
    for (int x = 0; x < small.width; ++x)
      if (ws.is_covered(x, y)) CHECK(wb.is_covered(x, y));
}

TEST_CASE("backproject/project: principal ray and hand-checked pixel") {
  const CameraIntrinsics K(100, 100, 80, 60, 160, 120);
  const Eigen::Vector3d p = backproject({80, 60}, 2.0, K);
  CHECK(p.x() == doctest::Approx(0.0));
  CHECK(p.y() == doctest::Approx(0.0));
  CHECK(p.z() == doctest::Approx(2.0));

  const PixelProjection proj = project({1, 0, 4}, K, Pose::identity());
  CHECK(proj.in_front);
  CHECK(proj.pixel.x() == doctest::Approx(105.0).epsilon(1e-12));
  CHECK(proj.pixel.y() == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(proj.depth == doctest::Approx(4.0));
}

TEST_CASE("backproject/project: round trip is exact to 1e-9 px") {
  const CameraIntrinsics K = test_camera();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 159.0), uy(0.0, 119.0),
      ud(0.2, 50.0);
  double max_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector2d q(ux(rng), uy(rng));
    const double d = ud(rng);
    const PixelProjection proj =
        project(backproject(q, d, K), K, Pose::identity());
    max_err = std::max(max_err, (proj.pixel - q).norm());
    CHECK(proj.depth == doctest::Approx(d).epsilon(1e-12));
  }
  CHECK(max_err < 1e-9);
}

TEST_CASE("project flags points behind the camera") {
  const CameraIntrinsics K = test_camera();
  const PixelProjection proj = project({0, 0, -1}, K, Pose::identity());
  CHECK(!proj.in_front);
}

TEST_CASE("pose validation and composition") {
  std::mt19937 rng(29);
  const Pose a = random_pose(rng, 0.5, 1.0);
  const Pose b = random_pose(rng, 0.5, 1.0);
  a.validate();
  const Pose ab = a.compose(b);
  const Eigen::Vector3d p(0.3, -0.2, 1.5);
  CHECK((ab.apply(p) - a.apply(b.apply(p))).norm() < 1e-12);
  const Pose inv = a.inverse();
  CHECK((inv.apply(a.apply(p)) - p).norm() < 1e-12);

  // relative_pose maps reference-frame points into the source frame.
  const Eigen::Vector3d pw(0.1, 0.4, 2.0);
  const Pose rel = relative_pose(a, b);
  CHECK((rel.apply(a.apply(pw)) - b.apply(pw)).norm() < 1e-12);
}

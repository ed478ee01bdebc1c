#include "support/oracles.hpp"
#include "support/shapes.hpp"

#include "vats/spatial_index.hpp"

#include <doctest.h>

#include <random>

using namespace vats;
using namespace vats::testing;

namespace {

MeshModel random_soup(std::mt19937_64& rng, int n, double extent) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::uniform_real_distribution<double> s(-15, 15);
  std::vector<Vec3> v;
  std::vector<Triangle> t;
  for (int i = 0; i < n; ++i) {
    const Vec3 c(u(rng), u(rng), u(rng));
    const auto base = static_cast<std::uint32_t>(v.size());
    for (int k = 0; k < 3; ++k) v.push_back(c + Vec3(s(rng), s(rng), s(rng)));
    t.push_back({base, base + 1, base + 2});
  }
  return MeshModel("soup", std::move(v), std::move(t));
}

bool holds(const Aabb& box, const Vec3& p) {
  return (box.min.array() <= p.array()).all() && (box.max.array() >= p.array()).all();
}

bool same_hits(const std::vector<RayHit>& a, const std::vector<RayHit>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].triangle != b[i].triangle || a[i].distance != b[i].distance) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("single-triangle ray example") {
  const SpatialIndex idx(MeshModel("t", {{-1, -1, 0}, {1, -1, 0}, {0, 1, 0}}, {{0, 1, 2}}));
  const auto hits = ray_intersect(idx, Ray(Vec3(0, 0, -10), Vec3::UnitZ()));
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].distance == doctest::Approx(10.0));
  CHECK(hits[0].triangle == 0);
  CHECK(ray_intersect(idx, Ray(Vec3(0, 0, -10), -Vec3::UnitZ())).empty());
}

TEST_CASE("ray direction is normalized and must be nonzero") {
  const Ray r(Vec3::Zero(), Vec3(3, 4, 0));
  CHECK(std::abs(r.direction.norm() - 1.0) < 1e-9);
  CHECK_THROWS_AS(Ray(Vec3::Zero(), Vec3::Zero()), InvalidArgument);
}

TEST_CASE("BVH structure invariants") {
  std::mt19937_64 rng(1);
  const SpatialIndex idx(random_soup(rng, 500, 200));
  std::vector<int> seen(idx.mesh().triangle_count(), 0);
  for (const auto& node : idx.nodes()) {
    if (node.count == 0) continue;
    for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
      const std::uint32_t t = idx.leaf_triangles()[i];
      ++seen[t];
      for (const Vec3& p : idx.mesh().corners(t)) CHECK(holds(node.bounds, p));
    }
  }
  for (int s : seen) CHECK(s == 1);
  // inner nodes contain both children
  const auto& nodes = idx.nodes();
  for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
    if (nodes[ni].count > 0) continue;
    for (std::size_t child : {ni + 1, static_cast<std::size_t>(nodes[ni].first)}) {
      CHECK(nodes[ni].bounds.contains(nodes[child].bounds));
    }
  }
}

TEST_CASE("indexed ray queries equal exhaustive iteration") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-250, 250);
  std::normal_distribution<double> n(0, 1);
  const MeshModel soup = random_soup(rng, 500, 200);
  const MeshModel sphere = make_sphere(Vec3(5, -3, 2), 120, 16, 32);
  for (const MeshModel* m : {&soup, &sphere}) {
    const SpatialIndex idx(*m);
    for (int i = 0; i < 1000; ++i) {
      const Ray ray(Vec3(u(rng), u(rng), u(rng)), Vec3(n(rng), n(rng), n(rng)));
      REQUIRE(same_hits(ray_intersect(idx, ray), brute_force_hits(*m, ray)));
    }
    // rays aimed at vertices exercise the edge handling
    for (std::size_t i = 0; i < m->vertices().size(); i += 7) {
      const Ray ray = Ray::through(Vec3(301, 17, -260), m->vertices()[i]);
      REQUIRE(same_hits(ray_intersect(idx, ray), brute_force_hits(*m, ray)));
    }
  }
}

TEST_CASE("exterior rays cross a closed mesh an even number of times") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  const SpatialIndex idx(make_sphere(Vec3::Zero(), 100, 24, 48).transformed(random_rigid(rng, 50)));
  for (int i = 0; i < 2000; ++i) {
    Vec3 dir(n(rng), n(rng), n(rng));
    const Vec3 origin = 400.0 * dir.normalized();
    const Vec3 aim = Vec3(n(rng), n(rng), n(rng)) * 60.0 - origin;
    const auto hits = ray_intersect(idx, Ray(origin, aim));
    CHECK(hits.size() % 2 == 0);
  }
  // through a vertex: the shared hit is merged, so parity still holds
  const auto& v = idx.mesh().vertices()[5];
  CHECK(ray_intersect(idx, Ray::through(Vec3(0.123, 0.456, 0.789), v)).size() % 2 == 1);
}

TEST_CASE("ray through a shared edge counts once") {
  const MeshModel cube = make_cube(Vec3::Zero(), 100);
  const SpatialIndex idx(cube);
  // +x face is split along its diagonal; aim at the diagonal midpoint
  const auto hits = ray_intersect(idx, Ray(Vec3(200, 0, 0), -Vec3::UnitX()));
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].distance == doctest::Approx(150.0));
  CHECK(hits[1].distance == doctest::Approx(250.0));
}

TEST_CASE("segment_blocked examples") {
  const SpatialIndex idx(make_cube(Vec3::Zero(), 100));
  CHECK(segment_blocked(idx, Segment{Vec3(-200, 0, 0), Vec3(200, 0, 0), 0.0}));
  CHECK_FALSE(segment_blocked(idx, Segment{Vec3(-200, 300, 0), Vec3(200, 300, 0), 0.0}));
  // 4 mm above the top face
  const Segment near{Vec3(-20, 0, 54), Vec3(20, 0, 54), 5.0};
  CHECK(segment_blocked(idx, near));
  CHECK(segment_clearance(idx, near) == doctest::Approx(4.0));
  CHECK_FALSE(segment_blocked(idx, Segment{near.a, near.b, 3.0}));
  // inside the cube without touching a face
  CHECK_FALSE(segment_blocked(idx, Segment{Vec3(-10, 0, 0), Vec3(10, 0, 0), 0.0}));
  CHECK_THROWS_AS(segment_blocked(idx, Segment{Vec3(1, 1, 1), Vec3(1, 1, 1), 0.0}), InvalidArgument);
}

TEST_CASE("segment clearance equals exhaustive distance") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-250, 250);
  std::uniform_real_distribution<double> r(0, 20);
  const MeshModel soup = random_soup(rng, 300, 200);
  const SpatialIndex idx(soup);
  for (int i = 0; i < 300; ++i) {
    const Segment seg{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)), r(rng)};
    double want = kInf;
    for (std::size_t t = 0; t < soup.triangle_count(); ++t) {
      const auto c = soup.corners(t);
      want = std::min(want, segment_triangle_distance(seg.a, seg.b, c[0], c[1], c[2]));
    }
    CHECK(segment_clearance(idx, seg) == doctest::Approx(want).epsilon(1e-12));
    CHECK(segment_blocked(idx, seg) == (want <= seg.radius));
  }
}

TEST_CASE("point_in_mesh examples") {
  const SpatialIndex cube(make_cube(Vec3::Zero(), 100));
  CHECK(point_in_mesh(cube, Vec3::Zero()));
  CHECK_FALSE(point_in_mesh(cube, Vec3(500, 0, 0)));
  // on the face diagonal plane and through vertices: still decided
  CHECK(point_in_mesh(cube, Vec3(10, 10, 10)));
  const SpatialIndex open(MeshModel("t", {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}));
  CHECK_THROWS_AS(point_in_mesh(open, Vec3::Zero()), OpenMeshError);
}

TEST_CASE("point_in_mesh agrees with the analytic sphere") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-130, 130);
  const double r = 100.0;
  const SpatialIndex idx(make_sphere(Vec3::Zero(), r));
  int agree = 0;
  int total = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const bool truth = p.norm() < r;
    const bool got = point_in_mesh(idx, p);
    ++total;
    if (got == truth) {
      ++agree;
    } else {
      // tessellation error only: disagreements hug the surface
      CHECK(std::abs(p.norm() - r) < 15.0);
    }
  }
  CHECK(agree >= 0.999 * total);
}

TEST_CASE("nearest_triangle equals exhaustive search") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-250, 250);
  const MeshModel soup = random_soup(rng, 200, 200);
  const SpatialIndex idx(soup);
  for (int i = 0; i < 300; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    double best = kInf;
    for (std::size_t t = 0; t < soup.triangle_count(); ++t) {
      const auto c = soup.corners(t);
      best = std::min(best, point_triangle_distance(p, c[0], c[1], c[2]));
    }
    const auto got = nearest_triangle(idx, p, 40.0);
    CHECK(got.has_value() == (best <= 40.0));
    if (got) CHECK(got->distance == doctest::Approx(best).epsilon(1e-12));
  }
}

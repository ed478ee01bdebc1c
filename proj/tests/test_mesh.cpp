#include "support/shapes.hpp"

#include "vats/mesh.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace vats;
using vats::testing::make_cube;

namespace {

MeshModel parse(const std::string& text) {
  std::istringstream in(text);
  return parse_obj(in, "test");
}

const char* kCubeObj = R"(# cube, 6 quads
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 2 3 7 6
f 3 4 8 7
f 4 1 5 8
)";

}  // namespace

TEST_CASE("minimal OBJ: 3 vertices, 1 face") {
  const MeshModel m = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  CHECK(m.vertices().size() == 3);
  CHECK(m.triangle_count() == 1);
  CHECK(m.name() == "test");
}

TEST_CASE("quad cube is fan-triangulated and closed") {
  const MeshModel m = parse(kCubeObj);
  CHECK(m.vertices().size() == 8);
  CHECK(m.triangle_count() == 12);
  CHECK(is_closed(m));
}

TEST_CASE("face corners with texture and normal indices") {
  const MeshModel m = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf 1/1/1 2/1/1 3//1\n");
  CHECK(m.triangle_count() == 1);
}

TEST_CASE("malformed records report their line") {
  SUBCASE("negative index") {
    CHECK_THROWS_WITH_AS(parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -1 -2 -3\n"),
                         doctest::Contains("line 4"), ObjError);
  }
  SUBCASE("index past the vertex list") {
    CHECK_THROWS_WITH_AS(parse("v 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 9\n"),
                         doctest::Contains("line 5"), ObjError);
  }
  SUBCASE("zero index") { CHECK_THROWS_AS(parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n"), ObjError); }
  SUBCASE("bad coordinate") {
    CHECK_THROWS_WITH_AS(parse("v 0 zero 0\n"), doctest::Contains("line 1"), ObjError);
  }
  SUBCASE("face with two corners") { CHECK_THROWS_AS(parse("v 0 0 0\nv 1 0 0\nf 1 2\n"), ObjError); }
}

TEST_CASE("empty mesh is an error") {
  CHECK_THROWS_AS(parse("# nothing\nv 0 0 0\n"), ObjError);
  // only a degenerate face
  CHECK_THROWS_AS(parse("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n"), ObjError);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_obj("/nonexistent/dir/mesh.obj"), Error);
}

TEST_CASE("degenerate triangles are dropped at construction") {
  std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {2, 0, 0}, {0, 0, 0}};
  const MeshModel m("m", v, {{0, 1, 2}, {0, 1, 3}, {0, 4, 1}});
  CHECK(m.triangle_count() == 1);
  CHECK(m.dropped_degenerate() == 2);
  CHECK_THROWS_AS(MeshModel("bad", v, {{0, 1, 7}}), InvalidArgument);
}

TEST_CASE("is_closed examples") {
  const MeshModel cube = make_cube(Vec3::Zero(), 100);
  CHECK(is_closed(cube));
  const MeshModel tri("t", {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  CHECK_FALSE(is_closed(tri));
  auto tris = cube.triangles();
  tris.pop_back();
  CHECK_FALSE(is_closed(MeshModel("open", cube.vertices(), tris)));
}

TEST_CASE("is_closed rejects inconsistent orientation") {
  const MeshModel cube = make_cube(Vec3::Zero(), 100);
  auto tris = cube.triangles();
  std::swap(tris[0][1], tris[0][2]);
  CHECK_FALSE(is_closed(MeshModel("flipped", cube.vertices(), tris)));
}

TEST_CASE("is_closed is invariant under triangle reordering and rigid transforms") {
  std::mt19937_64 rng(7);
  const MeshModel sphere = testing::make_sphere(Vec3(3, 4, 5), 50, 12, 24);
  REQUIRE(is_closed(sphere));
  for (int trial = 0; trial < 20; ++trial) {
    auto tris = sphere.triangles();
    std::shuffle(tris.begin(), tris.end(), rng);
    const MeshModel shuffled("s", sphere.vertices(), tris);
    CHECK(is_closed(shuffled));
    CHECK(is_closed(shuffled.transformed(testing::random_rigid(rng, 500))));
  }
}

TEST_CASE("write/load round trip keeps coordinates and topology") {
  std::mt19937_64 rng(11);
  const MeshModel src = testing::make_sphere(Vec3(1.25, -7.5, 3), 87.3, 10, 20)
                            .transformed(testing::random_rigid(rng, 300));
  const auto path = std::filesystem::temp_directory_path() / "vats_roundtrip.obj";
  write_obj(src, path);
  const MeshModel back = load_obj(path);
  std::filesystem::remove(path);
  REQUIRE(back.vertices().size() == src.vertices().size());
  REQUIRE(back.triangles() == src.triangles());
  double worst = 0.0;
  for (std::size_t i = 0; i < src.vertices().size(); ++i) {
    worst = std::max(worst, (back.vertices()[i] - src.vertices()[i]).norm());
  }
  CHECK(worst < 1e-6);
  CHECK(back.name() == "vats_roundtrip");
}

TEST_CASE("bounds and transforms") {
  const MeshModel cube = make_cube(Vec3(10, 0, 0), 20);
  CHECK(cube.bounds().min.isApprox(Vec3(0, -10, -10)));
  CHECK(cube.bounds().max.isApprox(Vec3(20, 10, 10)));
  Rigid xf = Rigid::Identity();
  xf.translation() = Vec3(0, 0, 5);
  CHECK(cube.transformed(xf).bounds().min.isApprox(Vec3(0, -10, -5)));
}

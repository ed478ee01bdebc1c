// SPDX-License-Identifier: Apache-2.0
#include "vats/mesh.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace vats {

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line) {
  double value = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ObjError("bad number '" + std::string(tok) + "'", line);
  }
  return value;
}

// Face corner "i", "i/t", "i//n" or "i/t/n"; only the position index is used.
std::uint32_t parse_corner(std::string_view tok, std::size_t vertex_count, std::size_t line) {
  const auto slash = tok.find('/');
  const auto head = tok.substr(0, slash);
  long long index = 0;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), index);
  if (ec != std::errc() || ptr != head.data() + head.size()) {
    throw ObjError("bad face index '" + std::string(tok) + "'", line);
  }
  if (index < 0) throw ObjError("negative face indices are not supported", line);
  if (index == 0) throw ObjError("face index 0 is invalid (indices are 1-based)", line);
  if (static_cast<std::size_t>(index) > vertex_count) {
    throw ObjError("face index " + std::to_string(index) + " exceeds vertex count " +
                       std::to_string(vertex_count),
                   line);
  }
  return static_cast<std::uint32_t>(index - 1);
}

}  // namespace

MeshModel::MeshModel(std::string name, std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : name_(std::move(name)), vertices_(std::move(vertices)) {
  triangles_.reserve(triangles.size());
  for (const Triangle& t : triangles) {
    for (auto idx : t) {
      if (idx >= vertices_.size()) {
        throw InvalidArgument("mesh '" + name_ + "': triangle index " + std::to_string(idx) +
                              " out of range");
      }
    }
    if (triangle_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]) <= kDegenerateAreaMm2) {
      ++dropped_;
      continue;
    }
    triangles_.push_back(t);
  }
}

Vec3 MeshModel::centroid(std::size_t tri) const {
  const auto c = corners(tri);
  return (c[0] + c[1] + c[2]) / 3.0;
}

Aabb MeshModel::bounds() const {
  Aabb box;
  for (const Triangle& t : triangles_) {
    for (auto idx : t) box.extend(vertices_[idx]);
  }
  return box;
}

MeshModel MeshModel::transformed(const Rigid& xf) const {
  std::vector<Vec3> moved;
  moved.reserve(vertices_.size());
  for (const Vec3& v : vertices_) moved.push_back(xf * v);
  return MeshModel(name_, std::move(moved), triangles_);
}

ObjError::ObjError(const std::string& what, std::size_t line)
    : Error(line > 0 ? "OBJ line " + std::to_string(line) + ": " + what : what), line_(line) {}

MeshModel parse_obj(std::istream& in, std::string name) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = trim(line.substr(0, hash));
    }
    if (line.empty()) continue;
    const auto tokens = split_ws(line);
    if (tokens[0] == "v") {
      if (tokens.size() < 4 || tokens.size() > 5) {
        throw ObjError("vertex record needs 3 coordinates", line_no);
      }
      vertices.emplace_back(parse_double(tokens[1], line_no), parse_double(tokens[2], line_no),
                            parse_double(tokens[3], line_no));
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) throw ObjError("face record needs at least 3 vertices", line_no);
      std::vector<std::uint32_t> poly;
      poly.reserve(tokens.size() - 1);
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        poly.push_back(parse_corner(tokens[i], vertices.size(), line_no));
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        triangles.push_back({poly[0], poly[i], poly[i + 1]});
      }
    }
    // vn, vt, o, g, s, usemtl, mtllib, l, p: geometry-irrelevant
  }
  MeshModel mesh(std::move(name), std::move(vertices), std::move(triangles));
  if (mesh.empty()) throw ObjError("mesh '" + mesh.name() + "' has no usable triangles");
  return mesh;
}

MeshModel load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ObjError("cannot open OBJ file '" + path.string() + "'");
  return parse_obj(in, path.stem().string());
}

void write_obj(const MeshModel& mesh, std::ostream& out) {
  out << "# " << mesh.name() << "\n";
  out << std::setprecision(17);
  for (const Vec3& v : mesh.vertices()) {
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const Triangle& t : mesh.triangles()) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void write_obj(const MeshModel& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write OBJ file '" + path.string() + "'");
  write_obj(mesh, out);
}

bool is_closed(const MeshModel& mesh) {
  if (mesh.empty()) return false;
  // Directed edge (a, b) must occur exactly once and its reverse exactly once.
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangle_count() * 3);
  const auto key = [](std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };
  for (const Triangle& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) ++directed[key(t[k], t[(k + 1) % 3])];
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    const auto a = static_cast<std::uint32_t>(edge >> 32);
    const auto b = static_cast<std::uint32_t>(edge & 0xffffffffu);
    const auto rev = directed.find(key(b, a));
    if (rev == directed.end() || rev->second != 1) return false;
  }
  return true;
}

}  // namespace vats

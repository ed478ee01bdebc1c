// SPDX-License-Identifier: Apache-2.0
#include "vats/scene.hpp"

#include <algorithm>
#include <array>

namespace vats {

namespace {

constexpr std::array<std::pair<Role, std::string_view>, 7> kRoleNames = {{
    {Role::Skin, "skin"},
    {Role::Rib, "rib"},
    {Role::Vertebra, "vertebra"},
    {Role::Scapula, "scapula"},
    {Role::Trachea, "trachea"},
    {Role::Vasculature, "vasculature"},
    {Role::Other, "other"},
}};

std::vector<std::uint32_t> sorted_unique(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::string_view to_string(Role role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "other";
}

std::optional<Role> parse_role(std::string_view name) {
  for (const auto& [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

AnatomicalScene::AnatomicalScene(std::vector<MeshInput> meshes, const Vec3& convergent_point,
                                 std::vector<std::uint32_t> tool_entry_region,
                                 std::vector<std::uint32_t> camera_entry_region,
                                 PlanningDefaults defaults)
    : convergent_point_(convergent_point),
      tool_region_(sorted_unique(std::move(tool_entry_region))),
      camera_region_(sorted_unique(std::move(camera_entry_region))),
      defaults_(defaults) {
  std::size_t skins = 0;
  for (auto& in : meshes) {
    if (in.role == Role::Skin) {
      skin_ = meshes_.size();
      ++skins;
    }
    meshes_.push_back(SceneMesh{std::move(in.name), in.role,
                                std::make_shared<const SpatialIndex>(std::move(in.mesh))});
  }
  if (skins != 1) {
    throw InvalidArgument("scene needs exactly one skin mesh, got " + std::to_string(skins));
  }
  validate();
}

void AnatomicalScene::validate() const {
  const std::size_t n = skin().mesh().triangle_count();
  const auto check = [n](const std::vector<std::uint32_t>& region, const char* what) {
    if (!region.empty() && region.back() >= n) {
      throw InvalidArgument(std::string(what) + " references skin triangle " +
                            std::to_string(region.back()) + " but the skin has " +
                            std::to_string(n) + " triangles");
    }
  };
  check(tool_region_, "tool entry region");
  check(camera_region_, "camera entry region");
  if (skin().index->closed() && !point_in_mesh(*skin().index, convergent_point_)) {
    throw InvalidArgument("convergent point lies outside the skin mesh");
  }
}

bool AnatomicalScene::in_tool_region(std::uint32_t tri) const {
  return std::binary_search(tool_region_.begin(), tool_region_.end(), tri);
}

bool AnatomicalScene::in_camera_region(std::uint32_t tri) const {
  return std::binary_search(camera_region_.begin(), camera_region_.end(), tri);
}

std::vector<const SceneMesh*> AnatomicalScene::bony() const {
  std::vector<const SceneMesh*> out;
  for (const SceneMesh& m : meshes_) {
    if (is_bony(m.role)) out.push_back(&m);
  }
  return out;
}

AnatomicalScene AnatomicalScene::with_defaults(const PlanningDefaults& d) const {
  AnatomicalScene copy = *this;
  copy.defaults_ = d;
  return copy;
}

AnatomicalScene AnatomicalScene::with_regions(std::vector<std::uint32_t> tool,
                                              std::vector<std::uint32_t> camera) const {
  AnatomicalScene copy = *this;
  copy.tool_region_ = sorted_unique(std::move(tool));
  copy.camera_region_ = sorted_unique(std::move(camera));
  copy.validate();
  return copy;
}

AnatomicalScene AnatomicalScene::transformed(const Rigid& xf) const {
  AnatomicalScene out;
  out.skin_ = skin_;
  out.convergent_point_ = xf * convergent_point_;
  out.tool_region_ = tool_region_;
  out.camera_region_ = camera_region_;
  out.defaults_ = defaults_;
  for (const SceneMesh& m : meshes_) {
    out.meshes_.push_back(
        SceneMesh{m.name, m.role, std::make_shared<const SpatialIndex>(m.mesh().transformed(xf))});
  }
  return out;
}

}  // namespace vats

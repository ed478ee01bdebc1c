// SPDX-License-Identifier: Apache-2.0
// vats: validate plans, run the auto-planner, serve the HTTP API, export
// overlap voxels.
#include "vats/http_api.hpp"
#include "vats/service.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

// Exit codes.
constexpr int kValid = 0;
constexpr int kInvalid = 1;
constexpr int kBadInput = 2;
constexpr int kInfeasible = 3;

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thoracic port placement engine"};
  app.require_subcommand(1);

  std::string manifest_path, plan_path, out_path;
  std::optional<double> spacing, capsule_radius;
  int stride = 1;
  int port = 8080;
  std::string host = "127.0.0.1";

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("manifest", manifest_path, "Scene manifest (JSON)")->required();
    cmd->add_option("--spacing", spacing, "Voxel spacing in mm");
    cmd->add_option("--capsule-radius", capsule_radius, "Obstruction clearance radius in mm");
  };

  auto* validate = app.add_subcommand("validate", "Evaluate a plan; exit 0 iff valid");
  add_common(validate);
  validate->add_option("plan", plan_path, "Plan file (JSON)")->required();

  auto* auto_cmd = app.add_subcommand("auto-plan", "Search entry candidates for the best plan");
  add_common(auto_cmd);
  auto_cmd->add_option("--stride", stride, "Keep every n-th region triangle")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
  add_common(serve);
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");

  auto* vexport = app.add_subcommand("voxel-export", "Write overlap cell centers as CSV");
  add_common(vexport);
  vexport->add_option("plan", plan_path, "Plan file (JSON)")->required();
  vexport->add_option("-o,--out", out_path, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kBadInput;
  }

  std::shared_ptr<const vats::AnatomicalScene> scene;
  double h = 0.0;
  try {
    vats::SceneManifest manifest = vats::load_manifest(manifest_path);
    if (capsule_radius) {
      if (!(*capsule_radius >= 0.0)) throw vats::InvalidArgument("--capsule-radius must be >= 0");
      manifest.defaults.capsule_radius_mm = *capsule_radius;
    }
    if (spacing && !(*spacing > 0.0)) throw vats::InvalidArgument("--spacing must be > 0");
    h = spacing.value_or(manifest.defaults.spacing_mm);
    scene = vats::build_scene(manifest);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }

  try {
    if (*validate) {
      const vats::PlanFile plan = vats::load_plan(plan_path);
      const vats::PlanReport report =
          vats::evaluate_plan_file(plan, *scene, h, {.export_cells = false});
      std::cout << vats::dump_report(report) << '\n';
      return report.overall_valid ? kValid : kInvalid;
    }
    if (*auto_cmd) {
      try {
        const auto plan = vats::auto_plan(*scene, vats::make_candidates(*scene, stride), h);
        vats::Json out = vats::to_json(vats::plan_file_of(plan, manifest_path));
        out["search"] = {{"spacing_mm", h},
                         {"stride", stride},
                         {"evaluated", plan.evaluated},
                         {"feasible", plan.feasible}};
        std::cout << out.dump(2) << '\n';
        return kValid;
      } catch (const vats::NoFeasiblePlan& e) {
        vats::Json out = {{"error", "no feasible plan"},
                          {"evaluated", e.evaluated()},
                          {"failures", e.histogram()}};
        std::cout << out.dump(2) << '\n';
        std::cerr << e.what() << '\n';
        return kInfeasible;
      }
    }
    if (*vexport) {
      const vats::PlanFile plan = vats::load_plan(plan_path);
      const vats::PlanReport report = vats::evaluate_plan_file(plan, *scene, h);
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw vats::Error("cannot write " + out_path);
      }
      std::ostream& csv = out_path.empty() ? std::cout : file;
      csv << "x_mm,y_mm,z_mm\n" << std::setprecision(10);
      for (const vats::Vec3& c : report.overlap_cells) {
        csv << c.x() << ',' << c.y() << ',' << c.z() << '\n';
      }
      const vats::Json summary = {{"spacing_mm", h},
                                  {"cell_count", report.overlap_cells.size()},
                                  {"volume_l", report.operable_volume_l}};
      (out_path.empty() ? std::cerr : std::cout) << summary.dump() << '\n';
      return kValid;
    }
    if (*serve) {
      vats::PlanningDefaults d = scene->defaults();
      d.spacing_mm = h;
      auto served = std::make_shared<const vats::AnatomicalScene>(scene->with_defaults(d));
      vats::ApiService api(served);
      httplib::Server server;
      api.mount(server);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ':' << port << '\n';
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
        return kBadInput;
      }
      return kValid;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}

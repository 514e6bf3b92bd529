#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "scatterlax/bem.hpp"
#include "scatterlax/capacitance.hpp"
#include "scatterlax/directions.hpp"
#include "scatterlax/foldy.hpp"
#include "scatterlax/io.hpp"
#include "scatterlax/music.hpp"
#include "scatterlax/scene.hpp"
#include "scatterlax/trimesh.hpp"
#include "scatterlax/types.hpp"

namespace {

using namespace scatterlax;
using nlohmann::json;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::RankDeficientAmbiguity ? 3 : 1;
}

struct ForwardArgs {
  std::string scene_path;
  int d_gl = 5;
  std::string out;
  bool force = false;
  std::optional<double> snr_db;
  std::optional<std::uint64_t> seed;
};

int cmd_forward(const ForwardArgs& args) {
  const auto t0 = Clock::now();
  const Scene scene = scene_from_json_file(args.scene_path);
  const ValidityReport report = validate(scene);
  std::cout << validity_report_to_json(report).dump(2) << "\n";

  const bool mazya_ok = report.capacitance_gap < 1.0 && report.cos_condition >= 0.0;
  const bool dominance_ok = report.diag_dominance < kFourPi;
  if (!mazya_ok && !dominance_ok && !args.force) {
    std::cerr << "refusing: neither invertibility certificate holds "
                 "(capacitance_gap=" << report.capacitance_gap
              << ", cos_condition=" << report.cos_condition
              << ", diag_dominance=" << report.diag_dominance << " vs 4*pi=" << kFourPi
              << "); pass --force to run anyway\n";
    return 2;
  }

  const DirectionSet dirs = gauss_legendre_directions(args.d_gl);
  ResponseMatrix response = response_matrix(assemble(scene), dirs);
  if (args.snr_db) response = add_noise(response, *args.snr_db, args.seed.value_or(0));
  write_response_csv(args.out, response);

  RunManifest manifest;
  manifest.command = "forward";
  manifest.scene_path = args.scene_path;
  manifest.parameters = {{"dgl", args.d_gl}, {"force", args.force}};
  manifest.parameters["snr_db"] = args.snr_db ? json(*args.snr_db) : json(nullptr);
  if (args.force) manifest.parameters["forced"] = true;
  manifest.seed = args.snr_db ? std::optional<std::uint64_t>(args.seed.value_or(0)) : std::nullopt;
  manifest.tool_version = kVersion;
  manifest.output_paths = {args.out, args.out + ".json"};
  manifest.wall_clock_seconds = seconds_since(t0);
  write_manifest(args.out + ".manifest.json", manifest);
  return 0;
}

struct ValidateArgs {
  std::string scene_path;
  std::string out;
};

int cmd_validate(const ValidateArgs& args) {
  const Scene scene = scene_from_json_file(args.scene_path);
  const json report = validity_report_to_json(validate(scene));
  std::cout << report.dump(2) << "\n";
  if (!args.out.empty()) atomic_write_text(args.out, report.dump(2) + "\n");
  return 0;
}

struct OracleArgs {
  std::string scene_path;
  int level = 3;
  int d_gl = 5;
  std::string out;
};

int cmd_oracle(const OracleArgs& args) {
  const auto t0 = Clock::now();
  const Scene scene = scene_from_json_file(args.scene_path);
  const DirectionSet dirs = gauss_legendre_directions(args.d_gl);
  const ResponseMatrix response = bem_response_matrix(scene, dirs, args.level);
  write_response_csv(args.out, response);

  RunManifest manifest;
  manifest.command = "oracle";
  manifest.scene_path = args.scene_path;
  manifest.parameters = {{"dgl", args.d_gl}, {"level", args.level}};
  manifest.tool_version = kVersion;
  manifest.output_paths = {args.out, args.out + ".json"};
  manifest.wall_clock_seconds = seconds_since(t0);
  write_manifest(args.out + ".manifest.json", manifest);
  return 0;
}

struct InvertArgs {
  std::string farfield;
  int d_gl = 5;
  double kappa = 1.0;
  std::string grid;
  std::optional<int> m_hint;
  std::string out;
};

int cmd_invert(const InvertArgs& args) {
  const auto t0 = Clock::now();
  double lo = 0.0, hi = 0.0, step = 0.0;
  char extra = 0;
  if (std::sscanf(args.grid.c_str(), "%lf,%lf,%lf%c", &lo, &hi, &step, &extra) != 3) {
    fail(ErrorCode::BadFormat, "--grid expects 'lo,hi,step', got '" + args.grid + "'");
  }
  const auto comma = args.out.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 >= args.out.size()) {
    fail(ErrorCode::BadFormat, "--out expects 'grid.csv,result.json', got '" + args.out + "'");
  }
  const std::string grid_path = args.out.substr(0, comma);
  const std::string result_path = args.out.substr(comma + 1);

  ResponseMatrix response = read_response_csv(args.farfield, args.d_gl);
  response.kappa = args.kappa;
  const DirectionSet dirs = gauss_legendre_directions(args.d_gl);

  const SubspaceSplit split = split_subspaces(response, args.m_hint);
  const GridSpec spec{Vec3(lo, lo, lo), Vec3(hi, hi, hi), step};
  const ImagingGrid grid = pseudospectrum(split, dirs, args.kappa, spec);

  std::vector<Vec3> locations;
  locations.reserve(grid.peaks.size());
  for (const Peak& p : grid.peaks) locations.push_back(p.location);
  const MusicResult recovered = recover_capacitances(response, locations, dirs, args.kappa);

  write_grid_csv(grid_path, grid);
  json result = result_to_json(recovered, split.singular_values);
  result["m_hat"] = split.m_hat;
  result["ambiguous_gap"] = split.ambiguous;
  atomic_write_text(result_path, result.dump(2) + "\n");
  std::cout << result.dump(2) << "\n";

  RunManifest manifest;
  manifest.command = "invert";
  manifest.parameters = {{"farfield", args.farfield}, {"dgl", args.d_gl},
                         {"kappa", args.kappa},       {"grid", args.grid},
                         {"m_hat", split.m_hat},      {"m_selection", args.m_hint ? "hint" : "gap"}};
  manifest.seed = response.seed;
  manifest.tool_version = kVersion;
  manifest.output_paths = {grid_path, result_path};
  manifest.wall_clock_seconds = seconds_since(t0);
  write_manifest(result_path + ".manifest.json", manifest);
  return 0;
}

struct CapArgs {
  std::string mesh_path;
  std::string out;
};

int cmd_capacitance(const CapArgs& args) {
  const auto t0 = Clock::now();
  const TriMesh mesh = read_mesh(args.mesh_path);
  const CapacitanceResult result = mesh_capacitance(mesh);
  const json j = capacitance_result_to_json(result, mesh);
  std::cout << j.dump(2) << "\n";
  atomic_write_text(args.out, j.dump(2) + "\n");

  RunManifest manifest;
  manifest.command = "capacitance";
  manifest.parameters = {{"mesh", args.mesh_path}};
  manifest.tool_version = kVersion;
  manifest.output_paths = {args.out};
  manifest.wall_clock_seconds = seconds_since(t0);
  write_manifest(args.out + ".manifest.json", manifest);
  return 0;
}

struct StudyArgs {
  double t = 1.0 / 3.0;
  double s = 1.0;
  std::string a_list = "0.2,0.1,0.05";
  double kappa = 1.0;
  int d_gl = 5;
  int level = 3;
  std::string out;
};

int cmd_scaling_study(const StudyArgs& args) {
  const auto t0 = Clock::now();
  std::vector<double> avals;
  {
    std::string rest = args.a_list;
    while (!rest.empty()) {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(rest, &used);
      } catch (const std::exception&) {
        fail(ErrorCode::BadFormat, "--a expects comma-separated reals, got '" + args.a_list + "'");
      }
      avals.push_back(v);
      if (used >= rest.size()) break;
      if (rest[used] != ',') {
        fail(ErrorCode::BadFormat, "--a expects comma-separated reals, got '" + args.a_list + "'");
      }
      rest = rest.substr(used + 1);
    }
    if (avals.empty()) fail(ErrorCode::BadFormat, "--a list is empty");
  }

  const DirectionSet dirs = gauss_legendre_directions(args.d_gl);
  std::string csv = "a,M,d,err,budget\n";
  for (const double a : avals) {
    const Scene scene = make_lattice_scene(a, args.t, args.s, args.kappa);
    const double d = scene.size() > 1 ? compute_d(scene)
                                      : std::numeric_limits<double>::infinity();
    const ApproximationError err = approximation_error(scene, dirs, args.level);
    csv += format_sci(a);
    csv += ',';
    csv += std::to_string(scene.size());
    csv += ',';
    csv += std::isinf(d) ? std::string("inf") : format_sci(d);
    csv += ',';
    csv += format_sci(err.max_abs_err);
    csv += ',';
    csv += format_sci(err.budget);
    csv += '\n';
  }
  atomic_write_text(args.out, csv);
  std::cout << csv;

  RunManifest manifest;
  manifest.command = "scaling-study";
  manifest.parameters = {{"t", args.t},         {"s", args.s},   {"a", args.a_list},
                         {"kappa", args.kappa}, {"dgl", args.d_gl}, {"level", args.level}};
  manifest.tool_version = kVersion;
  manifest.output_paths = {args.out};
  manifest.wall_clock_seconds = seconds_since(t0);
  write_manifest(args.out + ".manifest.json", manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward and inverse multiple-scattering toolkit for small sound-soft obstacles"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ForwardArgs fwd;
  double fwd_snr = 0.0;
  std::uint64_t fwd_seed = 0;
  CLI::App* forward = app.add_subcommand("forward", "Far-field response matrix of a scene");
  forward->add_option("--scene", fwd.scene_path, "scene JSON file")->required();
  forward->add_option("--dgl", fwd.d_gl, "direction degree (N = 2*dgl^2)")->check(CLI::Range(2, 64));
  forward->add_option("--out", fwd.out, "output CSV path")->required();
  forward->add_flag("--force", fwd.force, "run even when no invertibility certificate holds");
  CLI::Option* snr_opt = forward->add_option("--snr-db", fwd_snr, "add measurement noise at this SNR");
  CLI::Option* seed_opt = forward->add_option("--seed", fwd_seed, "noise seed (default 0)");

  ValidateArgs val;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Report scene validity conditions");
  validate_cmd->add_option("--scene", val.scene_path, "scene JSON file")->required();
  validate_cmd->add_option("--out", val.out, "optional report JSON path");

  OracleArgs orc;
  CLI::App* oracle = app.add_subcommand("oracle", "Boundary-element reference far field");
  oracle->add_option("--scene", orc.scene_path, "scene JSON file (spheres only)")->required();
  oracle->add_option("--level", orc.level, "icosphere refinement level")->check(CLI::Range(0, 6));
  oracle->add_option("--dgl", orc.d_gl, "direction degree")->check(CLI::Range(2, 64));
  oracle->add_option("--out", orc.out, "output CSV path")->required();

  InvertArgs inv;
  int inv_m = 0;
  CLI::App* invert = app.add_subcommand("invert", "MUSIC localization and capacitance recovery");
  invert->add_option("--farfield", inv.farfield, "far-field CSV produced by forward/oracle")
      ->required();
  invert->add_option("--dgl", inv.d_gl, "direction degree used for the data")->required();
  invert->add_option("--kappa", inv.kappa, "wavenumber used for the data")->required();
  invert->add_option("--grid", inv.grid, "imaging box as 'lo,hi,step'")->required();
  CLI::Option* m_opt = invert->add_option("--m", inv_m, "scatterer count (signal dimension)");
  invert->add_option("--out", inv.out, "output paths 'grid.csv,result.json'")->required();

  CapArgs cap;
  CLI::App* capacitance = app.add_subcommand("capacitance", "Capacitance of a closed mesh");
  capacitance->add_option("--mesh", cap.mesh_path, "OFF or binary STL file")->required();
  capacitance->add_option("--out", cap.out, "result JSON path")->required();

  StudyArgs study;
  CLI::App* scaling = app.add_subcommand("scaling-study", "Error vs obstacle size on a lattice");
  scaling->add_option("--t", study.t, "surface-gap exponent (gap = a^t)");
  scaling->add_option("--s", study.s, "count exponent (M = round(a^-s))");
  scaling->add_option("--a", study.a_list, "comma-separated obstacle diameters");
  scaling->add_option("--kappa", study.kappa, "wavenumber");
  scaling->add_option("--dgl", study.d_gl, "direction degree")->check(CLI::Range(2, 64));
  scaling->add_option("--level", study.level, "oracle refinement level")->check(CLI::Range(0, 6));
  scaling->add_option("--out", study.out, "output CSV path")->required();

  // Values like "-3,3,0.25" read as option names to the parser; fold them into
  // an '=' form before parsing.
  std::vector<std::string> args;
  args.reserve(static_cast<size_t>(argc));
  for (int i = 0; i < argc; ++i) args.emplace_back(argv[i]);
  for (size_t i = 1; i + 1 < args.size(); ++i) {
    if (args[i] == "--grid" || args[i] == "--a") {
      args[i] += "=" + args[i + 1];
      args.erase(args.begin() + static_cast<long>(i) + 1);
    }
  }
  std::vector<char*> argv2;
  argv2.reserve(args.size());
  for (std::string& s : args) argv2.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv2.size()), argv2.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*snr_opt) fwd.snr_db = fwd_snr;
  if (*seed_opt) fwd.seed = fwd_seed;
  if (*m_opt) inv.m_hint = inv_m;

  try {
    if (forward->parsed()) return cmd_forward(fwd);
    if (validate_cmd->parsed()) return cmd_validate(val);
    if (oracle->parsed()) return cmd_oracle(orc);
    if (invert->parsed()) return cmd_invert(inv);
    if (capacitance->parsed()) return cmd_capacitance(cap);
    if (scaling->parsed()) return cmd_scaling_study(study);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "scatterlax/io.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace scatterlax {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp." +
                                               std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorCode::IoError, "cannot move " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoError, "read failure on " + path);
  return ss.str();
}

// --- scenes -----------------------------------------------------------------

namespace {

Vec3 parse_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    fail(ErrorCode::BadFormat, std::string(what) + " must be an array of three numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

Scene scene_from_json(const json& j, const std::string& base_dir) {
  try {
    const double kappa = j.at("kappa").get<double>();
    const double kappa_max = j.at("kappa_max").get<double>();
    const double d_max = j.at("d_max").get<double>();
    const json& list = j.at("scatterers");
    if (!list.is_array() || list.empty()) {
      fail(ErrorCode::InvalidScene, "scene needs a non-empty scatterers array");
    }
    std::vector<Scatterer> scatterers;
    scatterers.reserve(list.size());
    for (const json& js : list) {
      const Vec3 center = parse_vec3(js.at("center"), "scatterer center");
      std::optional<double> cap;
      if (js.contains("capacitance") && !js["capacitance"].is_null()) {
        cap = js["capacitance"].get<double>();
      }
      const json& shape = js.at("shape");
      const std::string type = shape.at("type").get<std::string>();
      if (type == "sphere") {
        scatterers.push_back(make_sphere(center, shape.at("radius").get<double>(), cap));
      } else if (type == "mesh") {
        const std::string rel = shape.at("path").get<std::string>();
        const double scale = shape.at("scale").get<double>();
        fs::path mesh_path(rel);
        if (mesh_path.is_relative()) mesh_path = fs::path(base_dir) / mesh_path;
        auto mesh = std::make_shared<TriMesh>(read_mesh(mesh_path.string()));
        scatterers.push_back(make_mesh_scatterer(center, std::move(mesh), scale, cap, rel));
      } else {
        fail(ErrorCode::BadFormat, "unknown shape type '" + type + "'");
      }
    }
    return Scene::make(std::move(scatterers), kappa, kappa_max, d_max);
  } catch (const json::exception& e) {
    fail(ErrorCode::BadFormat, std::string("malformed scene JSON: ") + e.what());
  }
}

Scene scene_from_json_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::BadFormat, path + ": " + e.what());
  }
  return scene_from_json(j, fs::path(path).parent_path().string());
}

json scene_to_json(const Scene& scene) {
  json list = json::array();
  for (const Scatterer& s : scene.scatterers) {
    json js;
    js["center"] = {s.center.x(), s.center.y(), s.center.z()};
    if (s.is_sphere()) {
      js["shape"] = {{"type", "sphere"}, {"radius", std::get<Sphere>(s.shape).radius}};
    } else {
      const MeshShape& m = std::get<MeshShape>(s.shape);
      js["shape"] = {{"type", "mesh"}, {"path", m.path}, {"scale", m.scale}};
    }
    if (s.capacitance_override) js["capacitance"] = *s.capacitance_override;
    list.push_back(std::move(js));
  }
  return json{{"kappa", scene.kappa},
              {"kappa_max", scene.kappa_max},
              {"d_max", scene.d_max},
              {"scatterers", std::move(list)}};
}

// --- far-field response matrices ---------------------------------------------

void write_response_csv(const std::string& path, const ResponseMatrix& response) {
  const int n = static_cast<int>(response.F.rows());
  std::string out = "j,l,re,im\n";
  out.reserve(out.size() + static_cast<size_t>(n) * n * 56);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      out += std::to_string(j);
      out += ',';
      out += std::to_string(l);
      out += ',';
      out += format_sci(response.F(j, l).real());
      out += ',';
      out += format_sci(response.F(j, l).imag());
      out += '\n';
    }
  }
  atomic_write_text(path, out);

  json sidecar{{"d_gl", response.d_gl}, {"kappa", response.kappa}};
  sidecar["snr_db"] = response.snr_db ? json(*response.snr_db) : json(nullptr);
  sidecar["seed"] = response.seed ? json(*response.seed) : json(nullptr);
  atomic_write_text(path + ".json", sidecar.dump(2) + "\n");
}

ResponseMatrix read_response_csv(const std::string& path, int expected_d_gl) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::BadFormat, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "j,l,re,im") {
    fail(ErrorCode::BadFormat, path + ": expected header 'j,l,re,im', got '" + line + "'");
  }
  struct Entry {
    int j, l;
    cplx v;
  };
  std::vector<Entry> entries;
  int max_index = -1;
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int j = 0, l = 0;
    double re = 0.0, im = 0.0;
    char extra = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf%c", &j, &l, &re, &im, &extra) != 4 || j < 0 ||
        l < 0) {
      fail(ErrorCode::BadFormat,
           path + ": malformed row at line " + std::to_string(line_no) + ": '" + line + "'");
    }
    entries.push_back({j, l, cplx(re, im)});
    max_index = std::max({max_index, j, l});
  }
  if (entries.empty()) fail(ErrorCode::BadFormat, path + ": no data rows");
  const int n = max_index + 1;
  const long long expected = 1LL * n * n;
  if (static_cast<long long>(entries.size()) != expected) {
    fail(ErrorCode::BadFormat, path + ": truncated or inconsistent far-field file: expected " +
                                   std::to_string(expected) + " rows for N=" + std::to_string(n) +
                                   ", found " + std::to_string(entries.size()));
  }
  if (expected_d_gl > 0 && n != 2 * expected_d_gl * expected_d_gl) {
    fail(ErrorCode::BadFormat, path + ": matrix size N=" + std::to_string(n) +
                                   " does not match d_gl=" + std::to_string(expected_d_gl) +
                                   " (expected N=" + std::to_string(2 * expected_d_gl * expected_d_gl) +
                                   ")");
  }
  ResponseMatrix out;
  out.F = CMatrix::Zero(n, n);
  std::vector<char> seen(static_cast<size_t>(expected), 0);
  for (const Entry& e : entries) {
    const size_t idx = static_cast<size_t>(e.j) * n + e.l;
    if (seen[idx]) {
      fail(ErrorCode::BadFormat, path + ": duplicate entry for (" + std::to_string(e.j) + "," +
                                     std::to_string(e.l) + ")");
    }
    seen[idx] = 1;
    out.F(e.j, e.l) = e.v;
  }
  out.d_gl = expected_d_gl;
  if (auto meta = read_response_sidecar(path)) {
    out.kappa = meta->kappa;
    out.snr_db = meta->snr_db;
    out.seed = meta->seed;
    if (out.d_gl == 0) out.d_gl = meta->d_gl;
  }
  return out;
}

std::optional<ResponseMatrix> read_response_sidecar(const std::string& csv_path) {
  const std::string path = csv_path + ".json";
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  ResponseMatrix meta;
  try {
    const json j = json::parse(read_text(path));
    meta.d_gl = j.value("d_gl", 0);
    meta.kappa = j.value("kappa", 0.0);
    if (j.contains("snr_db") && !j["snr_db"].is_null()) meta.snr_db = j["snr_db"].get<double>();
    if (j.contains("seed") && !j["seed"].is_null()) meta.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail(ErrorCode::BadFormat, path + ": " + e.what());
  }
  return meta;
}

// --- inversion outputs --------------------------------------------------------

void write_grid_csv(const std::string& path, const ImagingGrid& grid) {
  std::string out = "x,y,z,value\n";
  out.reserve(out.size() + grid.values.size() * 80);
  for (int ix = 0; ix < grid.dims[0]; ++ix) {
    for (int iy = 0; iy < grid.dims[1]; ++iy) {
      for (int iz = 0; iz < grid.dims[2]; ++iz) {
        const Vec3 p = grid.node(ix, iy, iz);
        out += format_sci(p.x());
        out += ',';
        out += format_sci(p.y());
        out += ',';
        out += format_sci(p.z());
        out += ',';
        out += format_sci(grid.values[grid.index(ix, iy, iz)]);
        out += '\n';
      }
    }
  }
  atomic_write_text(path, out);
}

json result_to_json(const MusicResult& result, const RVector& singular_values) {
  json locations = json::array();
  for (const Vec3& z : result.locations) locations.push_back({z.x(), z.y(), z.z()});
  json caps = json::array();
  for (const cplx& c : result.capacitances) {
    caps.push_back({{"re", c.real()}, {"im", c.imag()}});
  }
  json svals = json::array();
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) svals.push_back(singular_values[i]);
  return json{{"locations", std::move(locations)},
              {"capacitances", std::move(caps)},
              {"radii", result.radii},
              {"max_imag_fraction", result.max_imag_fraction},
              {"singular_values", std::move(svals)}};
}

// --- reports ------------------------------------------------------------------

json validity_report_to_json(const ValidityReport& report) {
  json j{{"a", report.a},
         {"M", report.M},
         {"regime_sqrt", report.regime_sqrt},
         {"regime_linear", report.regime_linear},
         {"regime_slp", report.regime_slp},
         {"size_ok", report.size_ok},
         {"cos_condition", report.cos_condition},
         {"capacitance_gap", report.capacitance_gap},
         {"diag_dominance", report.diag_dominance},
         {"a0", report.thresholds.a0},
         {"c0", report.thresholds.c0},
         {"c2", report.thresholds.c2},
         {"c_slp", report.thresholds.c_slp}};
  if (std::isinf(report.d)) {
    j["d"] = "inf";
  } else {
    j["d"] = report.d;
  }
  return j;
}

json capacitance_result_to_json(const CapacitanceResult& result, const TriMesh& mesh) {
  return json{{"capacitance", result.capacitance},
              {"equivalent_radius", result.capacitance / kFourPi},
              {"residual", result.residual},
              {"triangles", mesh.num_triangles()},
              {"total_area", mesh.total_area}};
}

// --- run manifests --------------------------------------------------------------

void write_manifest(const std::string& path, const RunManifest& manifest) {
  json j{{"command", manifest.command},
         {"parameters", manifest.parameters},
         {"tool_version", manifest.tool_version},
         {"outputs", manifest.output_paths},
         {"wall_clock_seconds", manifest.wall_clock_seconds}};
  j["scene"] = manifest.scene_path.empty() ? json(nullptr) : json(manifest.scene_path);
  j["seed"] = manifest.seed ? json(*manifest.seed) : json(nullptr);
  atomic_write_text(path, j.dump(2) + "\n");
}

}  // namespace scatterlax

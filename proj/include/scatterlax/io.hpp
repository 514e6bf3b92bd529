#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scatterlax/capacitance.hpp"
#include "scatterlax/foldy.hpp"
#include "scatterlax/music.hpp"
#include "scatterlax/scene.hpp"
#include "scatterlax/types.hpp"

namespace scatterlax {

// All writers go through a temp file + rename so partial output never lands
// under the final name.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// --- scenes -----------------------------------------------------------------

Scene scene_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
Scene scene_from_json_file(const std::string& path);
nlohmann::json scene_to_json(const Scene& scene);

// --- far-field response matrices ---------------------------------------------

// CSV header j,l,re,im (0-based observation row j, incidence column l) with a
// sidecar <path>.json holding d_gl, kappa, snr_db, seed.
void write_response_csv(const std::string& path, const ResponseMatrix& response);

// Reads the CSV back; N is inferred from the indices and must satisfy
// N = 2*d_gl^2 when d_gl > 0 is supplied. A short file reports its row count.
ResponseMatrix read_response_csv(const std::string& path, int expected_d_gl = 0);

// Sidecar reader; returns nullopt when the sidecar is missing.
std::optional<ResponseMatrix> read_response_sidecar(const std::string& csv_path);

// --- inversion outputs --------------------------------------------------------

void write_grid_csv(const std::string& path, const ImagingGrid& grid);

nlohmann::json result_to_json(const MusicResult& result, const RVector& singular_values);

// --- reports ------------------------------------------------------------------

nlohmann::json validity_report_to_json(const ValidityReport& report);
nlohmann::json capacitance_result_to_json(const CapacitanceResult& result, const TriMesh& mesh);

// --- run manifests --------------------------------------------------------------

struct RunManifest {
  std::string command;
  std::string scene_path;  // empty when the command takes no scene
  nlohmann::json parameters = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  std::string tool_version;
  std::vector<std::string> output_paths;
  double wall_clock_seconds = 0.0;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

// 16 significant digits, scientific; shared by every CSV writer.
std::string format_sci(double v);

}  // namespace scatterlax

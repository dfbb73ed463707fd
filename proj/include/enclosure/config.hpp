#pragma once

#include <optional>
#include <string>
#include <vector>

#include "enclosure/obstacle.hpp"
#include "enclosure/types.hpp"
#include "json.hpp"

namespace enclosure {

nlohmann::json ball_to_json(const Ball& b);
Ball ball_from_json(const nlohmann::json& j);

nlohmann::json obstacle_to_json(const ObstacleShape& o);
// base_dir resolves a relative {"kind": "mesh", "path": ...} reference.
ObstacleShape obstacle_from_json(const nlohmann::json& j,
                                 const std::string& base_dir = "");

struct TauGrid {
  double tau_min = 4.0;
  double tau_max = 40.0;
  int count = 24;
  bool log_spaced = true;

  std::vector<double> values() const;
};

enum class DataMode { geometry, semianalytic, fdtd };
DataMode data_mode_from_string(const std::string& s);
const char* to_string(DataMode m);

struct RunConfig {
  std::optional<ObstacleShape> obstacle;
  Ball source;    // B, emits the probing wave
  Ball receiver;  // B', records it
  TauGrid taus;
  DataMode mode = DataMode::semianalytic;
  double shift = 0.0;   // receiver sub-ball shift s (scan, curvature)
  double shift2 = 0.0;  // second shift for the curvature system
  double h = 0.05;      // FDTD grid spacing
  double T = 0.0;       // FDTD recording time; 0: derive from the geometry
  double cfl = 0.5;
  double domain_halfwidth = 0.0;  // 0: derive from the causal bound
  int omega_level = 4;            // scan direction grid refinement
  double delta_c = 0.0;           // rate tolerance; 0: fit uncertainty
  double theta_count = 16;        // rotation scan sample count
  unsigned seed = 12345;
  int threads = 1;
  std::string out_dir = "out";

  // Named-hypothesis validation (ball disjointness, hull condition, ...).
  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j,
                               const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);
nlohmann::json run_config_to_json(const RunConfig& c);

// Deterministic serialization helpers.
std::string canonical_dump(const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& content);
// Stable FNV-1a content hash (hex), used for simulation cache keys.
std::string content_hash_hex(const std::string& content);

}  // namespace enclosure

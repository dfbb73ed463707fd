#include "enclosure/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace enclosure {

namespace {

nlohmann::json vec3_to_json(const Vec3& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

Vec3 vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw PreconditionError("expected a 3-vector [x, y, z]");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

nlohmann::json ball_to_json(const Ball& b) {
  nlohmann::json j;
  j["center"] = vec3_to_json(b.center);
  j["radius"] = b.radius;
  return j;
}

Ball ball_from_json(const nlohmann::json& j) {
  Ball b;
  b.center = vec3_from_json(j.at("center"));
  b.radius = j.at("radius").get<double>();
  if (!(b.radius > 0.0)) throw PreconditionError("ball radius must be > 0");
  return b;
}

nlohmann::json obstacle_to_json(const ObstacleShape& o) {
  nlohmann::json j;
  switch (o.kind()) {
    case ObstacleKind::sphere:
      j["kind"] = "sphere";
      j["center"] = vec3_to_json(o.center());
      j["radius"] = o.semiaxes().x();
      break;
    case ObstacleKind::ellipsoid: {
      j["kind"] = "ellipsoid";
      j["center"] = vec3_to_json(o.center());
      j["semiaxes"] = vec3_to_json(o.semiaxes());
      nlohmann::json rows = nlohmann::json::array();
      for (int r = 0; r < 3; ++r) {
        rows.push_back(nlohmann::json::array({o.orientation()(r, 0),
                                              o.orientation()(r, 1),
                                              o.orientation()(r, 2)}));
      }
      j["orientation"] = rows;
      break;
    }
    case ObstacleKind::mesh: {
      j["kind"] = "mesh";
      const TriMesh& m = o.mesh_data();
      nlohmann::json verts = nlohmann::json::array();
      for (const auto& v : m.vertices) verts.push_back(vec3_to_json(v));
      nlohmann::json faces = nlohmann::json::array();
      for (const auto& f : m.faces) {
        faces.push_back(nlohmann::json::array({f[0], f[1], f[2]}));
      }
      j["vertices"] = verts;
      j["faces"] = faces;
      break;
    }
  }
  return j;
}

ObstacleShape obstacle_from_json(const nlohmann::json& j,
                                 const std::string& base_dir) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sphere") {
    return ObstacleShape::make_sphere(vec3_from_json(j.at("center")),
                                      j.at("radius").get<double>());
  }
  if (kind == "ellipsoid") {
    Mat3 R = Mat3::Identity();
    if (j.contains("orientation")) {
      const auto& rows = j.at("orientation");
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) R(r, c) = rows.at(r).at(c).get<double>();
      }
    }
    return ObstacleShape::make_ellipsoid(vec3_from_json(j.at("center")),
                                         vec3_from_json(j.at("semiaxes")), R);
  }
  if (kind == "mesh") {
    if (j.contains("path")) {
      std::string path = j.at("path").get<std::string>();
      if (!base_dir.empty() && !path.empty() && path.front() != '/') {
        path = base_dir + "/" + path;
      }
      return ObstacleShape::make_mesh(load_mesh_ascii(path));
    }
    TriMesh m;
    for (const auto& v : j.at("vertices")) m.vertices.push_back(
        vec3_from_json(v));
    for (const auto& f : j.at("faces")) {
      m.faces.push_back({f.at(0).get<int>(), f.at(1).get<int>(),
                         f.at(2).get<int>()});
    }
    return ObstacleShape::make_mesh(std::move(m));
  }
  throw PreconditionError("unknown obstacle kind: " + kind);
}

std::vector<double> TauGrid::values() const {
  if (!(tau_min > 0.0) || !(tau_max >= tau_min) || count < 1) {
    throw PreconditionError(
        "tau grid needs 0 < tau_min <= tau_max and count >= 1");
  }
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(tau_min);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    out.push_back(log_spaced
                      ? tau_min * std::pow(tau_max / tau_min, f)
                      : tau_min + f * (tau_max - tau_min));
  }
  return out;
}

DataMode data_mode_from_string(const std::string& s) {
  if (s == "geometry") return DataMode::geometry;
  if (s == "semianalytic") return DataMode::semianalytic;
  if (s == "fdtd") return DataMode::fdtd;
  throw PreconditionError(
      "unknown mode '" + s + "' (expected geometry | semianalytic | fdtd)");
}

const char* to_string(DataMode m) {
  switch (m) {
    case DataMode::geometry:
      return "geometry";
    case DataMode::semianalytic:
      return "semianalytic";
    case DataMode::fdtd:
      return "fdtd";
  }
  return "?";
}

void RunConfig::validate() const {
  if (!(source.radius > 0.0) || !(receiver.radius > 0.0)) {
    throw PreconditionError("ball radii must be positive");
  }
  const double gap = (source.center - receiver.center).norm() -
                     (source.radius + receiver.radius);
  if (obstacle && !(gap > 0.0)) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "source and receiver balls overlap (gap %.6g <= 0)", gap);
    throw PreconditionError(buf);
  }
  if (obstacle) {
    if (!hull_disjoint(*obstacle, source, receiver)) {
      throw PreconditionError(
          "hull condition violated: the ball-swept segment between source "
          "and receiver meets the obstacle");
    }
  }
  if (!(shift >= 0.0 && shift < receiver.radius)) {
    if (shift != 0.0) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "shift s = %.6g outside [0, receiver radius %.6g)", shift,
                    receiver.radius);
      throw PreconditionError(buf);
    }
  }
  if (shift2 != 0.0 && !(shift2 >= 0.0 && shift2 < receiver.radius)) {
    throw PreconditionError("second shift outside [0, receiver radius)");
  }
  taus.values();  // validates the grid
}

RunConfig run_config_from_json(const nlohmann::json& j,
                               const std::string& base_dir) {
  RunConfig c;
  if (j.contains("obstacle") && !j.at("obstacle").is_null()) {
    c.obstacle = obstacle_from_json(j.at("obstacle"), base_dir);
  }
  c.source = ball_from_json(j.at("source"));
  c.receiver = ball_from_json(j.at("receiver"));
  if (j.contains("tau")) {
    const auto& t = j.at("tau");
    if (t.contains("min")) c.taus.tau_min = t.at("min").get<double>();
    if (t.contains("max")) c.taus.tau_max = t.at("max").get<double>();
    if (t.contains("count")) c.taus.count = t.at("count").get<int>();
    if (t.contains("log")) c.taus.log_spaced = t.at("log").get<bool>();
  }
  if (j.contains("mode")) {
    c.mode = data_mode_from_string(j.at("mode").get<std::string>());
  }
  if (j.contains("shift")) c.shift = j.at("shift").get<double>();
  if (j.contains("shift2")) c.shift2 = j.at("shift2").get<double>();
  if (j.contains("fdtd")) {
    const auto& f = j.at("fdtd");
    if (f.contains("h")) c.h = f.at("h").get<double>();
    if (f.contains("T")) c.T = f.at("T").get<double>();
    if (f.contains("cfl")) c.cfl = f.at("cfl").get<double>();
    if (f.contains("domain_halfwidth")) {
      c.domain_halfwidth = f.at("domain_halfwidth").get<double>();
    }
  }
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    if (s.contains("omega_level")) {
      c.omega_level = s.at("omega_level").get<int>();
    }
    if (s.contains("delta_c")) c.delta_c = s.at("delta_c").get<double>();
    if (s.contains("theta_count")) {
      c.theta_count = s.at("theta_count").get<double>();
    }
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<unsigned>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError("config is not valid JSON: " +
                            std::string(e.what()));
  }
  std::string base_dir = ".";
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) base_dir = path.substr(0, slash);
  return run_config_from_json(j, base_dir);
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["obstacle"] = c.obstacle ? obstacle_to_json(*c.obstacle)
                             : nlohmann::json();
  j["source"] = ball_to_json(c.source);
  j["receiver"] = ball_to_json(c.receiver);
  j["tau"] = {{"min", c.taus.tau_min},
              {"max", c.taus.tau_max},
              {"count", c.taus.count},
              {"log", c.taus.log_spaced}};
  j["mode"] = to_string(c.mode);
  j["shift"] = c.shift;
  j["shift2"] = c.shift2;
  j["fdtd"] = {{"h", c.h},
               {"T", c.T},
               {"cfl", c.cfl},
               {"domain_halfwidth", c.domain_halfwidth}};
  j["scan"] = {{"omega_level", c.omega_level},
               {"delta_c", c.delta_c},
               {"theta_count", c.theta_count}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out_dir"] = c.out_dir;
  return j;
}

std::string canonical_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write file: " + path);
  out << content;
  if (!out) throw PreconditionError("failed writing file: " + path);
}

std::string content_hash_hex(const std::string& content) {
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a 64
  for (const unsigned char ch : content) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace enclosure

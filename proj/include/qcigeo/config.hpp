#pragma once

// Experiment configuration: a JSON document checked against an embedded
// JSON Schema (a draft-07 subset) and then decoded into typed sections.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcigeo/admissibility.hpp"
#include "qcigeo/error.hpp"
#include "qcigeo/geometry.hpp"
#include "qcigeo/json_io.hpp"
#include "qcigeo/lineintegral.hpp"
#include "qcigeo/sweep.hpp"
#include "qcigeo/symbol_dsl.hpp"

namespace qcigeo {

/// Same document as docs/config.schema.json.
inline constexpr std::string_view kConfigSchema = R"SCHEMA({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "qcigeo experiment configuration",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "profile": {
      "type": "object",
      "additionalProperties": false,
      "required": ["kind"],
      "properties": {
        "kind": {"type": "string", "enum": ["sphere", "polynomial-perturbed"]},
        "coefficients": {"type": "array", "items": {"type": "number"}}
      }
    },
    "moment_map": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "p1": {"type": "string", "minLength": 1},
        "p2": {"type": "string", "minLength": 1}
      }
    },
    "geodesic": {
      "type": "object",
      "additionalProperties": false,
      "required": ["kind", "range"],
      "properties": {
        "kind": {"type": "string", "enum": ["latitude", "longitude"]},
        "range": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "coordinate": {"type": "string", "enum": ["t", "theta"]},
        "phi0": {"type": "number"}
      }
    },
    "energies": {
      "type": "object",
      "additionalProperties": false,
      "required": ["E1", "E2"],
      "properties": {
        "E1": {"type": "number"},
        "E2": {"type": "number"},
        "epsilon": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "admissibility": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "n_tau": {"type": "integer", "minimum": 32},
        "n_fiber": {"type": "integer", "minimum": 32},
        "threshold": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "eigen": {
      "type": "object",
      "additionalProperties": false,
      "required": ["k"],
      "properties": {
        "k": {"type": "integer", "minimum": 0},
        "count": {"type": "integer", "minimum": 1},
        "N": {"type": "integer", "minimum": 1}
      }
    },
    "integrate": {
      "type": "object",
      "additionalProperties": false,
      "required": ["l", "k"],
      "properties": {
        "l": {"type": "integer", "minimum": 0},
        "k": {"type": "integer", "minimum": 0},
        "source": {"type": "string", "enum": ["harmonic", "eigensolve"]},
        "N": {"type": "integer", "minimum": 1}
      }
    },
    "sweep": {
      "type": "object",
      "additionalProperties": false,
      "required": ["experiment"],
      "properties": {
        "experiment": {"type": "string", "enum": ["zonal-equator", "tesseral-caustic", "transition-peak", "custom"]},
        "k": {
          "oneOf": [
            {"type": "array", "items": {"type": "integer"}},
            {
              "type": "object",
              "additionalProperties": false,
              "required": ["start", "stop"],
              "properties": {
                "start": {"type": "integer"},
                "stop": {"type": "integer"},
                "step": {"type": "integer", "minimum": 1}
              }
            }
          ]
        },
        "delta0": {"type": "number", "exclusiveMinimum": 0},
        "side": {"type": "string", "enum": ["forbidden", "allowed"]},
        "width_scale": {"type": "number", "exclusiveMinimum": 0},
        "l_ratio": {"type": "integer", "minimum": 1},
        "eigen_grid": {"type": "integer", "minimum": 0}
      }
    },
    "quadrature": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "nodes_per_panel": {"type": "integer", "minimum": 4},
        "panels_per_wavelength": {"type": "number", "minimum": 2},
        "max_panels": {"type": "integer", "minimum": 1}
      }
    },
    "output": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "dir": {"type": "string"},
        "report": {"type": "string", "minLength": 1},
        "cache_dir": {"type": "string"}
      }
    }
  }
}
)SCHEMA";

namespace schema {

inline bool has_type(const nlohmann::json& v, std::string_view type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && d == std::floor(d);
  }
  return false;
}

/// Returns the first violation as "<path>: <message>", or nullopt.
inline std::optional<std::string> validate(const nlohmann::json& v, const nlohmann::json& s,
                                           const std::string& path = "$") {
  if (s.contains("type") && !has_type(v, s["type"].get<std::string>()))
    return path + ": expected " + s["type"].get<std::string>();
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& option : s["enum"]) found = found || option == v;
    if (!found) return path + ": value " + v.dump() + " not in " + s["enum"].dump();
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (s.contains("minimum") && d < s["minimum"].get<double>())
      return path + ": must be >= " + s["minimum"].dump();
    if (s.contains("exclusiveMinimum") && !(d > s["exclusiveMinimum"].get<double>()))
      return path + ": must be > " + s["exclusiveMinimum"].dump();
  }
  if (v.is_string() && s.contains("minLength") && v.get<std::string>().size() < s["minLength"].get<std::size_t>())
    return path + ": string too short";
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
      return path + ": needs at least " + s["minItems"].dump() + " items";
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
      return path + ": allows at most " + s["maxItems"].dump() + " items";
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i)
        if (auto err = validate(v[i], s["items"], path + "[" + std::to_string(i) + "]")) return err;
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& key : s["required"])
        if (!v.contains(key.get<std::string>())) return path + ": missing required key \"" + key.get<std::string>() + "\"";
    const nlohmann::json* props = s.contains("properties") ? &s["properties"] : nullptr;
    for (const auto& [key, value] : v.items()) {
      if (props && props->contains(key)) {
        if (auto err = validate(value, (*props)[key], path + "." + key)) return err;
      } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
        return path + ": unknown key \"" + key + "\"";
      }
    }
  }
  if (s.contains("oneOf")) {
    int matches = 0;
    std::string first_error;
    for (const auto& option : s["oneOf"]) {
      auto err = validate(v, option, path);
      if (!err) ++matches;
      else if (first_error.empty()) first_error = *err;
    }
    if (matches != 1)
      return matches == 0 ? path + ": matches no alternative (" + first_error + ")"
                          : path + ": matches more than one alternative";
  }
  return std::nullopt;
}

inline const nlohmann::json& config_schema() {
  static const nlohmann::json s = nlohmann::json::parse(kConfigSchema);
  return s;
}

}  // namespace schema

struct GeodesicSpec {
  GeodesicKind kind = GeodesicKind::latitude;
  Interval range{};
  bool by_angle = false;
  double phi0 = 0.0;
};

struct EigenSpec {
  int k = 0;
  std::size_t count = 5;
  std::size_t n = 4096;
};

enum class IntegrandSource { harmonic, eigensolve };

struct IntegrateSpec {
  int l = 0;
  int k = 0;
  IntegrandSource source = IntegrandSource::harmonic;
  std::size_t n = 4096;
};

struct SweepSpec {
  Experiment experiment = Experiment::custom;
  std::optional<std::vector<int>> k_list;
  double delta0 = 0.3;
  ArcSide side = ArcSide::forbidden;
  double width_scale = 1.0;
  int l_ratio = 2;
  std::size_t eigen_grid = 0;
};

struct OutputSpec {
  std::filesystem::path dir = ".";
  std::optional<std::string> report;
  std::optional<std::filesystem::path> cache_dir;
};

struct ExperimentConfig {
  ProfileFunction profile = sphere_profile();
  std::optional<std::string> p1;
  std::optional<std::string> p2;
  std::optional<GeodesicSpec> geodesic;
  std::optional<EnergyPair> energies;
  AdmissibilityGrid grid{};
  double threshold = 1e-3;
  std::optional<EigenSpec> eigen;
  std::optional<IntegrateSpec> integrate;
  std::optional<SweepSpec> sweep;
  QuadratureSpec quadrature{};
  OutputSpec output{};
};

/// k values from start to stop inclusive.
inline std::vector<int> expand_k_range(int start, int stop, int step) {
  if (step < 1) throw Error(ErrorKind::config, "k range step must be >= 1");
  std::vector<int> ks;
  for (long k = start; k <= stop; k += step) ks.push_back(static_cast<int>(k));
  return ks;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (auto err = schema::validate(j, schema::config_schema())) throw Error(ErrorKind::config, *err);
  ExperimentConfig c;
  try {
    if (j.contains("profile")) c.profile = profile_from_json(j["profile"]);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, std::string("profile: ") + e.what());
  }
  if (j.contains("moment_map")) {
    const auto& m = j["moment_map"];
    if (m.contains("p1")) c.p1 = m["p1"].get<std::string>();
    if (m.contains("p2")) c.p2 = m["p2"].get<std::string>();
  }
  if (j.contains("geodesic")) {
    const auto& g = j["geodesic"];
    GeodesicSpec s;
    s.kind = g["kind"] == "latitude" ? GeodesicKind::latitude : GeodesicKind::longitude;
    s.range = {g["range"][0].get<double>(), g["range"][1].get<double>()};
    s.by_angle = g.value("coordinate", std::string("t")) == "theta";
    s.phi0 = g.value("phi0", 0.0);
    if (s.kind == GeodesicKind::latitude && g.contains("coordinate"))
      throw Error(ErrorKind::config, "$.geodesic: \"coordinate\" applies to longitude arcs only");
    c.geodesic = s;
  }
  if (j.contains("energies")) {
    const auto& e = j["energies"];
    EnergyPair p{e["E1"].get<double>(), e["E2"].get<double>(), std::nullopt};
    if (e.contains("epsilon")) p.epsilon = e["epsilon"].get<double>();
    c.energies = p;
  }
  if (j.contains("admissibility")) {
    const auto& a = j["admissibility"];
    c.grid.n_tau = a.value("n_tau", c.grid.n_tau);
    c.grid.n_fiber = a.value("n_fiber", c.grid.n_fiber);
    c.threshold = a.value("threshold", c.threshold);
  }
  if (j.contains("eigen")) {
    const auto& e = j["eigen"];
    EigenSpec s;
    s.k = e["k"].get<int>();
    s.count = e.value("count", s.count);
    s.n = e.value("N", s.n);
    c.eigen = s;
  }
  if (j.contains("integrate")) {
    const auto& e = j["integrate"];
    IntegrateSpec s;
    s.l = e["l"].get<int>();
    s.k = e["k"].get<int>();
    s.source = e.value("source", std::string("harmonic")) == "eigensolve" ? IntegrandSource::eigensolve
                                                                          : IntegrandSource::harmonic;
    s.n = e.value("N", s.n);
    c.integrate = s;
  }
  if (j.contains("sweep")) {
    const auto& w = j["sweep"];
    SweepSpec s;
    s.experiment = *experiment_from_string(w["experiment"].get<std::string>());
    if (w.contains("k")) {
      const auto& k = w["k"];
      if (k.is_array()) s.k_list = k.get<std::vector<int>>();
      else s.k_list = expand_k_range(k["start"].get<int>(), k["stop"].get<int>(), k.value("step", 1));
    }
    s.delta0 = w.value("delta0", s.delta0);
    s.side = w.value("side", std::string("forbidden")) == "allowed" ? ArcSide::allowed : ArcSide::forbidden;
    s.width_scale = w.value("width_scale", s.width_scale);
    s.l_ratio = w.value("l_ratio", s.l_ratio);
    s.eigen_grid = w.value("eigen_grid", s.eigen_grid);
    c.sweep = s;
  }
  if (j.contains("quadrature")) {
    try {
      c.quadrature = quadrature_from_json(j["quadrature"]);
    } catch (const Error& e) {
      throw Error(ErrorKind::config, std::string("$.quadrature: ") + e.what());
    }
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (o.contains("dir")) c.output.dir = o["dir"].get<std::string>();
    if (o.contains("report")) c.output.report = o["report"].get<std::string>();
    if (o.contains("cache_dir")) c.output.cache_dir = std::filesystem::path(o["cache_dir"].get<std::string>());
  }
  return c;
}

inline ExperimentConfig parse_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

/// The arc described by a geodesic section.
inline Geodesic build_geodesic(const ProfileFunction& profile, const GeodesicSpec& g) {
  if (g.kind == GeodesicKind::latitude) return latitude_arc(profile, g.range);
  return g.by_angle ? longitude_arc_by_angle(profile, g.range, g.phi0) : longitude_arc(profile, g.range, g.phi0);
}

}  // namespace qcigeo

#pragma once

// JSON views of profiles, quadrature specs and admissibility reports.

#include <string>
#include <vector>

#include <json.hpp>

#include "qcigeo/admissibility.hpp"
#include "qcigeo/error.hpp"
#include "qcigeo/geometry.hpp"
#include "qcigeo/lineintegral.hpp"

namespace qcigeo {

using nlohmann::json;

inline json profile_to_json(const ProfileFunction& p) {
  return json{{"kind", to_string(p.kind())}, {"coefficients", p.coefficients()}};
}

inline ProfileFunction profile_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error(ErrorKind::config, "profile must be an object with a string \"kind\"");
  for (const auto& [key, value] : j.items())
    if (key != "kind" && key != "coefficients")
      throw Error(ErrorKind::config, "unknown profile key \"" + key + "\"");
  const std::string kind = j["kind"].get<std::string>();
  std::vector<double> coefficients;
  if (j.contains("coefficients")) {
    if (!j["coefficients"].is_array()) throw Error(ErrorKind::config, "profile coefficients must be an array");
    for (const auto& c : j["coefficients"]) {
      if (!c.is_number()) throw Error(ErrorKind::config, "profile coefficients must be numbers");
      coefficients.push_back(c.get<double>());
    }
  }
  if (kind == "sphere") return make_profile(ProfileKind::sphere, coefficients);
  if (kind == "polynomial-perturbed") return make_profile(ProfileKind::polynomial_perturbed, coefficients);
  throw Error(ErrorKind::config, "unknown profile kind \"" + kind + "\"");
}

inline json quadrature_to_json(const QuadratureSpec& q) {
  return json{{"nodes_per_panel", q.nodes_per_panel},
              {"panels_per_wavelength", q.panels_per_wavelength},
              {"max_panels", q.max_panels}};
}

inline QuadratureSpec quadrature_from_json(const json& j) {
  QuadratureSpec q;
  q.nodes_per_panel = j.value("nodes_per_panel", q.nodes_per_panel);
  q.panels_per_wavelength = j.value("panels_per_wavelength", q.panels_per_wavelength);
  q.max_panels = j.value("max_panels", q.max_panels);
  q.validate();
  return q;
}

inline json admissibility_to_json(const AdmissibilityReport& r) {
  const PhasePoint& w = r.witness.point;
  return json{{"verdict", to_string(r.verdict)},
              {"min_derivative", r.min_derivative},
              {"witness",
               {{"tau", r.witness.tau},
                {"sigma", r.witness.sigma},
                {"t", w.t},
                {"phi", w.phi},
                {"xi_t", w.xi_t},
                {"xi_phi", w.xi_phi}}},
              {"principal_type_ok", r.principal_type_ok},
              {"grid", {{"n_tau", r.grid.n_tau}, {"n_fiber", r.grid.n_fiber}}},
              {"epsilon", r.epsilon},
              {"p2_scale", r.p2_scale},
              {"threshold", r.threshold},
              {"band_points", r.band_points}};
}

}  // namespace qcigeo

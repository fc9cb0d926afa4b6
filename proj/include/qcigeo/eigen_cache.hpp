#pragma once

// On-disk cache of radial eigenpairs: <dir>/<key>/meta.json plus radial.csv,
// keyed by a hash of (profile, k, N).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcigeo/eigensolve.hpp"
#include "qcigeo/json_io.hpp"
#include "qcigeo/report_io.hpp"

namespace qcigeo {

struct CachedEigenpair {
  std::size_t l_index = 0;
  double lambda = 0.0;
  std::vector<double> values;

  friend bool operator==(const CachedEigenpair&, const CachedEigenpair&) = default;
};

struct EigenCacheEntry {
  ProfileFunction profile = sphere_profile();
  int k = 0;
  std::size_t n = 0;
  std::vector<double> theta;
  std::vector<CachedEigenpair> pairs;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string eigen_cache_key(const ProfileFunction& profile, int k, std::size_t n) {
  std::string canon = to_string(profile.kind());
  for (double c : profile.coefficients()) canon += ',' + format_double(c);
  canon += "|k=" + std::to_string(k) + "|N=" + std::to_string(n);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return hex;
}

inline EigenCacheEntry make_cache_entry(const std::vector<JointEigenfunction>& modes) {
  if (modes.empty()) throw Error(ErrorKind::invalid_argument, "no eigenfunctions to cache");
  EigenCacheEntry e;
  e.profile = modes.front().profile();
  e.k = modes.front().k();
  e.n = modes.front().theta_grid().size();
  e.theta = modes.front().theta_grid();
  for (const JointEigenfunction& u : modes) e.pairs.push_back({u.l_index(), u.lambda(), u.radial_values()});
  return e;
}

inline void store_eigen_cache(const std::filesystem::path& root, const EigenCacheEntry& e) {
  const std::filesystem::path dir = root / eigen_cache_key(e.profile, e.k, e.n);
  nlohmann::json meta{{"profile", profile_to_json(e.profile)}, {"k", e.k}, {"N", e.n}, {"count", e.pairs.size()}};
  nlohmann::json lambdas = nlohmann::json::array();
  for (const auto& p : e.pairs) lambdas.push_back({{"l_index", p.l_index}, {"lambda", p.lambda}});
  meta["eigenvalues"] = lambdas;

  std::string csv = "theta";
  for (const auto& p : e.pairs) csv += ",w" + std::to_string(p.l_index);
  csv += '\n';
  for (std::size_t i = 0; i < e.theta.size(); ++i) {
    csv += format_double(e.theta[i]);
    for (const auto& p : e.pairs) csv += ',' + format_double(p.values[i]);
    csv += '\n';
  }
  write_atomically(dir / "radial.csv", csv);
  write_atomically(dir / "meta.json", meta.dump(2) + "\n");
}

/// The cached entry for (profile, k, N) if it holds at least `count` pairs.
inline std::optional<EigenCacheEntry> load_eigen_cache(const std::filesystem::path& root,
                                                       const ProfileFunction& profile, int k, std::size_t n,
                                                       std::size_t count) {
  const std::filesystem::path dir = root / eigen_cache_key(profile, k, n);
  std::ifstream meta_in(dir / "meta.json");
  std::ifstream csv_in(dir / "radial.csv");
  if (!meta_in || !csv_in) return std::nullopt;
  try {
    const nlohmann::json meta = nlohmann::json::parse(meta_in);
    EigenCacheEntry e;
    e.profile = profile_from_json(meta.at("profile"));
    e.k = meta.at("k").get<int>();
    e.n = meta.at("N").get<std::size_t>();
    if (!(e.profile == profile) || e.k != k || e.n != n) return std::nullopt;
    for (const auto& item : meta.at("eigenvalues"))
      e.pairs.push_back({item.at("l_index").get<std::size_t>(), item.at("lambda").get<double>(), {}});
    if (e.pairs.size() < count) return std::nullopt;

    std::string line;
    std::getline(csv_in, line);
    while (std::getline(csv_in, line)) {
      std::istringstream row(line);
      std::string cell;
      std::getline(row, cell, ',');
      e.theta.push_back(detail::parse_field<double>(cell, 0, "theta"));
      for (auto& p : e.pairs) {
        if (!std::getline(row, cell, ',')) return std::nullopt;
        p.values.push_back(detail::parse_field<double>(cell, 0, "w"));
      }
    }
    if (e.theta.size() != n) return std::nullopt;
    e.pairs.resize(count);
    return e;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace qcigeo

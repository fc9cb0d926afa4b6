#pragma once

// Sweep reports on disk: rows as CSV (k,l,h,abs_I,re_I,im_I) plus a JSON
// sidecar with the fit metadata. Numbers are written in shortest round-trip
// form, so save/load is lossless.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "qcigeo/error.hpp"
#include "qcigeo/json_io.hpp"
#include "qcigeo/sweep.hpp"

namespace qcigeo {

inline constexpr std::string_view kReportHeader = "k,l,h,abs_I,re_I,im_I";

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".json");
  return p;
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::malformed_file, "cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error(ErrorKind::malformed_file, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string report_csv(const SweepReport& report) {
  std::string out(kReportHeader);
  out += '\n';
  for (const SweepRow& r : report.rows) {
    out += std::to_string(r.k) + ',' + std::to_string(r.l) + ',' + format_double(r.h) + ',' +
           format_double(r.abs_I) + ',' + format_double(r.re_I) + ',' + format_double(r.im_I) + '\n';
  }
  return out;
}

inline nlohmann::json report_sidecar(const SweepReport& report) {
  const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return nlohmann::json{{"experiment", to_string(report.experiment)},
                        {"slope", opt(report.slope)},
                        {"intercept_logC", opt(report.intercept_logC)},
                        {"r_squared", opt(report.r_squared)},
                        {"delta0", opt(report.delta0)},
                        {"quadrature", report.quadrature ? quadrature_to_json(*report.quadrature)
                                                         : nlohmann::json(nullptr)}};
}

inline void save_report(const SweepReport& report, const std::filesystem::path& csv_path) {
  write_atomically(csv_path, report_csv(report));
  write_atomically(sidecar_path(csv_path), report_sidecar(report).dump(2) + "\n");
}

namespace detail {

template <class T>
T parse_field(std::string_view text, std::size_t line, std::string_view name) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw FileError(line, "field " + std::string(name) + " is not a number: \"" + std::string(text) + "\"");
  return value;
}

inline std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw FileError(0, std::string("sidecar is missing key \"") + key + "\"");
  const auto& v = j[key];
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw FileError(0, std::string("sidecar key \"") + key + "\" must be a number or null");
  return v.get<double>();
}

}  // namespace detail

/// Parses report rows from CSV text; errors name the offending line.
inline std::vector<SweepRow> parse_report_csv(const std::string& text) {
  std::vector<SweepRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  static constexpr std::string_view names[] = {"k", "l", "h", "abs_I", "re_I", "im_I"};
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != kReportHeader)
        throw FileError(number, "expected header \"" + std::string(kReportHeader) + "\"");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 6)
      throw FileError(number, "expected 6 fields, found " + std::to_string(fields.size()));
    SweepRow r;
    r.k = detail::parse_field<int>(fields[0], number, names[0]);
    r.l = detail::parse_field<int>(fields[1], number, names[1]);
    r.h = detail::parse_field<double>(fields[2], number, names[2]);
    r.abs_I = detail::parse_field<double>(fields[3], number, names[3]);
    r.re_I = detail::parse_field<double>(fields[4], number, names[4]);
    r.im_I = detail::parse_field<double>(fields[5], number, names[5]);
    rows.push_back(r);
  }
  if (!header_seen) throw FileError(1, "empty report file");
  return rows;
}

inline SweepReport load_report(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw FileError(0, "cannot open report " + csv_path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();

  SweepReport report;
  report.rows = parse_report_csv(buffer.str());

  std::ifstream side(sidecar_path(csv_path), std::ios::binary);
  if (!side) throw FileError(0, "cannot open sidecar " + sidecar_path(csv_path).string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(side);
  } catch (const nlohmann::json::exception& e) {
    throw FileError(0, std::string("sidecar is not valid JSON: ") + e.what());
  }
  if (!meta.is_object() || !meta.contains("experiment") || !meta["experiment"].is_string())
    throw FileError(0, "sidecar needs a string \"experiment\"");
  const auto exp = experiment_from_string(meta["experiment"].get<std::string>());
  if (!exp) throw FileError(0, "unknown experiment \"" + meta["experiment"].get<std::string>() + "\"");
  report.experiment = *exp;
  report.slope = detail::optional_number(meta, "slope");
  report.intercept_logC = detail::optional_number(meta, "intercept_logC");
  report.r_squared = detail::optional_number(meta, "r_squared");
  report.delta0 = detail::optional_number(meta, "delta0");
  if (!meta.contains("quadrature")) throw FileError(0, "sidecar is missing key \"quadrature\"");
  if (!meta["quadrature"].is_null()) {
    try {
      report.quadrature = quadrature_from_json(meta["quadrature"]);
    } catch (const std::exception& e) {
      throw FileError(0, std::string("bad quadrature block: ") + e.what());
    }
  }
  return report;
}

}  // namespace qcigeo

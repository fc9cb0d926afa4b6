#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcigeo/admissibility.hpp"
#include "qcigeo/eigen_cache.hpp"
#include "qcigeo/eigensolve.hpp"
#include "qcigeo/json_io.hpp"
#include "qcigeo/lineintegral.hpp"
#include "qcigeo/parallel.hpp"
#include "qcigeo/report_io.hpp"
#include "qcigeo/specfun.hpp"
#include "qcigeo/sweep.hpp"

namespace qcigeo::cli {

namespace {

int report_error(const std::exception& e, std::ostream& err) {
  if (const auto* q = dynamic_cast<const Error*>(&e)) {
    err << "error (" << to_string(q->kind()) << "): " << q->what() << '\n';
    if (q->kind() == ErrorKind::degenerate_fit) return exit_fit_degenerate;
  } else {
    err << "error: " << e.what() << '\n';
  }
  return exit_config;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  // no "-0.000"
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::filesystem::path out_dir(const ExperimentConfig& c, const RunOptions& o) {
  return o.out_dir ? *o.out_dir : c.output.dir;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::config, what);
}

std::vector<int> default_k_list(Experiment e) {
  switch (e) {
    case Experiment::zonal_equator: return expand_k_range(100, 1000, 100);
    case Experiment::tesseral_caustic: return {25, 50, 100, 200, 400};
    case Experiment::transition_peak: return {50, 100, 200, 400, 800};
    case Experiment::custom: break;
  }
  throw Error(ErrorKind::config, "$.sweep: the custom experiment needs an explicit \"k\"");
}

}  // namespace

int cmd_admissible(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    require(config.geodesic.has_value(), "admissible needs a \"geodesic\" section");
    require(config.energies.has_value(), "admissible needs an \"energies\" section");
    const MomentMap map = make_moment_map(config.profile, config.p1, config.p2);
    const Geodesic gamma = build_geodesic(config.profile, *config.geodesic);
    const AdmissibilityReport r = check_admissible(map, gamma, *config.energies, config.grid, config.threshold);
    nlohmann::json j = admissibility_to_json(r);
    j["p1"] = map.p1.to_string();
    j["p2"] = map.p2.to_string();
    j["geodesic"] = {{"kind", to_string(gamma.kind())},
                     {"range", {gamma.coordinate_range().lo, gamma.coordinate_range().hi}},
                     {"fixed", gamma.fixed_coordinate()}};
    out << j.dump(2) << '\n';
    switch (r.verdict) {
      case Verdict::admissible: return exit_ok;
      case Verdict::not_admissible: return exit_not_admissible;
      case Verdict::empty_band: return exit_empty_band;
    }
    return exit_config;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_eigen(const ExperimentConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    require(config.eigen.has_value(), "eigen needs an \"eigen\" section");
    const EigenSpec& s = *config.eigen;
    if (s.n < 256 || s.n % 2 != 0) throw Error(ErrorKind::config, "N must be even and >= 256");
    if (s.n < 20 * static_cast<std::size_t>(s.k))
      throw Error(ErrorKind::config, "N = " + std::to_string(s.n) + " is too coarse for k = " +
                                         std::to_string(s.k) + " (needs N >= 20 k)");
    if (s.count > s.n / 4) throw Error(ErrorKind::config, "count must be at most N / 4");

    const std::filesystem::path cache_root =
        config.output.cache_dir ? *config.output.cache_dir : out_dir(config, options) / "eigen_cache";
    std::optional<EigenCacheEntry> entry = load_eigen_cache(cache_root, config.profile, s.k, s.n, s.count);
    if (entry) {
      err << "eigen: served from cache " << (cache_root / eigen_cache_key(config.profile, s.k, s.n)).string()
          << '\n';
    } else {
      std::vector<std::optional<JointEigenfunction>> slots(s.count);
      parallel_for(s.count, options.threads, [&](std::size_t j) {
        slots[j] = solve_joint_eigenfunction(config.profile, s.k, j, s.n);
      });
      std::vector<JointEigenfunction> modes;
      for (auto& m : slots) modes.push_back(std::move(*m));
      entry = make_cache_entry(modes);
      store_eigen_cache(cache_root, *entry);
      err << "eigen: cached in " << (cache_root / eigen_cache_key(config.profile, s.k, s.n)).string() << '\n';
    }

    out << "# profile=" << to_string(config.profile.kind()) << " k=" << s.k << " N=" << s.n << '\n';
    out << "l_index lambda h\n";
    for (const CachedEigenpair& p : entry->pairs) {
      const double lambda = std::abs(p.lambda) < 1e-9 ? 0.0 : p.lambda;
      const std::string h = lambda > 0.0 ? general(1.0 / std::sqrt(lambda)) : "inf";
      out << p.l_index << ' ' << fixed(lambda, 9) << ' ' << h << '\n';
    }
    return exit_ok;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_integrate(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    require(config.integrate.has_value(), "integrate needs an \"integrate\" section");
    require(config.geodesic.has_value(), "integrate needs a \"geodesic\" section");
    const IntegrateSpec& s = *config.integrate;
    if (s.k > s.l) throw Error(ErrorKind::config, "integrate needs 0 <= k <= l");
    if (s.l < 1) throw Error(ErrorKind::config, "integrate needs l >= 1 so that h is finite");
    const Geodesic gamma = build_geodesic(config.profile, *config.geodesic);

    AdaptiveIntegral result;
    double h = 0.0;
    if (s.source == IntegrandSource::harmonic) {
      if (config.profile.kind() != ProfileKind::sphere)
        throw Error(ErrorKind::config, "source \"harmonic\" is defined on the sphere; use \"eigensolve\"");
      h = make_harmonic_index(s.l, s.k).h;
      const int l = s.l;
      const int k = s.k;
      const auto u = [l, k](double t, double phi) { return assoc_legendre_norm(l, k, t) * std::polar(1.0, k * phi); };
      result = integrate_adaptive(u, gamma, config.quadrature, h);
    } else {
      const JointEigenfunction mode =
          solve_joint_eigenfunction(config.profile, s.k, static_cast<std::size_t>(s.l - s.k), s.n);
      h = mode.h();
      const auto u = [&mode](double t, double phi) { return mode.value(t, phi); };
      result = integrate_adaptive(u, gamma, config.quadrature, h);
    }
    const nlohmann::json j{{"l", s.l},
                           {"k", s.k},
                           {"h", h},
                           {"re_I", result.value.real()},
                           {"im_I", result.value.imag()},
                           {"abs_I", std::abs(result.value)},
                           {"error_estimate", result.error_estimate},
                           {"panels", result.panels}};
    out << j.dump(2) << '\n';
    return exit_ok;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_sweep(const ExperimentConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    require(config.sweep.has_value(), "sweep needs a \"sweep\" section");
    const SweepSpec& s = *config.sweep;
    const std::vector<int> ks = s.k_list ? *s.k_list : default_k_list(s.experiment);
    const SweepOptions sweep_options{config.quadrature, options.threads};

    SweepReport report;
    switch (s.experiment) {
      case Experiment::zonal_equator: {
        const Geodesic arc = config.geodesic ? build_geodesic(config.profile, *config.geodesic)
                                             : latitude_arc(config.profile, Interval{0.0, std::numbers::pi / 3.0});
        report = run_zonal_sweep(ks, arc, sweep_options);
        break;
      }
      case Experiment::tesseral_caustic:
        report = run_tesseral_sweep(ks, s.delta0, config.profile, sweep_options, TesseralOptions{s.side, s.eigen_grid});
        break;
      case Experiment::transition_peak:
        report = run_transition_peak_sweep(ks, s.width_scale, options.threads);
        break;
      case Experiment::custom: {
        require(config.geodesic.has_value(), "the custom experiment needs a \"geodesic\" section");
        report = run_harmonic_family_sweep(ks, s.l_ratio, build_geodesic(config.profile, *config.geodesic),
                                           sweep_options);
        break;
      }
    }
    const std::filesystem::path path =
        out_dir(config, options) / (config.output.report ? *config.output.report
                                                         : std::string(to_string(s.experiment)) + ".csv");
    save_report(report, path);
    err << "sweep: wrote " << path.string() << " and " << sidecar_path(path).string() << '\n';
    out << "slope=" << fixed(*report.slope, 6) << " R2=" << fixed(*report.r_squared, 6) << '\n';
    return exit_ok;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_plotdata(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  try {
    const SweepReport report = load_report(path);
    out << "# experiment=" << to_string(report.experiment) << '\n';
    out << "# rows=" << report.rows.size() << '\n';
    if (report.slope && report.intercept_logC && report.r_squared) {
      out << "# fit: log|I| = " << format_double(*report.intercept_logC) << " + " << format_double(*report.slope)
          << " * log h\n";
      out << "# slope=" << format_double(*report.slope) << " intercept_logC=" << format_double(*report.intercept_logC)
          << " r_squared=" << format_double(*report.r_squared) << '\n';
    } else {
      out << "# fit: absent\n";
    }
    if (report.delta0) out << "# delta0=" << format_double(*report.delta0) << '\n';
    out << "# columns: log_h log_abs_I\n";
    for (const SweepRow& r : report.rows) {
      if (!(r.abs_I > 0.0) || !(r.h > 0.0)) {
        out << "# skipped k=" << r.k << " (zero magnitude)\n";
        continue;
      }
      out << format_double(std::log(r.h)) << ' ' << format_double(std::log(r.abs_I)) << '\n';
    }
    return exit_ok;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int run_with_config(const char* subcommand, const std::filesystem::path& path, const RunOptions& options,
                    std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  try {
    config = load_config(path);
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  const std::string_view name(subcommand);
  if (name == "admissible") return cmd_admissible(config, out, err);
  if (name == "eigen") return cmd_eigen(config, options, out, err);
  if (name == "integrate") return cmd_integrate(config, out, err);
  if (name == "sweep") return cmd_sweep(config, options, out, err);
  err << "error: unknown subcommand " << name << '\n';
  return exit_config;
}

}  // namespace qcigeo::cli

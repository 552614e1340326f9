#include "coherent/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "coherent/analysis.hpp"
#include "coherent/collection.hpp"
#include "coherent/crystal.hpp"
#include "coherent/errors.hpp"
#include "coherent/optimize.hpp"
#include "coherent/scattering.hpp"

namespace coherent {

using nlohmann::json;

namespace {

constexpr double kMicron = 1e-6;
constexpr double kDeg = constants::pi / 180.0;

// Shortest representation that parses back to the identical double.
std::string num(double x) { return fmt::format("{}", x); }

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line.push_back(',');
    line += cells[i];
  }
  line.push_back('\n');
  return line;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string join_numbers(const std::vector<double>& xs, char sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s.push_back(sep);
    s += num(xs[i]);
  }
  return s;
}

ScatterScenario scenario_from_config(const RunConfig& cfg) {
  const auto& sp = cfg.ion_species();
  ScatterScenario s;
  s.geometry = {cfg.resolved_length_scale(), equilibrium_positions(cfg.ions)};
  s.wavenumber = sp.wavenumber();
  s.excitation_angle = cfg.excitation_angle;
  s.phases = cfg.phases;
  s.keff = cfg.keff;
  if (cfg.thermal) {
    const double wz = axial_frequency_for_length_scale(s.geometry.length_scale, sp);
    const auto modes = axial_modes(s.geometry, wz);
    const double t = cfg.temperature ? *cfg.temperature : doppler_temperature(sp);
    s.pair_variance = pair_distance_variance(modes, sp, t);
  }
  return s;
}

std::string positions_output(const RunConfig& cfg) {
  const auto v = equilibrium_positions(cfg.ions);
  const double l = cfg.resolved_length_scale();
  if (cfg.format == OutputFormat::json) {
    json j;
    j["n"] = cfg.ions;
    j["length_scale_um"] = l / kMicron;
    j["positions"] = v;
    std::vector<double> z;
    for (double x : v) z.push_back(l * x / kMicron);
    j["z_um"] = z;
    return dump(j);
  }
  std::string out = csv_row({"index", "v", "z_um"});
  for (std::size_t i = 0; i < v.size(); ++i)
    out += csv_row({std::to_string(i + 1), num(v[i]), num(l * v[i] / kMicron)});
  return out;
}

std::string modes_output(const RunConfig& cfg) {
  const auto v = equilibrium_positions(cfg.ions);
  const double wz = cfg.resolved_axial_freq();
  const auto modes = axial_modes(v, wz);
  const std::size_t n = v.size();
  if (cfg.format == OutputFormat::json) {
    json j;
    j["n"] = cfg.ions;
    j["axial_freq_MHz"] = mhz_from_angular(wz);
    j["eigenvalues"] = modes.eigenvalues;
    std::vector<double> f;
    for (double w : modes.frequencies) f.push_back(mhz_from_angular(w));
    j["frequencies_MHz"] = f;
    json vecs = json::array();
    for (std::size_t p = 0; p < n; ++p) vecs.push_back(modes.eigenvectors.column(p));
    j["eigenvectors"] = vecs;
    return dump(j);
  }
  std::vector<std::string> header = {"mode", "eigenvalue", "frequency_MHz"};
  for (std::size_t i = 0; i < n; ++i) header.push_back(fmt::format("b_{}", i + 1));
  std::string out = csv_row(header);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<std::string> row = {std::to_string(p + 1), num(modes.eigenvalues[p]),
                                    num(mhz_from_angular(modes.frequencies[p]))};
    for (std::size_t i = 0; i < n; ++i) row.push_back(num(modes.eigenvectors(i, p)));
    out += csv_row(row);
  }
  return out;
}

std::string pattern_output(const RunConfig& cfg) {
  const auto s = scenario_from_config(cfg);
  std::vector<double> grid(static_cast<std::size_t>(cfg.beta_count));
  for (int i = 0; i < cfg.beta_count; ++i) {
    grid[i] = cfg.beta_count == 1
                  ? cfg.beta_start
                  : cfg.beta_start + (cfg.beta_stop - cfg.beta_start) * i / (cfg.beta_count - 1);
  }
  if (cfg.beta_count > 1) grid.back() = cfg.beta_stop;
  const auto p = pattern(s, grid);
  if (cfg.format == OutputFormat::json) {
    json j;
    std::vector<double> deg;
    for (double b : p.beta) deg.push_back(b / kDeg);
    j["beta_deg"] = deg;
    j["intensity"] = p.intensity;
    return dump(j);
  }
  std::string out = csv_row({"beta_deg", "intensity"});
  for (std::size_t i = 0; i < p.beta.size(); ++i)
    out += csv_row({num(p.beta[i] / kDeg), num(p.intensity[i])});
  return out;
}

std::string enhance_output(const RunConfig& cfg) {
  const auto s = scenario_from_config(cfg);
  const auto ap = CollectionAperture::from_na(cfg.numerical_aperture);
  const auto r = relative_enhancement(s, ap);
  std::optional<double> abs;
  if (cfg.base_abs_efficiency)
    abs = absolute_efficiency(r.relative_enhancement, *cfg.base_abs_efficiency);

  if (cfg.format == OutputFormat::json) {
    json j;
    j["n"] = r.ions;
    j["species"] = cfg.species;
    j["l_um"] = r.length_scale / kMicron;
    j["alpha_deg"] = r.excitation_angle / kDeg;
    j["NA"] = r.numerical_aperture;
    j["thermal"] = r.thermal;
    j["phased"] = r.phased;
    j["flux"] = r.flux;
    j["P_D"] = r.collection_efficiency;
    j["P_D_rel"] = r.relative_enhancement;
    if (abs) j["P_D_abs"] = *abs;
    return dump(j);
  }
  std::vector<std::string> header = {"n",       "species", "l_um", "alpha_deg", "NA", "thermal",
                                     "phased",  "flux",    "P_D",  "P_D_rel"};
  std::vector<std::string> row = {std::to_string(r.ions), cfg.species, num(r.length_scale / kMicron),
                                  num(r.excitation_angle / kDeg), num(r.numerical_aperture),
                                  r.thermal ? "true" : "false", r.phased ? "true" : "false",
                                  num(r.flux), num(r.collection_efficiency),
                                  num(r.relative_enhancement)};
  if (abs) {
    header.push_back("P_D_abs");
    row.push_back(num(*abs));
  }
  return csv_row(header) + csv_row(row);
}

// Mean nearest-neighbour gap of the harmonic crystal in units of l.
double mean_gap(int n) {
  if (n < 2) return 0.0;
  const auto v = equilibrium_positions(n);
  return (v.back() - v.front()) / (n - 1);
}

json record_json(const RunConfig& cfg, const SweepCell& cell) {
  json j;
  j["n"] = cell.ions;
  j["NA"] = cell.numerical_aperture;
  j["alpha_deg"] = cfg.excitation_angle / kDeg;
  j["species"] = cfg.species;
  j["mode"] = std::string(to_string(cfg.mode));
  j["thermal"] = cfg.thermal;
  j["thermal_keff"] = std::string(to_string(cfg.keff));
  if (!cell.record) {
    j["error"] = cell.error;
    return j;
  }
  const auto& rec = *cell.record;
  const double gap = mean_gap(cell.ions);
  const bool equidistant = cfg.mode == ScanMode::equidistant_spacing;
  const double l = equidistant ? rec.argmax / gap : rec.argmax;
  j["best_P_rel"] = rec.best;
  j["argmax_l_um"] = l / kMicron;
  j["argmax_d_um"] = l * gap / kMicron;
  j["l_lo_um"] = (equidistant ? rec.range_lo / gap : rec.range_lo) / kMicron;
  j["l_hi_um"] = (equidistant ? rec.range_hi / gap : rec.range_hi) / kMicron;
  if (!rec.phases.empty()) j["phases_rad"] = rec.phases;
  return j;
}

std::string records_output(const RunConfig& cfg, const std::vector<SweepCell>& cells) {
  if (cfg.format == OutputFormat::json) {
    json arr = json::array();
    for (const auto& c : cells) arr.push_back(record_json(cfg, c));
    return dump(arr);
  }
  std::string out = csv_row({"n", "NA", "alpha_deg", "species", "mode", "thermal", "thermal_keff",
                             "best_P_rel", "argmax_l_um", "argmax_d_um", "l_lo_um", "l_hi_um",
                             "phases_rad", "error"});
  for (const auto& c : cells) {
    const auto j = record_json(cfg, c);
    std::vector<std::string> row = {std::to_string(c.ions), num(c.numerical_aperture),
                                    num(cfg.excitation_angle / kDeg), cfg.species,
                                    std::string(to_string(cfg.mode)),
                                    cfg.thermal ? "true" : "false",
                                    std::string(to_string(cfg.keff))};
    if (c.record) {
      for (const char* k : {"best_P_rel", "argmax_l_um", "argmax_d_um", "l_lo_um", "l_hi_um"})
        row.push_back(num(j[k].get<double>()));
      row.push_back(join_numbers(c.record->phases, ';'));
      row.emplace_back();
    } else {
      for (int i = 0; i < 6; ++i) row.emplace_back();
      std::string msg = c.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      row.push_back(msg);
    }
    out += csv_row(row);
  }
  return out;
}

std::string sweep_output(const RunConfig& cfg) {
  const auto cells = sweep(cfg.scan_spec(), cfg.ion_list, cfg.na_list, cfg.threads);
  return records_output(cfg, cells);
}

std::string optimize_phases_output(const RunConfig& cfg) {
  auto spec = cfg.scan_spec();
  spec.mode = ScanMode::phases_at_lmin;
  RunConfig shown = cfg;
  shown.mode = ScanMode::phases_at_lmin;
  SweepCell cell{cfg.ions, cfg.numerical_aperture, std::nullopt, {}};
  cell.record = optimize_phases(spec, CollectionAperture::from_na(cfg.numerical_aperture));
  return records_output(shown, {cell});
}

struct TracePointInput {
  double parameter;
  double counts;
  double error;
};

std::vector<TracePointInput> read_trace(const std::string& path, std::string& column) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open fit data '{}'", path));
  std::vector<TracePointInput> rows;
  std::string line;
  bool header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      if (cells.size() < 2)
        throw InvalidArgument("fit data header needs a parameter and a counts column");
      column = cells[0];
      if (column != "l_um" && column != "omega_z_MHz" && column != "U_tip_V")
        throw InvalidArgument(fmt::format(
            "fit data first column must be l_um, omega_z_MHz or U_tip_V, got '{}'", column));
      header = true;
      continue;
    }
    if (cells.size() < 2)
      throw InvalidArgument(fmt::format("fit data line {}: expected >= 2 columns", line_no));
    try {
      rows.push_back({std::stod(cells[0]), std::stod(cells[1]),
                      cells.size() > 2 ? std::stod(cells[2]) : 0.0});
    } catch (const std::exception&) {
      throw InvalidArgument(fmt::format("fit data line {}: not a number", line_no));
    }
  }
  return rows;
}

std::string fit_output(const RunConfig& cfg) {
  if (cfg.fit.data_path.empty()) throw InvalidArgument("fit needs fit.data (or --data)");
  std::string column;
  const auto rows = read_trace(cfg.fit.data_path, column);
  const auto& sp = cfg.ion_species();

  auto to_length = [&](double x) {
    if (column == "l_um") return x * kMicron;
    if (column == "omega_z_MHz") return length_scale(angular_from_mhz(x), sp);
    if (!cfg.trap_hardware) throw InvalidArgument("U_tip_V traces need trap_hardware");
    TrapHardware hw = *cfg.trap_hardware;
    hw.tip_voltage = x;
    return length_scale(axial_frequency(hw, sp), sp);
  };

  std::vector<FitPoint> points;
  std::vector<double> errors;
  for (const auto& row : rows) {
    CountRecord rec{cfg.ions, row.parameter, row.counts, cfg.fit.single_ion_rate,
                    cfg.fit.background_rate, row.error};
    const double p = normalize_counts(rec);
    const double e = normalized_counts_error(rec);
    points.push_back({to_length(row.parameter), p, e > 0.0 ? 1.0 / (e * e) : 1.0});
    errors.push_back(e);
  }

  const auto spec = cfg.scan_spec();
  const auto ap = CollectionAperture::from_na(cfg.numerical_aperture);
  std::vector<double> model(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    model[i] = harmonic_enhancement(spec, ap, points[i].parameter);

  FitOptions opts;
  opts.window = cfg.fit.window;
  opts.weighted = cfg.fit.weighted;
  const auto fit = fit_coherent_fraction(points, model, opts);

  if (cfg.format == OutputFormat::json) {
    json j;
    j["f_coh"] = fit.coherent_fraction;
    j["f_incoh"] = fit.incoherent_fraction;
    j["f_coh_unclamped"] = fit.unclamped_fraction;
    j["residual_norm"] = fit.residual_norm;
    j["points"] = fit.points;
    json data = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
      json p;
      p["l_um"] = points[i].parameter / kMicron;
      p["P_exp"] = points[i].measured;
      p["P_exp_err"] = errors[i];
      p["P_cal"] = model[i];
      p["model"] = 1.0 + fit.coherent_fraction * (model[i] - 1.0);
      data.push_back(p);
    }
    j["data"] = data;
    return dump(j);
  }
  std::string out = csv_row({"l_um", "P_exp", "P_exp_err", "P_cal", "model", "f_coh"});
  for (std::size_t i = 0; i < points.size(); ++i)
    out += csv_row({num(points[i].parameter / kMicron), num(points[i].measured), num(errors[i]),
                    num(model[i]), num(1.0 + fit.coherent_fraction * (model[i] - 1.0)),
                    num(fit.coherent_fraction)});
  return out;
}

std::string compare_output(const RunConfig& cfg) {
  const auto& a = cfg.registry.get(cfg.species);
  const auto& b = cfg.registry.get(cfg.species_b);
  const auto cmp = species_comparison(cfg.scan_spec(), a, b,
                                      CollectionAperture::from_na(cfg.numerical_aperture),
                                      cfg.thermal);
  const double ta = cfg.temperature ? *cfg.temperature : doppler_temperature(a);
  const double tb = cfg.temperature ? *cfg.temperature : doppler_temperature(b);
  if (cfg.format == OutputFormat::json) {
    json j;
    j["n"] = cfg.ions;
    j["NA"] = cfg.numerical_aperture;
    j["alpha_deg"] = cfg.excitation_angle / kDeg;
    j["thermal"] = cfg.thermal;
    j["thermal_keff"] = std::string(to_string(cfg.keff));
    j["species_a"] = a.name;
    j["species_b"] = b.name;
    j["best_P_rel_a"] = cmp.first.best;
    j["best_P_rel_b"] = cmp.second.best;
    j["argmax_l_a_um"] = cmp.first.argmax / kMicron;
    j["argmax_l_b_um"] = cmp.second.argmax / kMicron;
    j["temperature_a_K"] = ta;
    j["temperature_b_K"] = tb;
    j["ratio"] = cmp.ratio;
    return dump(j);
  }
  return csv_row({"n", "NA", "alpha_deg", "thermal", "thermal_keff", "species_a", "species_b",
                  "best_P_rel_a", "best_P_rel_b", "argmax_l_a_um", "argmax_l_b_um",
                  "temperature_a_K", "temperature_b_K", "ratio"}) +
         csv_row({std::to_string(cfg.ions), num(cfg.numerical_aperture),
                  num(cfg.excitation_angle / kDeg), cfg.thermal ? "true" : "false",
                  std::string(to_string(cfg.keff)), a.name, b.name, num(cmp.first.best),
                  num(cmp.second.best), num(cmp.first.argmax / kMicron),
                  num(cmp.second.argmax / kMicron), num(ta), num(tb), num(cmp.ratio)});
}

std::string error_record(const std::exception& e) {
  json j;
  j["kind"] = "error";
  j["message"] = e.what();
  if (const auto* err = dynamic_cast<const Error*>(&e)) j["kind"] = err->kind();
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
    if (!c->key().empty()) j["key"] = c->key();
    if (c->line() > 0) {
      j["line"] = c->line();
      j["column"] = c->column();
    }
  }
  if (const auto* s = dynamic_cast<const SolverFailure*>(&e)) j["residual"] = s->residual();
  if (const auto* q = dynamic_cast<const IntegrationError*>(&e)) j["estimate"] = q->estimate();
  return json{{"error", j}}.dump() + "\n";
}

}  // namespace

std::string run_subcommand(const std::string& subcommand, const RunConfig& config) {
  if (subcommand == "positions") return positions_output(config);
  if (subcommand == "modes") return modes_output(config);
  if (subcommand == "pattern") return pattern_output(config);
  if (subcommand == "enhance") return enhance_output(config);
  if (subcommand == "sweep") return sweep_output(config);
  if (subcommand == "optimize-phases") return optimize_phases_output(config);
  if (subcommand == "fit") return fit_output(config);
  if (subcommand == "compare-species") return compare_output(config);
  throw InvalidArgument(fmt::format("unknown subcommand '{}'", subcommand));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
  CLI::App app{"Coherent photon-collection enhancement from linear ion crystals", "coherent"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file");

  // Flag name -> config key. Flags override environment, which overrides the file.
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static const Flag flag_keys[] = {
      {"--seed", "seed", "Seed for the phase-optimizer starts (u64)"},
      {"--output", "output.path", "Write results to this file instead of stdout"},
      {"--format", "output.format", "csv or json"},
      {"--n", "n", "Number of ions"},
      {"--na", "NA", "Numerical aperture"},
      {"--alpha-deg", "alpha_deg", "Excitation angle to the trap axis, degrees"},
      {"--l-um", "l_um", "Length scale l, um"},
      {"--axial-freq-mhz", "axial_freq_MHz", "Axial secular frequency, MHz"},
      {"--radial-freq-mhz", "radial_freq_MHz", "Radial secular frequency, MHz"},
      {"--species", "species", "Ion species name"},
      {"--species-b", "species_b", "Second species for compare-species"},
      {"--keff", "thermal_keff", "Thermal momentum transfer: axial or scalar"},
      {"--temperature-k", "temperature_K", "Temperature, K (default: Doppler limit)"},
      {"--mode", "mode", "harmonic-l, equidistant-d or phases-at-lmin"},
      {"--samples", "l_samples", "Minimum coarse scan samples"},
      {"--threads", "threads", "Sweep worker threads (0: all cores)"},
      {"--data", "fit.data", "Count-rate trace CSV for fit"},
  };
  constexpr std::size_t flag_count = std::size(flag_keys);
  std::vector<std::string> flag_values(flag_count);
  for (std::size_t i = 0; i < flag_count; ++i)
    app.add_option(flag_keys[i].name, flag_values[i], flag_keys[i].help);
  bool thermal_flag = false;
  app.add_flag("--thermal", thermal_flag, "Enable thermal dephasing");

  const char* const subcommands[][2] = {
      {"positions", "Dimensionless equilibrium positions"},
      {"modes", "Axial normal modes"},
      {"pattern", "Far-field angular intensity pattern"},
      {"enhance", "Flux and collection enhancement for one configuration"},
      {"sweep", "Optimized enhancement over (n, NA) cells"},
      {"optimize-phases", "Per-ion phase optimization at l_min"},
      {"fit", "Coherent-fraction fit of a measured count-rate trace"},
      {"compare-species", "Optimized enhancement ratio of two species"},
  };
  for (const auto& sc : subcommands) app.add_subcommand(sc[0], sc[1]);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  int code = 2;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw ConfigError(fmt::format("cannot read config '{}'", config_path), "--config");
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    ConfigOverrides overrides = environment_overrides(env);
    for (std::size_t i = 0; i < flag_count; ++i) {
      if (flag_values[i].empty()) continue;
      overrides.emplace_back(flag_keys[i].key, flag_values[i]);
    }
    if (thermal_flag) overrides.emplace_back("thermal", "true");
    const RunConfig cfg = parse_config(text, overrides);

    code = 1;
    const std::string result = run_subcommand(subcommand, cfg);
    if (cfg.output_path.empty()) {
      out << result;
    } else {
      std::ofstream file(cfg.output_path, std::ios::binary | std::ios::trunc);
      if (!file) throw InvalidArgument(fmt::format("cannot write '{}'", cfg.output_path));
      file << result;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << error_record(e);
    return 2;
  } catch (const std::exception& e) {
    err << error_record(e);
    return code;
  }
}

}  // namespace coherent

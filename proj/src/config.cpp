#include "coherent/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "coherent/crystal.hpp"
#include "coherent/errors.hpp"

namespace coherent {

using nlohmann::json;

namespace {

constexpr double kDeg = constants::pi / 180.0;
constexpr double kMicron = 1e-6;

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw ConfigError(fmt::format("invalid value for '{}': {}", key, what), key);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Typed access to one JSON object; remembers which keys were consumed so the
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) invalid(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  const json& raw(const std::string& key) { return obj_.at(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key) {
    const auto& v = obj_.at(key);
    if (!v.is_number()) invalid(path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) invalid(path(key), "expected a finite number");
    return d;
  }

  long long integer(const std::string& key) {
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) invalid(path(key), "expected an integer");
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const auto& v = obj_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0)
      return static_cast<std::uint64_t>(v.get<long long>());
    invalid(path(key), "expected a non-negative integer");
  }

  bool boolean(const std::string& key) {
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) invalid(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const auto& v = obj_.at(key);
    if (!v.is_string()) invalid(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const auto& v = obj_.at(key);
    if (!v.is_array()) invalid(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) invalid(path(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.contains(key))
        throw ConfigError(fmt::format("unknown key '{}'", join(path_, key)), join(path_, key));
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_value_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

void apply_override(json& doc, const std::string& dotted, const std::string& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = parse_value_text(value);
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

IonSpecies read_species(const json& obj, const std::string& path) {
  ObjectReader r(obj, path);
  for (const char* k : {"name", "mass_amu", "charge", "wavelength_nm", "linewidth_MHz"})
    if (!r.has(k)) invalid(r.path(k), "required");
  const auto name = r.string("name");
  const double mass = r.number("mass_amu");
  const auto charge = r.integer("charge");
  const double wavelength = r.number("wavelength_nm");
  const double linewidth = r.number("linewidth_MHz");
  r.reject_unknown();
  if (!(mass > 0.0)) invalid(r.path("mass_amu"), "must be positive");
  if (charge < 1) invalid(r.path("charge"), "must be a positive integer");
  if (!(wavelength > 0.0)) invalid(r.path("wavelength_nm"), "must be positive");
  if (!(linewidth > 0.0)) invalid(r.path("linewidth_MHz"), "must be positive");
  return IonSpecies::from_amu(name, mass, static_cast<int>(charge), wavelength * 1e-9,
                              angular_from_mhz(linewidth));
}

TrapHardware read_hardware(const json& obj, const std::string& path) {
  ObjectReader r(obj, path);
  TrapHardware hw;
  const std::pair<const char*, double*> fields[] = {
      {"tip_voltage_V", &hw.tip_voltage},       {"rf_voltage_V", &hw.rf_voltage},
      {"rf_freq_MHz", &hw.rf_angular_frequency}, {"kappa", &hw.geometric_factor},
      {"z0_mm", &hw.tip_half_distance},         {"r0_mm", &hw.radial_distance}};
  for (const auto& [key, dst] : fields) {
    if (!r.has(key)) invalid(r.path(key), "required");
    *dst = r.number(key);
    if (!(*dst > 0.0)) invalid(r.path(key), "must be positive");
  }
  r.reject_unknown();
  hw.rf_angular_frequency = angular_from_mhz(hw.rf_angular_frequency);
  hw.tip_half_distance *= 1e-3;
  hw.radial_distance *= 1e-3;
  return hw;
}

std::pair<double, double> read_range(ObjectReader& r, const std::string& key, double unit) {
  const auto v = r.numbers(key);
  if (v.size() != 2) invalid(r.path(key), "expected [lo, hi]");
  if (!(v[0] > 0.0 && v[0] < v[1])) invalid(r.path(key), "expected 0 < lo < hi");
  return {v[0] * unit, v[1] * unit};
}

RunConfig config_from_json(const json& doc) {
  RunConfig cfg;
  ObjectReader r(doc, "");

  if (r.has("species_defs")) {
    const auto& defs = r.raw("species_defs");
    if (!defs.is_array()) invalid("species_defs", "expected an array");
    for (std::size_t i = 0; i < defs.size(); ++i) {
      try {
        cfg.registry.add(read_species(defs[i], fmt::format("species_defs[{}]", i)));
      } catch (const InvalidArgument& e) {
        invalid(fmt::format("species_defs[{}]", i), e.what());
      }
    }
  }
  if (r.has("species")) cfg.species = r.string("species");
  if (!cfg.registry.contains(cfg.species)) invalid("species", "not a registered species");
  if (r.has("species_b")) cfg.species_b = r.string("species_b");
  if (!cfg.registry.contains(cfg.species_b)) invalid("species_b", "not a registered species");

  if (r.has("trap_hardware")) {
    cfg.trap_hardware = read_hardware(r.raw("trap_hardware"), "trap_hardware");
    cfg.radial_freq = radial_frequency(*cfg.trap_hardware, cfg.ion_species());
  }
  if (r.has("radial_freq_MHz")) {
    const double f = r.number("radial_freq_MHz");
    if (!(f > 0.0)) invalid("radial_freq_MHz", "must be positive");
    cfg.radial_freq = angular_from_mhz(f);
  }

  if (r.has("n")) {
    const auto n = r.integer("n");
    if (n < 1 || n > 50) invalid("n", "must be in [1, 50]");
    cfg.ions = static_cast<int>(n);
  }
  if (r.has("n_list")) {
    for (double x : r.numbers("n_list")) {
      if (x != std::floor(x) || x < 1 || x > 50) invalid("n_list", "entries must be integers in [1, 50]");
      cfg.ion_list.push_back(static_cast<int>(x));
    }
    if (cfg.ion_list.empty()) invalid("n_list", "must not be empty");
  }
  if (cfg.ion_list.empty()) cfg.ion_list = {cfg.ions};

  if (r.has("alpha_deg")) {
    const double a = r.number("alpha_deg");
    if (!(a > 0.0 && a <= 90.0)) invalid("alpha_deg", "must lie in (0, 90]");
    cfg.excitation_angle = a * kDeg;
  }
  if (r.has("NA")) {
    const double na = r.number("NA");
    if (!(na > 0.0 && na < 1.0)) invalid("NA", "must lie in (0, 1)");
    cfg.numerical_aperture = na;
  }
  if (r.has("NA_list")) {
    cfg.na_list = r.numbers("NA_list");
    if (cfg.na_list.empty()) invalid("NA_list", "must not be empty");
    for (double na : cfg.na_list)
      if (!(na > 0.0 && na < 1.0)) invalid("NA_list", "entries must lie in (0, 1)");
  }
  if (cfg.na_list.empty()) cfg.na_list = {cfg.numerical_aperture};

  if (r.has("thermal")) cfg.thermal = r.boolean("thermal");
  if (r.has("thermal_keff")) {
    try {
      cfg.keff = thermal_keff_from_string(r.string("thermal_keff"));
    } catch (const InvalidArgument&) {
      invalid("thermal_keff", "expected \"axial\" or \"scalar\"");
    }
  }
  if (r.has("temperature_K")) {
    const double t = r.number("temperature_K");
    if (!(t >= 0.0)) invalid("temperature_K", "must be non-negative");
    cfg.temperature = t;
  }
  if (r.has("mode")) {
    try {
      cfg.mode = scan_mode_from_string(r.string("mode"));
    } catch (const InvalidArgument&) {
      invalid("mode", "expected harmonic-l, equidistant-d or phases-at-lmin");
    }
  }

  if (r.has("l_um")) {
    const double l = r.number("l_um");
    if (!(l > 0.0)) invalid("l_um", "must be positive");
    cfg.length_scale = l * kMicron;
  }
  if (r.has("axial_freq_MHz")) {
    const double f = r.number("axial_freq_MHz");
    if (!(f > 0.0)) invalid("axial_freq_MHz", "must be positive");
    cfg.axial_freq = angular_from_mhz(f);
  }
  if (r.has("phases_rad")) {
    cfg.phases = r.numbers("phases_rad");
    if (cfg.phases->size() != static_cast<std::size_t>(cfg.ions))
      invalid("phases_rad", "needs one entry per ion");
    if ((*cfg.phases)[0] != 0.0) invalid("phases_rad", "first entry must be 0");
  }
  if (r.has("l_range_um")) cfg.length_range = read_range(r, "l_range_um", kMicron);
  if (r.has("l_samples")) {
    const auto s = r.integer("l_samples");
    if (s < 2 || s > 10'000'000) invalid("l_samples", "must be in [2, 1e7]");
    cfg.samples = static_cast<int>(s);
  }
  if (r.has("seed")) cfg.seed = r.unsigned_integer("seed");
  if (r.has("phase_starts")) {
    const auto s = r.integer("phase_starts");
    if (s < 0 || s > 10000) invalid("phase_starts", "must be in [0, 10000]");
    cfg.phase_starts = static_cast<int>(s);
  }
  if (r.has("threads")) {
    const auto t = r.integer("threads");
    if (t < 0 || t > 1024) invalid("threads", "must be in [0, 1024]");
    cfg.threads = static_cast<unsigned>(t);
  }

  if (r.has("beta_deg")) {
    ObjectReader b(r.raw("beta_deg"), "beta_deg");
    double start = 0.0, stop = 180.0;
    long long count = cfg.beta_count;
    if (b.has("start")) start = b.number("start");
    if (b.has("stop")) stop = b.number("stop");
    if (b.has("count")) count = b.integer("count");
    b.reject_unknown();
    if (!(start >= 0.0 && stop <= 180.0 && start <= stop))
      invalid("beta_deg", "need 0 <= start <= stop <= 180");
    if (count < 1 || count > 10'000'000) invalid("beta_deg.count", "must be in [1, 1e7]");
    if (count > 1 && !(stop > start)) invalid("beta_deg", "need stop > start for count > 1");
    cfg.beta_start = start * kDeg;
    cfg.beta_stop = stop * kDeg;
    cfg.beta_count = static_cast<int>(count);
  }

  if (r.has("fit")) {
    ObjectReader f(r.raw("fit"), "fit");
    if (f.has("data")) cfg.fit.data_path = f.string("data");
    if (f.has("single_ion_rate")) cfg.fit.single_ion_rate = f.number("single_ion_rate");
    if (f.has("background_rate")) cfg.fit.background_rate = f.number("background_rate");
    if (f.has("window_um")) cfg.fit.window = read_range(f, "window_um", kMicron);
    if (f.has("weighted")) cfg.fit.weighted = f.boolean("weighted");
    f.reject_unknown();
    if (!(cfg.fit.background_rate >= 0.0)) invalid("fit.background_rate", "must be non-negative");
    if (!(cfg.fit.single_ion_rate > cfg.fit.background_rate))
      invalid("fit.single_ion_rate", "must exceed fit.background_rate");
  }
  if (r.has("base_abs_efficiency")) {
    const double b = r.number("base_abs_efficiency");
    if (!(b > 0.0 && b <= 1.0)) invalid("base_abs_efficiency", "must lie in (0, 1]");
    cfg.base_abs_efficiency = b;
  }

  if (r.has("output")) {
    ObjectReader o(r.raw("output"), "output");
    if (o.has("path")) cfg.output_path = o.string("path");
    if (o.has("format")) {
      const auto fmt_name = o.string("format");
      if (fmt_name == "csv") cfg.format = OutputFormat::csv;
      else if (fmt_name == "json") cfg.format = OutputFormat::json;
      else invalid("output.format", "expected \"csv\" or \"json\"");
    }
    o.reject_unknown();
  }

  r.reject_unknown();

  if (cfg.length_range) {
    // Feasibility of explicit ranges is checked downstream; defaults need
    // bounds only for n >= 2.
  } else if (cfg.ions >= 2) {
    try {
      (void)length_scale_bounds(cfg.ions, cfg.radial_freq, cfg.ion_species());
    } catch (const EmptyRange& e) {
      invalid("radial_freq_MHz", e.what());
    }
  }
  return cfg;
}

}  // namespace

double RunConfig::resolved_axial_freq() const {
  if (axial_freq) return *axial_freq;
  if (length_scale) return axial_frequency_for_length_scale(*length_scale, ion_species());
  if (trap_hardware) return axial_frequency(*trap_hardware, ion_species());
  return angular_from_mhz(1.0);
}

double RunConfig::resolved_length_scale() const {
  if (length_scale) return *length_scale;
  if (axial_freq) return coherent::length_scale(*axial_freq, ion_species());
  if (trap_hardware)
    return coherent::length_scale(axial_frequency(*trap_hardware, ion_species()), ion_species());
  return 5.0 * kMicron;
}

ScanSpec RunConfig::scan_spec() const {
  ScanSpec s;
  s.ions = ions;
  s.species = ion_species();
  s.excitation_angle = excitation_angle;
  s.radial_freq = radial_freq;
  s.length_range = length_range;
  s.samples = samples;
  s.thermal = thermal;
  s.temperature = temperature;
  s.keff = keff;
  s.mode = mode;
  s.seed = seed;
  s.phase_starts = phase_starts;
  return s;
}

RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  json doc = json::object();
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](unsigned char c) { return std::isspace(c) != 0; });
  if (!blank) {
    try {
      doc = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
      const auto [line, column] = line_column(text, e.byte);
      throw ConfigError(
          fmt::format("config parse error at line {}, column {}: {}", line, column, e.what()),
          "", line, column);
    }
  }
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object", "<root>");
  for (const auto& [key, value] : overrides) apply_override(doc, key, value);
  return config_from_json(doc);
}

ConfigOverrides environment_overrides(
    const std::function<const char*(const char*)>& lookup) {
  static const char* const keys[] = {
      "species", "species_b", "radial_freq_MHz", "n", "alpha_deg", "NA", "thermal",
      "thermal_keff", "temperature_K", "mode", "l_um", "axial_freq_MHz", "l_samples",
      "seed", "phase_starts", "threads", "base_abs_efficiency"};
  ConfigOverrides out;
  for (const char* key : keys) {
    std::string var = "COHERENT_";
    for (const char* c = key; *c; ++c)
      var.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(*c))));
    if (const char* value = lookup(var.c_str())) out.emplace_back(key, value);
  }
  if (const char* v = lookup("COHERENT_OUTPUT")) out.emplace_back("output.path", v);
  if (const char* v = lookup("COHERENT_FORMAT")) out.emplace_back("output.format", v);
  return out;
}

}  // namespace coherent

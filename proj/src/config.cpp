#include "becload/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <variant>
#include <vector>

#include "becload/errors.hpp"

namespace becload {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

struct Field {
  const char* section;
  const char* key;
  std::variant<double*, int*, std::int64_t*, std::uint64_t*, bool*, std::string*> ref;
};

std::vector<Field> schema(RunConfig& c) {
  return {
      {"trap", "omega", &c.omega},
      {"trap", "gamma", &c.gamma},
      {"trap", "eta_sq", &c.eta_sq},
      {"trap", "shells_g", &c.shells_g},
      {"trap", "shells_e", &c.shells_e},
      {"trap", "modes_g", &c.modes_g},
      {"trap", "modes_e", &c.modes_e},
      {"trap", "n_atoms", &c.n_atoms},
      {"trap", "n_condensed", &c.n_condensed},
      {"trap", "transition_frequency", &c.transition_frequency},
      {"quadrature", "theta_order", &c.theta_order},
      {"quadrature", "phi_order", &c.phi_order},
      {"quadrature", "emission_pattern", &c.emission_pattern},
      {"quadrature", "dipole_axis", &c.dipole_axis},
      {"pv", "grid", &c.pv_grid},
      {"pv", "kappa_max_ratio", &c.kappa_max_ratio},
      {"pv", "include_imaginary", &c.include_imaginary},
      {"generator", "include_excited_energies", &c.include_excited_energies},
      {"sampling", "samples", &c.samples},
      {"sampling", "seed", &c.seed},
      {"sampling", "bar_threshold", &c.bar_threshold},
      {"sampling", "bar_margin", &c.bar_margin},
      {"sampling", "emission_share_cutoff", &c.emission_share_cutoff},
      {"scan", "t_e_min", &c.t_e_min},
      {"scan", "t_e_max", &c.t_e_max},
      {"scan", "t_e_points", &c.t_e_points},
      {"scan", "t_g_min", &c.t_g_min},
      {"scan", "t_g_max", &c.t_g_max},
      {"scan", "t_g_points", &c.t_g_points},
      {"load", "steps", &c.load_steps},
      {"load", "initial_fraction", &c.initial_fraction},
      {"load", "t_e", &c.load_t_e},
      {"load", "samples_per_step", &c.samples_per_step},
      {"load", "zero_p_diagnostic", &c.zero_p_diagnostic},
      {"validate", "sweep_configs", &c.sweep_configs},
      {"limits", "budget_gib", &c.budget_gib},
      {"limits", "threads", &c.threads},
      {"output", "out", &c.out},
      {"output", "tensor_cache", &c.tensor_cache},
  };
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void assign(const Field& f, const std::string& value, int line) {
  auto fail = [&](const std::string& what) { throw ConfigError(what, line); };
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::string>) {
          *p = value;
        } else if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1")
            *p = true;
          else if (value == "false" || value == "0")
            *p = false;
          else
            fail("expected boolean (true/false) for " + std::string(f.key));
        } else {
          T v{};
          const char* b = value.data();
          const char* e = b + value.size();
          const auto res = std::from_chars(b, e, v);
          if (res.ec != std::errc{} || res.ptr != e)
            fail("cannot parse value '" + value + "' for " + std::string(f.key));
          *p = v;
        }
      },
      f.ref);
}

std::string render(const Field& f) {
  return std::visit(
      [&](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return *p;
        } else if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(*p);
        } else {
          return std::to_string(*p);
        }
      },
      f.ref);
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig c;
  auto fields = schema(c);
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header '" + s + "'", line);
      section = s.substr(1, s.size() - 2);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + s + "'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section == "trap" && (key == "omega_e" || key == "omega_g"))
      throw ConfigError("both traps share a single omega; separate trap frequencies are not "
                        "supported",
                        line);
    bool found = false;
    for (const auto& f : fields) {
      if (section == f.section && key == f.key) {
        assign(f, value, line);
        found = true;
        break;
      }
    }
    if (!found)
      throw ConfigError("unknown key '" + (section.empty() ? key : section + "." + key) + "'",
                        line);
  }
  c.validate();
  return c;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_text(ss.str());
}

std::string RunConfig::canonical_text() const {
  RunConfig& self = const_cast<RunConfig&>(*this);
  auto fields = schema(self);
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields) {
    if (section != f.section) {
      if (!section.empty()) out << "\n";
      section = f.section;
      out << "[" << section << "]\n";
    }
    out << f.key << " = " << render(f) << "\n";
  }
  return out.str();
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  try {
    trap_spec().validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (modes_g < 0 || modes_e < 0) fail("modes_g/modes_e must be >= 0");
  if (theta_order < 1 || phi_order < 1) fail("quadrature orders must be >= 1");
  if (emission_pattern != "isotropic" && emission_pattern != "dipole")
    fail("emission_pattern must be isotropic or dipole");
  if (dipole_axis != "x" && dipole_axis != "y" && dipole_axis != "z")
    fail("dipole_axis must be x, y or z");
  if (pv_grid < 4) fail("pv.grid must be >= 4");
  if (!(kappa_max_ratio > 1.0)) fail("pv.kappa_max_ratio must be > 1");
  if (samples < 1) fail("sampling.samples must be >= 1");
  if (!(bar_threshold >= 0.0)) fail("sampling.bar_threshold must be >= 0");
  if (!(bar_margin >= 0.0)) fail("sampling.bar_margin must be >= 0");
  if (t_e_points < 1 || t_g_points < 1) fail("scan grid needs at least one point per axis");
  if (t_e_min < 0.0 || t_g_min < 0.0) fail("scan temperatures must be >= 0");
  if (t_e_max < t_e_min || t_g_max < t_g_min) fail("scan grid max must be >= min");
  if (t_g_points > 1 && !(t_g_min > 0.0))
    fail("logarithmic t_g grid needs t_g_min > 0 when t_g_points > 1");
  if (load_steps < 0) fail("load.steps must be >= 0");
  if (!(initial_fraction > 0.0) || initial_fraction > 1.0)
    fail("load.initial_fraction must be in (0, 1]");
  if (load_t_e < 0.0) fail("load.t_e must be >= 0");
  if (samples_per_step < 1) fail("load.samples_per_step must be >= 1");
  if (sweep_configs < 1) fail("validate.sweep_configs must be >= 1");
  if (!(budget_gib > 0.0)) fail("limits.budget_gib must be > 0");
  if (threads < 0) fail("limits.threads must be >= 0");
  if (out.empty()) fail("output.out must not be empty");
}

TrapSpec RunConfig::trap_spec() const {
  TrapSpec t;
  t.omega = omega;
  t.gamma = gamma;
  t.eta_sq = eta_sq;
  t.shells_g = shells_g;
  t.shells_e = shells_e;
  t.transition_frequency = transition_frequency;
  t.n_atoms = n_atoms;
  t.n_condensed = n_condensed;
  return t;
}

AlphaKey RunConfig::alpha_key() const {
  AlphaKey k;
  k.shells_g = shells_g;
  k.shells_e = shells_e;
  k.modes_g = modes_g;
  k.modes_e = modes_e;
  k.eta_sq = eta_sq;
  k.theta_order = theta_order;
  k.phi_order = phi_order;
  k.pattern = emission_pattern == "dipole" ? 1 : 0;
  k.dipole_axis = dipole_axis == "x" ? 0 : dipole_axis == "y" ? 1 : 2;
  k.pv_grid = pv_grid;
  k.kappa_max_ratio = kappa_max_ratio;
  k.include_imaginary = include_imaginary;
  return k;
}

ValidityThresholds RunConfig::thresholds() const {
  ValidityThresholds t;
  t.expansion_threshold = bar_threshold;
  t.margin = bar_margin;
  t.share_cutoff = emission_share_cutoff;
  return t;
}

}  // namespace becload

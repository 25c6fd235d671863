#include "dqc/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

namespace dqc {

namespace {

namespace pt = boost::property_tree;

const std::map<UnitKind, std::map<std::string, double>>& unit_table() {
  static const std::map<UnitKind, std::map<std::string, double>> t{
      {UnitKind::none, {}},
      {UnitKind::time, {{"ns", 1.0}, {"us", 1e3}, {"ms", 1e6}}},
      {UnitKind::seconds, {{"s", 1.0}, {"min", 60.0}}},
      {UnitKind::angular, {{"rad/ns", 1.0}, {"GHz", kTwoPi}, {"MHz", kTwoPi * 1e-3}}},
      {UnitKind::cyclic, {{"GHz", 1.0}, {"MHz", 1e-3}}},
      {UnitKind::rate, {{"1/ns", 1.0}, {"1/us", 1e-3}, {"1/s", 1e-9}}},
      {UnitKind::length, {{"um", 1.0}, {"nm", 1e-3}}},
      {UnitKind::field, {{"V/cm", 1.0}}},
  };
  return t;
}

double to_number(const std::string& s) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw Error("'" + s + "' is not a number");
  }
  if (pos != s.size()) throw Error("'" + s + "' is not a number");
  if (!std::isfinite(v)) throw Error("'" + s + "' is not finite");
  return v;
}

long long to_integer(const std::string& s) {
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw Error("'" + s + "' is not an integer");
  }
  if (pos != s.size()) throw Error("'" + s + "' is not an integer");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(","));
  for (auto& p : parts) boost::trim(p);
  if (parts.empty() || (parts.size() == 1 && parts[0].empty())) throw Error("empty list");
  return parts;
}

bool to_bool(const std::string& s) {
  const std::string v = boost::to_lower_copy(s);
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw Error("'" + s + "' is not a boolean");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

Setter real(double ExperimentConfig::*m, UnitKind k = UnitKind::none) {
  return [m, k](ExperimentConfig& c, const std::string& v) { c.*m = parse_quantity(v, k); };
}
template <class S>
Setter real_in(S ExperimentConfig::*s, double S::*m, UnitKind k = UnitKind::none) {
  return [s, m, k](ExperimentConfig& c, const std::string& v) { (c.*s).*m = parse_quantity(v, k); };
}
template <class T>
Setter integer(T ExperimentConfig::*m) {
  return [m](ExperimentConfig& c, const std::string& v) { c.*m = static_cast<T>(to_integer(v)); };
}

const std::map<std::string, Setter>& schema() {
  using C = ExperimentConfig;
  using U = UnitKind;
  static const std::map<std::string, Setter> s{
      {"experiment.phase", real(&C::phase)},
      {"experiment.counting_qubits", integer(&C::counting_qubits)},
      {"experiment.shots", integer(&C::shots)},
      {"experiment.zeta",
       [](C& c, const std::string& v) {
         c.zeta_list.clear();
         for (const auto& p : split_list(v)) c.zeta_list.push_back(to_number(p));
       }},
      {"experiment.alpha_flux", real(&C::alpha_flux)},
      {"experiment.nts",
       [](C& c, const std::string& v) {
         c.nts_list.clear();
         for (const auto& p : split_list(v)) c.nts_list.push_back(static_cast<int>(to_integer(p)));
       }},
      {"experiment.iters",
       [](C& c, const std::string& v) {
         c.iters_list.clear();
         for (const auto& p : split_list(v)) c.iters_list.push_back(static_cast<int>(to_integer(p)));
       }},
      {"experiment.seed", [](C& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_integer(v)); }},
      {"experiment.output", [](C& c, const std::string& v) { c.output = v; }},
      {"experiment.threads", integer(&C::threads)},
      {"experiment.ideal_gates", [](C& c, const std::string& v) { c.ideal_gates = to_bool(v); }},

      {"grape.evo_time", real_in(&C::grape, &GrapeOptions::evo_time, U::time)},
      {"grape.fid_err_targ", real_in(&C::grape, &GrapeOptions::fid_err_targ)},
      {"grape.max_wall_time", real_in(&C::grape, &GrapeOptions::max_wall_time, U::seconds)},
      {"grape.init_pulse", [](C& c, const std::string& v) { c.grape.init_pulse = parse_pulse_init(v); }},
      {"grape.init_scale", real_in(&C::grape, &GrapeOptions::init_scale, U::angular)},
      {"grape.amp_bound", [](C& c, const std::string& v) { c.grape.amp_bound = parse_quantity(v, U::angular); }},
      {"grape.gradient",
       [](C& c, const std::string& v) {
         if (v == "exact")
           c.grape.gradient = GradientMode::exact;
         else if (v == "first-order")
           c.grape.gradient = GradientMode::first_order;
         else
           throw Error("gradient must be exact or first-order");
       }},
      {"grape.memory", [](C& c, const std::string& v) { c.grape.lbfgs_memory = static_cast<int>(to_integer(v)); }},

      {"rydberg.rabi", real_in(&C::rydberg, &RydbergParams::rabi, U::angular)},
      {"rydberg.detuning", real_in(&C::rydberg, &RydbergParams::detuning, U::angular)},
      {"rydberg.c6", real_in(&C::rydberg, &RydbergParams::c6)},
      {"rydberg.distance", real_in(&C::rydberg, &RydbergParams::distance, U::length)},
      {"rydberg.dephasing", real_in(&C::rydberg, &RydbergParams::dephasing, U::angular)},
      {"rydberg.decay", real_in(&C::rydberg, &RydbergParams::decay, U::rate)},

      {"flux.e_j", real_in(&C::flux, &FluxParams::e_j, U::cyclic)},
      {"flux.e_c", real_in(&C::flux, &FluxParams::e_c, U::cyclic)},
      {"flux.f_eps", real_in(&C::flux, &FluxParams::f_eps)},
      {"flux.tunnel", real_in(&C::flux, &FluxParams::tunnel, U::cyclic)},
      {"flux.bias", real_in(&C::flux, &FluxParams::bias, U::cyclic)},
      {"flux.g_res", real_in(&C::flux, &FluxParams::g_res, U::cyclic)},
      {"flux.omega_res", real_in(&C::flux, &FluxParams::omega_res, U::cyclic)},
      {"flux.yy_coupling", real_in(&C::flux, &FluxParams::yy_coupling, U::cyclic)},
      {"flux.photon_rate", real_in(&C::flux, &FluxParams::photon_rate, U::rate)},
      {"flux.delta_f", real_in(&C::flux, &FluxParams::delta_f)},
      {"flux.delta_n", real_in(&C::flux, &FluxParams::delta_n)},
      {"flux.delta_omega", real_in(&C::flux, &FluxParams::delta_omega)},

      {"hybrid.omega0", real_in(&C::hybrid, &HybridParams::omega0, U::angular)},
      {"hybrid.rabi", real_in(&C::hybrid, &HybridParams::rabi, U::angular)},
      {"hybrid.rabi_u", real_in(&C::hybrid, &HybridParams::rabi_u, U::angular)},
      {"hybrid.g_a", real_in(&C::hybrid, &HybridParams::g_a, U::angular)},
      {"hybrid.g_a_u", real_in(&C::hybrid, &HybridParams::g_a_u, U::angular)},
      {"hybrid.tunnel", real_in(&C::hybrid, &HybridParams::tunnel, U::angular)},
      {"hybrid.gamma_q_far", real_in(&C::hybrid, &HybridParams::gamma_q_far)},
      {"hybrid.gamma_q_res", real_in(&C::hybrid, &HybridParams::gamma_q_res)},
      {"hybrid.kappa_q", real_in(&C::hybrid, &HybridParams::kappa_q)},
      {"hybrid.gamma_ryd", real_in(&C::hybrid, &HybridParams::gamma_ryd, U::angular)},
      {"hybrid.gamma_relax", real_in(&C::hybrid, &HybridParams::gamma_relax, U::angular)},
      {"hybrid.gamma_phi", real_in(&C::hybrid, &HybridParams::gamma_phi, U::angular)},
      {"hybrid.level_map",
       [](C& c, const std::string& v) {
         if (v == "calibrated")
           c.hybrid.level_map = LevelMap::calibrated;
         else if (v == "prose")
           c.hybrid.level_map = LevelMap::prose;
         else if (v == "code")
           c.hybrid.level_map = LevelMap::code;
         else
           throw Error("level_map must be calibrated, prose or code");
       }},
      {"hybrid.dephasing_scale",
       [](C& c, const std::string& v) {
         if (v == "mhz")
           c.hybrid.dephasing_scale = DephasingScale::mhz;
         else if (v == "ghz")
           c.hybrid.dephasing_scale = DephasingScale::ghz;
         else
           throw Error("dephasing_scale must be mhz or ghz");
       }},

      {"ghz.grid", integer(&C::ghz_grid)},
      {"ghz.hold_window", real(&C::ghz_hold_window, U::time)},
      {"ghz.noise", [](C& c, const std::string& v) { c.ghz_noise = to_bool(v); }},
  };
  return s;
}

}  // namespace

double parse_quantity(const std::string& text, UnitKind kind) {
  std::string s = boost::trim_copy(text);
  const auto space = s.find_first_of(" \t");
  if (space == std::string::npos) return to_number(s);
  const double v = to_number(s.substr(0, space));
  const std::string unit = boost::trim_copy(s.substr(space));
  const auto& units = unit_table().at(kind);
  auto it = units.find(unit);
  if (it == units.end()) throw Error("unit '" + unit + "' is not allowed here");
  return v * it->second;
}

void ExperimentConfig::validate() const {
  if (!(phase >= 0.0 && phase < 1.0)) throw Error("phase must lie in [0, 1)");
  if (counting_qubits < 1 || counting_qubits > 6) throw Error("counting_qubits must be between 1 and 6");
  if (shots < 1) throw Error("shots must be at least 1");
  if (zeta_list.empty() || nts_list.empty() || iters_list.empty()) throw Error("sweep lists must be nonempty");
  for (double z : zeta_list)
    if (!(z > 0.0)) throw Error("zeta must be positive");
  for (int n : nts_list)
    if (n < 2) throw Error("nts entries must be at least 2");
  for (int n : iters_list)
    if (n < 0) throw Error("iters entries must be nonnegative");
  if (threads < 1) throw Error("threads must be at least 1");
  if (ghz_grid < 2) throw Error("ghz grid must be at least 2");
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig c;
  bool have_schema = false;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (name != "schema") throw Error(source + ": unknown top-level key '" + name + "'");
      if (to_integer(boost::trim_copy(node.data())) != kConfigSchema)
        throw Error(source + ": unsupported schema version " + node.data());
      have_schema = true;
      continue;
    }
    for (const auto& [key, leaf] : node) {
      const std::string full = name + "." + key;
      auto it = schema().find(full);
      if (it == schema().end()) throw Error(source + ": unknown key '" + full + "'");
      try {
        it->second(c, boost::trim_copy(leaf.data()));
      } catch (const Error& e) {
        throw Error(source + ": " + full + ": " + e.what());
      }
    }
  }
  if (!have_schema) throw Error(source + ": missing schema version");
  c.flux.alpha = c.alpha_flux;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  return parse_config(in, path);
}

}  // namespace dqc

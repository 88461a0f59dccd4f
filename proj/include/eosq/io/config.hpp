#ifndef EOSQ_IO_CONFIG_HPP
#define EOSQ_IO_CONFIG_HPP

#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "../crystal.hpp"
#include "../error.hpp"
#include "../metrics.hpp"
#include "../ports.hpp"

namespace eosq::io {

using json = nlohmann::json;

struct SincProbeCfg {
  double center_thz = 350;
  double bandwidth_thz = 240;
  double photons = 5e9;
};

struct OddProbeCfg {
  double center_thz = 340;
  double bandwidth_thz = 80;
  double photons = 5e9;
  double carrier_fraction = 0.9;
  double carrier_width_thz = 4;
};

struct PlateCfg {
  std::string type = "quarter";
  double angle_deg = 45;
};

struct PortCfg {
  double min_thz = 0;
  double max_thz = 0;
  std::vector<PlateCfg> waveplates;
  double sign = 1;
  std::string readout = "E";
};

struct ExperimentConfig {
  struct {
    double omega_max_thz = 600;
    std::size_t n_points = 2400;
  } grid;
  struct {
    double length_um = 7;
    double r41_pm_per_v = 4;
    double cross_section_um2 = 45.65;
    bool phase_matching = true;
    std::string nir_model = "sellmeier";
    SellmeierIndex sellmeier;
    QuadraticIndex quadratic;
    RampIndex mir;
  } crystal;
  struct {
    SincProbeCfg e;
    OddProbeCfg h;
    SincProbeCfg mux_e{215, 120, 1e10};
    OddProbeCfg mux_h{340, 80, 1.5e10, 0.9, 4};
  } probe;
  struct {
    double signal_edge_thz = 150;
    std::vector<PortCfg> e{{150, 600, {{"quarter", 45}}, 1, "E"}};
    std::vector<PortCfg> h{{150, 340, {{"quarter", 45}}, 1, "H"}, {340, 600, {{"quarter", 45}}, 1, "H"}};
    std::vector<PortCfg> multiplexed{{150, 275, {{"quarter", 45}}, 1, "E"},
                                     {275, 340, {{"quarter", 45}}, 1, "H"},
                                     {340, 600, {{"quarter", 45}}, 1, "H"}};
  } ports;
  struct {
    double omega0_thz = 20;
    double sigma_thz = 4;
    double r = 0.5;
  } signal;
  struct {
    std::string quadrature = "E";
    std::string constraint = "constant_intensity";
    std::vector<double> bandwidths_thz;  // empty: 40 log-spaced, 10..400 THz
    double full_bandwidth_thz = 240;
    std::optional<double> omega_m_thz;   // default 2 * signal.omega0_thz
    std::optional<double> gamma_floor;   // default: full-band reference
  } sweep;
  struct {
    double t_min_fs = -100;
    double t_max_fs = 100;
    std::size_t n_times = 401;
  } waveforms;
  struct {
    double t_min_fs = -128;
    double t_max_fs = 128;
    std::size_t n_times = 256;
    std::size_t shots = 0;
    std::uint64_t seed = 1;
    double husimi_extent = 6;
    std::size_t husimi_points = 121;
    double husimi_time_fs = 0;
  } tomography;
  struct {
    std::string variant = "phase_scan";
    std::optional<double> transmission;  // power fraction to the H arm
    std::vector<double> phi_list{0.0, kPi / 2, kPi, 3 * kPi / 2};
  } variant;
  struct {
    std::optional<std::string> directory;
    std::vector<std::string> formats{"csv", "svg"};
  } output;

  double omega_m() const { return thz(sweep.omega_m_thz.value_or(2 * signal.omega0_thz)); }
  bool wants(const std::string& fmt) const {
    for (const auto& f : output.formats)
      if (f == fmt) return true;
    return false;
  }
};

namespace detail {

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + where + "." + it.key() + "'");
}

template <class T>
void get(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + where + "." + key + "'");
  }
}

template <class T>
void get_opt(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T v{};
  get(j, key, v, where);
  out = v;
}

inline void parse_sinc(const json& j, SincProbeCfg& c, const std::string& w) {
  only_keys(j, w, {"center_thz", "bandwidth_thz", "photons"});
  get(j, "center_thz", c.center_thz, w);
  get(j, "bandwidth_thz", c.bandwidth_thz, w);
  get(j, "photons", c.photons, w);
}

inline void parse_odd(const json& j, OddProbeCfg& c, const std::string& w) {
  only_keys(j, w, {"center_thz", "bandwidth_thz", "photons", "carrier_fraction", "carrier_width_thz"});
  get(j, "center_thz", c.center_thz, w);
  get(j, "bandwidth_thz", c.bandwidth_thz, w);
  get(j, "photons", c.photons, w);
  get(j, "carrier_fraction", c.carrier_fraction, w);
  get(j, "carrier_width_thz", c.carrier_width_thz, w);
}

inline std::vector<PortCfg> parse_ports(const json& j, const std::string& w) {
  if (!j.is_array()) throw ConfigError(w + " must be a list of ports");
  std::vector<PortCfg> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string wi = w + "[" + std::to_string(i) + "]";
    const json& p = j[i];
    only_keys(p, wi, {"min_thz", "max_thz", "waveplates", "sign", "readout"});
    PortCfg c;
    get(p, "min_thz", c.min_thz, wi);
    get(p, "max_thz", c.max_thz, wi);
    get(p, "sign", c.sign, wi);
    get(p, "readout", c.readout, wi);
    if (p.contains("waveplates")) {
      if (!p["waveplates"].is_array()) throw ConfigError(wi + ".waveplates must be a list");
      for (std::size_t k = 0; k < p["waveplates"].size(); ++k) {
        std::string wk = wi + ".waveplates[" + std::to_string(k) + "]";
        const json& q = p["waveplates"][k];
        only_keys(q, wk, {"type", "angle_deg"});
        PlateCfg pc;
        get(q, "type", pc.type, wk);
        get(q, "angle_deg", pc.angle_deg, wk);
        c.waveplates.push_back(pc);
      }
    }
    out.push_back(c);
  }
  return out;
}

inline json dump_ports(const std::vector<PortCfg>& ports) {
  json a = json::array();
  for (const auto& p : ports) {
    json w = json::array();
    for (const auto& q : p.waveplates) w.push_back({{"type", q.type}, {"angle_deg", q.angle_deg}});
    a.push_back({{"min_thz", p.min_thz}, {"max_thz", p.max_thz}, {"waveplates", w}, {"sign", p.sign}, {"readout", p.readout}});
  }
  return a;
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  using namespace detail;
  ExperimentConfig c;
  only_keys(j, "config", {"grid", "crystal", "probe", "ports", "signal", "sweep", "waveforms", "tomography", "variant", "output"});
  if (j.contains("grid")) {
    const json& g = j["grid"];
    only_keys(g, "grid", {"omega_max_thz", "n_points"});
    get(g, "omega_max_thz", c.grid.omega_max_thz, "grid");
    get(g, "n_points", c.grid.n_points, "grid");
  }
  if (j.contains("crystal")) {
    const json& g = j["crystal"];
    only_keys(g, "crystal", {"length_um", "r41_pm_per_v", "cross_section_um2", "phase_matching", "n_nir", "n_mir"});
    get(g, "length_um", c.crystal.length_um, "crystal");
    get(g, "r41_pm_per_v", c.crystal.r41_pm_per_v, "crystal");
    get(g, "cross_section_um2", c.crystal.cross_section_um2, "crystal");
    get(g, "phase_matching", c.crystal.phase_matching, "crystal");
    if (g.contains("n_nir")) {
      const json& n = g["n_nir"];
      only_keys(n, "crystal.n_nir", {"model", "a", "b", "c_um2", "c0", "c1", "c2"});
      get(n, "model", c.crystal.nir_model, "crystal.n_nir");
      get(n, "a", c.crystal.sellmeier.a, "crystal.n_nir");
      get(n, "b", c.crystal.sellmeier.b, "crystal.n_nir");
      get(n, "c_um2", c.crystal.sellmeier.c_um2, "crystal.n_nir");
      get(n, "c0", c.crystal.quadratic.c0, "crystal.n_nir");
      get(n, "c1", c.crystal.quadratic.c1, "crystal.n_nir");
      get(n, "c2", c.crystal.quadratic.c2, "crystal.n_nir");
    }
    if (g.contains("n_mir")) {
      const json& n = g["n_mir"];
      only_keys(n, "crystal.n_mir", {"low", "high", "span_thz"});
      get(n, "low", c.crystal.mir.n_low, "crystal.n_mir");
      get(n, "high", c.crystal.mir.n_high, "crystal.n_mir");
      get(n, "span_thz", c.crystal.mir.f_span_thz, "crystal.n_mir");
    }
  }
  if (j.contains("probe")) {
    const json& g = j["probe"];
    only_keys(g, "probe", {"e", "h", "multiplexed"});
    if (g.contains("e")) parse_sinc(g["e"], c.probe.e, "probe.e");
    if (g.contains("h")) parse_odd(g["h"], c.probe.h, "probe.h");
    if (g.contains("multiplexed")) {
      const json& m = g["multiplexed"];
      only_keys(m, "probe.multiplexed", {"e", "h"});
      if (m.contains("e")) parse_sinc(m["e"], c.probe.mux_e, "probe.multiplexed.e");
      if (m.contains("h")) parse_odd(m["h"], c.probe.mux_h, "probe.multiplexed.h");
    }
  }
  if (j.contains("ports")) {
    const json& g = j["ports"];
    only_keys(g, "ports", {"signal_edge_thz", "e", "h", "multiplexed"});
    get(g, "signal_edge_thz", c.ports.signal_edge_thz, "ports");
    if (g.contains("e")) c.ports.e = parse_ports(g["e"], "ports.e");
    if (g.contains("h")) c.ports.h = parse_ports(g["h"], "ports.h");
    if (g.contains("multiplexed")) c.ports.multiplexed = parse_ports(g["multiplexed"], "ports.multiplexed");
  }
  if (j.contains("signal")) {
    const json& g = j["signal"];
    only_keys(g, "signal", {"omega0_thz", "sigma_thz", "r"});
    get(g, "omega0_thz", c.signal.omega0_thz, "signal");
    get(g, "sigma_thz", c.signal.sigma_thz, "signal");
    get(g, "r", c.signal.r, "signal");
  }
  if (j.contains("sweep")) {
    const json& g = j["sweep"];
    only_keys(g, "sweep", {"quadrature", "constraint", "bandwidths_thz", "full_bandwidth_thz", "omega_m_thz", "gamma_floor"});
    get(g, "quadrature", c.sweep.quadrature, "sweep");
    get(g, "constraint", c.sweep.constraint, "sweep");
    get(g, "bandwidths_thz", c.sweep.bandwidths_thz, "sweep");
    get(g, "full_bandwidth_thz", c.sweep.full_bandwidth_thz, "sweep");
    get_opt(g, "omega_m_thz", c.sweep.omega_m_thz, "sweep");
    get_opt(g, "gamma_floor", c.sweep.gamma_floor, "sweep");
  }
  if (j.contains("waveforms")) {
    const json& g = j["waveforms"];
    only_keys(g, "waveforms", {"t_min_fs", "t_max_fs", "n_times"});
    get(g, "t_min_fs", c.waveforms.t_min_fs, "waveforms");
    get(g, "t_max_fs", c.waveforms.t_max_fs, "waveforms");
    get(g, "n_times", c.waveforms.n_times, "waveforms");
  }
  if (j.contains("tomography")) {
    const json& g = j["tomography"];
    only_keys(g, "tomography",
              {"t_min_fs", "t_max_fs", "n_times", "shots", "seed", "husimi_extent", "husimi_points", "husimi_time_fs"});
    get(g, "t_min_fs", c.tomography.t_min_fs, "tomography");
    get(g, "t_max_fs", c.tomography.t_max_fs, "tomography");
    get(g, "n_times", c.tomography.n_times, "tomography");
    get(g, "shots", c.tomography.shots, "tomography");
    get(g, "seed", c.tomography.seed, "tomography");
    get(g, "husimi_extent", c.tomography.husimi_extent, "tomography");
    get(g, "husimi_points", c.tomography.husimi_points, "tomography");
    get(g, "husimi_time_fs", c.tomography.husimi_time_fs, "tomography");
  }
  if (j.contains("variant")) {
    const json& g = j["variant"];
    only_keys(g, "variant", {"variant", "transmission", "phi_list"});
    get(g, "variant", c.variant.variant, "variant");
    get_opt(g, "transmission", c.variant.transmission, "variant");
    get(g, "phi_list", c.variant.phi_list, "variant");
  }
  if (j.contains("output")) {
    const json& g = j["output"];
    only_keys(g, "output", {"directory", "formats"});
    get_opt(g, "directory", c.output.directory, "output");
    get(g, "formats", c.output.formats, "output");
  }
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  using detail::dump_ports;
  using detail::opt_json;
  auto sinc = [](const SincProbeCfg& p) {
    return json{{"center_thz", p.center_thz}, {"bandwidth_thz", p.bandwidth_thz}, {"photons", p.photons}};
  };
  auto odd = [](const OddProbeCfg& p) {
    return json{{"center_thz", p.center_thz}, {"bandwidth_thz", p.bandwidth_thz}, {"photons", p.photons},
                {"carrier_fraction", p.carrier_fraction}, {"carrier_width_thz", p.carrier_width_thz}};
  };
  json j;
  j["grid"] = {{"omega_max_thz", c.grid.omega_max_thz}, {"n_points", c.grid.n_points}};
  j["crystal"] = {{"length_um", c.crystal.length_um},
                  {"r41_pm_per_v", c.crystal.r41_pm_per_v},
                  {"cross_section_um2", c.crystal.cross_section_um2},
                  {"phase_matching", c.crystal.phase_matching},
                  {"n_nir",
                   {{"model", c.crystal.nir_model},
                    {"a", c.crystal.sellmeier.a},
                    {"b", c.crystal.sellmeier.b},
                    {"c_um2", c.crystal.sellmeier.c_um2},
                    {"c0", c.crystal.quadratic.c0},
                    {"c1", c.crystal.quadratic.c1},
                    {"c2", c.crystal.quadratic.c2}}},
                  {"n_mir", {{"low", c.crystal.mir.n_low}, {"high", c.crystal.mir.n_high}, {"span_thz", c.crystal.mir.f_span_thz}}}};
  j["probe"] = {{"e", sinc(c.probe.e)}, {"h", odd(c.probe.h)}, {"multiplexed", {{"e", sinc(c.probe.mux_e)}, {"h", odd(c.probe.mux_h)}}}};
  j["ports"] = {{"signal_edge_thz", c.ports.signal_edge_thz},
                {"e", dump_ports(c.ports.e)},
                {"h", dump_ports(c.ports.h)},
                {"multiplexed", dump_ports(c.ports.multiplexed)}};
  j["signal"] = {{"omega0_thz", c.signal.omega0_thz}, {"sigma_thz", c.signal.sigma_thz}, {"r", c.signal.r}};
  j["sweep"] = {{"quadrature", c.sweep.quadrature},
                {"constraint", c.sweep.constraint},
                {"bandwidths_thz", c.sweep.bandwidths_thz},
                {"full_bandwidth_thz", c.sweep.full_bandwidth_thz},
                {"omega_m_thz", opt_json(c.sweep.omega_m_thz)},
                {"gamma_floor", opt_json(c.sweep.gamma_floor)}};
  j["waveforms"] = {{"t_min_fs", c.waveforms.t_min_fs}, {"t_max_fs", c.waveforms.t_max_fs}, {"n_times", c.waveforms.n_times}};
  j["tomography"] = {{"t_min_fs", c.tomography.t_min_fs},     {"t_max_fs", c.tomography.t_max_fs},
                     {"n_times", c.tomography.n_times},       {"shots", c.tomography.shots},
                     {"seed", c.tomography.seed},             {"husimi_extent", c.tomography.husimi_extent},
                     {"husimi_points", c.tomography.husimi_points}, {"husimi_time_fs", c.tomography.husimi_time_fs}};
  j["variant"] = {{"variant", c.variant.variant}, {"transmission", opt_json(c.variant.transmission)}, {"phi_list", c.variant.phi_list}};
  j["output"] = {{"directory", opt_json(c.output.directory)}, {"formats", c.output.formats}};
  return j;
}

inline Quadrature parse_quadrature(const std::string& s) {
  if (s == "E" || s == "e") return Quadrature::E;
  if (s == "H" || s == "h") return Quadrature::H;
  throw ConfigError("quadrature must be E or H, got '" + s + "'");
}

inline Constraint parse_constraint(const std::string& s) {
  if (s == "constant_photon_number") return Constraint::constant_photon_number;
  if (s == "constant_intensity") return Constraint::constant_intensity;
  throw ConfigError("constraint must be constant_photon_number or constant_intensity, got '" + s + "'");
}

inline Waveplate parse_waveplate(const std::string& s) {
  if (s == "half") return Waveplate::half;
  if (s == "quarter") return Waveplate::quarter;
  if (s == "none") return Waveplate::none;
  throw ConfigError("waveplate type must be half, quarter or none, got '" + s + "'");
}

}  // namespace eosq::io

#endif

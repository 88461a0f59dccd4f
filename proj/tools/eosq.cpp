#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eosq/experiment.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, infeasible = 3, invariant = 4 };

std::vector<double> parse_phi_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      double x = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      v.push_back(x);
    } catch (const std::exception&) {
      throw eosq::ConfigError("--phi-list expects comma-separated radians, got '" + tok + "'");
    }
  }
  if (v.empty()) throw eosq::ConfigError("--phi-list is empty");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EOS time-domain quantum tomography simulator"};
  app.set_version_flag("--version", EOSQ_VERSION);
  app.require_subcommand(1);

  std::string config_path, out_dir, quadrature, constraint, phi_list, variant;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shots;
  std::optional<double> transmission;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (defaults apply when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: config output.directory, then $EOSQ_OUT_DIR, then ./eosq_out)");
  };
  auto* wf = app.add_subcommand("waveforms", "band-limited quadratures and detected mode profiles");
  common(wf);
  auto* sw = app.add_subcommand("sweep", "bandwidth sweep and constrained optimum");
  common(sw);
  sw->add_option("--quadrature", quadrature, "E or H");
  sw->add_option("--constraint", constraint, "constant_photon_number or constant_intensity");
  auto* tm = app.add_subcommand("tomography", "multiplexed E/H tomography of the squeezed signal");
  common(tm);
  tm->add_option("--seed", seed, "shot sampler seed");
  tm->add_option("--shots", shots, "number of joint E/H samples");
  auto* va = app.add_subcommand("variant", "phase-scan or beam-splitter detection");
  common(va);
  va->add_option("--variant", variant, "phase_scan or beam_splitter");
  va->add_option("--phi-list", phi_list, "comma-separated analysis phases in radians");
  va->add_option("--transmission", transmission, "beam-splitter power fraction sent to the H arm");
  va->add_option("--seed", seed, "recorded in the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    eosq::io::json j = eosq::io::json::object();
    if (!config_path.empty()) {
      try {
        j = eosq::io::json::parse(eosq::io::read_file(config_path));
      } catch (const eosq::io::json::parse_error& e) {
        throw eosq::ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
    }
    eosq::ExperimentConfig cfg = eosq::io::parse_config(j);
    if (!quadrature.empty()) cfg.sweep.quadrature = quadrature;
    if (!constraint.empty()) cfg.sweep.constraint = constraint;
    if (seed) cfg.tomography.seed = *seed;
    if (shots) cfg.tomography.shots = *shots;
    if (!variant.empty()) cfg.variant.variant = variant;
    if (!phi_list.empty()) cfg.variant.phi_list = parse_phi_list(phi_list);
    if (transmission) cfg.variant.transmission = *transmission;

    std::string dir = out_dir;
    if (dir.empty() && cfg.output.directory) dir = *cfg.output.directory;
    if (dir.empty())
      if (const char* env = std::getenv("EOSQ_OUT_DIR")) dir = env;
    if (dir.empty()) dir = "eosq_out";

    eosq::RunResult r = eosq::execute({command, cfg});
    eosq::io::write_all(dir, r.files);
    std::cout << r.summary.dump(2) << "\n";
    if (r.infeasible) {
      std::cerr << "eosq: " << r.infeasible->what() << "\n";
      return infeasible;
    }
    return ok;
  } catch (const eosq::InfeasibleError& e) {
    std::cerr << "eosq: " << e.what() << "\n";
    return infeasible;
  } catch (const eosq::ConfigError& e) {
    std::cerr << "eosq: configuration error: " << e.what() << "\n";
    return config_error;
  } catch (const eosq::io::IoError& e) {
    std::cerr << "eosq: " << e.what() << "\n";
    return config_error;
  } catch (const eosq::InvariantError& e) {
    std::cerr << "eosq: invariant violated: " << e.what() << "\n";
    return invariant;
  } catch (const eosq::Error& e) {
    std::cerr << "eosq: " << e.what() << "\n";
    return invariant;
  }
}

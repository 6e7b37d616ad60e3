// twrn: energy-minimal PNC / SPC-DNC switching schedules for a two-way relay.
//
//   twrn sweep    [--config c.json] [--lambda 0.25,0.5] [--out sweep.csv]
//   twrn solve    --states s.csv --lambda 0.5 [--out schedule.json]
//   twrn sample   [--seed 7] [--n 1000] [--out states.csv]
//   twrn validate
//   twrn --dump-config

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twrn/experiment.hpp"
#include "twrn/validate.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string states_path;
  std::string out_path;
  std::optional<double> epsilon;
  std::vector<double> lambdas;
  std::optional<std::size_t> n_states;
  bool dump_config = false;
  std::string mode = "switch";
};

twrn::ExperimentConfig effective_config(const Overrides& o) {
  twrn::ExperimentConfig c;
  if (!o.config_path.empty()) c = twrn::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (!o.states_path.empty()) c.states_path = o.states_path;
  if (!o.out_path.empty()) c.output_path = o.out_path;
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (!o.lambdas.empty()) c.lambdas = o.lambdas;
  if (o.n_states) c.n_states = *o.n_states;
  c.validate();
  return c;
}

// Writes through `fn` to the configured output path, or stdout.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  fn(os);
}

int cmd_sweep(const twrn::ExperimentConfig& c) {
  const auto rows = twrn::run_sweep(c);
  emit(c.output_path, [&](std::ostream& os) { twrn::write_sweep_csv(os, rows); });
  for (const auto& r : rows)
    if (r.iterations < 0) std::cerr << "warning: lambda " << r.lambda << " hit the iteration cap\n";
  return 0;
}

int cmd_solve(const twrn::ExperimentConfig& c, const std::string& mode) {
  const auto states = twrn::experiment_states(c);
  const double lambda = c.lambdas.front();
  nlohmann::json doc;
  if (mode == "switch") {
    doc = twrn::schedule_json(lambda, twrn::solve_p1(states, lambda, c.switch_options()), states);
  } else {
    const auto m = twrn::parse_mode(mode);
    doc = twrn::allocation_json(twrn::solve_baseline(states, lambda, m, c.tolerances), states);
    doc["lambda"] = lambda;
  }
  emit(c.output_path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return 0;
}

int cmd_sample(const twrn::ExperimentConfig& c) {
  const auto states = twrn::sample_states(c.n_states, c.seed, c.fading);
  emit(c.output_path, [&](std::ostream& os) { twrn::write_states(os, states); });
  return 0;
}

int cmd_validate(const twrn::ExperimentConfig& c) {
  const auto rep = twrn::run_validate(twrn::default_battery());
  emit(c.output_path, [&](std::ostream& os) { os << rep.text(); });
  return rep.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimal PNC / SPC-DNC switching for two-way relay networks"};
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "JSON experiment config");
  app.add_option("--seed", o.seed, "RNG seed for channel sampling");
  app.add_option("--states", o.states_path, "channel states CSV (g1r,g2r,gr1,gr2)");
  app.add_option("--out", o.out_path, "output path (default: stdout)");
  app.add_option("--epsilon", o.epsilon, "relative energy change that ends the switching loop");
  app.add_option("--lambda", o.lambdas, "comma-separated target rates (bit/s/Hz)")->delimiter(',');
  app.add_option("--n", o.n_states, "number of sampled channel states");
  app.add_flag("--dump-config", o.dump_config, "print the effective config as JSON and exit");

  auto* sweep = app.add_subcommand("sweep", "energy vs lambda for switching and both single-mode baselines (CSV)");
  auto* solve = app.add_subcommand("solve", "full schedule for the first lambda (JSON)");
  solve->add_option("--mode", o.mode, "switch, PNC or SPCDNC")->check(CLI::IsMember({"switch", "PNC", "SPCDNC"}));
  auto* sample = app.add_subcommand("sample", "draw channel states (CSV)");
  auto* validate = app.add_subcommand("validate", "run the formula / oracle / convexity battery");
  app.require_subcommand(0, 1);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = effective_config(o);
    if (o.dump_config) {
      std::cout << twrn::to_json(cfg).dump(2) << '\n';
      return 0;
    }
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (solve->parsed()) return cmd_solve(cfg, o.mode);
    if (sample->parsed()) return cmd_sample(cfg);
    if (validate->parsed()) return cmd_validate(cfg);
    std::cerr << app.help();
    return 2;
  } catch (const twrn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const twrn::ChannelError& e) {
    std::cerr << "states error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

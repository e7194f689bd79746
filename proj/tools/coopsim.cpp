#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "coopsim/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = coopsim::cli;
  CLI::App app{"Two-hop cooperative relay network simulator and throughput-region oracle"};
  app.require_subcommand(1);

  std::string config_path;

  auto* region = app.add_subcommand("region", "Boundary scale rho* and interior slack along a direction");
  std::string direction = "1";
  std::string witness;
  region->add_option("config", config_path, "Network config (JSON)")->required();
  region->add_option("--direction", direction, "Comma-separated direction, one value is broadcast");
  region->add_option("--witness", witness, "Write the rho* witness as JSON to this file");

  auto* simulate = app.add_subcommand("simulate", "Run the back-pressure controller block by block");
  cli::SimulateArgs sim;
  double sim_load = 0.0;
  simulate->add_option("config", sim.config_path, "Network config (JSON)")->required();
  auto* sim_lambda = simulate->add_option("--lambda", sim.lambda, "Arrival rates in bits/symbol");
  auto* sim_load_opt = simulate->add_option("--load-factor", sim_load, "Load as a multiple of rho* along --direction");
  sim_lambda->excludes(sim_load_opt);
  simulate->add_option("--direction", sim.direction, "Direction for --load-factor");
  simulate->add_option("--horizon", sim.horizon, "Number of blocks");
  simulate->add_option("--seed", sim.seed, "PRNG seed");
  simulate->add_flag("--allow-idle", sim.allow_idle, "Let the controller idle when no hop has positive weight");
  simulate->add_option("--arrivals", sim.arrivals, "constant | uniform-integer | bernoulli-batch");
  simulate->add_option("--batch-bits", sim.batch_bits, "Batch sizes for bernoulli-batch arrivals");
  simulate->add_option("--out", sim.output_dir, "Output directory (default $COOPSIM_OUTPUT_DIR or .)");
  simulate->add_flag("--trace-queues", sim.trace_queues, "Also write queues.csv");
  simulate->add_flag("--trace-decisions", sim.trace_decisions, "Also write decisions.csv");

  auto* sweep = app.add_subcommand("sweep", "Stability verdicts over load factors and seeds");
  std::string spec_path;
  std::size_t jobs = 0;
  std::string sweep_out;
  sweep->add_option("config", config_path, "Network config (JSON)")->required();
  sweep->add_option("spec", spec_path, "Sweep spec (JSON)")->required();
  sweep->add_option("--jobs", jobs, "Worker threads (0 = available parallelism)");
  sweep->add_option("--out", sweep_out, "Output directory (default $COOPSIM_OUTPUT_DIR or .)");

  auto* count = app.add_subcommand("queue-count", "Virtual-queue counts per relay");
  std::uint64_t levels = 0;
  count->add_option("config", config_path, "Network config (JSON)")->required();
  auto* levels_opt = count->add_option("--state-based-levels", levels, "Rate quantization levels L");

  auto* drift = app.add_subcommand("drift-check", "Monte Carlo one-block Lyapunov drift at a probe state");
  cli::DriftArgs drift_args;
  double drift_load = 0.0;
  drift->add_option("config", drift_args.config_path, "Network config (JSON)")->required();
  drift->add_option("--probe", drift_args.probe_path, "Probe queue state (JSON)")->required();
  auto* drift_lambda = drift->add_option("--lambda", drift_args.lambda, "Arrival rates in bits/symbol");
  auto* drift_load_opt = drift->add_option("--load-factor", drift_load, "Load as a multiple of rho*");
  drift_lambda->excludes(drift_load_opt);
  drift->add_option("--direction", drift_args.direction, "Direction for --load-factor");
  drift->add_option("--arrivals", drift_args.arrivals, "constant | uniform-integer | bernoulli-batch");
  drift->add_option("--batch-bits", drift_args.batch_bits, "Batch sizes for bernoulli-batch arrivals");
  drift->add_option("--samples", drift_args.samples, "Monte Carlo samples");
  drift->add_option("--seed", drift_args.seed, "PRNG seed");
  drift->add_flag("--allow-idle", drift_args.allow_idle, "Let the controller idle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::bad_input;
  }

  if (*region) return cli::cmd_region(config_path, direction, witness, std::cout, std::cerr);
  if (*simulate) {
    if (*sim_load_opt) sim.load_factor = sim_load;
    return cli::cmd_simulate(sim, std::cout, std::cerr);
  }
  if (*sweep) return cli::cmd_sweep(config_path, spec_path, jobs, sweep_out, std::cout, std::cerr);
  if (*count) {
    std::optional<std::uint64_t> l;
    if (*levels_opt) l = levels;
    return cli::cmd_queue_count(config_path, l, std::cout, std::cerr);
  }
  if (*drift) {
    if (*drift_load_opt) drift_args.load_factor = drift_load;
    return cli::cmd_drift_check(drift_args, std::cout, std::cerr);
  }
  return cli::bad_input;
}

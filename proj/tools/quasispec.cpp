// quasispec — command-line driver for the spectral scenarios.
//
// Exit codes: 0 success, 1 validation/parse error, 2 numerical failure,
// 3 acceptance-check failure under --check.

#include <cstdio>
#include <future>
#include <iostream>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qspec/checks.hpp"
#include "qspec/errors.hpp"
#include "qspec/scenario.hpp"

namespace {

struct CliArgs {
  std::vector<std::string> configs;
  std::vector<std::string> overrides;
  std::string out_dir;  // empty: fall back to the config's run.out
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool check = false;
  bool dump_matrix = false;
  int verbosity = 0;
};

int run_one(const std::string& config, const std::vector<std::string>& experiments,
            const CliArgs& args, std::vector<qspec::checks::CheckResult>& all_checks,
            std::mutex& mu) {
  qspec::Scenario sc = qspec::load_scenario_file(config, args.overrides);
  qspec::RunOptions opt;
  opt.out_dir = args.out_dir;
  opt.verbosity = args.verbosity;
  opt.dump_matrix = args.dump_matrix;
  opt.check = args.check;
  opt.seed_override = args.seed;
  if (args.verbosity > 0)
    std::fprintf(stderr, "[quasispec] running scenario '%s' (N=%d, L=%g)\n", sc.name.c_str(), sc.N,
                 sc.L);
  qspec::RunOutcome rc = qspec::run_experiments(sc, experiments, opt);
  std::scoped_lock lock(mu);
  for (auto& c : rc.checks) all_checks.push_back(std::move(c));
  if (args.verbosity > 1)
    for (const auto& f : rc.written_files) std::fprintf(stderr, "[quasispec] wrote %s\n", f.c_str());
  return 0;
}

int run_configs(const std::vector<std::string>& experiments, const CliArgs& args) {
  if (args.configs.empty()) {
    std::fprintf(stderr, "error: --config is required\n");
    return 1;
  }
  std::vector<qspec::checks::CheckResult> all_checks;
  std::mutex mu;
  if (args.jobs <= 1 || args.configs.size() == 1) {
    for (const auto& c : args.configs) run_one(c, experiments, args, all_checks, mu);
  } else {
    std::counting_semaphore<64> slots(std::min(args.jobs, 64));
    std::vector<std::future<void>> futs;
    for (const auto& c : args.configs)
      futs.push_back(std::async(std::launch::async, [&, c] {
        slots.acquire();
        try {
          run_one(c, experiments, args, all_checks, mu);
        } catch (...) {
          slots.release();
          throw;
        }
        slots.release();
      }));
    for (auto& f : futs) f.get();  // rethrows the first failure
  }
  bool failed = false;
  for (const auto& r : all_checks) {
    std::printf("%s\n", qspec::checks::format_result(r).c_str());
    failed = failed || !r.pass;
  }
  return (args.check && failed) ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasispec — quasi-orbit spectral experiments on quantized phase-space symbols"};
  app.require_subcommand(1);

  CliArgs args;
  auto add_common = [&args](CLI::App* cmd) {
    cmd->add_option("--config", args.configs, "scenario config file(s)");
    cmd->add_option("--set", args.overrides, "override 'section.key=value' (repeatable)");
    cmd->add_option("--out", args.out_dir, "output directory (default: the config's run.out)");
    cmd->add_option("--seed", args.seed, "seed override; all randomness flows from it");
    cmd->add_option("--jobs", args.jobs, "parallel scenario worker slots");
    cmd->add_flag("--check", args.check, "evaluate acceptance thresholds; exit 3 on failure");
    cmd->add_flag("--dump-matrix", args.dump_matrix, "dump operator matrices as CSV");
    cmd->add_flag("-v", args.verbosity, "verbosity (repeat for more)");
  };

  CLI::App* run = app.add_subcommand("run", "run every experiment in the config");
  CLI::App* spectrum = app.add_subcommand("spectrum", "spectra at the configured base points");
  CLI::App* ess = app.add_subcommand("ess", "essential-spectrum prediction vs truncation-stable estimate");
  CLI::App* sweep = app.add_subcommand("sweep", "hbar sweep toward the classical range");
  CLI::App* random_cmd = app.add_subcommand("random", "seeded random base-point experiment");
  CLI::App* moyal = app.add_subcommand("moyal-check", "deformed-product morphism and expansion checks");
  CLI::App* catalog = app.add_subcommand("catalog", "list builtin scenarios");
  for (CLI::App* c : {run, spectrum, ess, sweep, random_cmd, moyal}) add_common(c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // keep the exit-code contract: 0 for --help, 1 for any usage error
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (catalog->parsed()) {
      std::printf("%s", qspec::print_catalog().c_str());
      return 0;
    }
    if (run->parsed()) return run_configs({}, args);
    if (spectrum->parsed()) return run_configs({"spectrum"}, args);
    if (ess->parsed()) return run_configs({"ess-spectrum"}, args);
    if (sweep->parsed()) return run_configs({"sweep"}, args);
    if (random_cmd->parsed()) return run_configs({"random"}, args);
    if (moyal->parsed()) return run_configs({"moyal-check"}, args);
    return 1;
  } catch (const qspec::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const qspec::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 1;
  } catch (const qspec::ValidationError& e) {
    std::fprintf(stderr, "invalid input [%s]: %s\n", e.field().c_str(), e.what());
    return 1;
  } catch (const qspec::EvalError& e) {
    std::fprintf(stderr, "evaluation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

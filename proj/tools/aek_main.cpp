#include "aek/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Affine mid-plane evolutes of convex surfaces"};
  app.require_subcommand(1, 1);
  aek::cli::CommandOptions opts;

  std::string spec, out;
  for (const char* name : {"normalize", "invariants", "verify", "evolute"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--spec", spec, "surface spec (JSON)");
    sub->add_option("--point", opts.point, "chart point u,v (decimals or p/q)");
    sub->add_option("--direction", opts.direction, "tangent direction: angle in radians, or xi,eta");
    sub->add_option("--mode", opts.mode, "numeric mode")->check(CLI::IsMember({"rational", "float"}));
    sub->add_option("--grid", opts.grid, "grid resolution N (N x N samples)");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--workers", opts.workers, "worker threads (0 = all cores)");
    sub->add_flag("--timing", opts.timing, "add wall-clock timings to the report");
    sub->add_option("--random-seed", opts.random_seed, "verify a random normal-form frame instead of a spec point");
    sub->add_flag("--corrupt-h12", opts.corrupt_h12)->group("");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return aek::cli::kExitUsage;
  }

  opts.command = app.get_subcommands().front()->get_name();
  if (!spec.empty()) opts.spec = spec;
  if (!out.empty()) opts.out = out;
  return aek::cli::run(opts, std::cout, std::cerr);
}

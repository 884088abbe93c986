#include <CLI11.hpp>

#include "bridgebound/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"entropic bridge solver with per-instance bound verification"};
  app.require_subcommand(1);

  bridgebound::CliOptions opt;
  std::string model_path;
  double tol = -1.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_path, "model definition JSON file");
    cmd->add_option("--out", opt.out_dir, "output directory (default: .)");
    cmd->add_option("--seed", opt.seed, "RNG seed for randomized suites");
    cmd->add_option("--instances", opt.instances, "instances per randomized suite")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", tol, "solver / comparison tolerance override");
  };

  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", opt.suite,
                     "theorem1|lemma|corollaries|decay|pi_bounds|potentials|all");
  add_common(verify);
  CLI::App* bridge = app.add_subcommand("bridge", "solve one bridge and dump fields");
  add_common(bridge);
  CLI::App* oracle =
      app.add_subcommand("oracle-compare", "compare Gaussian and grid backends");
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are a config error
  }

  if (!model_path.empty()) opt.model_path = model_path;
  if (tol > 0.0) opt.tol = tol;

  const std::string command = verify->parsed()   ? "verify"
                              : bridge->parsed() ? "bridge"
                                                 : "oracle-compare";
  return bridgebound::run_cli(command, opt);
}

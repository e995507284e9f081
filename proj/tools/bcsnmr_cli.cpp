#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "bcsnmr/commands.hpp"

using namespace bcsnmr;

int main(int argc, char** argv) {
  CLI::App app{"Classical emulator of an NMR simulation of the BCS pairing Hamiltonian"};
  app.require_subcommand(1);

  std::string config_path;
  std::string path_flag;
  std::string out_dir;
  double tau = 0.0;
  std::string input;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file (key = value)");
    sub->add_option("--path", path_flag, "evolution path")
        ->check(CLI::IsMember({"exact", "compiled", "trotter"}));
    sub->add_option("--out", out_dir, "output directory");
  };

  auto* diag = app.add_subcommand("diag", "eigenvalues and one-pair splitting");
  auto* compile = app.add_subcommand("compile", "compile a pulse program for one evolution time");
  auto* sweep = app.add_subcommand("sweep", "swept readout amplitudes");
  auto* spectrum = app.add_subcommand("spectrum", "second FT, peaks and splitting");
  auto* verify = app.add_subcommand("verify", "verification suite");
  for (auto* sub : {diag, compile, sweep, spectrum, verify}) add_common(sub);
  compile->add_option("--tau", tau, "evolution time in seconds")->required();
  spectrum->add_option("--input", input, "amplitude CSV from the sweep command");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  return run_guarded(
      [&]() -> int {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!path_flag.empty()) cfg.path.kind = parse_path(path_flag);
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        if (diag->parsed()) return cmd_diag(cfg, std::cout);
        if (compile->parsed()) return cmd_compile(cfg, tau, std::cout);
        if (sweep->parsed()) return cmd_sweep(cfg, std::cout);
        if (spectrum->parsed()) {
          std::optional<std::filesystem::path> in;
          if (!input.empty()) in = input;
          return cmd_spectrum(cfg, in, std::cout);
        }
        return cmd_verify(cfg, std::cout);
      },
      std::cerr);
}

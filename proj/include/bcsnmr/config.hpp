#pragma once

// Experiment configuration: line-oriented "key = value" text, frequencies in
// Hz at this boundary and converted to rad/s on the way into the library.
//
// Every output file echoes the effective configuration as "# config.key =
// value" header lines; config_from_header() parses those back.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bcsnmr/nmr_emulator.hpp"
#include "bcsnmr/pairing_model.hpp"
#include "bcsnmr/pulse_compiler.hpp"
#include "bcsnmr/spectroscopy.hpp"

namespace bcsnmr {

inline constexpr std::string_view kOutputFormat = "bcsnmr/1";

struct ExperimentConfig {
  int num_qubits = 2;
  std::vector<double> eps_hz{1.0e4, 1.0e4};
  double v_hz = 1.0;
  double j_hz = 214.9;           // coupling of the emulated hardware
  double compiler_j_hz = 214.9;  // coupling the compiler assumes
  std::vector<double> pw90_s{10e-6, 10e-6};
  GridSpec grid;
  ReadoutConfig readout;
  InitialStateSpec initial;
  PathSpec path;
  double peak_threshold = 0.5;
  Window window = Window::None;
  std::size_t zero_pad = 0;
  double trotter_check_tau_s = 0.3;
  std::string out_dir = "out";

  PairingParams params() const;
  NmrMachineSpec machine() const;           // hardware
  NmrMachineSpec compiler_machine() const;  // what the compiler is told

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate_config(const ExperimentConfig& cfg);

// "key = value" lines for every key, values at full round-trip precision.
std::string config_to_text(const ExperimentConfig& cfg);

// Commented header: format version plus "# config.key = value" lines.
std::string config_header(const ExperimentConfig& cfg);
ExperimentConfig config_from_header(std::string_view text);

std::string_view to_string(EvolutionPath p);
EvolutionPath parse_path(std::string_view s);

}  // namespace bcsnmr

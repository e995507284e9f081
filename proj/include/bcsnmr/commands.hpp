#pragma once

// Subcommands behind the bcsnmr executable. Each writes its artifacts under
// cfg.out_dir, prints a short summary to `out`, and returns an exit code.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcsnmr/config.hpp"

namespace bcsnmr {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitVerification = 2,
  kExitPrecondition = 3,
};

int cmd_diag(const ExperimentConfig& cfg, std::ostream& out);
int cmd_compile(const ExperimentConfig& cfg, double tau, std::ostream& out);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out);
int cmd_spectrum(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& input,
                 std::ostream& out);
int cmd_verify(const ExperimentConfig& cfg, std::ostream& out);

// Runs `body`, mapping library exceptions onto exit codes and printing the
// diagnostic to `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

// Amplitude series CSV: config header, then "k,tau_s,re,im" rows with
// 17 significant digits.
std::string format_amplitude_csv(const AmplitudeSeries& series, const ExperimentConfig& cfg);
AmplitudeSeries parse_amplitude_csv(std::string_view text);

// Spectrum CSV: config header, "freq_hz,re,im,mag" rows, then "# peak" and
// "# splitting_hz" footer lines.
std::string format_spectrum_csv(const SpectrumResult& spec, const ExperimentConfig& cfg);

struct CheckResult {
  std::string name;
  enum class Status { Pass, Fail, Skip } status = Status::Skip;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

// The verification suite behind cmd_verify.
std::vector<CheckResult> run_verification(const ExperimentConfig& cfg);

std::string_view to_string(CheckResult::Status s);

}  // namespace bcsnmr

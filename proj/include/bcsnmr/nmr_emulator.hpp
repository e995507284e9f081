#pragma once

// Emulated NMR experiment: initial state, evolution under H_p (exact or via
// a compiled pulse program), and readout of one spectral line.
//
// Readout works in the on-resonance rotating frame, where the internal
// Hamiltonian reduces to the J term (pi J / 2) Z1 Z2. The FID of channel i is
// tr(rho(t) sigma_i^+) with sigma^+ = X + iY = 2|0><1|, so each line is
// carried by a single coherence rho_ab with a = (qubit i in |1>) and
// b = (qubit i in |0>), the partner qubit fixed.

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "bcsnmr/pairing_model.hpp"
#include "bcsnmr/pulse_compiler.hpp"
#include "bcsnmr/quantum_core.hpp"

namespace bcsnmr {

// A line of the two-spin spectrum: the transition of `qubit` with the other
// spin in `partner_state` (0 or 1).
struct ObservedLine {
  int qubit = 2;
  int partner_state = 0;

  friend bool operator==(const ObservedLine&, const ObservedLine&) = default;
};

struct ReadoutConfig {
  int samples = 4096;               // power of two, >= 256
  double dwell_s = 1e-3;
  double line_broadening = 1.0;     // exponential apodization rate, 1/s
  double half_width_hz = 214.9 / 4; // integration window half width
  ObservedLine line;
  std::vector<double> t2_s{0.0, 0.0};  // per-qubit T2; 0 disables damping
  double acquisition_delay_s = 0.0;
  bool sum_channels = false;  // detect sum_i sigma_i^+ rather than one channel
  bool readout_pulse = false; // (pi/2)_y on every spin before acquisition

  static ReadoutConfig defaults_for(const NmrMachineSpec& m);
  void validate() const;

  friend bool operator==(const ReadoutConfig&, const ReadoutConfig&) = default;
};

// Default is the working state (|00> + |01>)/sqrt2 for two qubits;
// otherwise explicit amplitudes, normalized on use.
struct InitialStateSpec {
  std::optional<std::vector<Complex>> amplitudes;

  friend bool operator==(const InitialStateSpec&, const InitialStateSpec&) = default;
};

QState prepare_initial_state(int num_qubits, const InitialStateSpec& spec = {});

QState evolve_exact(const QState& state, const PairingParams& p, double tau);
QState evolve_compiled(const QState& state, const PulseProgram& prog);

std::vector<Complex> simulate_fid(const QOperator& rho, const NmrMachineSpec& m,
                                  const ReadoutConfig& cfg);
std::vector<Complex> simulate_fid(const QState& state, const NmrMachineSpec& m,
                                  const ReadoutConfig& cfg);

struct FidSpectrum {
  std::vector<double> freq_hz;  // signed, bin k >= N/2 maps to negative frequency
  std::vector<Complex> values;
  double bin_hz = 0.0;
};

// X[f] = sum_k x_k exp(-2 pi i f k / N). Length must be a power of two;
// zero padding is the caller's business.
FidSpectrum first_ft(std::span<const Complex> samples, double dwell_s);

// Rotating-frame frequency of a line, Hz: +J/2 for partner |0>, -J/2 for |1>.
double line_frequency_hz(const ObservedLine& line, const NmrMachineSpec& m);

// Integral of the spectrum over the line window, divided by the sample count.
// Raw: the receiver-phase reference is applied by the caller.
Complex extract_peak_amplitude(const FidSpectrum& spectrum, const ObservedLine& line,
                               const NmrMachineSpec& m, const ReadoutConfig& cfg);

// Analytic shortcut: the coherence rho_ab that carries `line`, after the
// optional readout pulse. Proportional to the FID route's raw amplitude.
Complex projection_amplitude(const QState& state, const ObservedLine& line,
                             const ReadoutConfig& cfg);

enum class EvolutionPath { Exact, Compiled, Trotter };

struct PathSpec {
  EvolutionPath kind = EvolutionPath::Compiled;
  int trotter_steps = 32;
  int trotter_order = 2;

  friend bool operator==(const PathSpec&, const PathSpec&) = default;
};

enum class ReadoutRoute { Fid, Projection };

struct GridSpec {
  int count = 64;
  double start_s = 0.0;
  double step_s = 1.0 / kTwoPi;

  void validate() const;
  std::vector<double> taus() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct AmplitudeSeries {
  std::vector<double> tau;
  std::vector<Complex> amplitude;
  Complex reference{1.0, 0.0};  // raw amplitude of the tau = 0 experiment

  double step() const;
};

class SweepPointError : public Error {
 public:
  SweepPointError(int index, const std::string& what)
      : Error("sweep point " + std::to_string(index) + ": " + what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

struct SweepOptions {
  PathSpec path;
  InitialStateSpec initial;
  ReadoutRoute route = ReadoutRoute::Fid;
};

// Final state after evolving the initial state for tau along `path`.
QState evolve_along(const PairingParams& p, const NmrMachineSpec& m, double tau,
                    const PathSpec& path, const InitialStateSpec& initial);

// Raw amplitude of one experiment (no phase reference).
Complex measure_raw(const QState& final_state, const NmrMachineSpec& m, const ReadoutConfig& cfg,
                    ReadoutRoute route);

// For every grid point: prepare, evolve, read out, divide by the raw
// amplitude of a tau = 0 experiment run through the identical pipeline.
// A failing point aborts the sweep with a SweepPointError (nested original).
AmplitudeSeries run_tau_sweep(const PairingParams& p, const NmrMachineSpec& m,
                              const ReadoutConfig& cfg, const GridSpec& grid,
                              const SweepOptions& opts = {});

}  // namespace bcsnmr

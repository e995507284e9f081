#pragma once

// Compilation of exp(-i H_p tau) into NMR-native events: rf pulses, composite
// z-rotations, and free evolution under the scalar J coupling.
//
// Conventions
//  * An rf pulse of angle a about axis n is exp(-i (a/2) sigma_n).
//  * A J delay of duration d is exp(-i (pi J d / 2) Z1 Z2), J in Hz. Its
//    period (up to global phase) is 2/|J|.
//  * Events are stored in time order; the program unitary is
//    U = U_last ... U_first.
//  * The composite z-rotation written (pi/2)_x - (theta)_y - (pi/2)_-x is an
//    operator product, so its time order is (pi/2)_-x, (theta)_y, (pi/2)_x,
//    which equals exp(-i (theta/2) Z).

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bcsnmr/pairing_model.hpp"
#include "bcsnmr/quantum_core.hpp"

namespace bcsnmr {

struct NmrMachineSpec {
  double j_hz = 214.9;
  std::vector<double> pw90_s{10e-6, 10e-6};  // 90 degree pulse width per qubit

  static NmrMachineSpec paper_default() { return {}; }

  int num_qubits() const { return static_cast<int>(pw90_s.size()); }
  // Rabi rate of qubit q (1-based), rad/s.
  double rabi_rate(int qubit) const;
  // Duration of a 2 pi rotation on qubit q.
  double z_period(int qubit) const;
  // Period of J evolution, 2/|J|.
  double j_period() const;

  // J must be finite and non-zero; a negative J models a coupling of the
  // opposite sign. Pulse widths must be positive.
  void validate() const;

  friend bool operator==(const NmrMachineSpec&, const NmrMachineSpec&) = default;
};

enum class EventKind { RfPulse, ZComposite, JDelay };
enum class Axis { None, PlusX, MinusX, PlusY, MinusY };

struct PulseEvent {
  EventKind kind = EventKind::RfPulse;
  std::vector<int> qubits;  // 1-based
  Axis axis = Axis::None;
  double angle = 0.0;     // rad; unused for JDelay
  double duration = 0.0;  // s

  friend bool operator==(const PulseEvent&, const PulseEvent&) = default;
};

struct PulseProgram {
  std::vector<PulseEvent> events;
  double tau = 0.0;  // simulated evolution time, s
  PairingParams params;
  NmrMachineSpec machine;
  bool reduced = true;  // durations folded into one period

  int num_qubits() const { return params.num_qubits(); }
  double wall_duration() const;

  friend bool operator==(const PulseProgram&, const PulseProgram&) = default;
};

// Rotation angles and J-delay length before and after period folding.
struct EvolutionDurations {
  std::vector<double> theta;  // z-rotation angle per qubit, rad
  double tau3 = 0.0;          // J delay per coupling block, s
};

// theta_i = eps_i tau and pi |J| tau3 = |V| tau in the J-gate convention above,
// i.e. tau3 = 2 (V/2pi) tau / J. Throws ArgumentError for tau < 0.
EvolutionDurations map_durations(const PairingParams& p, const NmrMachineSpec& m, double tau);

// theta mod 2pi, tau3 mod 2/|J| (floor modulo; results in [0, period)).
EvolutionDurations reduce_periodic(const EvolutionDurations& raw, const NmrMachineSpec& m);

// Three rf pulses realizing exp(-i (theta/2) Z) on `qubit`, in time order.
// theta is taken mod 2pi; a zero rotation yields no pulses.
std::vector<PulseEvent> z_composite_expand(int qubit, double theta, const NmrMachineSpec& m);

// Exact network for two qubits with eps1 == eps2: z-rotations on both qubits,
// then the XX block (J delay conjugated by y pulses) and the YY block (J delay
// conjugated by x pulses). Throws PreconditionError when eps1 != eps2 and
// CapacityError for N != 2.
PulseProgram compile_exact(const PairingParams& p, const NmrMachineSpec& m, double tau,
                           bool reduce = true);

// Splits H_p into its z part A and coupling part B. Order 1 uses
// (B A)^steps, order 2 uses (A/2 B A/2)^steps. Each slice is reduced.
PulseProgram trotterize(const PairingParams& p, const NmrMachineSpec& m, double tau, int steps,
                        int order);

// Smallest doubling ladder base, base_steps * 2^j, that puts the z-field
// spread times the step length at or below one radian; returns `count`
// successive doublings from there. Below that regime the splitting error
// oscillates instead of converging.
std::vector<int> asymptotic_step_ladder(const PairingParams& p, double tau, int base_steps,
                                        int count = 3);

// Single event as an operator on the program register.
QOperator event_unitary(const PulseEvent& e, int num_qubits, const NmrMachineSpec& m);

// Ordered product of event unitaries using the program's own machine spec.
QOperator sequence_to_unitary(const PulseProgram& prog);
// Replay against different hardware (e.g. a J that differs from the one the
// compiler assumed).
QOperator sequence_to_unitary(const PulseProgram& prog, const NmrMachineSpec& hardware);

// Structural checks: qubit indices, finite values, rf angle/duration
// consistency, and period bounds for reduced programs.
void validate_program(const PulseProgram& prog);

// Line-oriented text form:
//   header  "# key = value" lines (format version, tau, params, machine)
//   events  "<kind> <qubits> <axis> <angle_rad> <duration_s>"
// with "-" for fields that do not apply. Numbers use the shortest decimal
// that round-trips, so parse(emit(p)) == p bit for bit.
std::string emit_pulse_program(const PulseProgram& prog);
PulseProgram parse_pulse_program(std::string_view text);

void write_pulse_program(const std::filesystem::path& path, const PulseProgram& prog);
PulseProgram read_pulse_program(const std::filesystem::path& path);

std::string_view to_string(EventKind k);
std::string_view to_string(Axis a);

}  // namespace bcsnmr

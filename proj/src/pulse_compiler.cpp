#include "bcsnmr/pulse_compiler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace bcsnmr {

namespace {

constexpr double kHalfPi = 0.5 * kPi;

void require_qubit(int qubit, int num_qubits) {
  if (qubit < 1 || qubit > num_qubits) {
    throw ArgumentError("qubit " + std::to_string(qubit) + " out of range [1, " +
                        std::to_string(num_qubits) + "]");
  }
}

double floor_mod(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  // fmod is exact, but the shift above can round up to the period itself.
  if (r >= period) r = 0.0;
  return r;
}

// cos(a/2) I - i sin(a/2) sigma_axis
Eigen::Matrix2cd rotation(Axis axis, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd g;
  switch (axis) {
    case Axis::PlusX: g << c, -i * s, -i * s, c; break;
    case Axis::MinusX: g << c, i * s, i * s, c; break;
    case Axis::PlusY: g << c, -s, s, c; break;
    case Axis::MinusY: g << c, s, -s, c; break;
    case Axis::None: throw ProgramError("rf pulse without an axis");
  }
  return g;
}

// u <- g_qubit * u, acting on rows of u.
void left_apply_single(Matrix& u, const Eigen::Matrix2cd& g, int qubit, int num_qubits) {
  const auto d = u.rows();
  const Eigen::Index stride = Eigen::Index{1} << (num_qubits - qubit);
  for (Eigen::Index base = 0; base < d; ++base) {
    if (base & stride) continue;
    const Eigen::Index hi = base | stride;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      const Complex a = u(base, c);
      const Complex b = u(hi, c);
      u(base, c) = g(0, 0) * a + g(0, 1) * b;
      u(hi, c) = g(1, 0) * a + g(1, 1) * b;
    }
  }
}

// u <- exp(-i (phi/2) Z_a Z_b) u
void left_apply_zz(Matrix& u, double phi, int qa, int qb, int num_qubits) {
  const Eigen::Index ma = Eigen::Index{1} << (num_qubits - qa);
  const Eigen::Index mb = Eigen::Index{1} << (num_qubits - qb);
  const Complex same = std::polar(1.0, -0.5 * phi);
  const Complex diff = std::polar(1.0, 0.5 * phi);
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    const bool za = (r & ma) != 0;
    const bool zb = (r & mb) != 0;
    u.row(r) *= (za == zb) ? same : diff;
  }
}

struct Rotation {
  Axis axis;
  double angle;
};

// Time-ordered (pi/2)_-x, (theta)_y, (pi/2)_x. A negative theta is a
// rotation about -y; this only occurs in unreduced programs.
std::array<Rotation, 3> composite_rotations(double theta) {
  return {Rotation{Axis::MinusX, kHalfPi}, Rotation{Axis::PlusY, theta},
          Rotation{Axis::PlusX, kHalfPi}};
}

void apply_event(Matrix& u, const PulseEvent& e, int num_qubits, const NmrMachineSpec& m) {
  switch (e.kind) {
    case EventKind::RfPulse:
      left_apply_single(u, rotation(e.axis, e.angle), e.qubits.front(), num_qubits);
      break;
    case EventKind::ZComposite:
      for (const Rotation& r : composite_rotations(e.angle)) {
        left_apply_single(u, rotation(r.axis, r.angle), e.qubits.front(), num_qubits);
      }
      break;
    case EventKind::JDelay:
      left_apply_zz(u, kPi * m.j_hz * e.duration, e.qubits[0], e.qubits[1], num_qubits);
      break;
  }
}

PulseEvent rf(int qubit, Axis axis, double angle, const NmrMachineSpec& m) {
  return {EventKind::RfPulse, {qubit}, axis, angle, angle / m.rabi_rate(qubit)};
}

PulseEvent z_composite(int qubit, double theta, const NmrMachineSpec& m) {
  return {EventKind::ZComposite, {qubit}, Axis::None, theta,
          (kPi + std::abs(theta)) / m.rabi_rate(qubit)};
}

// exp(-i (V tau / 2) X1 X2): J delay between y pulses.
void append_xx_block(std::vector<PulseEvent>& out, double tau3, const NmrMachineSpec& m) {
  if (tau3 == 0.0) return;
  out.push_back(rf(1, Axis::MinusY, kHalfPi, m));
  out.push_back(rf(2, Axis::MinusY, kHalfPi, m));
  out.push_back({EventKind::JDelay, {1, 2}, Axis::None, 0.0, tau3});
  out.push_back(rf(1, Axis::PlusY, kHalfPi, m));
  out.push_back(rf(2, Axis::PlusY, kHalfPi, m));
}

// exp(-i (V tau / 2) Y1 Y2): J delay between x pulses.
void append_yy_block(std::vector<PulseEvent>& out, double tau3, const NmrMachineSpec& m) {
  if (tau3 == 0.0) return;
  out.push_back(rf(1, Axis::PlusX, kHalfPi, m));
  out.push_back(rf(2, Axis::PlusX, kHalfPi, m));
  out.push_back({EventKind::JDelay, {1, 2}, Axis::None, 0.0, tau3});
  out.push_back(rf(1, Axis::MinusX, kHalfPi, m));
  out.push_back(rf(2, Axis::MinusX, kHalfPi, m));
}

void append_z_slice(std::vector<PulseEvent>& out, const std::vector<double>& theta,
                    const NmrMachineSpec& m) {
  for (std::size_t q = 0; q < theta.size(); ++q) {
    if (theta[q] != 0.0) out.push_back(z_composite(static_cast<int>(q) + 1, theta[q], m));
  }
}

void require_two_qubits(const PairingParams& p, const NmrMachineSpec& m, const char* what) {
  p.validate();
  m.validate();
  if (p.num_qubits() != 2) {
    throw CapacityError(std::string(what) + " supports exactly 2 qubits, got " +
                        std::to_string(p.num_qubits()));
  }
  if (m.num_qubits() != 2) {
    throw ArgumentError(std::string(what) + ": machine spec must list 2 pulse widths");
  }
}

}  // namespace

double NmrMachineSpec::rabi_rate(int qubit) const {
  require_qubit(qubit, num_qubits());
  return kHalfPi / pw90_s[static_cast<std::size_t>(qubit - 1)];
}

double NmrMachineSpec::z_period(int qubit) const { return kTwoPi / rabi_rate(qubit); }

double NmrMachineSpec::j_period() const { return 2.0 / std::abs(j_hz); }

void NmrMachineSpec::validate() const {
  if (!std::isfinite(j_hz) || j_hz == 0.0) throw ArgumentError("J coupling must be finite and non-zero");
  if (pw90_s.empty()) throw ArgumentError("machine spec needs at least one pulse width");
  for (double w : pw90_s) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("90 degree pulse widths must be positive");
  }
}

double PulseProgram::wall_duration() const {
  return std::accumulate(events.begin(), events.end(), 0.0,
                         [](double acc, const PulseEvent& e) { return acc + e.duration; });
}

EvolutionDurations map_durations(const PairingParams& p, const NmrMachineSpec& m, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw ArgumentError("evolution time tau must be finite and non-negative");
  }
  p.validate();
  m.validate();
  EvolutionDurations out;
  out.theta.reserve(p.eps.size());
  for (double e : p.eps) out.theta.push_back(e * tau);
  out.tau3 = p.v * tau / (kPi * m.j_hz);
  return out;
}

EvolutionDurations reduce_periodic(const EvolutionDurations& raw, const NmrMachineSpec& m) {
  m.validate();
  EvolutionDurations out;
  out.theta.reserve(raw.theta.size());
  for (double t : raw.theta) {
    if (!std::isfinite(t)) throw ArgumentError("rotation angle must be finite");
    out.theta.push_back(floor_mod(t, kTwoPi));
  }
  if (!std::isfinite(raw.tau3)) throw ArgumentError("J delay must be finite");
  out.tau3 = floor_mod(raw.tau3, m.j_period());
  return out;
}

std::vector<PulseEvent> z_composite_expand(int qubit, double theta, const NmrMachineSpec& m) {
  require_qubit(qubit, m.num_qubits());
  const double reduced = floor_mod(theta, kTwoPi);
  if (reduced == 0.0) return {};
  std::vector<PulseEvent> out;
  for (const Rotation& r : composite_rotations(reduced)) out.push_back(rf(qubit, r.axis, r.angle, m));
  return out;
}

PulseProgram compile_exact(const PairingParams& p, const NmrMachineSpec& m, double tau,
                           bool reduce) {
  require_two_qubits(p, m, "compile_exact");
  if (!p.uniform_eps()) {
    throw PreconditionError(
        "exact decomposition needs eps1 == eps2 (commuting terms); rerun with --path trotter");
  }
  EvolutionDurations d = map_durations(p, m, tau);
  if (reduce) d = reduce_periodic(d, m);

  PulseProgram prog;
  prog.tau = tau;
  prog.params = p;
  prog.machine = m;
  prog.reduced = reduce;
  append_z_slice(prog.events, d.theta, m);
  append_xx_block(prog.events, d.tau3, m);
  append_yy_block(prog.events, d.tau3, m);
  return prog;
}

PulseProgram trotterize(const PairingParams& p, const NmrMachineSpec& m, double tau, int steps,
                        int order) {
  require_two_qubits(p, m, "trotterize");
  if (steps < 1) throw ArgumentError("trotter steps must be >= 1");
  if (order != 1 && order != 2) throw ArgumentError("trotter order must be 1 or 2");

  const double dt = tau / steps;
  const EvolutionDurations full = reduce_periodic(map_durations(p, m, dt), m);
  const EvolutionDurations half = reduce_periodic(map_durations(p, m, 0.5 * dt), m);

  PulseProgram prog;
  prog.tau = tau;
  prog.params = p;
  prog.machine = m;
  prog.reduced = true;
  prog.events.reserve(static_cast<std::size_t>(steps) * 14);
  for (int s = 0; s < steps; ++s) {
    if (order == 1) {
      append_z_slice(prog.events, full.theta, m);
      append_xx_block(prog.events, full.tau3, m);
      append_yy_block(prog.events, full.tau3, m);
    } else {
      append_z_slice(prog.events, half.theta, m);
      append_xx_block(prog.events, full.tau3, m);
      append_yy_block(prog.events, full.tau3, m);
      append_z_slice(prog.events, half.theta, m);
    }
  }
  return prog;
}

std::vector<int> asymptotic_step_ladder(const PairingParams& p, double tau, int base_steps,
                                        int count) {
  if (base_steps < 1 || count < 1) throw ArgumentError("ladder needs positive base and count");
  p.validate();
  const auto [lo, hi] = std::minmax_element(p.eps.begin(), p.eps.end());
  const double scale = (*hi - *lo) + std::abs(p.v);
  long long k = base_steps;
  while (scale * std::abs(tau) / static_cast<double>(k) > 1.0) k *= 2;
  std::vector<int> out;
  for (int j = 0; j < count; ++j) out.push_back(static_cast<int>(k << j));
  return out;
}

void validate_program(const PulseProgram& prog) {
  const int n = prog.num_qubits();
  if (n < 1) throw ProgramError("program has no qubits");
  if (prog.machine.num_qubits() != n) throw ProgramError("machine spec qubit count mismatch");
  try {
    prog.machine.validate();
  } catch (const ArgumentError& e) {
    throw ProgramError(std::string("invalid machine spec: ") + e.what());
  }
  for (std::size_t i = 0; i < prog.events.size(); ++i) {
    const PulseEvent& e = prog.events[i];
    const std::string where = "event " + std::to_string(i) + ": ";
    for (int q : e.qubits) {
      if (q < 1 || q > n) throw ProgramError(where + "qubit " + std::to_string(q) + " out of range");
    }
    if (!std::isfinite(e.angle) || !std::isfinite(e.duration)) {
      throw ProgramError(where + "non-finite angle or duration");
    }
    switch (e.kind) {
      case EventKind::RfPulse: {
        if (e.qubits.size() != 1 || e.axis == Axis::None) {
          throw ProgramError(where + "rf pulse needs one qubit and an axis");
        }
        if (!(e.angle > 0.0) || e.angle > kTwoPi) throw ProgramError(where + "rf angle outside (0, 2pi]");
        const double expected = prog.machine.rabi_rate(e.qubits[0]) * e.duration;
        if (std::abs(expected - e.angle) > 1e-12 * std::max(1.0, e.angle)) {
          throw ProgramError(where + "rf angle inconsistent with duration");
        }
        break;
      }
      case EventKind::ZComposite:
        if (e.qubits.size() != 1 || e.axis != Axis::None) {
          throw ProgramError(where + "z composite needs one qubit and no axis");
        }
        if (prog.reduced && (e.angle < 0.0 || e.angle >= kTwoPi)) {
          throw ProgramError(where + "reduced z angle outside [0, 2pi)");
        }
        if (e.duration < 0.0) throw ProgramError(where + "negative duration");
        break;
      case EventKind::JDelay:
        if (e.qubits.size() != 2 || e.qubits[0] == e.qubits[1] || e.axis != Axis::None) {
          throw ProgramError(where + "J delay needs two distinct qubits and no axis");
        }
        if (prog.reduced && (e.duration < 0.0 || e.duration >= prog.machine.j_period())) {
          throw ProgramError(where + "reduced J delay outside [0, 2/J)");
        }
        break;
    }
  }
}

QOperator event_unitary(const PulseEvent& e, int num_qubits, const NmrMachineSpec& m) {
  const std::size_t want = e.kind == EventKind::JDelay ? 2 : 1;
  if (e.qubits.size() != want) throw ProgramError("event has the wrong number of qubits");
  for (int q : e.qubits) {
    if (q < 1 || q > num_qubits) throw ProgramError("event qubit out of range");
  }
  Matrix u = QOperator::identity(num_qubits).matrix();
  apply_event(u, e, num_qubits, m);
  return QOperator(std::move(u));
}

QOperator sequence_to_unitary(const PulseProgram& prog) {
  return sequence_to_unitary(prog, prog.machine);
}

QOperator sequence_to_unitary(const PulseProgram& prog, const NmrMachineSpec& hardware) {
  validate_program(prog);
  hardware.validate();
  const int n = prog.num_qubits();
  Matrix u = QOperator::identity(n).matrix();
  for (const PulseEvent& e : prog.events) apply_event(u, e, n, hardware);
  return QOperator(std::move(u));
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::RfPulse: return "rf";
    case EventKind::ZComposite: return "zcomp";
    case EventKind::JDelay: return "jdelay";
  }
  return "?";
}

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::None: return "-";
    case Axis::PlusX: return "+x";
    case Axis::MinusX: return "-x";
    case Axis::PlusY: return "+y";
    case Axis::MinusY: return "-y";
  }
  return "?";
}

}  // namespace bcsnmr

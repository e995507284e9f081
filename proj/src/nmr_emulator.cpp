#include "bcsnmr/nmr_emulator.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>
#include <cmath>
#include <exception>
#include <string>

namespace bcsnmr {

namespace {

Eigen::Index index_mask(int qubit, int num_qubits) {
  return Eigen::Index{1} << (num_qubits - qubit);
}

// Energy of basis state b under (pi J / 2) Z1 Z2, rad/s.
double j_energy(Eigen::Index b, const NmrMachineSpec& m) {
  const bool z1 = (b & index_mask(1, 2)) != 0;
  const bool z2 = (b & index_mask(2, 2)) != 0;
  return 0.5 * kPi * m.j_hz * (z1 == z2 ? 1.0 : -1.0);
}

// (a, b) basis pair whose coherence rho_ab carries the line on `qubit`.
std::pair<Eigen::Index, Eigen::Index> line_pair(int qubit, int partner_state) {
  const int partner = qubit == 1 ? 2 : 1;
  const Eigen::Index b = partner_state ? index_mask(partner, 2) : 0;
  return {b | index_mask(qubit, 2), b};
}

void require_two_qubit_readout(int num_qubits) {
  if (num_qubits != 2) {
    throw CapacityError("readout model supports exactly 2 qubits, got " + std::to_string(num_qubits));
  }
}

QOperator apply_readout_pulse(const QOperator& rho, const ReadoutConfig& cfg) {
  if (!cfg.readout_pulse) return rho;
  const double c = std::cos(0.25 * kPi);
  Matrix ry(2, 2);
  ry << c, -c, c, c;  // exp(-i (pi/4) Y)
  const QOperator r = kron(QOperator(ry), QOperator(ry));
  return r * rho * r.adjoint();
}

std::vector<int> channels(const ReadoutConfig& cfg) {
  if (cfg.sum_channels) return {1, 2};
  return {cfg.line.qubit};
}

bool is_power_of_two(std::size_t n) { return n > 0 && std::has_single_bit(n); }

}  // namespace

ReadoutConfig ReadoutConfig::defaults_for(const NmrMachineSpec& m) {
  ReadoutConfig cfg;
  cfg.half_width_hz = std::abs(m.j_hz) / 4.0;
  return cfg;
}

void ReadoutConfig::validate() const {
  if (samples < 256 || !is_power_of_two(static_cast<std::size_t>(samples))) {
    throw ConfigError("fid sample count must be a power of two >= 256");
  }
  if (!(dwell_s > 0.0) || !std::isfinite(dwell_s)) throw ConfigError("dwell time must be positive");
  if (!(half_width_hz > 0.0) || !std::isfinite(half_width_hz)) {
    throw ConfigError("integration half width must be positive");
  }
  if (!(line_broadening >= 0.0) || !std::isfinite(line_broadening)) {
    throw ConfigError("line broadening must be non-negative");
  }
  if (line.qubit != 1 && line.qubit != 2) throw ConfigError("observed qubit must be 1 or 2");
  if (line.partner_state != 0 && line.partner_state != 1) {
    throw ConfigError("observed partner state must be 0 or 1");
  }
  if (t2_s.size() != 2) throw ConfigError("t2 needs one entry per qubit");
  for (double t : t2_s) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("t2 entries must be >= 0 (0 disables)");
  }
  if (!(acquisition_delay_s >= 0.0) || !std::isfinite(acquisition_delay_s)) {
    throw ConfigError("acquisition delay must be non-negative");
  }
}

QState prepare_initial_state(int num_qubits, const InitialStateSpec& spec) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw ArgumentError("qubit count " + std::to_string(num_qubits) + " out of range");
  }
  const auto d = static_cast<Eigen::Index>(dimension_of(num_qubits));
  if (!spec.amplitudes) {
    // Hadamard on the last qubit of |0...0>.
    Vector v = Vector::Zero(d);
    v(0) = 1.0;
    v(1) = 1.0;
    return QState::normalized(std::move(v));
  }
  const auto& amps = *spec.amplitudes;
  if (static_cast<Eigen::Index>(amps.size()) != d) {
    throw ArgumentError("initial state needs " + std::to_string(d) + " amplitudes, got " +
                        std::to_string(amps.size()));
  }
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = amps[static_cast<std::size_t>(i)];
  return QState::normalized(std::move(v));
}

QState evolve_exact(const QState& state, const PairingParams& p, double tau) {
  if (state.num_qubits() != p.num_qubits()) {
    throw ArgumentError("state has " + std::to_string(state.num_qubits()) + " qubits, H_p has " +
                        std::to_string(p.num_qubits()));
  }
  return apply(expm_hermitian(build_hp(p), tau), state);
}

QState evolve_compiled(const QState& state, const PulseProgram& prog) {
  if (state.num_qubits() != prog.num_qubits()) {
    throw ArgumentError("program qubit count does not match the state");
  }
  return apply(sequence_to_unitary(prog), state);
}

std::vector<Complex> simulate_fid(const QOperator& rho_in, const NmrMachineSpec& m,
                                  const ReadoutConfig& cfg) {
  require_two_qubit_readout(rho_in.num_qubits());
  cfg.validate();
  m.validate();
  const QOperator rho = apply_readout_pulse(rho_in, cfg);

  struct Term {
    Complex weight;     // 2 rho_ab
    double omega;       // -(E_a - E_b), rad/s
    double inv_t2;
  };
  std::vector<Term> terms;
  for (int q : channels(cfg)) {
    const double t2 = cfg.t2_s[static_cast<std::size_t>(q - 1)];
    for (int partner_state : {0, 1}) {
      const auto [a, b] = line_pair(q, partner_state);
      const Complex c = rho.matrix()(a, b);
      if (c == Complex{}) continue;
      terms.push_back({2.0 * c, -(j_energy(a, m) - j_energy(b, m)), t2 > 0.0 ? 1.0 / t2 : 0.0});
    }
  }

  std::vector<Complex> out(static_cast<std::size_t>(cfg.samples));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double acq = static_cast<double>(k) * cfg.dwell_s;
    const double t = cfg.acquisition_delay_s + acq;
    Complex s{};
    for (const Term& term : terms) {
      s += term.weight * std::polar(std::exp(-t * term.inv_t2), term.omega * t);
    }
    out[k] = s * std::exp(-cfg.line_broadening * acq);
  }
  return out;
}

std::vector<Complex> simulate_fid(const QState& state, const NmrMachineSpec& m,
                                  const ReadoutConfig& cfg) {
  return simulate_fid(state.density(), m, cfg);
}

FidSpectrum first_ft(std::span<const Complex> samples, double dwell_s) {
  if (!is_power_of_two(samples.size())) {
    throw ArgumentError("FID length " + std::to_string(samples.size()) + " is not a power of two");
  }
  if (!(dwell_s > 0.0)) throw ArgumentError("dwell time must be positive");
  const std::size_t n = samples.size();
  std::vector<Complex> in(samples.begin(), samples.end());
  FidSpectrum out;
  Eigen::FFT<double> fft;
  fft.fwd(out.values, in);
  out.bin_hz = 1.0 / (static_cast<double>(n) * dwell_s);
  out.freq_hz.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double signed_bin = k < n / 2 ? static_cast<double>(k)
                                        : static_cast<double>(k) - static_cast<double>(n);
    out.freq_hz[k] = signed_bin * out.bin_hz;
  }
  return out;
}

double line_frequency_hz(const ObservedLine& line, const NmrMachineSpec& m) {
  return (line.partner_state == 0 ? 0.5 : -0.5) * m.j_hz;
}

Complex extract_peak_amplitude(const FidSpectrum& spectrum, const ObservedLine& line,
                               const NmrMachineSpec& m, const ReadoutConfig& cfg) {
  const double f0 = line_frequency_hz(line, m);
  const double nyquist = 0.5 * spectrum.bin_hz * static_cast<double>(spectrum.values.size());
  if (!(std::abs(f0) < nyquist)) {
    throw ConfigError("line at " + std::to_string(f0) + " Hz lies outside the +-" +
                      std::to_string(nyquist) + " Hz FID axis");
  }
  Complex sum{};
  std::size_t used = 0;
  for (std::size_t k = 0; k < spectrum.values.size(); ++k) {
    if (std::abs(spectrum.freq_hz[k] - f0) <= cfg.half_width_hz) {
      sum += spectrum.values[k];
      ++used;
    }
  }
  if (used == 0) throw ConfigError("integration window around the observed line is empty");
  return sum / static_cast<double>(spectrum.values.size());
}

Complex projection_amplitude(const QState& state, const ObservedLine& line,
                             const ReadoutConfig& cfg) {
  require_two_qubit_readout(state.num_qubits());
  const QOperator rho = apply_readout_pulse(state.density(), cfg);
  Complex sum{};
  const std::vector<int> qs = cfg.sum_channels ? std::vector<int>{1, 2} : std::vector<int>{line.qubit};
  for (int q : qs) {
    const auto [a, b] = line_pair(q, line.partner_state);
    sum += rho.matrix()(a, b);
  }
  return sum;
}

void GridSpec::validate() const {
  if (count < 1) throw ConfigError("grid count must be >= 1");
  if (!(start_s >= 0.0) || !std::isfinite(start_s)) throw ConfigError("grid start must be >= 0");
  if (!(step_s > 0.0) || !std::isfinite(step_s)) throw ConfigError("grid step must be positive");
}

std::vector<double> GridSpec::taus() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = start_s + k * step_s;
  return out;
}

double AmplitudeSeries::step() const {
  if (tau.size() < 2) throw ArgumentError("series step needs at least two points");
  return (tau.back() - tau.front()) / static_cast<double>(tau.size() - 1);
}

QState evolve_along(const PairingParams& p, const NmrMachineSpec& m, double tau,
                    const PathSpec& path, const InitialStateSpec& initial) {
  const QState psi0 = prepare_initial_state(p.num_qubits(), initial);
  switch (path.kind) {
    case EvolutionPath::Exact:
      return evolve_exact(psi0, p, tau);
    case EvolutionPath::Compiled:
      return evolve_compiled(psi0, compile_exact(p, m, tau));
    case EvolutionPath::Trotter:
      return evolve_compiled(psi0, trotterize(p, m, tau, path.trotter_steps, path.trotter_order));
  }
  throw ArgumentError("unknown evolution path");
}

Complex measure_raw(const QState& final_state, const NmrMachineSpec& m, const ReadoutConfig& cfg,
                    ReadoutRoute route) {
  if (route == ReadoutRoute::Projection) return projection_amplitude(final_state, cfg.line, cfg);
  const auto fid = simulate_fid(final_state, m, cfg);
  return extract_peak_amplitude(first_ft(fid, cfg.dwell_s), cfg.line, m, cfg);
}

AmplitudeSeries run_tau_sweep(const PairingParams& p, const NmrMachineSpec& m,
                              const ReadoutConfig& cfg, const GridSpec& grid,
                              const SweepOptions& opts) {
  cfg.validate();
  AmplitudeSeries series;
  series.tau = grid.taus();

  const QState ref_state = evolve_along(p, m, 0.0, opts.path, opts.initial);
  series.reference = measure_raw(ref_state, m, cfg, opts.route);
  if (std::abs(series.reference) == 0.0) {
    throw ConfigError("observed line has zero amplitude in the tau = 0 reference experiment");
  }

  series.amplitude.reserve(series.tau.size());
  for (std::size_t k = 0; k < series.tau.size(); ++k) {
    try {
      const QState fin = evolve_along(p, m, series.tau[k], opts.path, opts.initial);
      series.amplitude.push_back(measure_raw(fin, m, cfg, opts.route) / series.reference);
    } catch (const std::exception& e) {
      std::throw_with_nested(SweepPointError(static_cast<int>(k), e.what()));
    }
  }
  return series;
}

}  // namespace bcsnmr

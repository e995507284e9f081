#include <gtest/gtest.h>

#include <random>

#include "bcsnmr/nmr_emulator.hpp"

using namespace bcsnmr;

namespace {

const PairingParams kDefault = PairingParams::paper_default();
const NmrMachineSpec kMachine = NmrMachineSpec::paper_default();
const double kStep = 1.0 / kTwoPi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// tr(rho(t) (X_q + i Y_q)) under the rotating-frame J Hamiltonian, by brute
// force matrix exponentials.
Complex fid_oracle(const QOperator& rho, int q, double t, const NmrMachineSpec& m) {
  const QOperator h = Complex(kPi * m.j_hz / 2) *
                      (single_qubit_pauli(Pauli::Z, 1, 2) * single_qubit_pauli(Pauli::Z, 2, 2));
  const QOperator u = expm_hermitian(h, t);
  const QOperator rt = u * rho * u.adjoint();
  const QOperator plus = single_qubit_pauli(Pauli::X, q, 2) + Complex(0, 1) * single_qubit_pauli(Pauli::Y, q, 2);
  return (rt * plus).matrix().trace();
}

QState eq11_state(double eps, double v, double tau) {
  Vector a = Vector::Zero(4);
  a(0) = std::polar(kInvSqrt2, -eps * tau);
  a(1) = kInvSqrt2 * std::cos(v * tau);
  a(2) = Complex(0, -kInvSqrt2 * std::sin(v * tau));
  return QState(a);
}

Complex eq13(double tau) { return std::cos(kDefault.v * tau) * std::polar(1.0, kDefault.eps[0] * tau); }

std::size_t argmax_abs(const std::vector<Complex>& v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (std::abs(v[k]) > std::abs(v[best])) best = k;
  return best;
}

}  // namespace

TEST(InitialState, DefaultsAndExplicit) {
  const auto d = prepare_initial_state(2);
  EXPECT_NEAR(std::abs(d[0] - kInvSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d[1] - kInvSqrt2), 0.0, 1e-15);
  EXPECT_EQ(d[2], Complex{});
  EXPECT_EQ(d[3], Complex{});

  const auto zero = prepare_initial_state(2, {std::vector<Complex>{1, 0, 0, 0}});
  EXPECT_EQ(zero[0], Complex(1.0));
  const auto flat = prepare_initial_state(2, {std::vector<Complex>{1, 1, 1, 1}});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(flat[i] - 0.5), 0.0, 1e-15);
  EXPECT_THROW(prepare_initial_state(2, {std::vector<Complex>{1, 0}}), ArgumentError);
}

TEST(EvolveExact, TauZeroUnchanged) {
  const auto s = prepare_initial_state(2);
  EXPECT_LT((evolve_exact(s, kDefault, 0.0).amplitudes() - s.amplitudes()).norm(), 1e-15);
}

TEST(EvolveExact, QuarterPeriodTransfersThePair) {
  const double tau = (kPi / 2) / kDefault.v;
  const auto s = evolve_exact(prepare_initial_state(2), kDefault, tau);
  EXPECT_LT(std::abs(s[1]), 1e-12);
  EXPECT_LT(std::abs(s[2] - Complex(0, -kInvSqrt2)), 1e-12);
}

TEST(EvolveExact, MatchesClosedFormOnGrid) {
  for (int k : {1, 7, 33, 63}) {
    const double tau = k * kStep;
    const auto s = evolve_exact(prepare_initial_state(2), kDefault, tau);
    const auto oracle = eq11_state(kDefault.eps[0], kDefault.v, tau);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(std::abs(s[i] - oracle[i]), 1e-10) << "k " << k;
  }
}

TEST(EvolveCompiled, EmptyAndAgainstExact) {
  const auto s = prepare_initial_state(2);
  const auto empty = compile_exact(kDefault, kMachine, 0.0);
  EXPECT_LT((evolve_compiled(s, empty).amplitudes() - s.amplitudes()).norm(), 1e-15);

  const auto a = evolve_compiled(s, compile_exact(kDefault, kMachine, kStep));
  const auto b = evolve_exact(s, kDefault, kStep);
  EXPECT_NEAR(std::abs(a.amplitudes().dot(b.amplitudes())), 1.0, 1e-12);
}

TEST(EvolveCompiled, ReducedAndUnreducedAgreeOnRandomStates) {
  std::mt19937 rng(23);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    Vector v(4);
    for (auto& c : v) c = Complex(g(rng), g(rng));
    const auto s = QState::normalized(v);
    const double tau = 63 * kStep;
    const auto a = evolve_compiled(s, compile_exact(kDefault, kMachine, tau, true));
    const auto b = evolve_compiled(s, compile_exact(kDefault, kMachine, tau, false));
    EXPECT_NEAR(std::abs(a.amplitudes().dot(b.amplitudes())), 1.0, 1e-9);
    EXPECT_NEAR(a.amplitudes().norm(), 1.0, 1e-12);
  }
}

TEST(SimulateFid, MaximallyMixedIsSilent) {
  ReadoutConfig cfg;
  cfg.samples = 256;
  for (bool pulse : {false, true}) {
    cfg.readout_pulse = pulse;
    const QOperator mixed(Matrix::Identity(4, 4) / 4.0);
    for (const auto& s : simulate_fid(mixed, kMachine, cfg)) EXPECT_LT(std::abs(s), 1e-15);
  }
}

TEST(SimulateFid, MatchesBruteForceOracle) {
  std::mt19937 rng(31);
  std::normal_distribution<double> g;
  ReadoutConfig cfg;
  cfg.samples = 256;
  cfg.line_broadening = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    Vector v(4);
    for (auto& c : v) c = Complex(g(rng), g(rng));
    const auto s = QState::normalized(v);
    for (int q : {1, 2}) {
      cfg.line.qubit = q;
      const auto fid = simulate_fid(s, kMachine, cfg);
      for (std::size_t k = 0; k < fid.size(); k += 17) {
        EXPECT_LT(std::abs(fid[k] - fid_oracle(s.density(), q, k * cfg.dwell_s, kMachine)), 1e-12);
      }
    }
  }
}

TEST(SimulateFid, GroundStateAfterReadoutPulseShowsTwoUndampedLines) {
  ReadoutConfig cfg;
  cfg.line_broadening = 0.0;
  cfg.readout_pulse = true;
  const auto ground = QState::basis(2, 0);
  EXPECT_LT(std::abs(simulate_fid(ground, kMachine, ReadoutConfig{})[0]), 1e-15);

  const auto fid = simulate_fid(ground, kMachine, cfg);
  // Undamped: the J beat returns to its starting value every 2/J.
  const double period = 2.0 / kMachine.j_hz;
  const QOperator rho = [&] {
    const double c = std::cos(kPi / 4);
    Matrix ry(2, 2);
    ry << c, -c, c, c;
    const QOperator r = kron(QOperator(ry), QOperator(ry));
    return r * ground.density() * r.adjoint();
  }();
  for (int n : {1, 5, 20}) {
    EXPECT_LT(std::abs(fid_oracle(rho, 2, n * period, kMachine) - fid[0]), 1e-12);
  }
  for (std::size_t k = 0; k < fid.size(); k += 101) {
    EXPECT_LT(std::abs(fid[k] - fid_oracle(rho, 2, k * cfg.dwell_s, kMachine)), 1e-12);
  }

  const auto spec = first_ft(fid, cfg.dwell_s);
  const double bin = spec.bin_hz;
  std::size_t kp = 0, kn = 0;
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    if (spec.freq_hz[k] > 0 && std::abs(spec.values[k]) > std::abs(spec.values[kp])) kp = k;
    if (spec.freq_hz[k] < 0 && std::abs(spec.values[k]) > std::abs(spec.values[kn])) kn = k;
  }
  EXPECT_NEAR(spec.freq_hz[kp], kMachine.j_hz / 2, bin);
  EXPECT_NEAR(spec.freq_hz[kn], -kMachine.j_hz / 2, bin);
  EXPECT_NEAR(std::abs(spec.values[kp]) / std::abs(spec.values[kn]), 1.0, 1e-6);
}

TEST(SimulateFid, QuarterPeriodStateSilencesOnlyTheQubitTwoLine) {
  const double tau = (kPi / 2) / kDefault.v;
  const auto s = evolve_exact(prepare_initial_state(2), kDefault, tau);
  ReadoutConfig cfg;
  cfg.line = {2, 0};
  const auto amp2 = extract_peak_amplitude(first_ft(simulate_fid(s, kMachine, cfg), cfg.dwell_s), cfg.line, kMachine, cfg);
  cfg.line = {1, 0};
  const auto amp1 = extract_peak_amplitude(first_ft(simulate_fid(s, kMachine, cfg), cfg.dwell_s), cfg.line, kMachine, cfg);
  EXPECT_LT(std::abs(amp2), 1e-10);
  EXPECT_GT(std::abs(amp1), 0.1);
}

TEST(SimulateFid, T2DampingAndDelay) {
  ReadoutConfig cfg;
  cfg.line_broadening = 0.0;
  const auto s = prepare_initial_state(2);
  const auto base = simulate_fid(s, kMachine, cfg);
  cfg.t2_s = {0.0, 0.5};
  const auto damped = simulate_fid(s, kMachine, cfg);
  EXPECT_NEAR(std::abs(damped[1000]) / std::abs(base[1000]), std::exp(-1.0 / 0.5), 1e-12);
  cfg.t2_s = {0.0, 0.0};
  cfg.acquisition_delay_s = 0.25;
  const auto delayed = simulate_fid(s, kMachine, cfg);
  EXPECT_LT(std::abs(delayed[0] - base[250]), 1e-12);
}

TEST(SimulateFid, RejectsOtherQubitCounts) {
  EXPECT_THROW(simulate_fid(QState::basis(3, 0), kMachine, ReadoutConfig{}), CapacityError);
}

TEST(FirstFt, ConstantAndOnBinTone) {
  std::vector<Complex> c(256, Complex(2.0, -1.0));
  const auto dc = first_ft(c, 1e-3);
  EXPECT_EQ(argmax_abs(dc.values), 0u);
  for (std::size_t k = 1; k < 256; ++k) EXPECT_LT(std::abs(dc.values[k]), 1e-12);

  const double dwell = 1e-3;
  const int bin = 37;
  const double f0 = bin / (256 * dwell);
  std::vector<Complex> tone(256);
  for (std::size_t k = 0; k < 256; ++k) tone[k] = std::polar(1.0, kTwoPi * f0 * k * dwell);
  const auto spec = first_ft(tone, dwell);
  EXPECT_EQ(argmax_abs(spec.values), static_cast<std::size_t>(bin));
  EXPECT_NEAR(spec.freq_hz[bin], f0, 1e-12);
  EXPECT_NEAR(std::abs(spec.values[bin]), 256.0, 1e-9);

  EXPECT_THROW(first_ft(std::vector<Complex>(100), dwell), ArgumentError);
}

TEST(ExtractPeak, NormalisedAmplitudesFollowTheCosineLaw) {
  ReadoutConfig cfg;
  const auto raw = [&](double tau) {
    const auto s = evolve_exact(prepare_initial_state(2), kDefault, tau);
    return extract_peak_amplitude(first_ft(simulate_fid(s, kMachine, cfg), cfg.dwell_s), cfg.line, kMachine, cfg);
  };
  const Complex ref = raw(0.0);
  EXPECT_LT(std::abs(ref / ref - 1.0), 1e-15);
  const double node = (kPi / 2) / kDefault.v;
  EXPECT_LT(std::abs(raw(node) / ref), 1e-6);
  for (double tau : {0.013, 0.4, 3.3, 9.9}) EXPECT_LT(std::abs(raw(tau) / ref - eq13(tau)), 1e-6);
}

TEST(ExtractPeak, LineOutsideAxisIsConfigError) {
  ReadoutConfig cfg;
  cfg.dwell_s = 1e-2;  // Nyquist 50 Hz, line at 107 Hz
  const auto spec = first_ft(simulate_fid(prepare_initial_state(2), kMachine, cfg), cfg.dwell_s);
  EXPECT_THROW(extract_peak_amplitude(spec, cfg.line, kMachine, cfg), ConfigError);
}

TEST(Sweep, DefaultSeriesFollowsEq13) {
  const auto series = run_tau_sweep(kDefault, kMachine, ReadoutConfig{}, GridSpec{});
  ASSERT_EQ(series.amplitude.size(), 64u);
  EXPECT_EQ(series.amplitude[0], Complex(1.0, 0.0));
  for (std::size_t k = 0; k < 64; ++k) EXPECT_LT(std::abs(series.amplitude[k] - eq13(series.tau[k])), 1e-6);
}

TEST(Sweep, SinglePointGrid) {
  const auto series = run_tau_sweep(kDefault, kMachine, ReadoutConfig{}, GridSpec{1, 0.0, kStep});
  ASSERT_EQ(series.amplitude.size(), 1u);
  EXPECT_EQ(series.amplitude[0], Complex(1.0, 0.0));
}

TEST(Sweep, ExactAndCompiledPathsAgree) {
  SweepOptions exact;
  exact.path.kind = EvolutionPath::Exact;
  const auto a = run_tau_sweep(kDefault, kMachine, ReadoutConfig{}, GridSpec{}, exact);
  const auto b = run_tau_sweep(kDefault, kMachine, ReadoutConfig{}, GridSpec{});
  for (std::size_t k = 0; k < 64; ++k) EXPECT_LT(std::abs(a.amplitude[k] - b.amplitude[k]), 1e-8);
}

TEST(Sweep, ProjectionAndFidRoutesAgree) {
  for (bool sum : {false, true}) {
    ReadoutConfig cfg;
    cfg.sum_channels = sum;
    SweepOptions proj;
    proj.route = ReadoutRoute::Projection;
    const auto fid = run_tau_sweep(kDefault, kMachine, cfg, GridSpec{});
    const auto pr = run_tau_sweep(kDefault, kMachine, cfg, GridSpec{}, proj);
    for (std::size_t k = 0; k < 64; ++k) EXPECT_LT(std::abs(fid.amplitude[k] - pr.amplitude[k]), 1e-6);
  }
}

TEST(Sweep, MagnitudeConservation) {
  const auto amp2 = run_tau_sweep(kDefault, kMachine, ReadoutConfig{}, GridSpec{});
  ReadoutConfig cfg;
  const Complex ref = projection_amplitude(prepare_initial_state(2), {2, 0}, cfg);
  for (std::size_t k = 0; k < 64; ++k) {
    const auto s = evolve_along(kDefault, kMachine, amp2.tau[k], PathSpec{}, {});
    const Complex amp1 = projection_amplitude(s, {1, 0}, cfg) / ref;
    EXPECT_NEAR(std::norm(amp1) + std::norm(amp2.amplitude[k]), 1.0, 1e-6);
  }
}

TEST(Sweep, ZeroReferenceIsConfigError) {
  ReadoutConfig cfg;
  cfg.line = {1, 1};  // no population in that coherence for the default state
  EXPECT_THROW(run_tau_sweep(kDefault, kMachine, cfg, GridSpec{}), ConfigError);
}

TEST(Config, ReadoutValidation) {
  ReadoutConfig cfg;
  cfg.samples = 1000;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = ReadoutConfig{};
  cfg.line.qubit = 3;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW((GridSpec{0, 0.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((GridSpec{4, 0.0, -1.0}.validate()), ConfigError);
}

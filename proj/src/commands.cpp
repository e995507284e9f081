#include "bcsnmr/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>

namespace bcsnmr {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw ConfigError("cannot create output directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Centre of the one-pair line pair in the amplitude series: the mean Zeeman
// frequency, with the sign set by the partner spin of the observed line.
double carrier_hz(const ExperimentConfig& cfg) {
  double mean = 0.0;
  for (double e : cfg.eps_hz) mean += e;
  mean /= static_cast<double>(cfg.eps_hz.size());
  return cfg.readout.line.partner_state == 0 ? mean : -mean;
}

bool standard_readout(const ExperimentConfig& cfg) {
  const auto& r = cfg.readout;
  return r.line == ObservedLine{2, 0} && !r.sum_channels && !r.readout_pulse;
}

// Eq. (13)-style closed form applies for equal eps, the default working
// state, and the qubit-2 line with its partner in |0>.
bool closed_form_applies(const ExperimentConfig& cfg) {
  return cfg.num_qubits == 2 && cfg.params().uniform_eps() && !cfg.initial.amplitudes &&
         standard_readout(cfg);
}

Complex closed_form_amplitude(const PairingParams& p, double tau) {
  return std::cos(p.v * tau) * std::polar(1.0, p.eps[0] * tau);
}

CheckResult make_check(std::string name, double value, double limit, bool pass, std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.limit = limit;
  c.status = pass ? CheckResult::Status::Pass : CheckResult::Status::Fail;
  c.detail = std::move(detail);
  return c;
}

CheckResult skip(std::string name, std::string why) {
  CheckResult c;
  c.name = std::move(name);
  c.status = CheckResult::Status::Skip;
  c.detail = std::move(why);
  return c;
}

PulseProgram compile_for_path(const ExperimentConfig& cfg, double tau, bool reduce = true) {
  const auto p = cfg.params();
  const auto m = cfg.compiler_machine();
  if (cfg.path.kind == EvolutionPath::Trotter) {
    return trotterize(p, m, tau, cfg.path.trotter_steps, cfg.path.trotter_order);
  }
  return compile_exact(p, m, tau, reduce);
}

SweepOptions sweep_options(const ExperimentConfig& cfg, ReadoutRoute route = ReadoutRoute::Fid) {
  SweepOptions opts;
  opts.path = cfg.path;
  opts.initial = cfg.initial;
  opts.route = route;
  return opts;
}

int classify(const std::exception& e) {
  if (dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const InsufficientPeaksError*>(&e) ||
      dynamic_cast<const CapacityError*>(&e)) {
    return kExitPrecondition;
  }
  return kExitConfig;
}

int classify_nested(const std::exception& e) {
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    return classify_nested(inner);
  }
  return classify(e);
}

// Ratio of the two one-pair line weights in the observed amplitude, from the
// exact eigenvectors. Only meaningful for the default state and readout;
// returns 1 otherwise so the splitting check still runs.
double weaker_line_fraction(const PairingParams& p, const ExperimentConfig& cfg) {
  if (cfg.initial.amplitudes || !standard_readout(cfg)) return 1.0;
  const SpectrumOracle s = diagonalize(p);
  std::vector<double> w;
  for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
    if (s.excitation[j] == 1) w.push_back(std::norm(s.eigenvectors(1, static_cast<Eigen::Index>(j))));
  }
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return *hi > 0.0 ? *lo / *hi : 0.0;
}

}  // namespace

std::string_view to_string(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::Pass: return "PASS";
    case CheckResult::Status::Fail: return "FAIL";
    case CheckResult::Status::Skip: return "SKIP";
  }
  return "?";
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return classify_nested(e);
  }
}

std::string format_amplitude_csv(const AmplitudeSeries& series, const ExperimentConfig& cfg) {
  std::ostringstream o;
  o << config_header(cfg);
  o << "# reference_re = " << g17(series.reference.real()) << "\n";
  o << "# reference_im = " << g17(series.reference.imag()) << "\n";
  o << "k,tau_s,re,im\n";
  for (std::size_t k = 0; k < series.tau.size(); ++k) {
    o << k << ',' << g17(series.tau[k]) << ',' << g17(series.amplitude[k].real()) << ','
      << g17(series.amplitude[k].imag()) << '\n';
  }
  return o.str();
}

AmplitudeSeries parse_amplitude_csv(std::string_view text) {
  AmplitudeSeries s;
  std::istringstream in{std::string(text)};
  bool header = false;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "k,tau_s,re,im") throw ConfigError("amplitude CSV: expected header 'k,tau_s,re,im'");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string f[4];
    for (auto& field : f) {
      if (!std::getline(row, field, ',')) {
        throw ConfigError("amplitude CSV line " + std::to_string(line_no) + ": expected 4 fields");
      }
    }
    try {
      const auto k = std::stoul(f[0]);
      if (k != s.tau.size()) throw ConfigError("rows out of order");
      s.tau.push_back(std::stod(f[1]));
      s.amplitude.emplace_back(std::stod(f[2]), std::stod(f[3]));
    } catch (const std::logic_error&) {
      throw ConfigError("amplitude CSV line " + std::to_string(line_no) + ": bad number");
    } catch (const ConfigError& e) {
      throw ConfigError("amplitude CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw ConfigError("amplitude CSV has no header row");
  return s;
}

std::string format_spectrum_csv(const SpectrumResult& spec, const ExperimentConfig& cfg) {
  std::ostringstream o;
  o << config_header(cfg);
  o << "freq_hz,re,im,mag\n";
  for (std::size_t k = 0; k < spec.spectrum.size(); ++k) {
    o << g17(spec.freq_hz[k]) << ',' << g17(spec.spectrum[k].real()) << ','
      << g17(spec.spectrum[k].imag()) << ',' << g17(spec.magnitude[k]) << '\n';
  }
  for (const Peak& p : spec.peaks) o << "# peak " << g17(p.frequency_hz) << ' ' << g17(p.magnitude) << '\n';
  if (spec.splitting) {
    o << "# splitting_hz " << g17(spec.splitting->hz) << '\n';
    if (spec.splitting->wrapped) o << "# splitting_wrapped true\n";
  }
  return o.str();
}

int cmd_diag(const ExperimentConfig& cfg, std::ostream& out) {
  validate_config(cfg);
  const SpectrumOracle s = diagonalize(cfg.params());
  const GapReport gap = gap_report(one_pair_splitting(cfg.params()));

  std::ostringstream file;
  file << config_header(cfg);
  file << "index,eigenvalue_hz,excitation\n";
  out << "eigenvalues (Hz, excitation block):\n";
  for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
    const double hz = s.eigenvalues[j] / kTwoPi;
    file << j << ',' << g17(hz) << ',' << s.excitation[j] << '\n';
    out << "  " << g17(hz) << "  k=" << s.excitation[j] << '\n';
  }
  file << "# splitting_hz " << g17(gap.splitting_hz) << '\n';
  file << "# note " << gap.note << '\n';
  write_file(std::filesystem::path(cfg.out_dir) / "diag.csv", file.str());
  out << "one-pair splitting: " << g17(gap.splitting_hz) << " Hz\n";
  return kExitOk;
}

int cmd_compile(const ExperimentConfig& cfg, double tau, std::ostream& out) {
  validate_config(cfg);
  const auto p = cfg.params();
  const auto m = cfg.compiler_machine();
  const PulseProgram prog = compile_for_path(cfg, tau);
  const double distance =
      unitary_distance(sequence_to_unitary(prog, cfg.machine()), expm_hermitian(build_hp(p), tau));

  const bool trotter = cfg.path.kind == EvolutionPath::Trotter;
  const double slice = trotter ? tau / cfg.path.trotter_steps : tau;
  const EvolutionDurations raw = map_durations(p, m, slice);
  const EvolutionDurations red = reduce_periodic(raw, m);

  std::ostringstream rep;
  rep << config_header(cfg);
  rep << "# tau_s = " << g17(tau) << '\n';
  if (trotter) {
    rep << "# trotter_steps = " << cfg.path.trotter_steps << '\n';
    rep << "# trotter_order = " << cfg.path.trotter_order << '\n';
    rep << "# durations below are per slice of tau/steps\n";
  }
  rep << "quantity,raw,reduced,period\n";
  for (int q = 1; q <= p.num_qubits(); ++q) {
    const auto i = static_cast<std::size_t>(q - 1);
    rep << "theta" << q << "_rad," << g17(raw.theta[i]) << ',' << g17(red.theta[i]) << ','
        << g17(kTwoPi) << '\n';
  }
  for (int q = 1; q <= p.num_qubits(); ++q) {
    const auto i = static_cast<std::size_t>(q - 1);
    const double w = m.rabi_rate(q);
    rep << "tau" << q << "_s," << g17(raw.theta[i] / w) << ',' << g17(red.theta[i] / w) << ','
        << g17(m.z_period(q)) << '\n';
  }
  rep << "tau3_s," << g17(raw.tau3) << ',' << g17(red.tau3) << ',' << g17(m.j_period()) << '\n';
  rep << "# events = " << prog.events.size() << '\n';
  rep << "# wall_duration_s = " << g17(prog.wall_duration()) << '\n';
  rep << "# distance_to_exact = " << g17(distance) << '\n';

  const std::filesystem::path dir(cfg.out_dir);
  write_pulse_program(dir / "program.txt", prog);
  write_file(dir / "program_report.csv", rep.str());

  out << "events: " << prog.events.size() << "\n";
  out << "tau3 raw " << g17(raw.tau3) << " s, reduced " << g17(red.tau3) << " s\n";
  out << "wall duration: " << g17(prog.wall_duration()) << " s\n";
  out << "distance to exact propagator: " << g17(distance) << "\n";
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  validate_config(cfg);
  const AmplitudeSeries series =
      run_tau_sweep(cfg.params(), cfg.machine(), cfg.readout, cfg.grid, sweep_options(cfg));
  write_file(std::filesystem::path(cfg.out_dir) / "amplitudes.csv", format_amplitude_csv(series, cfg));
  out << "wrote " << series.tau.size() << " amplitudes\n";
  return kExitOk;
}

int cmd_spectrum(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& input,
                 std::ostream& out) {
  validate_config(cfg);
  AmplitudeSeries series;
  if (input) {
    series = parse_amplitude_csv(read_file(*input));
  } else {
    if (cfg.grid.count < 8) throw ConfigError("config key 'grid_count': spectrum needs at least 8 points");
    series = run_tau_sweep(cfg.params(), cfg.machine(), cfg.readout, cfg.grid, sweep_options(cfg));
  }

  SpectrumResult spec = analyze_series(series, cfg.peak_threshold, cfg.window, 0, carrier_hz(cfg));
  const std::filesystem::path dir(cfg.out_dir);
  if (cfg.zero_pad > series.tau.size()) {
    const SpectrumResult padded = analyze_series(series, cfg.peak_threshold, cfg.window, cfg.zero_pad, carrier_hz(cfg));
    write_file(dir / "spectrum_padded.csv", format_spectrum_csv(padded, cfg));
  }
  if (!spec.splitting) {
    write_file(dir / "spectrum.csv", format_spectrum_csv(spec, cfg));
    throw InsufficientPeaksError("second-FT spectrum has " + std::to_string(spec.peaks.size()) +
                                 " peak(s) above threshold; cannot measure a splitting");
  }

  const double rate = spec.sampling_rate_hz;
  const double bin = spec.bin_hz();
  const double predicted = aliased_splitting(one_pair_splitting(cfg.params()) / kTwoPi, rate, carrier_hz(cfg));
  const double measured = spec.splitting->hz;
  const bool pass = std::abs(measured - predicted) <= bin;

  std::string csv = format_spectrum_csv(spec, cfg);
  csv += "# predicted_splitting_hz " + g17(predicted) + "\n";
  csv += "# tolerance_hz " + g17(bin) + "\n";
  csv += std::string("# result ") + (pass ? "PASS" : "FAIL") + "\n";
  write_file(dir / "spectrum.csv", csv);

  for (std::size_t i = 0; i < spec.peaks.size(); ++i) {
    out << "peak " << g17(spec.peaks[i].frequency_hz) << " Hz  |X| " << g17(spec.peaks[i].magnitude) << '\n';
  }
  out << "splitting " << g17(measured) << " Hz (predicted " << g17(predicted) << " Hz, tolerance "
      << g17(bin) << " Hz) " << (pass ? "PASS" : "FAIL") << '\n';
  if (spec.splitting->wrapped) out << "note: the two lines straddle a wrap point of [0, rate); unwrapped about the carrier\n";
  return pass ? kExitOk : kExitVerification;
}

std::vector<CheckResult> run_verification(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<CheckResult> checks;
  const PairingParams p = cfg.params();
  const NmrMachineSpec hw = cfg.machine();
  const auto taus = cfg.grid.taus();
  const bool two_qubits = cfg.num_qubits == 2;
  const QOperator h = build_hp(p);

  // Compiled unitary against exp(-i H_p tau) on every grid point.
  if (!two_qubits) {
    checks.push_back(skip("compile_vs_exact", "compiler needs 2 qubits"));
  } else if (!p.uniform_eps()) {
    checks.push_back(skip("compile_vs_exact", "eps1 != eps2; exact network does not apply"));
  } else {
    double worst = 0.0;
    for (double tau : taus) {
      const QOperator u = sequence_to_unitary(compile_for_path(cfg, tau), hw);
      worst = std::max(worst, unitary_distance(u, expm_hermitian(h, tau)));
    }
    checks.push_back(make_check("compile_vs_exact", worst, 1e-10, worst < 1e-10));
  }

  if (!two_qubits || !p.uniform_eps()) {
    checks.push_back(skip("reduction_equivalence", "exact network does not apply"));
  } else {
    double worst = 0.0;
    for (double tau : taus) {
      const auto m = cfg.compiler_machine();
      const QOperator reduced = sequence_to_unitary(compile_exact(p, m, tau, true), hw);
      const QOperator unreduced = sequence_to_unitary(compile_exact(p, m, tau, false), hw);
      worst = std::max(worst, unitary_distance(reduced, unreduced));
    }
    checks.push_back(make_check("reduction_equivalence", worst, 1e-10, worst < 1e-10));
  }

  if (!two_qubits) {
    checks.push_back(skip("amplitude_law", "readout model needs 2 qubits"));
    checks.push_back(skip("magnitude_conservation", "readout model needs 2 qubits"));
    checks.push_back(skip("dual_path", "readout model needs 2 qubits"));
    checks.push_back(skip("splitting", "readout model needs 2 qubits"));
  } else {
    const AmplitudeSeries fid = run_tau_sweep(p, hw, cfg.readout, cfg.grid, sweep_options(cfg));

    if (cfg.path.kind == EvolutionPath::Trotter && !p.uniform_eps()) {
      checks.push_back(skip("amplitude_law", "trotter path with eps1 != eps2 is approximate; see trotter_convergence"));
    } else if (closed_form_applies(cfg)) {
      double law = 0.0;
      for (std::size_t k = 0; k < taus.size(); ++k) {
        law = std::max(law, std::abs(fid.amplitude[k] - closed_form_amplitude(p, taus[k])));
      }
      checks.push_back(make_check("amplitude_law", law, 1e-6, law < 1e-6, "closed form cos(V tau) exp(i eps tau)"));
    } else {
      SweepOptions exact = sweep_options(cfg, ReadoutRoute::Projection);
      exact.path.kind = EvolutionPath::Exact;
      const AmplitudeSeries oracle = run_tau_sweep(p, hw, cfg.readout, cfg.grid, exact);
      double law = 0.0;
      for (std::size_t k = 0; k < taus.size(); ++k) {
        law = std::max(law, std::abs(fid.amplitude[k] - oracle.amplitude[k]));
      }
      checks.push_back(make_check("amplitude_law", law, 1e-6, law < 1e-6, "projection of the exactly evolved state"));
    }

    if (cfg.initial.amplitudes || !standard_readout(cfg)) {
      checks.push_back(skip("magnitude_conservation", "needs the default state and qubit-2 readout"));
    } else {
      const QState ref = evolve_along(p, hw, 0.0, cfg.path, cfg.initial);
      const Complex ref_amp = projection_amplitude(ref, {2, 0}, cfg.readout);
      double worst = 0.0;
      for (std::size_t k = 0; k < taus.size(); ++k) {
        const QState fin = evolve_along(p, hw, taus[k], cfg.path, cfg.initial);
        const Complex amp1 = projection_amplitude(fin, {1, 0}, cfg.readout) / ref_amp;
        worst = std::max(worst, std::abs(std::norm(amp1) + std::norm(fid.amplitude[k]) - 1.0));
      }
      checks.push_back(make_check("magnitude_conservation", worst, 1e-6, worst < 1e-6));
    }

    const AmplitudeSeries proj =
        run_tau_sweep(p, hw, cfg.readout, cfg.grid, sweep_options(cfg, ReadoutRoute::Projection));
    double dual = 0.0;
    for (std::size_t k = 0; k < taus.size(); ++k) {
      dual = std::max(dual, std::abs(fid.amplitude[k] - proj.amplitude[k]));
    }
    checks.push_back(make_check("dual_path", dual, 1e-6, dual < 1e-6));

    const double weaker = weaker_line_fraction(p, cfg);
    if (taus.size() < 8) {
      checks.push_back(skip("splitting", "needs at least 8 grid points"));
    } else if (weaker < cfg.peak_threshold) {
      checks.push_back(skip("splitting", "weaker line carries " + g17(weaker) +
                                             " of the stronger one, below peak_threshold"));
    } else {
      const SpectrumResult spec = analyze_series(fid, cfg.peak_threshold, cfg.window, 0, carrier_hz(cfg));
      const double bin = spec.bin_hz();
      const double predicted = aliased_splitting(one_pair_splitting(p) / kTwoPi, spec.sampling_rate_hz, carrier_hz(cfg));
      if (!spec.splitting) {
        checks.push_back(make_check("splitting", 0.0, bin, false, "fewer than two peaks"));
      } else {
        const double err = std::abs(spec.splitting->hz - predicted);
        checks.push_back(make_check("splitting", err, bin, err <= bin,
                                    "measured " + g17(spec.splitting->hz) + " Hz, predicted " +
                                        g17(predicted) + " Hz"));
      }
    }
  }

  if (cfg.path.kind != EvolutionPath::Trotter) {
    checks.push_back(skip("trotter_convergence", "path is not trotter"));
  } else if (!two_qubits) {
    checks.push_back(skip("trotter_convergence", "compiler needs 2 qubits"));
  } else {
    const double tau = cfg.trotter_check_tau_s;
    const int order = cfg.path.trotter_order;
    const auto ladder = asymptotic_step_ladder(p, tau, cfg.path.trotter_steps, 3);
    const QOperator exact = expm_hermitian(h, tau);
    std::vector<double> errs;
    for (int steps : ladder) {
      errs.push_back(phase_aligned_error(
          sequence_to_unitary(trotterize(p, cfg.compiler_machine(), tau, steps, order), hw), exact));
    }
    const double target = std::pow(2.0, order);
    double worst = 0.0;
    std::string detail = "steps";
    for (int s : ladder) detail += " " + std::to_string(s);
    detail += "; ratios";
    bool pass = true;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
      if (errs[i] < 1e-10) continue;  // commuting terms: exact up to rounding
      const double ratio = errs[i] / errs[i + 1];
      detail += " " + g17(ratio);
      worst = std::max(worst, std::abs(ratio - target));
      pass = pass && std::abs(ratio - target) <= 1.0;
    }
    checks.push_back(make_check("trotter_convergence", worst, 1.0, pass, detail));
  }
  return checks;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out) {
  const auto checks = run_verification(cfg);
  std::ostringstream file;
  file << config_header(cfg);
  bool ok = true;
  for (const auto& c : checks) {
    std::ostringstream line;
    line << "check " << c.name << ' ' << to_string(c.status);
    if (c.status != CheckResult::Status::Skip) {
      line << " value=" << g17(c.value) << " limit=" << g17(c.limit);
    }
    if (!c.detail.empty()) line << " # " << c.detail;
    file << line.str() << '\n';
    out << line.str() << '\n';
    ok = ok && c.status != CheckResult::Status::Fail;
  }
  file << "summary " << (ok ? "PASS" : "FAIL") << '\n';
  out << "summary " << (ok ? "PASS" : "FAIL") << '\n';
  write_file(std::filesystem::path(cfg.out_dir) / "verify.txt", file.str());
  return ok ? kExitOk : kExitVerification;
}

}  // namespace bcsnmr

#include "bcsnmr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace bcsnmr {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

std::string fmt_complex_list(const std::vector<Complex>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? "," : "") + fmt(v[i].real()) + ":" + fmt(v[i].imag());
  }
  return out;
}

[[noreturn]] void bad(std::string_view key, const std::string& why) {
  throw ConfigError("config key '" + std::string(key) + "': " + why);
}

double to_double(std::string_view key, std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    bad(key, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

long long to_int(std::string_view key, std::string_view s) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    bad(key, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  bad(key, "expected true or false, got '" + std::string(s) + "'");
}

std::vector<double> to_list(std::string_view key, std::string_view s) {
  std::vector<double> out;
  for (auto part : split(s, ',')) out.push_back(to_double(key, part));
  return out;
}

std::vector<Complex> to_complex_list(std::string_view key, std::string_view s) {
  std::vector<Complex> out;
  for (auto part : split(s, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) {
      out.emplace_back(to_double(key, part), 0.0);
    } else {
      out.emplace_back(to_double(key, trim(part.substr(0, colon))),
                       to_double(key, trim(part.substr(colon + 1))));
    }
  }
  return out;
}

Window to_window(std::string_view key, std::string_view s) {
  if (s == "none") return Window::None;
  if (s == "hann") return Window::Hann;
  bad(key, "expected none or hann");
}

std::string_view window_name(Window w) { return w == Window::Hann ? "hann" : "none"; }

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"num_qubits", [](auto& c, auto k, auto v) { c.num_qubits = static_cast<int>(to_int(k, v)); }},
      {"eps_hz", [](auto& c, auto k, auto v) { c.eps_hz = to_list(k, v); }},
      {"v_hz", [](auto& c, auto k, auto v) { c.v_hz = to_double(k, v); }},
      {"j_hz", [](auto& c, auto k, auto v) { c.j_hz = to_double(k, v); }},
      {"compiler_j_hz", [](auto& c, auto k, auto v) { c.compiler_j_hz = to_double(k, v); }},
      {"pw90_s", [](auto& c, auto k, auto v) { c.pw90_s = to_list(k, v); }},
      {"grid_count", [](auto& c, auto k, auto v) { c.grid.count = static_cast<int>(to_int(k, v)); }},
      {"grid_start_s", [](auto& c, auto k, auto v) { c.grid.start_s = to_double(k, v); }},
      {"grid_step_s", [](auto& c, auto k, auto v) { c.grid.step_s = to_double(k, v); }},
      {"fid_samples", [](auto& c, auto k, auto v) { c.readout.samples = static_cast<int>(to_int(k, v)); }},
      {"dwell_s", [](auto& c, auto k, auto v) { c.readout.dwell_s = to_double(k, v); }},
      {"line_broadening_per_s", [](auto& c, auto k, auto v) { c.readout.line_broadening = to_double(k, v); }},
      {"half_width_hz", [](auto& c, auto k, auto v) { c.readout.half_width_hz = to_double(k, v); }},
      {"observed_qubit", [](auto& c, auto k, auto v) { c.readout.line.qubit = static_cast<int>(to_int(k, v)); }},
      {"observed_partner", [](auto& c, auto k, auto v) { c.readout.line.partner_state = static_cast<int>(to_int(k, v)); }},
      {"t2_s", [](auto& c, auto k, auto v) { c.readout.t2_s = to_list(k, v); }},
      {"acquisition_delay_s", [](auto& c, auto k, auto v) { c.readout.acquisition_delay_s = to_double(k, v); }},
      {"sum_channels", [](auto& c, auto k, auto v) { c.readout.sum_channels = to_bool(k, v); }},
      {"readout_pulse", [](auto& c, auto k, auto v) { c.readout.readout_pulse = to_bool(k, v); }},
      {"initial_state",
       [](auto& c, auto k, auto v) {
         if (v == "default") {
           c.initial.amplitudes.reset();
         } else {
           c.initial.amplitudes = to_complex_list(k, v);
         }
       }},
      {"path",
       [](auto& c, auto k, auto v) {
         try {
           c.path.kind = parse_path(v);
         } catch (const ConfigError&) {
           bad(k, "expected exact, compiled or trotter");
         }
       }},
      {"trotter_steps", [](auto& c, auto k, auto v) { c.path.trotter_steps = static_cast<int>(to_int(k, v)); }},
      {"trotter_order", [](auto& c, auto k, auto v) { c.path.trotter_order = static_cast<int>(to_int(k, v)); }},
      {"peak_threshold", [](auto& c, auto k, auto v) { c.peak_threshold = to_double(k, v); }},
      {"window", [](auto& c, auto k, auto v) { c.window = to_window(k, v); }},
      {"zero_pad", [](auto& c, auto k, auto v) {
         const auto n = to_int(k, v);
         if (n < 0) bad(k, "must be >= 0");
         c.zero_pad = static_cast<std::size_t>(n);
       }},
      {"trotter_check_tau_s", [](auto& c, auto k, auto v) { c.trotter_check_tau_s = to_double(k, v); }},
      {"out_dir", [](auto& c, auto, auto v) { c.out_dir = std::string(v); }},
  };
  return table;
}

// Parses "key = value" lines; `prefix` selects header-echo lines.
ExperimentConfig parse_lines(std::string_view text, std::string_view prefix) {
  ExperimentConfig cfg;
  bool saw_half_width = false;
  bool saw_compiler_j = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = trim(text.substr(start, end - start));
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (!prefix.empty()) {
      if (!line.starts_with(prefix)) continue;
      line = trim(line.substr(prefix.size()));
    } else if (line.empty() || line.front() == '#') {
      continue;
    } else if (const auto hash = line.find(" #"); hash != std::string_view::npos) {
      line = trim(line.substr(0, hash));  // trailing comment
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    it->second(cfg, key, value);
    saw_half_width |= key == "half_width_hz";
    saw_compiler_j |= key == "compiler_j_hz";
  }
  if (!saw_compiler_j) cfg.compiler_j_hz = cfg.j_hz;
  if (!saw_half_width) cfg.readout.half_width_hz = std::abs(cfg.j_hz) / 4.0;
  validate_config(cfg);
  return cfg;
}

}  // namespace

PairingParams ExperimentConfig::params() const { return PairingParams::from_hz(eps_hz, v_hz); }

NmrMachineSpec ExperimentConfig::machine() const { return {j_hz, pw90_s}; }

NmrMachineSpec ExperimentConfig::compiler_machine() const { return {compiler_j_hz, pw90_s}; }

std::string_view to_string(EvolutionPath p) {
  switch (p) {
    case EvolutionPath::Exact: return "exact";
    case EvolutionPath::Compiled: return "compiled";
    case EvolutionPath::Trotter: return "trotter";
  }
  return "?";
}

EvolutionPath parse_path(std::string_view s) {
  if (s == "exact") return EvolutionPath::Exact;
  if (s == "compiled") return EvolutionPath::Compiled;
  if (s == "trotter") return EvolutionPath::Trotter;
  throw ConfigError("unknown evolution path '" + std::string(s) + "'");
}

void validate_config(const ExperimentConfig& c) {
  if (c.num_qubits < 1 || c.num_qubits > kMaxQubits) bad("num_qubits", "must be in [1, 8]");
  if (static_cast<int>(c.eps_hz.size()) != c.num_qubits) bad("eps_hz", "needs one entry per qubit");
  for (double e : c.eps_hz) {
    if (!std::isfinite(e)) bad("eps_hz", "entries must be finite");
  }
  if (!std::isfinite(c.v_hz)) bad("v_hz", "must be finite");
  if (!std::isfinite(c.j_hz) || c.j_hz == 0.0) bad("j_hz", "must be finite and non-zero");
  if (!std::isfinite(c.compiler_j_hz) || c.compiler_j_hz == 0.0) {
    bad("compiler_j_hz", "must be finite and non-zero");
  }
  if (static_cast<int>(c.pw90_s.size()) != c.num_qubits) bad("pw90_s", "needs one entry per qubit");
  for (double w : c.pw90_s) {
    if (!(w > 0.0) || !std::isfinite(w)) bad("pw90_s", "widths must be positive");
  }
  if (c.grid.count < 1) bad("grid_count", "must be >= 1");
  if (!(c.grid.start_s >= 0.0) || !std::isfinite(c.grid.start_s)) bad("grid_start_s", "must be >= 0");
  if (!(c.grid.step_s > 0.0) || !std::isfinite(c.grid.step_s)) bad("grid_step_s", "must be positive");
  const auto& r = c.readout;
  if (r.samples < 256 || (r.samples & (r.samples - 1)) != 0) {
    bad("fid_samples", "must be a power of two >= 256");
  }
  if (!(r.dwell_s > 0.0) || !std::isfinite(r.dwell_s)) bad("dwell_s", "must be positive");
  if (!(r.line_broadening >= 0.0) || !std::isfinite(r.line_broadening)) {
    bad("line_broadening_per_s", "must be >= 0");
  }
  if (!(r.half_width_hz > 0.0) || !std::isfinite(r.half_width_hz)) bad("half_width_hz", "must be positive");
  if (r.line.qubit != 1 && r.line.qubit != 2) bad("observed_qubit", "must be 1 or 2");
  if (r.line.partner_state != 0 && r.line.partner_state != 1) bad("observed_partner", "must be 0 or 1");
  if (r.t2_s.size() != 2) bad("t2_s", "needs two entries");
  for (double t : r.t2_s) {
    if (!(t >= 0.0) || !std::isfinite(t)) bad("t2_s", "entries must be >= 0 (0 disables)");
  }
  if (!(r.acquisition_delay_s >= 0.0) || !std::isfinite(r.acquisition_delay_s)) {
    bad("acquisition_delay_s", "must be >= 0");
  }
  if (c.initial.amplitudes && c.initial.amplitudes->size() != dimension_of(c.num_qubits)) {
    bad("initial_state", "needs 2^num_qubits amplitudes");
  }
  if (c.path.trotter_steps < 1) bad("trotter_steps", "must be >= 1");
  if (c.path.trotter_order != 1 && c.path.trotter_order != 2) bad("trotter_order", "must be 1 or 2");
  if (!(c.peak_threshold > 0.0 && c.peak_threshold < 1.0)) bad("peak_threshold", "must lie in (0, 1)");
  if (!(c.trotter_check_tau_s > 0.0) || !std::isfinite(c.trotter_check_tau_s)) {
    bad("trotter_check_tau_s", "must be positive");
  }
  if (c.out_dir.empty()) bad("out_dir", "must not be empty");
}

ExperimentConfig parse_config(std::string_view text) { return parse_lines(text, ""); }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "num_qubits = " << c.num_qubits << "\n";
  o << "eps_hz = " << fmt_list(c.eps_hz) << "\n";
  o << "v_hz = " << fmt(c.v_hz) << "\n";
  o << "j_hz = " << fmt(c.j_hz) << "\n";
  o << "compiler_j_hz = " << fmt(c.compiler_j_hz) << "\n";
  o << "pw90_s = " << fmt_list(c.pw90_s) << "\n";
  o << "grid_count = " << c.grid.count << "\n";
  o << "grid_start_s = " << fmt(c.grid.start_s) << "\n";
  o << "grid_step_s = " << fmt(c.grid.step_s) << "\n";
  o << "fid_samples = " << c.readout.samples << "\n";
  o << "dwell_s = " << fmt(c.readout.dwell_s) << "\n";
  o << "line_broadening_per_s = " << fmt(c.readout.line_broadening) << "\n";
  o << "half_width_hz = " << fmt(c.readout.half_width_hz) << "\n";
  o << "observed_qubit = " << c.readout.line.qubit << "\n";
  o << "observed_partner = " << c.readout.line.partner_state << "\n";
  o << "t2_s = " << fmt_list(c.readout.t2_s) << "\n";
  o << "acquisition_delay_s = " << fmt(c.readout.acquisition_delay_s) << "\n";
  o << "sum_channels = " << (c.readout.sum_channels ? "true" : "false") << "\n";
  o << "readout_pulse = " << (c.readout.readout_pulse ? "true" : "false") << "\n";
  o << "initial_state = "
    << (c.initial.amplitudes ? fmt_complex_list(*c.initial.amplitudes) : std::string("default")) << "\n";
  o << "path = " << to_string(c.path.kind) << "\n";
  o << "trotter_steps = " << c.path.trotter_steps << "\n";
  o << "trotter_order = " << c.path.trotter_order << "\n";
  o << "peak_threshold = " << fmt(c.peak_threshold) << "\n";
  o << "window = " << window_name(c.window) << "\n";
  o << "zero_pad = " << c.zero_pad << "\n";
  o << "trotter_check_tau_s = " << fmt(c.trotter_check_tau_s) << "\n";
  o << "out_dir = " << c.out_dir << "\n";
  return o.str();
}

std::string config_header(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "# format = " << kOutputFormat << "\n";
  std::istringstream body(config_to_text(c));
  for (std::string line; std::getline(body, line);) o << "# config." << line << "\n";
  return o.str();
}

ExperimentConfig config_from_header(std::string_view text) { return parse_lines(text, "# config."); }

}  // namespace bcsnmr

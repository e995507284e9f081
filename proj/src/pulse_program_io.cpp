#include <charconv>
#include <fstream>
#include <sstream>

#include "bcsnmr/pulse_compiler.hpp"

namespace bcsnmr {

namespace {

constexpr int kFormatVersion = 1;

// Shortest round-trip scientific form with a compact exponent: 1.4812e-3.
std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific);
  std::string s(buf, res.ptr);
  const auto e = s.find('e');
  std::string mantissa = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  std::string sign;
  if (!exp.empty() && (exp[0] == '+' || exp[0] == '-')) {
    if (exp[0] == '-') sign = "-";
    exp.erase(0, 1);
  }
  const auto nz = exp.find_first_not_of('0');
  exp = nz == std::string::npos ? "0" : exp.substr(nz);
  return mantissa + "e" + sign + exp;
}

double parse_number(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ProgramError("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_number(v[i]);
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_number_list(std::string_view s, std::size_t line) {
  std::vector<double> out;
  for (auto part : split(s, ',')) out.push_back(parse_number(trim(part), line));
  return out;
}

EventKind parse_kind(std::string_view s, std::size_t line) {
  if (s == "rf") return EventKind::RfPulse;
  if (s == "zcomp") return EventKind::ZComposite;
  if (s == "jdelay") return EventKind::JDelay;
  throw ProgramError("line " + std::to_string(line) + ": unknown event kind '" + std::string(s) + "'");
}

Axis parse_axis(std::string_view s, std::size_t line) {
  if (s == "-") return Axis::None;
  if (s == "+x") return Axis::PlusX;
  if (s == "-x") return Axis::MinusX;
  if (s == "+y") return Axis::PlusY;
  if (s == "-y") return Axis::MinusY;
  throw ProgramError("line " + std::to_string(line) + ": unknown axis '" + std::string(s) + "'");
}

}  // namespace

std::string emit_pulse_program(const PulseProgram& prog) {
  std::ostringstream out;
  out << "# bcsnmr pulse program\n";
  out << "# format_version = " << kFormatVersion << "\n";
  out << "# tau_s = " << format_number(prog.tau) << "\n";
  out << "# reduced = " << (prog.reduced ? "true" : "false") << "\n";
  out << "# eps_rad_s = " << join_numbers(prog.params.eps) << "\n";
  out << "# v_rad_s = " << format_number(prog.params.v) << "\n";
  out << "# j_hz = " << format_number(prog.machine.j_hz) << "\n";
  out << "# pw90_s = " << join_numbers(prog.machine.pw90_s) << "\n";
  for (const PulseEvent& e : prog.events) {
    out << to_string(e.kind) << ' ';
    for (std::size_t i = 0; i < e.qubits.size(); ++i) out << (i ? "," : "") << e.qubits[i];
    out << ' ' << to_string(e.axis) << ' ';
    out << (e.kind == EventKind::JDelay ? std::string("-") : format_number(e.angle)) << ' ';
    out << format_number(e.duration) << '\n';
  }
  return out.str();
}

PulseProgram parse_pulse_program(std::string_view text) {
  PulseProgram prog;
  prog.params.eps.clear();
  prog.machine.pw90_s.clear();
  bool saw_version = false;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) continue;  // free-form comment
      const auto key = trim(line.substr(1, eq - 1));
      const auto value = trim(line.substr(eq + 1));
      if (key == "format_version") {
        if (parse_number(value, line_no) != kFormatVersion) {
          throw ProgramError("unsupported pulse program format version " + std::string(value));
        }
        saw_version = true;
      } else if (key == "tau_s") {
        prog.tau = parse_number(value, line_no);
      } else if (key == "reduced") {
        if (value != "true" && value != "false") throw ProgramError("bad 'reduced' value");
        prog.reduced = value == "true";
      } else if (key == "eps_rad_s") {
        prog.params.eps = parse_number_list(value, line_no);
      } else if (key == "v_rad_s") {
        prog.params.v = parse_number(value, line_no);
      } else if (key == "j_hz") {
        prog.machine.j_hz = parse_number(value, line_no);
      } else if (key == "pw90_s") {
        prog.machine.pw90_s = parse_number_list(value, line_no);
      } else {
        throw ProgramError("line " + std::to_string(line_no) + ": unknown header key '" +
                           std::string(key) + "'");
      }
      continue;
    }
    std::vector<std::string_view> fields;
    for (auto f : split(line, ' ')) {
      if (!f.empty()) fields.push_back(f);
    }
    if (fields.size() != 5) {
      throw ProgramError("line " + std::to_string(line_no) + ": expected 5 fields");
    }
    PulseEvent e;
    e.kind = parse_kind(fields[0], line_no);
    for (auto q : split(fields[1], ',')) {
      e.qubits.push_back(static_cast<int>(parse_number(q, line_no)));
    }
    e.axis = parse_axis(fields[2], line_no);
    e.angle = fields[3] == "-" ? 0.0 : parse_number(fields[3], line_no);
    e.duration = parse_number(fields[4], line_no);
    prog.events.push_back(std::move(e));
  }
  if (!saw_version) throw ProgramError("pulse program is missing its format_version header");
  return prog;
}

void write_pulse_program(const std::filesystem::path& path, const PulseProgram& prog) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ProgramError("cannot open " + path.string() + " for writing");
  out << emit_pulse_program(prog);
  if (!out) throw ProgramError("failed writing " + path.string());
}

PulseProgram read_pulse_program(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProgramError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_pulse_program(buf.str());
  } catch (const ProgramError& e) {
    throw ProgramError(path.string() + ": " + e.what());
  }
}

}  // namespace bcsnmr

#include "bcsnmr/spectroscopy.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <string>

namespace bcsnmr {

namespace {

void require_uniform(const std::vector<double>& tau) {
  const double step = (tau.back() - tau.front()) / static_cast<double>(tau.size() - 1);
  if (!(step > 0.0)) throw ArgumentError("evolution-time grid must be increasing");
  for (std::size_t k = 1; k < tau.size(); ++k) {
    const double expected = tau.front() + static_cast<double>(k) * step;
    if (std::abs(tau[k] - expected) > 1e-12 * std::max(std::abs(expected), step)) {
      throw ArgumentError("evolution-time grid is not uniform at point " + std::to_string(k));
    }
  }
}

double circular_distance(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

}  // namespace

SpectrumResult second_ft(const AmplitudeSeries& series, Window window, std::size_t pad_to) {
  const std::size_t n = series.tau.size();
  if (n < 8) throw ArgumentError("second FT needs at least 8 points, got " + std::to_string(n));
  if (series.amplitude.size() != n) throw ArgumentError("series tau/amplitude length mismatch");
  require_uniform(series.tau);

  const std::size_t m = std::max(n, pad_to);
  std::vector<Complex> in(m, Complex{});
  for (std::size_t k = 0; k < n; ++k) {
    double w = 1.0;
    if (window == Window::Hann) {
      w = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    in[k] = w * series.amplitude[k];
  }

  SpectrumResult out;
  Eigen::FFT<double> fft;
  fft.fwd(out.spectrum, in);
  out.sampling_rate_hz = 1.0 / series.step();
  const double bin = out.sampling_rate_hz / static_cast<double>(m);
  out.freq_hz.resize(m);
  out.magnitude.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    out.freq_hz[k] = static_cast<double>(k) * bin;
    out.magnitude[k] = std::abs(out.spectrum[k]);
  }
  return out;
}

std::vector<Peak> detect_peaks(const SpectrumResult& spec, double threshold_fraction) {
  if (spec.magnitude.empty()) throw ArgumentError("empty magnitude spectrum");
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw ArgumentError("peak threshold must lie in (0, 1)");
  }
  const std::size_t n = spec.magnitude.size();
  const double max_mag = *std::max_element(spec.magnitude.begin(), spec.magnitude.end());
  std::vector<Peak> peaks;
  if (!(max_mag > 0.0)) return peaks;

  const double floor = threshold_fraction * max_mag;
  for (std::size_t k = 0; k < n; ++k) {
    const double here = spec.magnitude[k];
    if (here < floor) continue;
    const double left = spec.magnitude[(k + n - 1) % n];
    const double right = spec.magnitude[(k + 1) % n];
    // Plateaus count once, at their first bin.
    if (!(here > left && here >= right)) continue;

    // Neighbours at rounding level (an on-bin tone) carry no position information.
    double offset = 0.0;
    const double noise = 1e-9 * here;
    if (left > noise && right > noise) {
      const double a = std::log(left);
      const double b = std::log(here);
      const double c = std::log(right);
      const double denom = a - 2.0 * b + c;
      if (denom < 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    }
    double f = (static_cast<double>(k) + offset) * spec.bin_hz();
    f = std::fmod(f + spec.sampling_rate_hz, spec.sampling_rate_hz);
    peaks.push_back({f, here, k});
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& x, const Peak& y) { return x.magnitude > y.magnitude; });
  return peaks;
}

double alias_near(double f_hz, double carrier_hz, double sampling_rate_hz) {
  if (!(sampling_rate_hz > 0.0)) throw ArgumentError("sampling rate must be positive");
  const double lo = carrier_hz - 0.5 * sampling_rate_hz;
  const double r = std::fmod(f_hz - lo, sampling_rate_hz);
  return lo + (r < 0.0 ? r + sampling_rate_hz : r);
}

Splitting measure_splitting(std::span<const Peak> peaks, double sampling_rate_hz,
                            std::optional<double> carrier_hz) {
  if (peaks.size() < 2) {
    throw InsufficientPeaksError("splitting needs two peaks, found " + std::to_string(peaks.size()));
  }
  if (!(sampling_rate_hz > 0.0)) throw ArgumentError("sampling rate must be positive");
  const double f1 = peaks[0].frequency_hz;
  const double f2 = peaks[1].frequency_hz;
  Splitting s;
  if (carrier_hz) {
    const double u1 = alias_near(f1, *carrier_hz, sampling_rate_hz);
    const double u2 = alias_near(f2, *carrier_hz, sampling_rate_hz);
    s.hz = std::abs(u1 - u2);
  } else {
    s.hz = circular_distance(f1, f2, sampling_rate_hz);
  }
  s.wrapped = std::abs(std::abs(f1 - f2) - s.hz) > 1e-12 * sampling_rate_hz;
  return s;
}

double aliased_splitting(double splitting_hz, double sampling_rate_hz,
                         std::optional<double> carrier_hz) {
  const double c = carrier_hz.value_or(0.0);
  const auto place = [&](double f) {
    const double r = std::fmod(f, sampling_rate_hz);
    return Peak{r < 0.0 ? r + sampling_rate_hz : r, 1.0, 0};
  };
  const Peak lines[2] = {place(c + 0.5 * splitting_hz), place(c - 0.5 * splitting_hz)};
  return measure_splitting(lines, sampling_rate_hz, carrier_hz).hz;
}

SpectrumResult analyze_series(const AmplitudeSeries& series, double threshold_fraction,
                              Window window, std::size_t pad_to, std::optional<double> carrier_hz) {
  SpectrumResult spec = second_ft(series, window, pad_to);
  spec.peaks = detect_peaks(spec, threshold_fraction);
  if (spec.peaks.size() >= 2) {
    spec.splitting = measure_splitting(spec.peaks, spec.sampling_rate_hz, carrier_hz);
  }
  return spec;
}

}  // namespace bcsnmr

#pragma once

// Second Fourier transform: from amplitudes indexed by simulated evolution
// time to the spectrum of H_p, and the splitting between its two strongest
// lines.
//
// The series is sampled at 1/step; with the default step of 1/(2 pi) s the
// ~1e4 Hz lines alias many times. When the carrier (centre of the line pair)
// is known, each peak is unwrapped into the rate-wide window centred on the
// carrier's alias, which recovers any splitting below the sampling rate.
// Without a carrier the separation is the circular distance on [0, rate).

#include <optional>
#include <span>
#include <vector>

#include "bcsnmr/nmr_emulator.hpp"

namespace bcsnmr {

enum class Window { None, Hann };

struct Peak {
  double frequency_hz = 0.0;  // sub-bin interpolated, in [0, rate)
  double magnitude = 0.0;
  std::size_t bin = 0;
};

struct Splitting {
  double hz = 0.0;
  // The two lines sit on opposite sides of a wrap point of [0, rate).
  bool wrapped = false;
};

struct SpectrumResult {
  std::vector<double> freq_hz;  // m * rate / count, m = 0..count-1
  std::vector<Complex> spectrum;
  std::vector<double> magnitude;
  double sampling_rate_hz = 0.0;
  std::vector<Peak> peaks;
  std::optional<Splitting> splitting;

  double bin_hz() const { return sampling_rate_hz / static_cast<double>(spectrum.size()); }
};

// X[f] = sum_k w_k x_k exp(-2 pi i f k / M). M = series length unless
// pad_to > length (explicit zero padding). Throws ArgumentError for fewer
// than 8 points or a grid that is not uniform within 1e-12 relative.
SpectrumResult second_ft(const AmplitudeSeries& series, Window window = Window::None,
                         std::size_t pad_to = 0);

// Circular local maxima above threshold * max magnitude, refined by a
// parabola through the log magnitudes of the peak bin and its neighbours,
// sorted by magnitude (descending).
std::vector<Peak> detect_peaks(const SpectrumResult& spec, double threshold_fraction = 0.5);

// Representative of f (mod rate) in [c - rate/2, c + rate/2), c being the
// alias of carrier_hz.
double alias_near(double f_hz, double carrier_hz, double sampling_rate_hz);

// Separation of the two strongest peaks. Throws InsufficientPeaksError with
// fewer than two.
Splitting measure_splitting(std::span<const Peak> peaks, double sampling_rate_hz,
                            std::optional<double> carrier_hz = std::nullopt);

// What measure_splitting reports for lines at carrier +- splitting/2.
double aliased_splitting(double splitting_hz, double sampling_rate_hz,
                         std::optional<double> carrier_hz = std::nullopt);

// second_ft + detect_peaks + measure_splitting; splitting left empty when
// fewer than two peaks are found.
SpectrumResult analyze_series(const AmplitudeSeries& series, double threshold_fraction = 0.5,
                              Window window = Window::None, std::size_t pad_to = 0,
                              std::optional<double> carrier_hz = std::nullopt);

}  // namespace bcsnmr

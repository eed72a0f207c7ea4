#pragma once

#include <string>
#include <vector>

#include "qgate/types.hpp"

namespace qgate {

// The analytic two-parameter pulse family: lab-frame peak amplitude E0 and
// total duration T.
struct AnalyticPulseParams {
  double peak_amplitude_mhz = 300.0;
  double duration_ns = 200.0;

  void validate() const;
};

// Complex drive envelope in the rotating frame, in MHz, sampled at the
// midpoints of n_steps uniform intervals covering [0, T]. This is the
// optimization variable.
struct ControlField {
  double dt = 0.0;
  std::vector<Complex> samples;

  int n_steps() const { return static_cast<int>(samples.size()); }
  double duration() const { return dt * n_steps(); }
  double midpoint_time(int i) const { return (i + 0.5) * dt; }
  double max_abs() const;
};

// Krotov update shape S(t) in [0,1] on the same midpoint grid as the field;
// zero at both ends so updates never touch the switch-on/switch-off.
struct ShapeFunction {
  std::vector<double> samples;
};

// eps(t_i) = scale * E0 * sin^2(pi t_i / T) at interval midpoints, as a
// real-valued complex envelope. `scale` is the rotating-frame envelope
// convention factor (SystemParams::envelope_scale). The first and last
// samples are forced to exactly zero so the discrete switch-on/off matches
// eps(0) = eps(T) = 0.
ControlField sample_analytic(const AnalyticPulseParams& params, double dt, double scale);

// S(t) = sin^2(pi t / T) on the field's grid, endpoints forced to zero.
ShapeFunction default_shape(const ControlField& field);

// Discrete Fourier transform magnitude of the complex envelope versus
// frequency offset from the drive (MHz), sorted by frequency. Diagnostics
// only; never used inside optimization.
std::vector<std::pair<double, double>> spectrum(const ControlField& field);

// Pulse file format: UTF-8 text, header "# t[ns]  Re(eps)[MHz]  Im(eps)[MHz]",
// one whitespace-separated row per grid midpoint, 17 significant digits.
void write_pulse_file(const ControlField& field, const std::string& path);
ControlField read_pulse_file(const std::string& path);

}  // namespace qgate

#include "qgate/pulse.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace qgate {

void AnalyticPulseParams::validate() const {
  if (peak_amplitude_mhz < 0)
    throw ConfigError("pulse.peak_amplitude_mhz: must be >= 0");
  if (duration_ns <= 0)
    throw ConfigError("pulse.duration_ns: must be > 0");
}

double ControlField::max_abs() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, std::abs(s));
  return m;
}

ControlField sample_analytic(const AnalyticPulseParams& params, double dt, double scale) {
  params.validate();
  if (dt <= 0 || dt >= params.duration_ns)
    throw ConfigError("grid.dt_ns: need 0 < dt < pulse duration");
  int n = static_cast<int>(std::llround(params.duration_ns / dt));
  if (n < 2) throw ConfigError("grid.dt_ns: pulse must span at least two steps");
  // The grid duration n*dt matches the requested T to within dt/2.
  double t_grid = n * dt;
  ControlField field;
  field.dt = dt;
  field.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = std::sin(kPi * field.midpoint_time(i) / t_grid);
    field.samples[i] = Complex(scale * params.peak_amplitude_mhz * s * s, 0.0);
  }
  field.samples.front() = 0.0;
  field.samples.back() = 0.0;
  return field;
}

ShapeFunction default_shape(const ControlField& field) {
  if (field.samples.empty()) throw std::invalid_argument("default_shape: empty field");
  double t_total = field.duration();
  ShapeFunction shape;
  shape.samples.resize(field.n_steps());
  for (int i = 0; i < field.n_steps(); ++i) {
    double s = std::sin(kPi * field.midpoint_time(i) / t_total);
    shape.samples[i] = s * s;
  }
  shape.samples.front() = 0.0;
  shape.samples.back() = 0.0;
  return shape;
}

std::vector<std::pair<double, double>> spectrum(const ControlField& field) {
  int n = field.n_steps();
  if (n < 2) throw std::invalid_argument("spectrum: need at least two samples");
  std::vector<Complex> out(n);
  Eigen::FFT<double> fft;
  std::vector<Complex> in(field.samples.begin(), field.samples.end());
  fft.fwd(out, in);
  // Frequency offset from the drive in MHz; bin k maps to k/(n dt) GHz,
  // folded to the symmetric range.
  std::vector<std::pair<double, double>> result(n);
  double df_mhz = 1e3 / (n * field.dt);
  for (int k = 0; k < n; ++k) {
    int shifted = k <= (n - 1) / 2 ? k : k - n;
    result[k] = {shifted * df_mhz, std::abs(out[k])};
  }
  std::sort(result.begin(), result.end());
  return result;
}

void write_pulse_file(const ControlField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StageError("cannot open pulse file for writing: " + path);
  out << "# t[ns]  Re(eps)[MHz]  Im(eps)[MHz]\n";
  out.precision(17);
  for (int i = 0; i < field.n_steps(); ++i) {
    out << field.midpoint_time(i) << "  " << field.samples[i].real() << "  "
        << field.samples[i].imag() << "\n";
  }
  if (!out) throw StageError("write failed: " + path);
}

ControlField read_pulse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StageError("cannot open pulse file: " + path);
  std::vector<double> times;
  std::vector<Complex> samples;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double t, re, im;
    if (!(row >> t >> re >> im))
      throw StageError("malformed pulse file row in " + path + ": '" + line + "'");
    times.push_back(t);
    samples.push_back(Complex(re, im));
  }
  if (times.size() < 2) throw StageError("pulse file has fewer than two samples: " + path);
  double dt = times[1] - times[0];
  if (dt <= 0) throw StageError("pulse file times not increasing: " + path);
  for (size_t i = 0; i < times.size(); ++i) {
    double expected = (i + 0.5) * dt;
    if (std::abs(times[i] - expected) > 1e-6 * dt * std::max<double>(1.0, i))
      throw StageError("pulse file grid is not uniform midpoints: " + path);
  }
  ControlField field;
  field.dt = dt;
  field.samples = std::move(samples);
  return field;
}

}  // namespace qgate

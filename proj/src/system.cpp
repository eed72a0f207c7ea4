#include "qgate/system.hpp"

#include <cmath>
#include <vector>

namespace qgate {

void SystemParams::validate() const {
  if (qubit_levels < 2)
    throw ConfigError("system.qubit_levels: must be >= 2, got " + std::to_string(qubit_levels));
  if (cavity_levels < 2)
    throw ConfigError("system.cavity_levels: must be >= 2, got " + std::to_string(cavity_levels));
  if (cavity_freq_ghz <= 0 || qubit1_freq_ghz <= 0 || qubit2_freq_ghz <= 0 || drive_freq_ghz <= 0)
    throw ConfigError("system: mode and drive frequencies must be positive");
  if (envelope_scale <= 0)
    throw ConfigError("system.envelope_scale: must be positive");
}

SystemParams reduced_params() {
  SystemParams p;
  p.qubit_levels = 3;
  p.cavity_levels = 15;
  return p;
}

LogicalBasis::LogicalBasis(const SystemParams& p) : dim(p.dimension()) {
  indices = {basis_index(p, 0, 0, 0), basis_index(p, 0, 1, 0),
             basis_index(p, 1, 0, 0), basis_index(p, 1, 1, 0)};

  const SpMat drift = build_drift_hamiltonian(p);
  for (int k = 0; k < 4; ++k) {
    const int q1 = k >> 1, q2 = k & 1;
    const int excitation = q1 + q2;

    // Product states in the same total-excitation sector as |q1 q2, 0>.
    std::vector<int> sector;
    int bare_pos = -1;
    for (int a = 0; a <= std::min(excitation, p.qubit_levels - 1); ++a)
      for (int b = 0; b <= std::min(excitation - a, p.qubit_levels - 1); ++b) {
        int n = excitation - a - b;
        if (n >= p.cavity_levels) continue;
        if (a == q1 && b == q2) bare_pos = static_cast<int>(sector.size());
        sector.push_back(basis_index(p, a, b, n));
      }

    const int m = static_cast<int>(sector.size());
    Eigen::MatrixXcd block(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) block(i, j) = drift.coeff(sector[i], sector[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);

    int best = 0;
    double best_overlap = -1.0;
    for (int j = 0; j < m; ++j) {
      double overlap = std::norm(es.eigenvectors()(bare_pos, j));
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = j;
      }
    }
    Eigen::VectorXcd v = es.eigenvectors().col(best);
    v /= v(bare_pos) / std::abs(v(bare_pos));  // bare component real positive

    states[k] = Vec::Zero(dim);
    for (int i = 0; i < m; ++i) states[k](sector[i]) = v(i);
  }
}

Vec LogicalBasis::embed(const Vec4& logical) const {
  Vec full = Vec::Zero(dim);
  for (int k = 0; k < 4; ++k) full += logical(k) * states[k];
  return full;
}

Vec4 LogicalBasis::project(const Vec& full) const {
  Vec4 out;
  for (int k = 0; k < 4; ++k) out(k) = states[k].dot(full);
  return out;
}

namespace {

using Triplet = Eigen::Triplet<Complex>;

// Appends coeff * O to the triplet list, where O acts as the given
// single-subsystem matrix element pattern. The three subsystem indices
// address (q1, q2, cav); `sub` selects which one the operator acts on.
struct Builder {
  const SystemParams& p;
  std::vector<Triplet> trips;

  void add_diag(int sub, const std::vector<double>& vals) {
    for_each_product([&](int q1, int q2, int n, int idx) {
      int local = sub == 0 ? q1 : (sub == 1 ? q2 : n);
      if (vals[local] != 0.0) trips.emplace_back(idx, idx, Complex(vals[local], 0.0));
    });
  }

  // coeff * (lower^dag lower') style hopping between subsystems `up` and
  // `down`: raises `up` by one and lowers `down` by one, with bosonic
  // matrix elements sqrt(m+1)*sqrt(n).
  void add_hopping(int up, int down, double coeff) {
    if (coeff == 0.0) return;
    for_each_product([&](int q1, int q2, int n, int idx) {
      int occ[3] = {q1, q2, n};
      int max_occ[3] = {p.qubit_levels - 1, p.qubit_levels - 1, p.cavity_levels - 1};
      if (occ[up] >= max_occ[up] || occ[down] <= 0) return;
      double amp = coeff * std::sqrt(double(occ[up] + 1)) * std::sqrt(double(occ[down]));
      int to[3] = {q1, q2, n};
      to[up] += 1;
      to[down] -= 1;
      int jdx = basis_index(p, to[0], to[1], to[2]);
      trips.emplace_back(jdx, idx, Complex(amp, 0.0));
      trips.emplace_back(idx, jdx, Complex(amp, 0.0));
    });
  }

  // coeff*a + conj(coeff)*a^dag on the cavity.
  void add_cavity_ladder(Complex coeff_annihilate) {
    for_each_product([&](int q1, int q2, int n, int idx) {
      if (n == 0) return;
      double amp = std::sqrt(double(n));
      int jdx = basis_index(p, q1, q2, n - 1);
      trips.emplace_back(jdx, idx, coeff_annihilate * amp);
      trips.emplace_back(idx, jdx, std::conj(coeff_annihilate) * amp);
    });
  }

  template <typename F>
  void for_each_product(F&& f) {
    for (int q1 = 0; q1 < p.qubit_levels; ++q1)
      for (int q2 = 0; q2 < p.qubit_levels; ++q2)
        for (int n = 0; n < p.cavity_levels; ++n) f(q1, q2, n, basis_index(p, q1, q2, n));
  }

  SpMat finish() const {
    SpMat m(p.dimension(), p.dimension());
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
  }
};

std::vector<double> detuning_ladder(int levels, double detuning_rad, double anharm_rad) {
  std::vector<double> vals(levels);
  for (int n = 0; n < levels; ++n)
    vals[n] = detuning_rad * n + 0.5 * anharm_rad * n * (n - 1);
  return vals;
}

}  // namespace

SpMat build_drift_hamiltonian(const SystemParams& params) {
  params.validate();
  Builder b{params, {}};

  const double wd = params.drive_freq_ghz;
  b.add_diag(0, detuning_ladder(params.qubit_levels,
                                (params.qubit1_freq_ghz - wd) * kGHzToRadPerNs,
                                params.anharmonicity1_mhz * kMHzToRadPerNs));
  b.add_diag(1, detuning_ladder(params.qubit_levels,
                                (params.qubit2_freq_ghz - wd) * kGHzToRadPerNs,
                                params.anharmonicity2_mhz * kMHzToRadPerNs));
  b.add_diag(2, detuning_ladder(params.cavity_levels,
                                (params.cavity_freq_ghz - wd) * kGHzToRadPerNs, 0.0));

  // g_q (b_q^dag a + b_q a^dag): qubit up / cavity down plus h.c.
  b.add_hopping(0, 2, params.coupling1_mhz * kMHzToRadPerNs);
  b.add_hopping(1, 2, params.coupling2_mhz * kMHzToRadPerNs);

  return b.finish();
}

std::pair<SpMat, SpMat> build_drive_operators(const SystemParams& params) {
  params.validate();
  Builder re{params, {}};
  re.add_cavity_ladder(Complex(1.0, 0.0));  // a + a^dag
  Builder im{params, {}};
  im.add_cavity_ladder(Complex(0.0, -1.0));  // -i a + i a^dag = i(a^dag - a)
  return {re.finish(), im.finish()};
}

SpMat build_number_operator(const SystemParams& params, int subsystem) {
  params.validate();
  Builder b{params, {}};
  int levels = subsystem == 2 ? params.cavity_levels : params.qubit_levels;
  std::vector<double> vals(levels);
  for (int n = 0; n < levels; ++n) vals[n] = double(n);
  b.add_diag(subsystem, vals);
  return b.finish();
}

SystemOperators build_system(const SystemParams& params) {
  SystemOperators ops{params,
                      build_drift_hamiltonian(params),
                      {},
                      {},
                      build_number_operator(params, 2),
                      build_number_operator(params, 0),
                      build_number_operator(params, 1),
                      LogicalBasis(params)};
  std::tie(ops.drive_re, ops.drive_im) = build_drive_operators(params);
  return ops;
}

double hermiticity_defect(const SpMat& m) {
  SpMat adj = SpMat(m.adjoint());
  SpMat diff = m - adj;
  double max_entry = 0.0, max_defect = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      max_entry = std::max(max_entry, std::abs(it.value()));
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it)
      max_defect = std::max(max_defect, std::abs(it.value()));
  if (max_entry == 0.0) return 0.0;
  return max_defect / max_entry;
}

}  // namespace qgate

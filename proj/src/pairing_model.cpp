#include "bcsnmr/pairing_model.hpp"

#include <algorithm>
#include <bit>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>

namespace bcsnmr {

PairingParams PairingParams::paper_default() {
  return from_hz({1.0e4, 1.0e4}, 1.0);
}

PairingParams PairingParams::from_hz(const std::vector<double>& eps_hz, double v_hz) {
  PairingParams p;
  p.eps.reserve(eps_hz.size());
  for (double e : eps_hz) p.eps.push_back(kTwoPi * e);
  p.v = kTwoPi * v_hz;
  return p;
}

void PairingParams::validate() const {
  if (eps.empty()) throw ArgumentError("pairing params need at least one qubit");
  if (num_qubits() > kMaxQubits) {
    throw CapacityError(std::to_string(num_qubits()) + " qubits exceeds the dense cap of " +
                        std::to_string(kMaxQubits));
  }
  for (double e : eps) {
    if (!std::isfinite(e)) throw ArgumentError("eps entries must be finite");
  }
  if (!std::isfinite(v)) throw ArgumentError("V must be finite");
}

bool PairingParams::uniform_eps() const {
  return std::all_of(eps.begin(), eps.end(), [&](double e) { return e == eps.front(); });
}

QOperator build_hp(const PairingParams& p) {
  p.validate();
  const int n = p.num_qubits();
  QOperator h = QOperator::zero(n);
  for (int m = 1; m <= n; ++m) {
    h = h + Complex(0.5 * p.eps[static_cast<std::size_t>(m - 1)]) * single_qubit_pauli(Pauli::Z, m, n);
  }
  for (int m = 1; m <= n; ++m) {
    for (int l = m + 1; l <= n; ++l) {
      const QOperator xx = single_qubit_pauli(Pauli::X, m, n) * single_qubit_pauli(Pauli::X, l, n);
      const QOperator yy = single_qubit_pauli(Pauli::Y, m, n) * single_qubit_pauli(Pauli::Y, l, n);
      h = h + Complex(0.5 * p.v) * (xx + yy);
    }
  }
  return h;
}

QOperator total_z(int num_qubits) {
  QOperator s = QOperator::zero(num_qubits);
  for (int m = 1; m <= num_qubits; ++m) s = s + single_qubit_pauli(Pauli::Z, m, num_qubits);
  return s;
}

std::vector<std::size_t> excitation_block_indices(int num_qubits, int k) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw ArgumentError("qubit count " + std::to_string(num_qubits) + " out of range");
  }
  if (k < 0 || k > num_qubits) {
    throw ArgumentError("excitation count " + std::to_string(k) + " out of range [0, " +
                        std::to_string(num_qubits) + "]");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dimension_of(num_qubits); ++i) {
    if (std::popcount(i) == k) out.push_back(i);
  }
  return out;
}

Matrix block_submatrix(const QOperator& h, const std::vector<std::size_t>& indices) {
  const auto b = static_cast<Eigen::Index>(indices.size());
  Matrix sub(b, b);
  for (Eigen::Index r = 0; r < b; ++r) {
    for (Eigen::Index c = 0; c < b; ++c) {
      sub(r, c) = h.matrix()(static_cast<Eigen::Index>(indices[static_cast<std::size_t>(r)]),
                             static_cast<Eigen::Index>(indices[static_cast<std::size_t>(c)]));
    }
  }
  return sub;
}

namespace {

// Block sizes are binomial coefficients, generally not powers of two, so the
// solver is used directly rather than through eigh().
EigenDecomposition block_eigh(const Matrix& sub) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (sub + sub.adjoint()));
  if (solver.info() != Eigen::Success) {
    throw ArgumentError("block eigensolver failed to converge");
  }
  EigenDecomposition out;
  out.values.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + solver.eigenvalues().size());
  out.vectors = solver.eigenvectors();
  return out;
}

}  // namespace

SpectrumOracle diagonalize(const PairingParams& p) {
  const QOperator h = build_hp(p);
  const int n = p.num_qubits();
  const auto d = static_cast<Eigen::Index>(h.dim());

  struct Level {
    double value;
    int block;
    Vector vec;
  };
  std::vector<Level> levels;
  levels.reserve(h.dim());
  for (int k = 0; k <= n; ++k) {
    const auto idx = excitation_block_indices(n, k);
    const EigenDecomposition eig = block_eigh(block_submatrix(h, idx));
    for (std::size_t j = 0; j < eig.values.size(); ++j) {
      Vector full = Vector::Zero(d);
      for (std::size_t r = 0; r < idx.size(); ++r) {
        full(static_cast<Eigen::Index>(idx[r])) =
            eig.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
      }
      levels.push_back({eig.values[j], k, std::move(full)});
    }
  }
  std::stable_sort(levels.begin(), levels.end(),
                   [](const Level& a, const Level& b) { return a.value < b.value; });

  SpectrumOracle out;
  out.eigenvectors.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Level& lv = levels[static_cast<std::size_t>(j)];
    out.eigenvalues.push_back(lv.value);
    out.excitation.push_back(lv.block);
    out.eigenvectors.col(j) = lv.vec;
  }
  return out;
}

double one_pair_splitting(const PairingParams& p) {
  const SpectrumOracle s = diagonalize(p);
  double lo = 0.0;
  double hi = 0.0;
  bool seen = false;
  for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
    if (s.excitation[j] != 1) continue;
    if (!seen) {
      lo = hi = s.eigenvalues[j];
      seen = true;
    }
    lo = std::min(lo, s.eigenvalues[j]);
    hi = std::max(hi, s.eigenvalues[j]);
  }
  return hi - lo;
}

GapReport gap_report(double splitting_rad_s) {
  if (splitting_rad_s < 0.0 || !std::isfinite(splitting_rad_s)) {
    throw ArgumentError("splitting must be finite and non-negative");
  }
  return {splitting_rad_s / kTwoPi,
          "eigenvalue splitting of the one-pair (single excitation) block; the BCS energy gap "
          "is a function of these one-pair eigenvalues, and that remap is not evaluated here"};
}

}  // namespace bcsnmr

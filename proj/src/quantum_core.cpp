#include "bcsnmr/quantum_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace bcsnmr {

namespace {

int qubits_for_dimension(Eigen::Index dim) {
  if (dim < 2 || !std::has_single_bit(static_cast<unsigned long long>(dim))) {
    throw ArgumentError("dimension " + std::to_string(dim) + " is not a power of two >= 2");
  }
  const int n = std::countr_zero(static_cast<unsigned long long>(dim));
  if (n > kMaxQubits) {
    throw CapacityError(std::to_string(n) + " qubits exceeds the dense cap of " +
                        std::to_string(kMaxQubits));
  }
  return n;
}

// Hermiticity and unitarity tolerances are absolute for O(1) matrices and
// relative to the largest entry otherwise (Hamiltonians here carry rad/s).
double scale_of(const Matrix& m) {
  return std::max(1.0, m.cwiseAbs().maxCoeff());
}

void require_hermitian(const QOperator& h, const char* what) {
  if (!h.is_hermitian()) {
    throw ArgumentError(std::string(what) + ": operator is not hermitian");
  }
}

}  // namespace

QOperator::QOperator(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw ArgumentError("operator must be square");
  }
  num_qubits_ = qubits_for_dimension(entries_.rows());
}

QOperator QOperator::identity(int num_qubits) {
  const auto d = static_cast<Eigen::Index>(dimension_of(num_qubits));
  return QOperator(Matrix::Identity(d, d));
}

QOperator QOperator::zero(int num_qubits) {
  const auto d = static_cast<Eigen::Index>(dimension_of(num_qubits));
  return QOperator(Matrix::Zero(d, d));
}

bool QOperator::is_hermitian(double tol) const {
  return max_entry_diff(entries_, entries_.adjoint()) <= tol * scale_of(entries_);
}

bool QOperator::is_unitary(double tol) const {
  const auto d = entries_.rows();
  return max_entry_diff(entries_ * entries_.adjoint(), Matrix::Identity(d, d)) <= tol;
}

QOperator operator*(const QOperator& a, const QOperator& b) {
  if (a.dim() != b.dim()) throw ArgumentError("operator dimension mismatch in product");
  return QOperator(a.entries_ * b.entries_);
}

QOperator operator+(const QOperator& a, const QOperator& b) {
  if (a.dim() != b.dim()) throw ArgumentError("operator dimension mismatch in sum");
  return QOperator(a.entries_ + b.entries_);
}

QOperator operator-(const QOperator& a, const QOperator& b) {
  if (a.dim() != b.dim()) throw ArgumentError("operator dimension mismatch in difference");
  return QOperator(a.entries_ - b.entries_);
}

QOperator operator*(Complex c, const QOperator& a) { return QOperator(c * a.entries_); }

QState::QState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  num_qubits_ = qubits_for_dimension(amplitudes_.size());
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12) {
    throw ArgumentError("state is not normalized (norm " + std::to_string(amplitudes_.norm()) + ")");
  }
}

QState QState::normalized(Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ArgumentError("state amplitudes cannot be normalized");
  }
  return QState(amplitudes / norm);
}

QState QState::basis(int num_qubits, std::size_t index) {
  const auto d = dimension_of(num_qubits);
  if (index >= d) throw ArgumentError("basis index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return QState(std::move(v));
}

QOperator QState::density() const {
  return QOperator(amplitudes_ * amplitudes_.adjoint());
}

QState apply(const QOperator& u, const QState& psi) {
  if (u.dim() != psi.dim()) {
    throw ArgumentError("operator dimension " + std::to_string(u.dim()) +
                        " does not match state dimension " + std::to_string(psi.dim()));
  }
  return QState::normalized(u.matrix() * psi.amplitudes());
}

PauliString PauliString::parse(std::string_view text, Complex coefficient) {
  PauliString p;
  p.coefficient = coefficient;
  for (char c : text) {
    switch (c) {
      case 'I': p.letters.push_back(Pauli::I); break;
      case 'X': p.letters.push_back(Pauli::X); break;
      case 'Y': p.letters.push_back(Pauli::Y); break;
      case 'Z': p.letters.push_back(Pauli::Z); break;
      default:
        throw ArgumentError(std::string("invalid Pauli letter '") + c + "'");
    }
  }
  return p;
}

QOperator pauli_matrix(Pauli p) {
  Matrix m(2, 2);
  const Complex i{0.0, 1.0};
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -i, i, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return QOperator(std::move(m));
}

QOperator kron(const QOperator& a, const QOperator& b) {
  const Matrix& x = a.matrix();
  const Matrix& y = b.matrix();
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return QOperator(std::move(out));
}

QOperator pauli_string_to_operator(const PauliString& p, int num_qubits) {
  if (static_cast<int>(p.letters.size()) != num_qubits) {
    throw ArgumentError("Pauli string has " + std::to_string(p.letters.size()) +
                        " letters for " + std::to_string(num_qubits) + " qubits");
  }
  if (num_qubits > kMaxQubits) {
    throw CapacityError(std::to_string(num_qubits) + " qubits exceeds the dense cap");
  }
  QOperator out = pauli_matrix(p.letters.front());
  for (std::size_t q = 1; q < p.letters.size(); ++q) {
    out = kron(out, pauli_matrix(p.letters[q]));
  }
  return p.coefficient * out;
}

QOperator single_qubit_pauli(Pauli p, int qubit, int num_qubits) {
  if (qubit < 1 || qubit > num_qubits) {
    throw ArgumentError("qubit " + std::to_string(qubit) + " out of range");
  }
  PauliString s;
  s.letters.assign(static_cast<std::size_t>(num_qubits), Pauli::I);
  s.letters[static_cast<std::size_t>(qubit - 1)] = p;
  return pauli_string_to_operator(s, num_qubits);
}

EigenDecomposition eigh(const QOperator& h) {
  require_hermitian(h, "eigh");
  // Symmetrize so rounding-level asymmetry cannot leak into the solver.
  const Matrix sym = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ArgumentError("eigh: eigensolver failed to converge");
  }
  EigenDecomposition out;
  const auto& vals = solver.eigenvalues();
  out.values.assign(vals.data(), vals.data() + vals.size());
  out.vectors = solver.eigenvectors();
  return out;
}

QOperator expm_hermitian(const QOperator& h, double t) {
  if (t == 0.0) {
    require_hermitian(h, "expm_hermitian");
    return QOperator::identity(h.num_qubits());
  }
  const EigenDecomposition eig = eigh(h);
  const auto d = static_cast<Eigen::Index>(eig.values.size());
  Vector phases(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double angle = -eig.values[static_cast<std::size_t>(k)] * t;
    phases(k) = Complex(std::cos(angle), std::sin(angle));
  }
  return QOperator(eig.vectors * phases.asDiagonal() * eig.vectors.adjoint());
}

double unitary_distance(const QOperator& u, const QOperator& v) {
  if (u.dim() != v.dim()) throw ArgumentError("unitary_distance: dimension mismatch");
  const Complex overlap = (u.matrix().adjoint() * v.matrix()).trace();
  const double d = std::max(0.0, 1.0 - std::abs(overlap) / static_cast<double>(u.dim()));
  return std::min(d, 1.0);
}

double phase_aligned_error(const QOperator& u, const QOperator& v) {
  if (u.dim() != v.dim()) throw ArgumentError("phase_aligned_error: dimension mismatch");
  const Complex overlap = (v.matrix().adjoint() * u.matrix()).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  return (u.matrix() - phase * v.matrix()).norm() / std::sqrt(static_cast<double>(u.dim()));
}

double max_entry_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace bcsnmr

#pragma once

// Dense complex linear algebra on 2^N-dimensional spin spaces.
//
// Basis convention: |0> is the sigma_z eigenstate with eigenvalue +1, and
// qubit 1 is the most significant bit of a basis index. For two qubits the
// basis order is |00>, |01>, |10>, |11>.
//
// Energies and frequencies are angular (rad/s) throughout, hbar = 1.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include "bcsnmr/errors.hpp"

namespace bcsnmr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 8;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr std::size_t dimension_of(int num_qubits) {
  return std::size_t{1} << num_qubits;
}

// Square operator on a num_qubits register.
class QOperator {
 public:
  QOperator() = default;
  // Throws ArgumentError if the matrix is not square with a power-of-two
  // dimension, CapacityError beyond kMaxQubits.
  explicit QOperator(Matrix entries);

  static QOperator identity(int num_qubits);
  static QOperator zero(int num_qubits);

  const Matrix& matrix() const { return entries_; }
  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }

  bool is_hermitian(double tol = 1e-12) const;
  bool is_unitary(double tol = 1e-10) const;

  QOperator adjoint() const { return QOperator(entries_.adjoint()); }

  friend QOperator operator*(const QOperator& a, const QOperator& b);
  friend QOperator operator+(const QOperator& a, const QOperator& b);
  friend QOperator operator-(const QOperator& a, const QOperator& b);
  friend QOperator operator*(Complex c, const QOperator& a);

 private:
  Matrix entries_;
  int num_qubits_ = 0;
};

// Normalized pure state.
class QState {
 public:
  QState() = default;
  // Requires unit norm within 1e-12.
  explicit QState(Vector amplitudes);

  // Rescales to unit norm; throws ArgumentError on a zero vector.
  static QState normalized(Vector amplitudes);
  static QState basis(int num_qubits, std::size_t index);

  const Vector& amplitudes() const { return amplitudes_; }
  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  // |psi><psi|
  QOperator density() const;

 private:
  Vector amplitudes_;
  int num_qubits_ = 0;
};

// U|psi>, renormalized so rounding drift never accumulates across steps.
QState apply(const QOperator& u, const QState& psi);

enum class Pauli { I, X, Y, Z };

struct PauliString {
  std::vector<Pauli> letters;  // letters[0] acts on qubit 1
  Complex coefficient{1.0, 0.0};

  // "XIZ" style; throws ArgumentError on other characters.
  static PauliString parse(std::string_view text, Complex coefficient = 1.0);
};

QOperator pauli_matrix(Pauli p);

QOperator kron(const QOperator& a, const QOperator& b);

QOperator pauli_string_to_operator(const PauliString& p, int num_qubits);

// Single Pauli letter on `qubit` (1-based) of an n-qubit register.
QOperator single_qubit_pauli(Pauli p, int qubit, int num_qubits);

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j belongs to values[j]
};

EigenDecomposition eigh(const QOperator& h);

// exp(-i h t) through the eigendecomposition of h.
QOperator expm_hermitian(const QOperator& h, double t);

// 1 - |tr(u^dagger v)| / dim. Zero iff u and v differ by a global phase.
double unitary_distance(const QOperator& u, const QOperator& v);

// min over phi of ||u - e^{i phi} v||_F / sqrt(dim). Linear in the size of the
// discrepancy, unlike unitary_distance which is quadratic; equal to
// sqrt(2 * unitary_distance) for exactly unitary inputs.
double phase_aligned_error(const QOperator& u, const QOperator& v);

// max_ij |a_ij - b_ij|
double max_entry_diff(const Matrix& a, const Matrix& b);

}  // namespace bcsnmr

#pragma once

// Spin-analogy pairing Hamiltonian
//
//   H_p = sum_m (eps_m / 2) Z_m + (V / 2) sum_{l>m} (X_m X_l + Y_m Y_l)
//
// with hbar = 1, so eps_m and V are angular frequencies. H_p conserves the
// number of qubits in |1> (one Cooper pair per excitation), so it is block
// diagonal by excitation count.

#include <cstddef>
#include <string>
#include <vector>

#include "bcsnmr/quantum_core.hpp"

namespace bcsnmr {

struct PairingParams {
  std::vector<double> eps;  // per-qubit free-electron energies, rad/s
  double v = 0.0;           // pair coupling, rad/s

  int num_qubits() const { return static_cast<int>(eps.size()); }

  // eps/2pi = 1e4 Hz on both qubits, V/2pi = 1 Hz.
  static PairingParams paper_default();
  static PairingParams from_hz(const std::vector<double>& eps_hz, double v_hz);

  // Throws ArgumentError on empty or non-finite entries, CapacityError past
  // the dense cap.
  void validate() const;

  bool uniform_eps() const;

  friend bool operator==(const PairingParams&, const PairingParams&) = default;
};

QOperator build_hp(const PairingParams& p);

// sum_m Z_m; commutes with H_p.
QOperator total_z(int num_qubits);

struct SpectrumOracle {
  std::vector<double> eigenvalues;  // ascending, rad/s
  std::vector<int> excitation;      // qubits in |1> for each eigenvector
  Matrix eigenvectors;              // columns, each supported on one block
};

// Full spectrum, diagonalized block by block so every eigenvector carries a
// well-defined excitation count even when levels from different blocks are
// degenerate.
SpectrumOracle diagonalize(const PairingParams& p);

// Basis indices with exactly k qubits in |1>, ascending.
std::vector<std::size_t> excitation_block_indices(int num_qubits, int k);

// H_p restricted to the excitation-k block (rows/cols in block index order).
Matrix block_submatrix(const QOperator& h, const std::vector<std::size_t>& indices);

// Spread (max - min) of the eigenvalues in the one-excitation block, rad/s.
// For two qubits this is 2 sqrt(((eps1 - eps2)/2)^2 + V^2). For N > 2 it is
// an extension: the extremal spread of the one-pair levels.
double one_pair_splitting(const PairingParams& p);

struct GapReport {
  double splitting_hz = 0.0;
  std::string note;
};

GapReport gap_report(double splitting_rad_s);

}  // namespace bcsnmr

#pragma once

// Finite-dimensional qudit states and operators: the computational basis Z_d,
// its Fourier-conjugate X_d, cyclic coding shifts and the d-dimensional
// Hadamard, with Born-rule measurement.

#include <complex>
#include <span>
#include <vector>

#include "qkdnet/rng.hpp"

namespace qkdnet {

using Complex = std::complex<double>;

inline constexpr double kStateTolerance = 1e-9;
inline constexpr double kScalarTolerance = 1e-12;

enum class BasisKind { Z, X };

const char* to_string(BasisKind kind);

struct Basis {
  BasisKind kind = BasisKind::Z;
  int dim = 2;

  friend bool operator==(const Basis&, const Basis&) = default;
};

class QuditOperator;

/// Normalized amplitude vector of a single d-level system.
class QuditState {
 public:
  /// Validates dim >= 2 and normalization within kStateTolerance.
  static QuditState from_amplitudes(std::vector<Complex> amplitudes);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  const Complex& operator[](int k) const { return amplitudes_[static_cast<std::size_t>(k)]; }

  double norm_squared() const;

  friend bool operator==(const QuditState&, const QuditState&) = default;

 private:
  explicit QuditState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {}
  friend QuditState basis_state(int d, int j);
  friend QuditState x_basis_state(int d, int l);
  friend QuditState apply(const QuditOperator& op, const QuditState& s);

  std::vector<Complex> amplitudes_;
};

/// d x d unitary, stored row-major.
class QuditOperator {
 public:
  /// Validates shape and unitarity (M^dagger M = I within kStateTolerance).
  static QuditOperator from_matrix(int dim, std::vector<Complex> row_major);

  int dim() const { return dim_; }
  const Complex& operator()(int row, int col) const {
    return matrix_[static_cast<std::size_t>(row * dim_ + col)];
  }

  QuditOperator adjoint() const;

  /// Largest elementwise |a - b|; dims must match.
  friend double max_abs_diff(const QuditOperator& a, const QuditOperator& b);
  friend QuditOperator operator*(const QuditOperator& lhs, const QuditOperator& rhs);

 private:
  QuditOperator(int dim, std::vector<Complex> m) : dim_(dim), matrix_(std::move(m)) {}
  friend QuditOperator identity_op(int d);
  friend QuditOperator hadamard(int d);
  friend QuditOperator shift_op(int d, int j);

  int dim_;
  std::vector<Complex> matrix_;
};

/// |j> of Z_d. Throws std::invalid_argument unless d >= 2 and 0 <= j < d.
QuditState basis_state(int d, int j);

/// |l>_x with amplitudes exp(2 pi i k l / d) / sqrt(d).
QuditState x_basis_state(int d, int l);

/// k-th eigenvector of `basis`.
QuditState eigenvector(Basis basis, int k);

QuditOperator identity_op(int d);

/// H_d[k][j] = exp(2 pi i k j / d) / sqrt(d), so H_d |j> = |j>_x.
QuditOperator hadamard(int d);

/// Cyclic shift |m> -> |(m + j) mod d>. shift_op(d, j) |0> = |j>.
QuditOperator shift_op(int d, int j);

QuditState apply(const QuditOperator& op, const QuditState& s);

/// p[k] = |<e_k|s>|^2 over the eigenvectors of `basis`.
std::vector<double> born_distribution(const QuditState& s, Basis basis);

struct MeasurementRecord {
  Basis basis;
  int outcome = 0;
  QuditState collapsed;
};

/// Projective measurement; outcome sampled from born_distribution.
MeasurementRecord measure(const QuditState& s, Basis basis, Rng& rng);

/// Index sampled from a probability vector by inversion of one uniform draw.
int sample_index(std::span<const double> probabilities, Rng& rng);

/// |<k|l>_x|^2 evaluated from the two eigenvectors.
double overlap_probability(int d, int k, int l);

/// |<a|b>|; equals 1 iff the states agree up to a global phase.
double fidelity_amplitude(const QuditState& a, const QuditState& b);

bool equal_up_to_phase(const QuditState& a, const QuditState& b, double tol = kStateTolerance);

}  // namespace qkdnet

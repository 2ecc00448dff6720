#include "qkdnet/qudit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qkdnet {

namespace {

void require_dim(int d, const char* what) {
  if (d < 2) throw std::invalid_argument(std::string(what) + ": dimension must be >= 2, got " + std::to_string(d));
}

void require_index(int d, int j, const char* what) {
  require_dim(d, what);
  if (j < 0 || j >= d) {
    throw std::invalid_argument(std::string(what) + ": index " + std::to_string(j) + " out of range [0, " +
                                std::to_string(d) + ")");
  }
}

Complex root_of_unity(long long numerator, int d) {
  // Reduce first so the angle stays in [0, 2 pi) for large products.
  const long long r = ((numerator % d) + d) % d;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / d;
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

const char* to_string(BasisKind kind) { return kind == BasisKind::Z ? "Z" : "X"; }

QuditState QuditState::from_amplitudes(std::vector<Complex> amplitudes) {
  require_dim(static_cast<int>(amplitudes.size()), "QuditState");
  double n = 0.0;
  for (const auto& a : amplitudes) n += std::norm(a);
  if (std::abs(n - 1.0) > kStateTolerance) {
    throw std::invalid_argument("QuditState: amplitudes not normalized (sum |a|^2 = " + std::to_string(n) + ")");
  }
  return QuditState(std::move(amplitudes));
}

double QuditState::norm_squared() const {
  double n = 0.0;
  for (const auto& a : amplitudes_) n += std::norm(a);
  return n;
}

QuditOperator QuditOperator::from_matrix(int dim, std::vector<Complex> row_major) {
  require_dim(dim, "QuditOperator");
  if (row_major.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("QuditOperator: expected " + std::to_string(dim * dim) + " entries");
  }
  QuditOperator op(dim, std::move(row_major));
  if (max_abs_diff(op.adjoint() * op, identity_op(dim)) > kStateTolerance) {
    throw std::invalid_argument("QuditOperator: matrix is not unitary");
  }
  return op;
}

QuditOperator QuditOperator::adjoint() const {
  std::vector<Complex> m(matrix_.size());
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) m[static_cast<std::size_t>(c * dim_ + r)] = std::conj((*this)(r, c));
  return QuditOperator(dim_, std::move(m));
}

double max_abs_diff(const QuditOperator& a, const QuditOperator& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.matrix_.size(); ++i) worst = std::max(worst, std::abs(a.matrix_[i] - b.matrix_[i]));
  return worst;
}

QuditOperator operator*(const QuditOperator& lhs, const QuditOperator& rhs) {
  if (lhs.dim_ != rhs.dim_) throw std::invalid_argument("operator*: dimension mismatch");
  const int d = lhs.dim_;
  std::vector<Complex> m(static_cast<std::size_t>(d * d));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      Complex acc{};
      for (int k = 0; k < d; ++k) acc += lhs(r, k) * rhs(k, c);
      m[static_cast<std::size_t>(r * d + c)] = acc;
    }
  return QuditOperator(d, std::move(m));
}

QuditState basis_state(int d, int j) {
  require_index(d, j, "basis_state");
  std::vector<Complex> a(static_cast<std::size_t>(d));
  a[static_cast<std::size_t>(j)] = 1.0;
  return QuditState(std::move(a));
}

QuditState x_basis_state(int d, int l) {
  require_index(d, l, "x_basis_state");
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Complex> a(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) a[static_cast<std::size_t>(k)] = s * root_of_unity(static_cast<long long>(k) * l, d);
  return QuditState(std::move(a));
}

QuditState eigenvector(Basis basis, int k) {
  return basis.kind == BasisKind::Z ? basis_state(basis.dim, k) : x_basis_state(basis.dim, k);
}

QuditOperator identity_op(int d) {
  require_dim(d, "identity_op");
  std::vector<Complex> m(static_cast<std::size_t>(d * d));
  for (int k = 0; k < d; ++k) m[static_cast<std::size_t>(k * d + k)] = 1.0;
  return QuditOperator(d, std::move(m));
}

QuditOperator hadamard(int d) {
  require_dim(d, "hadamard");
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Complex> m(static_cast<std::size_t>(d * d));
  for (int k = 0; k < d; ++k)
    for (int j = 0; j < d; ++j) m[static_cast<std::size_t>(k * d + j)] = s * root_of_unity(static_cast<long long>(k) * j, d);
  return QuditOperator(d, std::move(m));
}

QuditOperator shift_op(int d, int j) {
  require_index(d, j, "shift_op");
  std::vector<Complex> m(static_cast<std::size_t>(d * d));
  for (int col = 0; col < d; ++col) m[static_cast<std::size_t>(((col + j) % d) * d + col)] = 1.0;
  return QuditOperator(d, std::move(m));
}

QuditState apply(const QuditOperator& op, const QuditState& s) {
  const int d = op.dim();
  if (s.dim() != d) {
    throw std::invalid_argument("apply: operator dim " + std::to_string(d) + " != state dim " + std::to_string(s.dim()));
  }
  std::vector<Complex> out(static_cast<std::size_t>(d));
  for (int r = 0; r < d; ++r) {
    Complex acc{};
    for (int c = 0; c < d; ++c) acc += op(r, c) * s[c];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return QuditState(std::move(out));
}

std::vector<double> born_distribution(const QuditState& s, Basis basis) {
  const int d = s.dim();
  if (basis.dim != d) {
    throw std::invalid_argument("born_distribution: basis dim " + std::to_string(basis.dim) + " != state dim " +
                                std::to_string(d));
  }
  std::vector<double> p(static_cast<std::size_t>(d));
  if (basis.kind == BasisKind::Z) {
    for (int k = 0; k < d; ++k) p[static_cast<std::size_t>(k)] = std::norm(s[k]);
    return p;
  }
  const double scale = 1.0 / static_cast<double>(d);
  for (int l = 0; l < d; ++l) {
    Complex acc{};
    for (int k = 0; k < d; ++k) acc += root_of_unity(-static_cast<long long>(k) * l, d) * s[k];
    p[static_cast<std::size_t>(l)] = std::norm(acc) * scale;
  }
  return p;
}

int sample_index(std::span<const double> probabilities, Rng& rng) {
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw std::invalid_argument("sample_index: negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kStateTolerance)
    throw std::invalid_argument("sample_index: probabilities sum to " + std::to_string(total));
  const double u = rng.uniform();
  double cdf = 0.0;
  int last_positive = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    cdf += probabilities[k];
    if (u < cdf) return static_cast<int>(k);
  }
  // Rounding left cdf a hair under 1.
  return last_positive;
}

MeasurementRecord measure(const QuditState& s, Basis basis, Rng& rng) {
  const auto p = born_distribution(s, basis);
  const int outcome = sample_index(p, rng);
  return MeasurementRecord{basis, outcome, eigenvector(basis, outcome)};
}

double overlap_probability(int d, int k, int l) {
  require_index(d, k, "overlap_probability");
  require_index(d, l, "overlap_probability");
  return std::pow(fidelity_amplitude(basis_state(d, k), x_basis_state(d, l)), 2);
}

double fidelity_amplitude(const QuditState& a, const QuditState& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fidelity_amplitude: dimension mismatch");
  Complex acc{};
  for (int k = 0; k < a.dim(); ++k) acc += std::conj(a[k]) * b[k];
  return std::abs(acc);
}

bool equal_up_to_phase(const QuditState& a, const QuditState& b, double tol) {
  if (a.dim() != b.dim()) return false;
  // Align b's phase to a's on the largest component, then compare elementwise.
  int pivot = 0;
  for (int k = 1; k < a.dim(); ++k)
    if (std::abs(a[k]) > std::abs(a[pivot])) pivot = k;
  if (std::abs(b[pivot]) < tol) return false;
  const Complex phase = a[pivot] / b[pivot];
  const Complex unit = phase / std::abs(phase);
  for (int k = 0; k < a.dim(); ++k)
    if (std::abs(a[k] - unit * b[k]) > tol) return false;
  return true;
}

}  // namespace qkdnet

#include "spinproj/qstate.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace spinproj {

namespace {

// Kernels only fan out to OpenMP when there is enough work to amortize it.
constexpr std::int64_t kParallelThreshold = std::int64_t{1} << 14;

constexpr Complex kI{0.0, 1.0};

// Inserts a zero bit at position `bit` of k.
inline std::uint64_t insert_zero(std::uint64_t k, std::size_t bit) {
  const std::uint64_t low = k & ((std::uint64_t{1} << bit) - 1);
  return ((k >> bit) << (bit + 1)) | low;
}

std::string describe_qubit(std::size_t qubit, std::size_t n) {
  std::ostringstream os;
  os << "qubit index " << qubit << " out of range for " << n << "-qubit state";
  return os.str();
}

void check_dimensions(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

void SpinHamiltonian::validate() const {
  for (const auto& t : terms) {
    if (t.i == t.j) throw std::invalid_argument("SpinHamiltonian: self-coupling term");
    if (t.i >= n_qubits || t.j >= n_qubits)
      throw std::invalid_argument("SpinHamiltonian: term site out of range");
    if (!std::isfinite(t.coefficient))
      throw std::invalid_argument("SpinHamiltonian: non-finite coefficient");
  }
}

namespace gates {

Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
Matrix2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
Matrix2 pauli_y() { return {0.0, -kI, kI, 0.0}; }
Matrix2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }
Matrix2 hadamard() {
  const double r = (1.0 / std::numbers::sqrt2);
  return {r, r, r, -r};
}
Matrix2 phase_s() { return {1.0, 0.0, 0.0, kI}; }
Matrix2 phase_s_dagger() { return {1.0, 0.0, 0.0, -kI}; }

Matrix2 rx(double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  return {c, -kI * s, -kI * s, c};
}
Matrix2 ry(double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  return {c, -s, s, c};
}
Matrix2 rz(double angle) {
  return {std::polar(1.0, -angle / 2), 0.0, 0.0, std::polar(1.0, angle / 2)};
}

Matrix2 multiply(const Matrix2& a, const Matrix2& b) {
  Matrix2 out{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      out[2 * r + c] = a[2 * r] * b[c] + a[2 * r + 1] * b[2 + c];
  return out;
}

Matrix2 adjoint(const Matrix2& a) {
  return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

bool is_unitary(const Matrix2& u, double tol) {
  const Matrix2 p = multiply(adjoint(u), u);
  const Matrix2 id = identity();
  for (std::size_t k = 0; k < 4; ++k)
    if (std::abs(p[k] - id[k]) > tol) return false;
  return true;
}

Matrix4 multiply(const Matrix4& a, const Matrix4& b) {
  Matrix4 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      Complex acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += a[4 * r + k] * b[4 * k + c];
      out[4 * r + c] = acc;
    }
  return out;
}

Matrix4 adjoint(const Matrix4& a) {
  Matrix4 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[4 * r + c] = std::conj(a[4 * c + r]);
  return out;
}

bool is_unitary(const Matrix4& u, double tol) {
  const Matrix4 p = multiply(adjoint(u), u);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const Complex expected = (r == c) ? 1.0 : 0.0;
      if (std::abs(p[4 * r + c] - expected) > tol) return false;
    }
  return true;
}

}  // namespace gates

TwoQubitUnitary::TwoQubitUnitary(const Matrix4& matrix, std::size_t first,
                                 std::size_t second)
    : matrix_(matrix), first_(first), second_(second) {
  if (first == second)
    throw std::invalid_argument("TwoQubitUnitary: qubits must be distinct");
  if (!gates::is_unitary(matrix))
    throw std::invalid_argument("TwoQubitUnitary: matrix is not unitary");
}

Statevector::Statevector(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits == 0) throw std::invalid_argument("Statevector: need at least one qubit");
  if (n_qubits > kMaxQubits) {
    std::ostringstream os;
    os << "Statevector: " << n_qubits << " qubits exceeds the " << kMaxQubits
       << "-qubit bound";
    throw SizeExceededError(os.str());
  }
  amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amplitudes_[0] = 1.0;
}

Statevector::Statevector(std::size_t n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

Statevector Statevector::basis_state(std::size_t n_qubits, std::uint64_t index) {
  Statevector s(n_qubits);
  if (index >= s.dimension()) throw std::out_of_range("basis_state: index out of range");
  s.amplitudes_[0] = 0.0;
  s.amplitudes_[index] = 1.0;
  return s;
}

Statevector Statevector::from_amplitudes(std::vector<Complex> amplitudes) {
  const std::size_t dim = amplitudes.size();
  if (dim < 2 || !std::has_single_bit(dim))
    throw std::invalid_argument("from_amplitudes: length must be a power of two >= 2");
  const auto n = static_cast<std::size_t>(std::countr_zero(dim));
  if (n > kMaxQubits) throw SizeExceededError("from_amplitudes: register too large");
  return Statevector(n, std::move(amplitudes));
}

void Statevector::check_qubit(std::size_t qubit) const {
  if (qubit >= n_qubits_) throw std::out_of_range(describe_qubit(qubit, n_qubits_));
}

double Statevector::squared_norm() const {
  const auto dim = static_cast<std::int64_t>(dimension());
  const Complex* a = amplitudes_.data();
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) if (dim >= kParallelThreshold)
  for (std::int64_t k = 0; k < dim; ++k) acc += std::norm(a[k]);
  return acc;
}

double Statevector::norm() const { return std::sqrt(squared_norm()); }

double Statevector::normalize() {
  const double sq = squared_norm();
  if (sq < kNormFloor) throw AnnihilatedStateError("normalize: state has vanishing norm");
  scale(1.0 / std::sqrt(sq));
  return sq;
}

void Statevector::scale(Complex factor) {
  const auto dim = static_cast<std::int64_t>(dimension());
  Complex* a = amplitudes_.data();
#pragma omp parallel for if (dim >= kParallelThreshold)
  for (std::int64_t k = 0; k < dim; ++k) a[k] *= factor;
}

void Statevector::apply_single_qubit(std::size_t qubit, const Matrix2& u) {
  check_qubit(qubit);
  if (!gates::is_unitary(u))
    throw std::invalid_argument("apply_single_qubit: matrix is not unitary");
  const std::uint64_t stride = std::uint64_t{1} << qubit;
  const auto half = static_cast<std::int64_t>(dimension() / 2);
  Complex* a = amplitudes_.data();
  const Complex u00 = u[0], u01 = u[1], u10 = u[2], u11 = u[3];
#pragma omp parallel for if (half >= kParallelThreshold)
  for (std::int64_t k = 0; k < half; ++k) {
    const std::uint64_t i0 = insert_zero(static_cast<std::uint64_t>(k), qubit);
    const std::uint64_t i1 = i0 | stride;
    const Complex v0 = a[i0], v1 = a[i1];
    a[i0] = u00 * v0 + u01 * v1;
    a[i1] = u10 * v0 + u11 * v1;
  }
}

void Statevector::apply_cnot(std::size_t control, std::size_t target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw std::invalid_argument("apply_cnot: control == target");
  const std::size_t lo = std::min(control, target), hi = std::max(control, target);
  const std::uint64_t cmask = std::uint64_t{1} << control;
  const std::uint64_t tmask = std::uint64_t{1} << target;
  const auto quarter = static_cast<std::int64_t>(dimension() / 4);
  Complex* a = amplitudes_.data();
#pragma omp parallel for if (quarter >= kParallelThreshold)
  for (std::int64_t k = 0; k < quarter; ++k) {
    const std::uint64_t base =
        insert_zero(insert_zero(static_cast<std::uint64_t>(k), lo), hi);
    std::swap(a[base | cmask], a[base | cmask | tmask]);
  }
}

void Statevector::apply_two_qubit(const TwoQubitUnitary& gate) {
  const std::size_t q1 = gate.first(), q2 = gate.second();
  check_qubit(q1);
  check_qubit(q2);
  const std::size_t lo = std::min(q1, q2), hi = std::max(q1, q2);
  const std::uint64_t m1 = std::uint64_t{1} << q1;
  const std::uint64_t m2 = std::uint64_t{1} << q2;
  // Local index 2*bit(first) + bit(second).
  const std::array<std::uint64_t, 4> offset{0, m2, m1, m1 | m2};
  const Matrix4& u = gate.matrix();
  const auto quarter = static_cast<std::int64_t>(dimension() / 4);
  Complex* a = amplitudes_.data();
#pragma omp parallel for if (quarter >= kParallelThreshold)
  for (std::int64_t k = 0; k < quarter; ++k) {
    const std::uint64_t base =
        insert_zero(insert_zero(static_cast<std::uint64_t>(k), lo), hi);
    std::array<Complex, 4> v;
    for (int r = 0; r < 4; ++r) v[r] = a[base | offset[r]];
    for (int r = 0; r < 4; ++r) {
      a[base | offset[r]] =
          u[4 * r] * v[0] + u[4 * r + 1] * v[1] + u[4 * r + 2] * v[2] + u[4 * r + 3] * v[3];
    }
  }
}

void Statevector::apply_swap(std::size_t i, std::size_t j) {
  check_qubit(i);
  check_qubit(j);
  if (i == j) throw std::invalid_argument("apply_swap: qubits must be distinct");
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  const std::uint64_t mi = std::uint64_t{1} << i, mj = std::uint64_t{1} << j;
  const auto quarter = static_cast<std::int64_t>(dimension() / 4);
  Complex* a = amplitudes_.data();
#pragma omp parallel for if (quarter >= kParallelThreshold)
  for (std::int64_t k = 0; k < quarter; ++k) {
    const std::uint64_t base =
        insert_zero(insert_zero(static_cast<std::uint64_t>(k), lo), hi);
    std::swap(a[base | mi], a[base | mj]);
  }
}

void Statevector::apply_swap_exponential(std::size_t i, std::size_t j, double theta) {
  check_qubit(i);
  check_qubit(j);
  if (i == j) throw std::invalid_argument("apply_swap_exponential: qubits must be distinct");
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  const std::uint64_t mi = std::uint64_t{1} << i, mj = std::uint64_t{1} << j;
  const Complex phase = std::polar(1.0, theta);
  const double c = std::cos(theta);
  const Complex is = kI * std::sin(theta);
  const auto quarter = static_cast<std::int64_t>(dimension() / 4);
  Complex* a = amplitudes_.data();
#pragma omp parallel for if (quarter >= kParallelThreshold)
  for (std::int64_t k = 0; k < quarter; ++k) {
    const std::uint64_t base =
        insert_zero(insert_zero(static_cast<std::uint64_t>(k), lo), hi);
    a[base] *= phase;
    a[base | mi | mj] *= phase;
    const Complex v01 = a[base | mj], v10 = a[base | mi];
    a[base | mj] = c * v01 + is * v10;
    a[base | mi] = is * v01 + c * v10;
  }
}

void Statevector::global_rotation_x(double angle) {
  const Matrix2 u = gates::rx(angle);
  for (std::size_t q = 0; q < n_qubits_; ++q) apply_single_qubit(q, u);
}

double Statevector::post_select_weights(std::span<const double> weights) {
  check_dimensions(weights.size(), dimension(), "post_select");
  const auto dim = static_cast<std::int64_t>(dimension());
  const Complex* a = amplitudes_.data();
  double kept = 0.0;
#pragma omp parallel for reduction(+ : kept) if (dim >= kParallelThreshold)
  for (std::int64_t k = 0; k < dim; ++k) kept += weights[k] * weights[k] * std::norm(a[k]);
  if (kept < kNormFloor)
    throw AnnihilatedStateError("post-selection annihilated the state (probability " +
                                std::to_string(kept) + ")");
  const double inv = 1.0 / std::sqrt(kept);
  Complex* w = amplitudes_.data();
#pragma omp parallel for if (dim >= kParallelThreshold)
  for (std::int64_t k = 0; k < dim; ++k) w[k] *= weights[k] * inv;
  return kept;
}

double Statevector::post_select_diagonal(const DiagonalObservable& obs,
                                         const std::function<double(double)>& f) {
  check_dimensions(obs.values.size(), dimension(), "post_select_diagonal");
  std::vector<double> weights(obs.values.size());
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k] = f(obs.values[k]);
  return post_select_weights(weights);
}

void Statevector::permute_qubits(std::span<const std::size_t> perm) {
  check_dimensions(perm.size(), n_qubits_, "permute_qubits");
  std::vector<Complex> out(dimension());
  const auto dim = static_cast<std::int64_t>(dimension());
#pragma omp parallel for if (dim >= kParallelThreshold)
  for (std::int64_t k = 0; k < dim; ++k) {
    const auto b = static_cast<std::uint64_t>(k);
    std::uint64_t image = 0;
    for (std::size_t s = 0; s < n_qubits_; ++s) image |= ((b >> s) & 1U) << perm[s];
    out[image] = amplitudes_[b];
  }
  amplitudes_ = std::move(out);
}

Complex inner_product(const Statevector& a, const Statevector& b) {
  check_dimensions(a.dimension(), b.dimension(), "inner_product");
  const auto dim = static_cast<std::int64_t>(a.dimension());
  const Complex* x = a.amplitudes().data();
  const Complex* y = b.amplitudes().data();
  double re = 0.0, im = 0.0;
#pragma omp parallel for reduction(+ : re, im) if (dim >= kParallelThreshold)
  for (std::int64_t k = 0; k < dim; ++k) {
    const Complex p = std::conj(x[k]) * y[k];
    re += p.real();
    im += p.imag();
  }
  return {re, im};
}

double fidelity(const Statevector& a, const Statevector& b) {
  return std::norm(inner_product(a, b));
}

// sigma_i . sigma_j = 2 SWAP_ij - 1, so each term costs one gather.
std::vector<Complex> apply_hamiltonian(const SpinHamiltonian& h,
                                       std::span<const Complex> psi) {
  check_dimensions(psi.size(), std::size_t{1} << h.n_qubits, "apply_hamiltonian");
  const auto dim = static_cast<std::int64_t>(psi.size());
  std::vector<Complex> out(psi.size(), Complex{0.0, 0.0});
  double diag = 0.0;
  for (const auto& t : h.terms) diag -= t.coefficient;
#pragma omp parallel for if (dim >= kParallelThreshold)
  for (std::int64_t k = 0; k < dim; ++k) {
    const auto b = static_cast<std::uint64_t>(k);
    Complex acc = diag * psi[b];
    for (const auto& t : h.terms) {
      const std::uint64_t bi = (b >> t.i) & 1U, bj = (b >> t.j) & 1U;
      const std::uint64_t swapped =
          (bi == bj) ? b : (b ^ ((std::uint64_t{1} << t.i) | (std::uint64_t{1} << t.j)));
      acc += 2.0 * t.coefficient * psi[swapped];
    }
    out[b] = acc;
  }
  return out;
}

double expectation(const Statevector& state, const SpinHamiltonian& h) {
  check_dimensions(state.num_qubits(), h.n_qubits, "expectation");
  const std::vector<Complex> hpsi = apply_hamiltonian(h, state.amplitudes());
  Complex acc = 0.0;
  const auto psi = state.amplitudes();
  for (std::size_t k = 0; k < psi.size(); ++k) acc += std::conj(psi[k]) * hpsi[k];
  if (std::abs(acc.imag()) > 1e-10)
    throw std::logic_error("expectation: non-negligible imaginary part");
  return acc.real();
}

std::vector<Complex> dense_matrix(const SpinHamiltonian& h) {
  if (h.n_qubits > 12) throw SizeExceededError("dense_matrix: refusing n > 12");
  const std::size_t dim = std::size_t{1} << h.n_qubits;
  std::vector<Complex> m(dim * dim, Complex{0.0, 0.0});
  std::vector<Complex> e(dim, Complex{0.0, 0.0});
  for (std::size_t c = 0; c < dim; ++c) {
    e[c] = 1.0;
    const auto col = apply_hamiltonian(h, e);
    for (std::size_t r = 0; r < dim; ++r) m[c * dim + r] = col[r];
    e[c] = 0.0;
  }
  return m;
}

}  // namespace spinproj

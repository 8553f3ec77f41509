#include "spinproj/vqe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace spinproj {

std::string_view to_string(GradientMethod m) {
  switch (m) {
    case GradientMethod::kAdjoint: return "adjoint";
    case GradientMethod::kParameterShift: return "parameter-shift";
    case GradientMethod::kFiniteDifference: return "finite-difference";
  }
  return "unknown";
}

GradientMethod parse_gradient_method(std::string_view name) {
  if (name == "adjoint") return GradientMethod::kAdjoint;
  if (name == "parameter-shift") return GradientMethod::kParameterShift;
  if (name == "finite-difference") return GradientMethod::kFiniteDifference;
  throw std::invalid_argument("unknown gradient method '" + std::string(name) + "'");
}

void OptimizerSettings::validate() const {
  if (!(energy_tolerance > 0.0)) throw std::invalid_argument("energy_tolerance must be positive");
  if (!(gradient_tolerance > 0.0))
    throw std::invalid_argument("gradient_tolerance must be positive");
  if (!(finite_difference_step > 0.0))
    throw std::invalid_argument("finite_difference_step must be positive");
  if (patience == 0) throw std::invalid_argument("patience must be at least 1");
}

void OptimizationTrace::write_csv(std::ostream& os) const {
  os << "iteration,energy,gradient_norm\n";
  const auto old = os.precision(12);
  for (const auto& r : records) os << r.iteration << ',' << r.energy << ',' << r.gradient_norm << '\n';
  os.precision(old);
}

VqeObjective::VqeObjective(Statevector reference, AnsatzProgram program,
                           SpinHamiltonian hamiltonian)
    : reference_(std::move(reference)),
      program_(std::move(program)),
      hamiltonian_(std::move(hamiltonian)) {
  program_.validate();
  if (program_.n_qubits != reference_.num_qubits() ||
      hamiltonian_.n_qubits != reference_.num_qubits())
    throw std::invalid_argument("VqeObjective: dimension mismatch between state, ansatz and H");
}

Statevector VqeObjective::prepare(std::span<const double> params) const {
  Statevector s = reference_;
  apply_ansatz(s, program_, params);
  return s;
}

double VqeObjective::energy(std::span<const double> params) const {
  return expectation(prepare(params), hamiltonian_);
}

std::vector<double> VqeObjective::gradient(std::span<const double> params,
                                           GradientMethod method, double fd_step) const {
  if (params.size() != program_.num_parameters())
    throw std::invalid_argument("gradient: parameter count mismatch");
  switch (method) {
    case GradientMethod::kAdjoint: return adjoint_gradient(params);
    case GradientMethod::kParameterShift: return shift_gradient(params);
    case GradientMethod::kFiniteDifference: return finite_difference_gradient(params, fd_step);
  }
  throw std::logic_error("gradient: unhandled method");
}

namespace {

// sum_b conj(bra[b]) ket[swap_ij(b)], i.e. <bra| rho_ij |ket>.
Complex swap_matrix_element(std::span<const Complex> bra, std::span<const Complex> ket,
                            std::size_t i, std::size_t j) {
  const std::uint64_t mi = std::uint64_t{1} << i, mj = std::uint64_t{1} << j;
  Complex acc = 0.0;
  for (std::uint64_t b = 0; b < bra.size(); ++b) {
    const bool differ = ((b & mi) != 0) != ((b & mj) != 0);
    acc += std::conj(bra[b]) * ket[differ ? (b ^ mi ^ mj) : b];
  }
  return acc;
}

}  // namespace

std::vector<double> VqeObjective::adjoint_gradient(std::span<const double> params) const {
  Statevector phi = prepare(params);
  Statevector lambda = Statevector::from_amplitudes(apply_hamiltonian(hamiltonian_, phi.amplitudes()));
  std::vector<double> grad(params.size(), 0.0);
  for (auto g = program_.gates.rbegin(); g != program_.gates.rend(); ++g) {
    // dE/dtheta_g = 2 Re <lambda| i rho |phi> = -2 Im <lambda| rho |phi>
    const Complex m = swap_matrix_element(lambda.amplitudes(), phi.amplitudes(), g->i, g->j);
    grad[g->parameter_class] += -2.0 * m.imag();
    const double theta = params[g->parameter_class];
    phi.apply_swap_exponential(g->i, g->j, -theta);
    lambda.apply_swap_exponential(g->i, g->j, -theta);
  }
  return grad;
}

std::vector<double> VqeObjective::shift_gradient(std::span<const double> params) const {
  std::vector<double> grad(params.size(), 0.0);
  const double shift = std::numbers::pi / 4.0;
  auto shifted_energy = [&](std::size_t which, double delta) {
    Statevector s = reference_;
    for (std::size_t k = 0; k < program_.gates.size(); ++k) {
      const auto& g = program_.gates[k];
      const double theta = params[g.parameter_class] + (k == which ? delta : 0.0);
      s.apply_swap_exponential(g.i, g.j, theta);
    }
    return expectation(s, hamiltonian_);
  };
  for (std::size_t k = 0; k < program_.gates.size(); ++k) {
    grad[program_.gates[k].parameter_class] +=
        shifted_energy(k, shift) - shifted_energy(k, -shift);
  }
  return grad;
}

std::vector<double> VqeObjective::finite_difference_gradient(std::span<const double> params,
                                                             double step) const {
  std::vector<double> x(params.begin(), params.end());
  std::vector<double> grad(params.size(), 0.0);
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double x0 = x[c];
    x[c] = x0 + step;
    const double up = energy(x);
    x[c] = x0 - step;
    const double down = energy(x);
    x[c] = x0;
    grad[c] = (up - down) / (2.0 * step);
  }
  return grad;
}

double energy_objective(const Statevector& reference, const AnsatzProgram& program,
                        const SpinHamiltonian& h, std::span<const double> params) {
  return VqeObjective(reference, program, h).energy(params);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

VqeResult minimize(const Statevector& reference, const AnsatzProgram& program,
                   const SpinHamiltonian& h, const OptimizerSettings& settings) {
  settings.validate();
  const auto start = std::chrono::steady_clock::now();
  const VqeObjective objective(reference, program, h);
  OptimizationTrace trace;

  std::vector<double> x = program.initial_parameters();
  if (settings.max_iterations == 0) {
    trace.termination_reason = "max_iterations is zero";
    const double e0 = expectation(reference, h);
    trace.records.push_back({0, x, e0, 0.0});
    trace.energy_evaluations = 1;
    return {x, reference, e0, std::move(trace)};
  }

  const std::size_t dim = x.size();
  auto grad_of = [&](const std::vector<double>& p) {
    ++trace.gradient_evaluations;
    return objective.gradient(p, settings.gradient, settings.finite_difference_step);
  };
  auto energy_of = [&](const std::vector<double>& p) {
    ++trace.energy_evaluations;
    return objective.energy(p);
  };

  double f = energy_of(x);
  std::vector<double> g = dim ? grad_of(x) : std::vector<double>{};
  trace.records.push_back({0, x, f, max_abs(g)});

  // Inverse Hessian approximation, row-major.
  std::vector<double> hinv(dim * dim, 0.0);
  auto reset_hessian = [&](double scale) {
    std::fill(hinv.begin(), hinv.end(), 0.0);
    for (std::size_t k = 0; k < dim; ++k) hinv[k * dim + k] = scale;
  };
  reset_hessian(1.0);
  bool scaled = false;

  std::size_t quiet_steps = 0;
  std::size_t iter = 0;
  while (true) {
    if (dim == 0 || max_abs(g) < settings.gradient_tolerance) {
      trace.converged = true;
      trace.termination_reason = "gradient below tolerance";
      break;
    }
    if (iter >= settings.max_iterations) {
      trace.termination_reason = "max_iterations reached";
      break;
    }
    std::vector<double> p(dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) p[r] -= hinv[r * dim + c] * g[c];
    double slope = dot(g, p);
    if (!(slope < 0.0)) {
      reset_hessian(1.0);
      for (std::size_t k = 0; k < dim; ++k) p[k] = -g[k];
      slope = dot(g, p);
    }
    // Keep the very first trial step modest: the unscaled Hessian guess has
    // no length information.
    double alpha = 1.0;
    if (!scaled) alpha = std::min(1.0, 0.1 / std::max(max_abs(p), 1e-300));

    std::vector<double> x_new(dim);
    double f_new = f;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t k = 0; k < dim; ++k) x_new[k] = x[k] + alpha * p[k];
      f_new = energy_of(x_new);
      if (f_new <= f + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      trace.termination_reason = "line search failed";
      trace.converged = max_abs(g) < 1e-6;
      break;
    }

    std::vector<double> g_new = grad_of(x_new);
    std::vector<double> s(dim), y(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      s[k] = x_new[k] - x[k];
      y[k] = g_new[k] - g[k];
    }
    const double sy = dot(s, y);
    if (sy > 1e-14) {
      if (!scaled) {
        reset_hessian(sy / dot(y, y));
        scaled = true;
      }
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      std::vector<double> hy(dim, 0.0);
      for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) hy[r] += hinv[r * dim + c] * y[c];
      const double yhy = dot(y, hy);
      for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
          hinv[r * dim + c] += rho * ((1.0 + rho * yhy) * s[r] * s[c] - hy[r] * s[c] -
                                      s[r] * hy[c]);
    }

    const double delta = f - f_new;
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    ++iter;
    trace.records.push_back({iter, x, f, max_abs(g)});

    quiet_steps = (std::abs(delta) < settings.energy_tolerance) ? quiet_steps + 1 : 0;
    if (quiet_steps >= settings.patience) {
      trace.converged = true;
      trace.termination_reason = "energy change below tolerance";
      break;
    }
  }

  trace.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Statevector best = objective.prepare(x);
  return {x, std::move(best), f, std::move(trace)};
}

}  // namespace spinproj

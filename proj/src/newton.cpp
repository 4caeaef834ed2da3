#include "wrcosim/newton.hpp"

#include <cmath>
#include <limits>

namespace wrcosim {

SolverError::SolverError(std::size_t step, double residual, const std::string& what)
    : std::runtime_error(what + " (step " + std::to_string(step) + ", residual " +
                         std::to_string(residual) + ")"),
      step_(step),
      residual_(residual) {}

Eigen::VectorXd solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) throw SolverError(0, std::numeric_limits<double>::quiet_NaN(),
                                          "singular linear system (rcond " + std::to_string(rcond) + ")");
  return lu.solve(b);
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          Eigen::VectorXd& w, const NewtonSettings& settings,
                          std::size_t step) {
  const auto n = w.size();
  Eigen::VectorXd r(n);
  Eigen::MatrixXd j(n, n);
  residual(w, r);
  double norm = r.lpNorm<Eigen::Infinity>();
  NewtonResult result;
  for (int it = 0; it < settings.max_iterations; ++it) {
    if (!std::isfinite(norm)) break;
    if (norm <= settings.abs_tol) {
      result.iterations = it;
      result.residual = norm;
      return result;
    }
    jacobian(w, j);
    Eigen::VectorXd delta;
    try {
      delta = solve_dense(j, r);
    } catch (const SolverError&) {
      throw SolverError(step, norm, "singular Newton Jacobian");
    }
    w -= delta;
    residual(w, r);
    norm = r.lpNorm<Eigen::Infinity>();
    // Large-magnitude states cannot reach an absolute residual below their
    // own rounding level; accept once the update is at round-off.
    const double scale = w.lpNorm<Eigen::Infinity>();
    if (std::isfinite(norm) &&
        delta.lpNorm<Eigen::Infinity>() <= 16.0 * std::numeric_limits<double>::epsilon() * scale &&
        norm > settings.abs_tol) {
      result.iterations = it + 1;
      result.residual = norm;
      return result;
    }
  }
  if (std::isfinite(norm) && norm <= settings.abs_tol) {
    result.iterations = settings.max_iterations;
    result.residual = norm;
    return result;
  }
  throw SolverError(step, norm, "Newton iteration did not converge");
}

}  // namespace wrcosim

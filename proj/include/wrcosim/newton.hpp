#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wrcosim {

/// Shared by the field, circuit and monolithic integrators.
struct NewtonSettings {
  double abs_tol = 1e-10;
  int max_iterations = 50;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(std::size_t step, double residual, const std::string& what);

  std::size_t step() const { return step_; }
  double residual() const { return residual_; }

 private:
  std::size_t step_;
  double residual_;
};

/// Dense solve with partial pivoting; throws SolverError (step 0) when the
/// matrix is numerically singular.
Eigen::VectorXd solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

struct NewtonResult {
  int iterations = 0;
  double residual = 0.0;
};

using ResidualFn = std::function<void(const Eigen::VectorXd& w, Eigen::VectorXd& r)>;
using JacobianFn = std::function<void(const Eigen::VectorXd& w, Eigen::MatrixXd& j)>;

/// Solves r(w) = 0 in place. Stops on |r|_inf <= abs_tol, or when the update
/// has shrunk to round-off relative to w. `step` only labels errors.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          Eigen::VectorXd& w, const NewtonSettings& settings,
                          std::size_t step);

}  // namespace wrcosim

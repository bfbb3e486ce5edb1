#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ada::lp {

// minimize c'x  subject to  A x = b,  x >= 0.
struct StandardFormLp {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
  std::vector<Eigen::Index> basis;  // basic column per non-redundant row
};

struct SimplexOptions {
  double tolerance = 1e-9;
  // Pivot budget across both phases; 0 picks 50 * (rows + cols) + 1000.
  int max_pivots = 0;
};

// Dense two-phase primal simplex. Phase one is skipped when slack columns give
// a starting basis. Phase two runs on a slightly perturbed right-hand side,
// then recovers the exact basic values. Throws SolverError if the pivot
// budget runs out.
LpSolution solve(const StandardFormLp& problem, const SimplexOptions& options = {});

}  // namespace ada::lp

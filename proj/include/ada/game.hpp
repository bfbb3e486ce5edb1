#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ada/error.hpp"

namespace ada {

// Payoff matrix of the localization game: values(i, j) = loss(y'_i, y_j) +
// psi[j], predictor on rows (minimizing), adversary on columns (maximizing).
struct GameMatrix {
  std::vector<std::size_t> rows;  // predictor strategy indices
  std::vector<std::size_t> cols;  // adversary strategy indices
  Eigen::MatrixXd values;
};

// values = loss_block + 1 * psi'. Every row of the potential part is psi'.
GameMatrix build_game(const Eigen::MatrixXd& loss_block, const Eigen::VectorXd& psi);

// One double-oracle round. `v_min` already includes the constant E_p[psi].
struct OracleStep {
  double v_p = 0, v_max = 0, v_f = 0, v_min = 0;
  std::size_t support_f = 0, support_p = 0;
  bool added_p = false, added_f = false;
};

struct Equilibrium {
  Eigen::VectorXd f;  // predictor mixed strategy
  Eigen::VectorXd p;  // adversary mixed strategy
  double value = 0.0;       // from the predictor's LP (min v)
  double dual_value = 0.0;  // from the adversary's LP (max v)
  int iterations = 1;
  std::vector<std::size_t> support_f;  // strategy sets S_f, S_p
  std::vector<std::size_t> support_p;
  std::vector<OracleStep> trace;
};

struct Regret {
  double adversary = 0.0;  // max_j (f'G)_j - f'Gp
  double predictor = 0.0;  // f'Gp - min_i (Gp)_i
  bool certified(double eps) const { return adversary <= eps && predictor <= eps; }
};

struct GameSolveOptions {
  double tolerance = 1e-9;
  int max_pivots = 0;
};

// Solves both linear programs: min v s.t. f'G <= v 1', sum f = 1 and
// max v s.t. G p >= v 1, sum p = 1. Throws SolverError on LP failure.
Equilibrium solve_matrix_game(const Eigen::MatrixXd& g, const GameSolveOptions& options = {});
inline Equilibrium solve_matrix_game(const GameMatrix& g, const GameSolveOptions& options = {}) {
  return solve_matrix_game(g.values, options);
}

Regret verify_equilibrium(const Eigen::MatrixXd& g, const Eigen::VectorXd& f,
                          const Eigen::VectorXd& p);

// loss(predictor_index, adversary_index) over the full label space.
using LossOracle = std::function<double(std::size_t, std::size_t)>;

struct BestResponse {
  std::size_t index = 0;
  double value = 0.0;
};

// argmax_y sum_{i in S_f} f[i] loss(S_f[i], y) + psi[y]; lowest index wins ties.
BestResponse best_response_p(const Eigen::VectorXd& f, std::span<const std::size_t> support_f,
                             const LossOracle& loss, const Eigen::VectorXd& psi);

// argmin_y' sum_{j in S_p} p[j] loss(y', S_p[j]) over `label_count` labels;
// psi is constant in y' and therefore absent.
BestResponse best_response_f(const Eigen::VectorXd& p, std::span<const std::size_t> support_p,
                             const LossOracle& loss, std::size_t label_count);

struct DoubleOracleOptions {
  double eps = 1e-6;
  // 0 selects 2 * |Y| + 1, the most rounds that can each add a strategy.
  std::size_t max_iters = 0;
  GameSolveOptions lp;
};

class NonConvergenceError : public SolverError {
 public:
  NonConvergenceError(const std::string& what, double adversary_gap, double predictor_gap)
      : SolverError(what), adversary_gap(adversary_gap), predictor_gap(predictor_gap) {}
  double adversary_gap;
  double predictor_gap;
};

// Constraint generation over the label space {0..psi.size()-1}. The returned
// f and p live in the full strategy space with zeros off-support.
Equilibrium double_oracle(const LossOracle& loss, const Eigen::VectorXd& psi,
                          const DoubleOracleOptions& options = {});
Equilibrium double_oracle(const Eigen::MatrixXd& loss_matrix, const Eigen::VectorXd& psi,
                          const DoubleOracleOptions& options = {});

// Dense matrix text: either nested brackets `[[a, b], [c, d]]` or one row per
// line (optionally bracketed), entries separated by commas or whitespace.
// `#` starts a comment line.
Eigen::MatrixXd parse_game_matrix(const std::string& text, const std::string& context);

// Human-readable dump: matrix, f, p, v, and regrets.
std::string format_game_report(const Eigen::MatrixXd& g, const Equilibrium& eq,
                               const Regret& regret);

}  // namespace ada

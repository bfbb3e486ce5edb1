#include "ada/game.hpp"

#include <algorithm>
#include <limits>
#include <cctype>
#include <sstream>

#include "ada/simplex.hpp"
#include "ada/text_format.hpp"

namespace ada {

GameMatrix build_game(const Eigen::MatrixXd& loss_block, const Eigen::VectorXd& psi) {
  if (loss_block.cols() != psi.size())
    throw DataError("loss block has " + std::to_string(loss_block.cols()) +
                    " columns but psi has " + std::to_string(psi.size()) + " entries");
  GameMatrix g;
  g.values = loss_block.rowwise() + psi.transpose();
  g.rows.resize(static_cast<std::size_t>(loss_block.rows()));
  g.cols.resize(static_cast<std::size_t>(loss_block.cols()));
  for (std::size_t i = 0; i < g.rows.size(); ++i) g.rows[i] = i;
  for (std::size_t j = 0; j < g.cols.size(); ++j) g.cols[j] = j;
  return g;
}

namespace {

Eigen::VectorXd to_distribution(Eigen::VectorXd x) {
  x = x.cwiseMax(0.0);
  const double total = x.sum();
  if (!(total > 0.0)) throw SolverError("LP returned an empty mixed strategy");
  return x / total;
}

std::vector<std::size_t> positive_entries(const Eigen::VectorXd& x) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] > 0.0) out.push_back(static_cast<std::size_t>(i));
  return out;
}

}  // namespace

namespace {

// Minimizing row player of `g`. With h = g shifted so every entry is at least
// 1, x = f / v solves max 1'x s.t. h'x <= 1, x >= 0, whose slack basis is
// feasible from the start.
Eigen::VectorXd minimizer_strategy(const Eigen::MatrixXd& g, const lp::SimplexOptions& simplex,
                                   const char* who) {
  const Eigen::Index n = g.rows(), m = g.cols();
  const double shift = 1.0 - g.minCoeff();
  lp::StandardFormLp prog;
  prog.a = Eigen::MatrixXd::Zero(m, n + m);
  prog.a.leftCols(n) = (g.array() + shift).matrix().transpose();
  prog.a.rightCols(m).setIdentity();
  prog.b = Eigen::VectorXd::Ones(m);
  prog.c = Eigen::VectorXd::Zero(n + m);
  prog.c.head(n).setConstant(-1.0);
  const auto sol = lp::solve(prog, simplex);
  if (sol.status != lp::LpStatus::kOptimal)
    throw SolverError(std::string(who) + " LP did not reach an optimum (" + std::to_string(n) +
                      "x" + std::to_string(m) + " game)");
  return to_distribution(sol.x.head(n));
}

}  // namespace

Equilibrium solve_matrix_game(const Eigen::MatrixXd& g, const GameSolveOptions& options) {
  if (g.rows() == 0 || g.cols() == 0) throw SolverError("cannot solve an empty game");
  if (!g.allFinite()) throw SolverError("game matrix has non-finite entries");
  const lp::SimplexOptions simplex{options.tolerance, options.max_pivots};

  Equilibrium eq;
  eq.f = minimizer_strategy(g, simplex, "predictor");
  // The adversary maximizes g, i.e. minimizes -g' as the row player.
  eq.p = minimizer_strategy(-g.transpose(), simplex, "adversary");
  // Each LP's objective at its solution: min v s.t. f'G <= v and
  // max v s.t. G p >= v.
  eq.value = (eq.f.transpose() * g).maxCoeff();
  eq.dual_value = (g * eq.p).minCoeff();
  eq.support_f = positive_entries(eq.f);
  eq.support_p = positive_entries(eq.p);
  return eq;
}

Regret verify_equilibrium(const Eigen::MatrixXd& g, const Eigen::VectorXd& f,
                          const Eigen::VectorXd& p) {
  if (f.size() != g.rows() || p.size() != g.cols())
    throw DataError("strategy lengths do not match the game matrix");
  const Eigen::RowVectorXd row_payoffs = f.transpose() * g;  // per adversary column
  const Eigen::VectorXd col_payoffs = g * p;                 // per predictor row
  const double value = f.dot(col_payoffs);
  return {row_payoffs.maxCoeff() - value, value - col_payoffs.minCoeff()};
}

BestResponse best_response_p(const Eigen::VectorXd& f, std::span<const std::size_t> support_f,
                             const LossOracle& loss, const Eigen::VectorXd& psi) {
  BestResponse best{0, -std::numeric_limits<double>::infinity()};
  for (Eigen::Index y = 0; y < psi.size(); ++y) {
    double v = 0.0;
    for (std::size_t a = 0; a < support_f.size(); ++a)
      if (f[static_cast<Eigen::Index>(a)] != 0.0)
        v += f[static_cast<Eigen::Index>(a)] * loss(support_f[a], static_cast<std::size_t>(y));
    v += psi[y];
    if (v > best.value) best = {static_cast<std::size_t>(y), v};
  }
  return best;
}

BestResponse best_response_f(const Eigen::VectorXd& p, std::span<const std::size_t> support_p,
                             const LossOracle& loss, std::size_t label_count) {
  BestResponse best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t y = 0; y < label_count; ++y) {
    double v = 0.0;
    for (std::size_t b = 0; b < support_p.size(); ++b)
      if (p[static_cast<Eigen::Index>(b)] != 0.0)
        v += p[static_cast<Eigen::Index>(b)] * loss(y, support_p[b]);
    if (v < best.value) best = {y, v};
  }
  return best;
}

namespace {

Eigen::MatrixXd restricted_game(const LossOracle& loss, const Eigen::VectorXd& psi,
                                const std::vector<std::size_t>& s_f,
                                const std::vector<std::size_t>& s_p) {
  Eigen::MatrixXd g(s_f.size(), s_p.size());
  for (std::size_t a = 0; a < s_f.size(); ++a)
    for (std::size_t b = 0; b < s_p.size(); ++b)
      g(a, b) = loss(s_f[a], s_p[b]) + psi[static_cast<Eigen::Index>(s_p[b])];
  return g;
}

bool contains(const std::vector<std::size_t>& set, std::size_t v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

}  // namespace

Equilibrium double_oracle(const LossOracle& loss, const Eigen::VectorXd& psi,
                          const DoubleOracleOptions& options) {
  const auto n = static_cast<std::size_t>(psi.size());
  if (n == 0) throw SolverError("double oracle needs a nonempty label space");
  if (!psi.allFinite()) throw SolverError("potentials contain non-finite values");
  const std::size_t max_iters = options.max_iters > 0 ? options.max_iters : 2 * n + 1;

  Eigen::Index start = 0;
  psi.maxCoeff(&start);  // first maximal index
  std::vector<std::size_t> s_f{static_cast<std::size_t>(start)};
  std::vector<std::size_t> s_p{static_cast<std::size_t>(start)};

  std::vector<OracleStep> trace;
  double gap_p = 0.0, gap_f = 0.0;
  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    OracleStep step;
    Equilibrium sub = solve_matrix_game(restricted_game(loss, psi, s_f, s_p), options.lp);
    step.v_p = sub.value;
    const auto adversary = best_response_p(sub.f, s_f, loss, psi);
    step.v_max = adversary.value;
    gap_p = step.v_max - step.v_p;
    if (gap_p > options.eps) {
      if (contains(s_p, adversary.index))
        throw NonConvergenceError("adversary best response already in the restricted game",
                                  gap_p, gap_f);
      s_p.push_back(adversary.index);
      step.added_p = true;
      sub = solve_matrix_game(restricted_game(loss, psi, s_f, s_p), options.lp);
    }
    step.v_f = sub.value;
    const auto predictor = best_response_f(sub.p, s_p, loss, n);
    double expected_psi = 0.0;
    for (std::size_t b = 0; b < s_p.size(); ++b)
      expected_psi += sub.p[static_cast<Eigen::Index>(b)] * psi[static_cast<Eigen::Index>(s_p[b])];
    step.v_min = predictor.value + expected_psi;
    gap_f = step.v_f - step.v_min;
    if (gap_f > options.eps) {
      if (contains(s_f, predictor.index))
        throw NonConvergenceError("predictor best response already in the restricted game",
                                  gap_p, gap_f);
      s_f.push_back(predictor.index);
      step.added_f = true;
    }
    step.support_f = s_f.size();
    step.support_p = s_p.size();
    trace.push_back(step);

    if (!step.added_p && !step.added_f) {
      Equilibrium eq;
      eq.f = Eigen::VectorXd::Zero(psi.size());
      eq.p = Eigen::VectorXd::Zero(psi.size());
      for (std::size_t a = 0; a < s_f.size(); ++a)
        eq.f[static_cast<Eigen::Index>(s_f[a])] = sub.f[static_cast<Eigen::Index>(a)];
      for (std::size_t b = 0; b < s_p.size(); ++b)
        eq.p[static_cast<Eigen::Index>(s_p[b])] = sub.p[static_cast<Eigen::Index>(b)];
      eq.value = sub.value;
      eq.dual_value = sub.dual_value;
      eq.iterations = static_cast<int>(iter);
      eq.support_f = std::move(s_f);
      eq.support_p = std::move(s_p);
      eq.trace = std::move(trace);
      return eq;
    }
  }
  std::ostringstream msg;
  msg << "double oracle did not converge in " << max_iters
      << " iterations (adversary gap " << gap_p << ", predictor gap " << gap_f << ")";
  throw NonConvergenceError(msg.str(), gap_p, gap_f);
}

Equilibrium double_oracle(const Eigen::MatrixXd& loss_matrix, const Eigen::VectorXd& psi,
                          const DoubleOracleOptions& options) {
  if (loss_matrix.rows() != psi.size() || loss_matrix.cols() != psi.size())
    throw DataError("loss matrix must be square and aligned with psi");
  const LossOracle oracle = [&loss_matrix](std::size_t i, std::size_t j) {
    return loss_matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  return double_oracle(oracle, psi, options);
}

Eigen::MatrixXd parse_game_matrix(const std::string& contents, const std::string& context) {
  std::vector<std::vector<double>> rows;
  std::string body;
  {
    std::istringstream in(contents);
    std::string line;
    while (std::getline(in, line)) {
      const auto view = text::trim(line);
      if (view.empty() || view.front() == '#') continue;
      body += std::string(view) + "\n";
    }
  }
  auto parse_row = [&](std::string_view row) {
    std::vector<double> values;
    for (const auto& token : text::split(row, ", \t"))
      values.push_back(text::parse_double(token, context));
    if (!values.empty()) rows.push_back(std::move(values));
  };
  const auto trimmed = text::trim(body);
  if (trimmed.starts_with("[[") || trimmed.starts_with("[ [")) {
    // Nested form: every innermost bracket pair is a row.
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < trimmed.size(); ++i) {
      const char c = trimmed[i];
      if (c == '[') {
        if (++depth == 2) start = i + 1;
        if (depth > 2) throw DataError(context + ": brackets nested too deeply");
      } else if (c == ']') {
        if (depth == 2) parse_row(trimmed.substr(start, i - start));
        if (--depth < 0) throw DataError(context + ": unbalanced ']'");
      } else if (depth < 2 && c != ',' && !std::isspace(static_cast<unsigned char>(c))) {
        throw DataError(context + ": unexpected '" + std::string(1, c) + "' outside a row");
      }
    }
    if (depth != 0) throw DataError(context + ": unbalanced '['");
  } else {
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
      auto view = text::trim(line);
      if (view.starts_with("[")) {
        if (!view.ends_with("]")) throw DataError(context + ": unbalanced brackets in '" + line + "'");
        view = view.substr(1, view.size() - 2);
      }
      parse_row(view);
    }
  }
  if (rows.empty()) throw DataError(context + ": no matrix entries");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      throw DataError(context + ": row " + std::to_string(i + 1) + " has " +
                      std::to_string(rows[i].size()) + " entries, expected " +
                      std::to_string(rows.front().size()));
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

std::string format_game_report(const Eigen::MatrixXd& g, const Equilibrium& eq,
                               const Regret& regret) {
  std::ostringstream out;
  auto vec = [](const Eigen::VectorXd& v) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += text::format_double(v[i]);
    }
    return s + "]";
  };
  out << "matrix " << g.rows() << "x" << g.cols() << "\n";
  for (Eigen::Index i = 0; i < g.rows(); ++i) out << "  " << vec(g.row(i).transpose()) << "\n";
  out << "f = " << vec(eq.f) << "\n";
  out << "p = " << vec(eq.p) << "\n";
  out << "v = " << text::format_double(eq.value) << "\n";
  out << "v_dual = " << text::format_double(eq.dual_value) << "\n";
  out << "regret_adversary = " << text::format_double(regret.adversary) << "\n";
  out << "regret_predictor = " << text::format_double(regret.predictor) << "\n";
  return out.str();
}

}  // namespace ada

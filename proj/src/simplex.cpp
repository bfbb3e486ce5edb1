#include "ada/simplex.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ada/error.hpp"

namespace ada::lp {
namespace {

class Tableau {
 public:
  Tableau(const StandardFormLp& lp, double tol) : tol_(tol) {
    m_ = lp.a.rows();
    n_ = lp.a.cols();
    t_ = Eigen::MatrixXd::Zero(m_, n_ + m_ + 1);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * lp.a.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs()) = sign * lp.b[i];
    }
    basis_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
    active_.assign(static_cast<std::size_t>(m_), true);
    allowed_.assign(static_cast<std::size_t>(n_ + m_), true);
    cost_ = Eigen::VectorXd::Zero(n_ + m_ + 1);
    // A structural unit column (slack) starts basic in place of the
    // artificial for its row.
    for (Eigen::Index j = 0; j < n_; ++j) {
      Eigen::Index row = -1;
      bool unit = true;
      for (Eigen::Index i = 0; i < m_ && unit; ++i) {
        const double a = t_(i, j);
        if (a == 0.0) continue;
        if (a == 1.0 && row < 0) {
          row = i;
        } else {
          unit = false;
        }
      }
      if (!unit || row < 0 || basis_[row] < n_) continue;
      allowed_[n_ + row] = false;
      t_(row, n_ + row) = 0.0;
      basis_[row] = j;
    }
  }

  bool needs_phase_one() const {
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basis_[i] >= n_) return true;
    return false;
  }

  Eigen::Index rhs() const { return n_ + m_; }

  // Loads cost vector `c` (length n_ + m_) and prices out the basis.
  void set_objective(const Eigen::VectorXd& c) {
    cost_.head(n_ + m_) = c;
    cost_[rhs()] = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double cb = c[basis_[i]];
      if (cb != 0.0) cost_ -= cb * t_.row(i).transpose();
    }
  }

  // Optimizes over columns [0, limit). Entering columns follow the most
  // negative reduced cost, except right after a degenerate pivot, where
  // Bland's rule (lowest eligible index) takes over so cycling cannot occur.
  // Returns false if unbounded.
  bool optimize(Eigen::Index limit, int& pivots, int max_pivots) {
    bool degenerate = false;
    while (true) {
      Eigen::Index enter = -1;
      double most_negative = -tol_;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (!allowed_[j] || cost_[j] >= -tol_) continue;
        if (degenerate) {
          enter = j;
          break;
        }
        if (cost_[j] < most_negative) {
          most_negative = cost_[j];
          enter = j;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (!active_[i] || t_(i, enter) <= tol_) continue;
        const double ratio = std::max(0.0, t_(i, rhs())) / t_(i, enter);
        if (leave < 0) {
          best = ratio;
          leave = i;
          continue;
        }
        const double slack = tol_ * std::max(1.0, std::abs(best));
        if (ratio < best - slack) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + slack && basis_[i] < basis_[leave]) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;
      if (++pivots > max_pivots)
        throw SolverError("simplex pivot budget of " + std::to_string(max_pivots) +
                          " exceeded (possible cycling)");
      degenerate = best <= tol_;
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index e) {
    t_.row(r) /= t_(r, e);
    t_(r, e) = 1.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r || !active_[i]) continue;
      const double factor = t_(i, e);
      if (factor != 0.0) {
        t_.row(i) -= factor * t_.row(r);
        t_(i, e) = 0.0;
      }
    }
    const double factor = cost_[e];
    if (factor != 0.0) {
      cost_ -= factor * t_.row(r).transpose();
      cost_[e] = 0.0;
    }
    basis_[r] = e;
  }

  // After phase one: pivot artificials out of the basis where possible and
  // retire rows that are linear combinations of others.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!active_[i] || basis_[i] < n_) continue;
      Eigen::Index col = -1;
      double best = tol_;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > best) {
          best = std::abs(t_(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        active_[i] = false;
      }
    }
  }

  // Shifts the basic values by small distinct amounts. This is b + B delta
  // for the current basis B, so the basis stays feasible, and degenerate ties
  // in the ratio test (the usual source of cycling) disappear.
  void perturb(double scale) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double frac = std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
      t_(i, rhs()) += 1e-7 * scale * (1.0 + frac);
    }
  }

  void set_rhs(Eigen::Index i, double value) { t_(i, rhs()) = value; }

  // Dual simplex pivots over columns [0, limit) until every basic value is
  // >= -tol. Returns false if some row proves infeasibility.
  bool dual_repair(Eigen::Index limit, int& pivots, int max_pivots) {
    while (true) {
      Eigen::Index leave = -1;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (!active_[i] || t_(i, rhs()) >= -tol_) continue;
        if (leave < 0 || t_(i, rhs()) < t_(leave, rhs())) leave = i;
      }
      if (leave < 0) return true;
      Eigen::Index enter = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (!allowed_[j] || t_(leave, j) >= -tol_) continue;
        const double ratio = std::max(0.0, cost_[j]) / -t_(leave, j);
        if (ratio < best) {
          best = ratio;
          enter = j;
        }
      }
      if (enter < 0) return false;
      if (++pivots > max_pivots)
        throw SolverError("simplex pivot budget of " + std::to_string(max_pivots) +
                          " exceeded (possible cycling)");
      pivot(leave, enter);
    }
  }

  double objective_value() const { return -cost_[rhs()]; }
  double rhs_of(Eigen::Index i) const { return t_(i, rhs()); }
  bool active(Eigen::Index i) const { return active_[i]; }
  Eigen::Index basic(Eigen::Index i) const { return basis_[i]; }
  Eigen::Index rows() const { return m_; }

 private:
  double tol_;
  Eigen::Index m_ = 0, n_ = 0;
  Eigen::MatrixXd t_;
  Eigen::VectorXd cost_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> active_;
  std::vector<bool> allowed_;
};

}  // namespace

LpSolution solve(const StandardFormLp& lp, const SimplexOptions& options) {
  const Eigen::Index m = lp.a.rows(), n = lp.a.cols();
  if (lp.b.size() != m || lp.c.size() != n)
    throw SolverError("LP dimensions are inconsistent");
  if (!lp.a.allFinite() || !lp.b.allFinite() || !lp.c.allFinite())
    throw SolverError("LP data contains non-finite values");
  const double tol = options.tolerance;
  const int budget = options.max_pivots > 0 ? options.max_pivots
                                            : static_cast<int>(50 * (m + n) + 1000);

  Tableau tab(lp, tol);
  LpSolution out;

  if (tab.needs_phase_one()) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
    phase1.tail(m).setOnes();
    tab.set_objective(phase1);
    tab.optimize(n + m, out.pivots, budget);
    const double infeasibility = tab.objective_value();
    const double scale = std::max(1.0, lp.b.cwiseAbs().sum());
    if (infeasibility > tol * scale * 10.0) {
      out.status = LpStatus::kInfeasible;
      return out;
    }
    tab.expel_artificials();
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = lp.c;
  tab.set_objective(phase2);
  tab.perturb(std::max(1.0, lp.b.cwiseAbs().maxCoeff()));

  // Optimize the perturbed problem, then restore the true right-hand side
  // from the original data. A basis that turns out slightly infeasible is
  // repaired by dual pivots (the reduced costs do not depend on b).
  for (int round = 0;; ++round) {
    if (!tab.optimize(n, out.pivots, budget)) {
      out.status = LpStatus::kUnbounded;
      return out;
    }
    std::vector<Eigen::Index> rows;
    out.basis.clear();
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      if (!tab.active(i)) continue;
      rows.push_back(i);
      out.basis.push_back(tab.basic(i));
    }
    out.x = Eigen::VectorXd::Zero(n);
    const auto k = static_cast<Eigen::Index>(rows.size());
    if (k == 0) break;
    Eigen::MatrixXd basis_matrix(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      rhs[r] = lp.b[rows[r]];
      for (Eigen::Index c = 0; c < k; ++c) basis_matrix(r, c) = lp.a(rows[r], out.basis[c]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix);
    Eigen::VectorXd values(k);
    if (lu.isInvertible()) {
      values = lu.solve(rhs);
    } else {
      for (Eigen::Index r = 0; r < k; ++r) values[r] = tab.rhs_of(rows[r]);
    }
    if (!values.allFinite()) throw SolverError("basis solve produced non-finite values");
    for (Eigen::Index r = 0; r < k; ++r) tab.set_rhs(rows[r], values[r]);
    if (values.minCoeff() >= -tol || round >= 8) {
      for (Eigen::Index c = 0; c < k; ++c) out.x[out.basis[c]] = values[c];
      break;
    }
    if (!tab.dual_repair(n, out.pivots, budget)) {
      out.status = LpStatus::kInfeasible;
      return out;
    }
  }
  out.x = out.x.cwiseMax(0.0);
  out.objective = lp.c.dot(out.x);
  out.status = LpStatus::kOptimal;
  return out;
}

}  // namespace ada::lp

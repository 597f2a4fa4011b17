#pragma once

#include "mrav/types.hpp"

#include <limits>
#include <vector>

namespace mrav {

/// maximize c^T x  s.t.  a_eq x = b_eq,  a_ub x <= b_ub,  x >= 0
struct LinearProgram {
  VecX c;
  MatX a_eq;
  VecX b_eq;
  MatX a_ub;
  VecX b_ub;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  VecX x;
  double objective = -std::numeric_limits<double>::infinity();
};

struct LpOptions {
  double tol = 1e-10;
  int max_iterations = 50000;
};

namespace detail {

/// Dense tableau. Row `m` is the objective row holding reduced costs
/// (minimization form: a negative entry improves the objective).
class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(MatX::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  MatX& t() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double rhs(Eigen::Index r) const { return t_(r, cols()); }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const double p = t_(r, c);
    t_.row(r) /= p;
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  /// Runs the simplex on the objective row over the columns in [0, ncols).
  /// Dantzig pricing, switching to Bland's rule after a run of degenerate
  /// pivots.
  LpStatus optimize(Eigen::Index ncols, const LpOptions& opt) {
    int degenerate_run = 0;
    const Eigen::Index obj = rows();
    for (int it = 0; it < opt.max_iterations; ++it) {
      const bool bland = degenerate_run > 50;
      Eigen::Index enter = -1;
      double best = -opt.tol;
      for (Eigen::Index j = 0; j < ncols; ++j) {
        const double rc = t_(obj, j);
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      Eigen::Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < obj; ++i) {
        const double a = t_(i, enter);
        if (a > opt.tol) {
          const double q = rhs(i) / a;
          if (q < ratio - 1e-14 || (q <= ratio + 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
            ratio = q;
            leave = i;
          }
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      degenerate_run = ratio <= opt.tol ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
    return LpStatus::IterationLimit;
  }

 private:
  MatX t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

/// Two-phase dense simplex. Sized for the small LPs used here (a handful of
/// rows, a few thousand columns).
inline LpResult solve_lp(const LinearProgram& lp, const LpOptions& opt = {}) {
  const Eigen::Index n = lp.c.size();
  const Eigen::Index m_eq = lp.a_eq.rows();
  const Eigen::Index m_ub = lp.a_ub.rows();
  const Eigen::Index m = m_eq + m_ub;
  if ((m_eq > 0 && lp.a_eq.cols() != n) || (m_ub > 0 && lp.a_ub.cols() != n) || lp.b_eq.size() != m_eq ||
      lp.b_ub.size() != m_ub)
    throw InputError("linear program dimensions are inconsistent");

  // Columns: x (n) | slacks (m_ub) | artificials (m).
  const Eigen::Index n_slack = m_ub;
  const Eigen::Index art0 = n + n_slack;
  detail::Tableau tab(m, art0 + m);
  MatX& t = tab.t();
  const Eigen::Index rhs_col = art0 + m;

  std::vector<bool> needs_art(m, false);
  for (Eigen::Index i = 0; i < m_ub; ++i) {
    const double sign = lp.b_ub[i] < 0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * lp.a_ub.row(i);
    t(i, n + i) = sign;
    t(i, rhs_col) = sign * lp.b_ub[i];
    if (sign > 0) {
      tab.basis()[i] = n + i;
    } else {
      needs_art[i] = true;
    }
  }
  for (Eigen::Index k = 0; k < m_eq; ++k) {
    const Eigen::Index i = m_ub + k;
    const double sign = lp.b_eq[k] < 0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * lp.a_eq.row(k);
    t(i, rhs_col) = sign * lp.b_eq[k];
    needs_art[i] = true;
  }

  // Phase 1: minimize the sum of artificials.
  bool any_art = false;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!needs_art[i]) continue;
    any_art = true;
    t(i, art0 + i) = 1.0;
    tab.basis()[i] = art0 + i;
    t.row(m) -= t.row(i);
    t(m, art0 + i) += 1.0;
  }
  LpResult res;
  if (any_art) {
    const LpStatus s1 = tab.optimize(art0 + m, opt);
    if (s1 == LpStatus::IterationLimit) {
      res.status = s1;
      return res;
    }
    const double scale = 1.0 + t.col(rhs_col).head(m).cwiseAbs().maxCoeff();
    if (-t(m, rhs_col) > 1e-9 * scale) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Drive zero-level artificials out of the basis.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab.basis()[i] < art0) continue;
      Eigen::Index best = -1;
      double mag = 1e-9;
      for (Eigen::Index j = 0; j < art0; ++j)
        if (std::abs(t(i, j)) > mag) {
          mag = std::abs(t(i, j));
          best = j;
        }
      if (best >= 0) tab.pivot(i, best);
    }
  }

  // Phase 2 objective row: minimize -c^T x.
  t.row(m).setZero();
  t.row(m).head(n) = -lp.c.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = tab.basis()[i];
    if (b >= 0 && b < n && lp.c[b] != 0.0) t.row(m) += lp.c[b] * t.row(i);
  }
  // Redundant rows keep their artificial basic at zero; artificials never
  // re-enter because the optimizer only scans the first art0 columns.
  const LpStatus s2 = tab.optimize(art0, opt);
  res.status = s2;
  if (s2 != LpStatus::Optimal) return res;
  res.x = VecX::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = tab.basis()[i];
    if (b >= 0 && b < n) res.x[b] = std::max(0.0, t(i, rhs_col));
  }
  res.objective = lp.c.dot(res.x);
  return res;
}

}  // namespace mrav

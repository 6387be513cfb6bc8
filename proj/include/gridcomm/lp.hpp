#pragma once

// Small dense linear programs: minimize c'x subject to rows a'x {<=,=,>=} b,
// x >= 0. Two-phase tableau simplex with Bland's rule, so it always
// terminates. Meant for the few dozen variables of one community slice.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace gridcomm::lp {

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Row {
  std::vector<double> coeffs;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

struct Problem {
  std::size_t num_vars = 0;
  std::vector<double> objective;  // minimized
  std::vector<Row> rows;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

inline Solution solve(const Problem& p, double tol = 1e-9) {
  const std::size_t m = p.rows.size();
  const std::size_t n = p.num_vars;

  // Column layout: original | slack/surplus (one per inequality) | artificial (one per row).
  std::size_t num_slack = 0;
  for (const auto& r : p.rows) num_slack += r.sense == Sense::Equal ? 0 : 1;
  const std::size_t art0 = n + num_slack;
  const std::size_t cols = art0 + m;  // rhs stored separately

  std::vector<std::vector<double>> t(m, std::vector<double>(cols, 0.0));
  std::vector<double> rhs(m);
  std::vector<std::size_t> basis(m);
  std::size_t slack = n;
  for (std::size_t i = 0; i < m; ++i) {
    const Row& r = p.rows[i];
    double sign = r.rhs < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n && j < r.coeffs.size(); ++j) t[i][j] = sign * r.coeffs[j];
    if (r.sense != Sense::Equal) {
      t[i][slack] = sign * (r.sense == Sense::LessEqual ? 1.0 : -1.0);
      ++slack;
    }
    rhs[i] = sign * r.rhs;
    t[i][art0 + i] = 1.0;
    basis[i] = art0 + i;
  }

  auto pivot = [&](std::size_t row, std::size_t col) {
    const double pv = t[row][col];
    for (double& v : t[row]) v /= pv;
    rhs[row] /= pv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = t[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[row][j];
      rhs[i] -= f * rhs[row];
    }
    basis[row] = col;
  };

  // Runs the simplex on cost vector `c` over columns [0, limit). Returns false if unbounded.
  auto run = [&](const std::vector<double>& c, std::size_t limit) {
    for (;;) {
      // Reduced costs: c_j - c_B B^-1 A_j.
      std::size_t enter = cols;
      for (std::size_t j = 0; j < limit; ++j) {
        double red = c[j];
        for (std::size_t i = 0; i < m; ++i) red -= c[basis[i]] * t[i][j];
        if (red < -tol) {
          enter = j;  // Bland: lowest index
          break;
        }
      }
      if (enter == cols) return true;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] > tol) {
          const double ratio = rhs[i] / t[i][enter];
          if (ratio < best - tol || (std::abs(ratio - best) <= tol && leave < m && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  };

  Solution sol;
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t j = art0; j < cols; ++j) phase1[j] = 1.0;
  run(phase1, cols);
  double infeas = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= art0) infeas += rhs[i];
  }
  if (infeas > tol * (1.0 + static_cast<double>(m))) {
    sol.status = Status::Infeasible;
    return sol;
  }
  // Drive remaining (zero-valued) artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < art0) continue;
    for (std::size_t j = 0; j < art0; ++j) {
      if (std::abs(t[i][j]) > tol) {
        pivot(i, j);
        break;
      }
    }
  }
  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = p.objective[j];
  // Artificials still basic sit on redundant all-zero rows and never re-enter.
  if (!run(phase2, art0)) {
    sol.status = Status::Unbounded;
    return sol;
  }
  sol.status = Status::Optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = rhs[i];
  }
  for (std::size_t j = 0; j < n; ++j) sol.objective += p.objective[j] * sol.x[j];
  return sol;
}

}  // namespace gridcomm::lp

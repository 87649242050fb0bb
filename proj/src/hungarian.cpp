#include "remp/hungarian.hpp"

#include <limits>

namespace remp {

std::vector<int> max_weight_assignment(const ScoreMatrix& scores) {
  if (scores.rows == 0 || scores.cols == 0) return std::vector<int>(scores.rows, -1);

  // Work on an n x m cost matrix with n <= m; transpose when needed.
  const bool transposed = scores.rows > scores.cols;
  const std::size_t n = transposed ? scores.cols : scores.rows;
  const std::size_t m = transposed ? scores.rows : scores.cols;
  auto cost = [&](std::size_t i, std::size_t j) {
    // 1-based indices; maximize score == minimize negated score
    return transposed ? -scores(j - 1, i - 1) : -scores(i - 1, j - 1);
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> result(scores.rows, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transposed)
      result[j - 1] = static_cast<int>(p[j] - 1);
    else
      result[p[j] - 1] = static_cast<int>(j - 1);
  }
  return result;
}


double assignment_score(const ScoreMatrix& scores, const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r)
    if (assignment[r] >= 0) total += scores(r, static_cast<std::size_t>(assignment[r]));
  return total;
}

namespace {

// Optimal total over the rows/columns still free.
double optimum_of(const ScoreMatrix& scores, const std::vector<bool>& row_free,
                  const std::vector<bool>& col_free) {
  std::vector<std::size_t> rows, cols;
  for (std::size_t r = 0; r < scores.rows; ++r)
    if (row_free[r]) rows.push_back(r);
  for (std::size_t c = 0; c < scores.cols; ++c)
    if (col_free[c]) cols.push_back(c);
  ScoreMatrix sub(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = scores(rows[i], cols[j]);
  return assignment_score(sub, max_weight_assignment(sub));
}

} // namespace

std::vector<int> lexicographic_max_assignment(const ScoreMatrix& scores, double tol) {
  std::vector<int> result(scores.rows, -1);
  if (scores.rows == 0 || scores.cols == 0) return result;
  std::vector<bool> row_free(scores.rows, true), col_free(scores.cols, true);
  double remaining = optimum_of(scores, row_free, col_free);
  for (std::size_t r = 0; r < scores.rows; ++r) {
    row_free[r] = false;
    bool placed = false;
    for (std::size_t c = 0; c < scores.cols && !placed; ++c) {
      if (!col_free[c]) continue;
      col_free[c] = false;
      const double rest = optimum_of(scores, row_free, col_free);
      if (scores(r, c) + rest >= remaining - tol) {
        result[r] = static_cast<int>(c);
        remaining = rest;
        placed = true;
      } else {
        col_free[c] = true;
      }
    }
    if (!placed) remaining = optimum_of(scores, row_free, col_free);
  }
  return result;
}

} // namespace remp

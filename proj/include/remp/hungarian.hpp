#pragma once

#include <vector>

namespace remp {

/// Dense row-major score matrix.
struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  ScoreMatrix() = default;
  ScoreMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Maximum-total-score assignment on a (possibly rectangular) matrix using
/// the O(n^2 m) Hungarian method with potentials. Returns, for each row, the
/// assigned column or -1 when the row is left unassigned (more rows than
/// columns).
std::vector<int> max_weight_assignment(const ScoreMatrix& scores);

/// Among all maximum-total-score assignments, returns the one whose
/// (row, column) pairs are lexicographically smallest: row 0 takes the
/// lowest column that still admits an optimal completion, then row 1, and so
/// on. Totals are compared with an absolute tolerance of `tol`.
std::vector<int> lexicographic_max_assignment(const ScoreMatrix& scores, double tol = 1e-9);

/// Sum of the scores selected by `assignment`.
double assignment_score(const ScoreMatrix& scores, const std::vector<int>& assignment);

} // namespace remp

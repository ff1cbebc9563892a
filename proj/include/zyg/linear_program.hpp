#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace zyg {

/// Dense row-major matrix, just enough for small LPs.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;  // primal solution
  std::vector<double> y;  // equality-row multipliers (solution of the dual)
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// maximize c.x subject to A x = b, x >= 0, by the two-phase tableau simplex.
///
/// Dantzig pricing, switching to Bland's rule after a run of degenerate pivots
/// so that the method terminates on the highly degenerate minimax duals.
inline LpResult maximize(const DenseMatrix& a, std::span<const double> b, std::span<const double> c,
                         std::size_t max_iterations = 200000) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t width = n + m;  // originals then artificials
  constexpr double kPivotTol = 1e-11;
  constexpr double kCostTol = 1e-12;

  DenseMatrix t(m, width);
  std::vector<double> rhs(m);
  std::vector<double> sign(m, 1.0);
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    if (b[r] < 0.0) sign[r] = -1.0;
    for (std::size_t j = 0; j < n; ++j) t(r, j) = sign[r] * a(r, j);
    t(r, n + r) = 1.0;
    rhs[r] = sign[r] * b[r];
    basis[r] = n + r;
  }

  std::vector<double> cost(width, 0.0);
  std::vector<double> reduced(width);
  double value = 0.0;
  LpResult result;

  auto price = [&] {
    for (std::size_t j = 0; j < width; ++j) {
      double s = -cost[j];
      for (std::size_t r = 0; r < m; ++r) s += cost[basis[r]] * t(r, j);
      reduced[j] = s;
    }
    value = 0.0;
    for (std::size_t r = 0; r < m; ++r) value += cost[basis[r]] * rhs[r];
  };

  auto pivot = [&](std::size_t pr, std::size_t pc) {
    const double p = t(pr, pc);
    auto prow = t.row(pr);
    for (auto& v : prow) v /= p;
    rhs[pr] /= p;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == pr) continue;
      const double factor = t(r, pc);
      if (factor == 0.0) continue;
      auto row = t.row(r);
      for (std::size_t j = 0; j < width; ++j) row[j] -= factor * prow[j];
      rhs[r] -= factor * rhs[pr];
      if (rhs[r] < 0.0 && rhs[r] > -1e-13) rhs[r] = 0.0;
    }
    const double factor = reduced[pc];
    for (std::size_t j = 0; j < width; ++j) reduced[j] -= factor * prow[j];
    value -= factor * rhs[pr];
    basis[pr] = pc;
  };

  // Only the first enter_limit columns may enter; artificials never re-enter.
  auto run = [&](std::size_t enter_limit) -> LpStatus {
    std::size_t degenerate_run = 0;
    while (true) {
      if (result.iterations >= max_iterations) return LpStatus::iteration_limit;
      const bool bland = degenerate_run > 50;
      std::size_t enter = width;
      double best = -kCostTol;
      for (std::size_t j = 0; j < enter_limit; ++j) {
        if (reduced[j] < best) {
          enter = j;
          if (bland) break;
          best = reduced[j];
        }
      }
      if (enter == width) return LpStatus::optimal;
      std::size_t leave = m;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m; ++r) {
        const double v = t(r, enter);
        if (v <= kPivotTol) continue;
        const double q = rhs[r] / v;
        if (q < ratio - 1e-15 || (q <= ratio + 1e-15 && leave < m && basis[r] < basis[leave])) {
          ratio = q;
          leave = r;
        }
      }
      if (leave == m) return LpStatus::unbounded;
      degenerate_run = ratio <= 1e-15 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      ++result.iterations;
    }
  };

  // Phase I: maximize -sum of artificials.
  for (std::size_t r = 0; r < m; ++r) cost[n + r] = -1.0;
  price();
  LpStatus status = run(n);
  if (status == LpStatus::iteration_limit) {
    result.status = status;
    return result;
  }
  if (value < -1e-9) {
    result.status = LpStatus::infeasible;
    return result;
  }
  // Drive remaining artificials out of the basis where possible.
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(t(r, j)) > kPivotTol) {
        pivot(r, j);
        break;
      }
    }
  }

  // Phase II.
  std::fill(cost.begin(), cost.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];
  price();
  status = run(n);
  result.status = status;
  if (status != LpStatus::optimal) return result;

  result.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) result.x[basis[r]] = rhs[r];
  }
  // With zero cost on artificials their reduced costs are c_B B^{-1} e_i = y_i.
  result.y.resize(m);
  for (std::size_t i = 0; i < m; ++i) result.y[i] = sign[i] * reduced[n + i];
  result.objective = value;
  return result;
}

}  // namespace zyg

#pragma once

#include <cstddef>
#include <vector>

namespace bb {

// Kendall tau-b, O(n log n). Ties are exact equality of doubles.
// ShapeError on length mismatch or n < 2; DegenerateError when a margin is
// fully tied.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> mid_ranks(const std::vector<double>& v);

// Pearson correlation of mid-ranks. DegenerateError on a constant margin.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

// counts[i][j]: raters assigning item i to category j. Every row must sum to
// raters_per_item (ShapeError). DegenerateError when expected agreement is 1.
double fleiss_kappa(const std::vector<std::vector<int>>& counts, int raters_per_item);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-sided
  std::size_t dof = 0;
};

// Paired t-test on d = x - y. DegenerateError when every difference is equal.
TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided tail probability P(|T| >= |t|) for Student-t with `dof` degrees.
double student_t_two_sided_p(double t, double dof);

}  // namespace bb

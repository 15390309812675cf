#pragma once

#include <span>
#include <stdexcept>

namespace taskid {

/// Zero variance of the paired differences; the t statistic is undefined.
class DegenerateTestError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct PairedTest {
  double t = 0.0;
  int df = 0;
  double p_value = 1.0;  // two-sided
};

/// Paired t-test on a[i] - b[i].
PairedTest paired_ttest(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

}  // namespace taskid

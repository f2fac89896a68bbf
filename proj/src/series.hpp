#pragma once

#include <vector>

#include "relaxkit/specfun.hpp"

namespace relaxkit::detail {

struct SeriesSum {
  long double value = 0.0L;
  long double abs_sum = 0.0L;  // sum of |terms|, for cancellation estimates
  int terms = 0;
};

// Partial sums of sum_r prefactor * prod(a)_r / prod(b)_r x^r / r!, stopped by
// the three-small-terms rule.
SeriesSum pfq_series(const std::vector<long double>& a,
                     const std::vector<long double>& b, long double x,
                     long double prefactor, const EvalStrategy& s);

long double rgamma_ld(long double x);

bool is_nonpositive_integer(double x);

}  // namespace relaxkit::detail

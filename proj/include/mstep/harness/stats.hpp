#pragma once

#include <cstddef>
#include <vector>

namespace mstep::harness {

/// Area under a learning curve, normalized by its length: the mean of the
/// per-episode series.
double auc(const std::vector<double>& series);

struct MeanSe {
  double mean = 0.0;
  double standard_error = 0.0;  // sample sd / sqrt(n); 0 for n < 2
  std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& values);

/// Fraction of pairs with a[i] > b[i].
double win_rate(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace mstep::harness

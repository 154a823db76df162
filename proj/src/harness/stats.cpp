#include "mstep/harness/stats.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mstep::harness {

double auc(const std::vector<double>& series) {
  if (series.empty()) throw std::invalid_argument("auc of an empty series");
  return std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe r;
  r.n = values.size();
  if (r.n == 0) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(r.n);
  if (r.n < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.standard_error = std::sqrt(ss / static_cast<double>(r.n - 1)) / std::sqrt(static_cast<double>(r.n));
  return r;
}

double win_rate(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("win_rate: bad pairing");
  std::size_t wins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) wins += a[i] > b[i] ? 1 : 0;
  return static_cast<double>(wins) / static_cast<double>(a.size());
}

}  // namespace mstep::harness

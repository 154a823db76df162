#include "mstep/core/random.hpp"

#include <stdexcept>

namespace mstep {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(Rng& parent) {
  return splitmix64(parent());
}

Rng substream(Rng& parent) {
  return Rng(substream_seed(parent));
}

Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ed27ULL)));
}

int sample_categorical(const Eigen::Ref<const Eigen::VectorXd>& probs, Rng& rng) {
  if (probs.size() == 0) throw std::invalid_argument("sample_categorical: empty distribution");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  // u landed in the rounding slack above the accumulated mass
  for (Eigen::Index i = probs.size() - 1; i > 0; --i) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

Eigen::VectorXd one_hot(int index, int size) {
  if (index < 0 || index >= size) throw std::out_of_range("one_hot: index out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
  v[index] = 1.0;
  return v;
}

}  // namespace mstep

#pragma once

#include "mstep/core/types.hpp"

namespace mstep {

std::uint64_t splitmix64(std::uint64_t x);

/// Fresh engine seeded from a single draw of `parent`. Consumers that need an
/// isolated, reproducible stream (one Monte-Carlo sample, one run) take one.
Rng substream(Rng& parent);
/// Seed of the next substream of `parent`; Rng(substream_seed(p)) == substream(p).
std::uint64_t substream_seed(Rng& parent);

/// Engine for a named child stream of `seed`, independent of draw order.
Rng derived_rng(std::uint64_t seed, std::uint64_t stream);

/// Inverse-CDF draw from a categorical distribution.
int sample_categorical(const Eigen::Ref<const Eigen::VectorXd>& probs, Rng& rng);

Eigen::VectorXd one_hot(int index, int size);

}  // namespace mstep

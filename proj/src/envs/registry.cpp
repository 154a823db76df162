#include "mstep/envs/acrobot.hpp"
#include "mstep/envs/cartpole.hpp"

#include <stdexcept>

namespace mstep::envs {

std::unique_ptr<Environment> make_environment(const std::string& name, int max_episode_steps) {
  if (name == "cartpole") return std::make_unique<CartPole>(max_episode_steps);
  if (name == "acrobot") return std::make_unique<Acrobot>(max_episode_steps);
  throw std::invalid_argument("unknown domain '" + name + "' (expected cartpole or acrobot)");
}

}  // namespace mstep::envs

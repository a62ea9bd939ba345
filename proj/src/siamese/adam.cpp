#include <cmath>

#include "hopjam/error.hpp"
#include "hopjam/jsonutil.hpp"
#include "hopjam/siamese.hpp"

namespace hopjam::siamese {

using jsonutil::get_or;

double AdamConfig::learning_rate(std::size_t it) const {
  if (decay_every == 0) return lr0;
  return lr0 * std::pow(decay_factor, static_cast<double>(it / decay_every));
}

nlohmann::json AdamConfig::to_json() const {
  return {{"lr0", lr0},     {"beta1", beta1},
          {"beta2", beta2}, {"epsilon", epsilon},
          {"decay_factor", decay_factor}, {"decay_every", decay_every}};
}

AdamConfig AdamConfig::from_json(const nlohmann::json& j) {
  const std::string where = "adam";
  AdamConfig c;
  c.lr0 = get_or(j, "lr0", c.lr0, where);
  c.beta1 = get_or(j, "beta1", c.beta1, where);
  c.beta2 = get_or(j, "beta2", c.beta2, where);
  c.epsilon = get_or(j, "epsilon", c.epsilon, where);
  c.decay_factor = get_or(j, "decay_factor", c.decay_factor, where);
  c.decay_every = get_or(j, "decay_every", c.decay_every, where);
  if (!(c.lr0 > 0)) throw ConfigError("adam.lr0 must be positive");
  if (!(c.beta1 >= 0 && c.beta1 < 1 && c.beta2 >= 0 && c.beta2 < 1)) throw ConfigError("adam: betas must lie in [0, 1)");
  if (!(c.epsilon > 0)) throw ConfigError("adam.epsilon must be positive");
  if (!(c.decay_factor > 0 && c.decay_factor <= 1)) throw ConfigError("adam.decay_factor must lie in (0, 1]");
  return c;
}

AdamState AdamState::fresh(const ModelParameters& like) {
  AdamState s{like, like, 0};
  s.m.fill(0.0);
  s.v.fill(0.0);
  return s;
}

void adam_step(ModelParameters& params, const ModelParameters& grads, AdamState& state, const AdamConfig& cfg,
               double lr) {
  if (!params.same_shape(grads) || !params.same_shape(state.m) || !params.same_shape(state.v)) {
    throw DimensionError("optimizer state does not match the parameters");
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
    auto& p = params.groups[gi].values;
    const auto& g = grads.groups[gi].values;
    auto& m = state.m.groups[gi].values;
    auto& v = state.v.groups[gi].values;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace hopjam::siamese

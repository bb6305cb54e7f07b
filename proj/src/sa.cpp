#include "aigforge/sa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "aigforge/transforms.hpp"

namespace aigforge {

namespace {

void check_config(const SaConfig& config) {
  if (!(config.t_initial > 0.0)) throw std::invalid_argument("sa: t_initial must be positive");
  if (config.q_max < 1) throw std::invalid_argument("sa: q_max must be at least 1");
  if (!(config.q_v > 1.0 && config.q_v < 3.0))
    throw std::invalid_argument("sa: q_v must lie in (1, 3)");
  if (config.recipe_length == 0) throw std::invalid_argument("sa: empty recipe length");
}

/*! \brief Heavy-tailed step-size draw: |N(0,1)| / |N(0,1)|^((q_v-1)/(3-q_v)). */
double visiting_draw(double q_v, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double x = gauss(rng);
  const double y = gauss(rng);
  const double p = (q_v - 1.0) / (3.0 - q_v);
  return std::abs(x) / std::pow(std::abs(y), p);
}

}  // namespace

RealEvaluator::RealEvaluator(Aig aig, uint64_t budget)
    : Evaluator(budget), aig_(std::move(aig)) {}

double RealEvaluator::evaluate(const Recipe& recipe) {
  return static_cast<double>(qor(apply_recipe(aig_, recipe)));
}

PredictorEvaluator::PredictorEvaluator(PredictorModel& model, const Aig& aig, uint64_t budget)
    : Evaluator(budget),
      model_(model),
      h_aig_(design_embedding(model, encode_aig(aig))),
      scale_(std::max(1.0, static_cast<double>(stats(aig).nodes))) {}

double PredictorEvaluator::evaluate(const Recipe& recipe) {
  return predict_cached(model_, h_aig_, recipe) * scale_;
}

double cooling(double t_initial, uint64_t k, double q_v) {
  const double a = std::pow(2.0, q_v - 1.0) - 1.0;
  return t_initial * a / (std::pow(static_cast<double>(k) + 2.0, q_v - 1.0) - 1.0);
}

bool accept(double temperature, double delta_energy, std::mt19937_64& rng) {
  if (delta_energy < 0.0) return true;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < std::exp(-delta_energy / temperature);
}

Recipe neighbour(const Recipe& current, double temperature, double t_initial, double q_v,
                 std::mt19937_64& rng) {
  const size_t len = current.size();
  const double d = visiting_draw(q_v, rng);
  const double raw = std::round(static_cast<double>(len) * (temperature / t_initial) * d);
  const size_t n_mut = static_cast<size_t>(
      std::clamp(raw, 1.0, static_cast<double>(len)));

  std::vector<size_t> positions(len);
  for (size_t i = 0; i < len; ++i) positions[i] = i;
  for (size_t i = 0; i < n_mut; ++i) {
    std::uniform_int_distribution<size_t> pick(i, len - 1);
    std::swap(positions[i], positions[pick(rng)]);
  }

  Recipe next = current;
  std::uniform_int_distribution<int> token(0, kNumTransforms - 2);
  for (size_t i = 0; i < n_mut; ++i) {
    const size_t pos = positions[i];
    int t = token(rng);
    if (t >= transform_id(next[pos])) ++t;
    next[pos] = transform_from_id(t);
  }
  return next;
}

SaTrace anneal(Evaluator& evaluator, const SaConfig& config) {
  check_config(config);
  const Recipe start = config.start.empty() ? resyn2_seed(config.recipe_length) : config.start;

  std::mt19937_64 rng(config.seed);
  SaTrace trace;
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  try {
    const double start_energy = evaluator.energy(start);
    trace.steps.push_back({cooling(config.t_initial, 0, config.q_v), start, start_energy, true});
    trace.best = start;
    trace.best_energy = start_energy;

    Recipe chain = start;
    double chain_energy = start_energy;
    for (uint64_t k = 1; k < config.q_max; ++k) {
      const double t = cooling(config.t_initial, k, config.q_v);
      Recipe candidate = neighbour(chain, t, config.t_initial, config.q_v, rng);
      const double e = evaluator.energy(candidate);
      const bool take = accept(t, e - chain_energy, rng);
      trace.steps.push_back({t, candidate, e, take});
      if (take) {
        chain = std::move(candidate);
        chain_energy = e;
        if (e < trace.best_energy) {
          trace.best = chain;
          trace.best_energy = e;
        }
      }
    }
  } catch (const std::exception& ex) {
    trace.wall_time = elapsed();
    throw EvaluatorFailure(ex.what(), std::move(trace));
  }
  trace.wall_time = elapsed();
  return trace;
}

}  // namespace aigforge

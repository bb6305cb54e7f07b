/*! \file sa.hpp
 *  \brief Simulated-annealing recipe search with pluggable energy evaluators
 */

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "aigforge/aig.hpp"
#include "aigforge/nn.hpp"
#include "aigforge/predictor.hpp"
#include "aigforge/recipe.hpp"

namespace aigforge {

struct SaConfig {
  double t_initial{7250.0};
  uint64_t q_max{1000};
  double q_v{2.62};
  uint64_t seed{0};
  /*! \brief Start recipe; empty means resyn2 cycled to recipe_length. */
  Recipe start;
  size_t recipe_length{kDefaultRecipeLength};
};

/*! \brief Energy oracle with a call counter and an optional hard budget.
 *
 * Every energy() invocation counts exactly once; exceeding the budget throws
 * before the underlying evaluation runs. Lower energy is better.
 */
class Evaluator {
 public:
  explicit Evaluator(uint64_t budget = UINT64_MAX) : budget_(budget) {}
  virtual ~Evaluator() = default;

  double energy(const Recipe& recipe) {
    if (calls_ >= budget_) throw std::runtime_error("evaluator: budget exhausted");
    ++calls_;
    return evaluate(recipe);
  }

  uint64_t calls() const { return calls_; }
  uint64_t budget() const { return budget_; }

 protected:
  virtual double evaluate(const Recipe& recipe) = 0;

 private:
  uint64_t calls_{0};
  uint64_t budget_;
};

/*! \brief Energy = post-synthesis AND count of the recipe applied for real. */
class RealEvaluator final : public Evaluator {
 public:
  explicit RealEvaluator(Aig aig, uint64_t budget = UINT64_MAX);

 protected:
  double evaluate(const Recipe& recipe) override;

 private:
  Aig aig_;
};

/*! \brief Energy = predicted normalized node count, rescaled to node units.
 *
 * The design embedding is computed once at construction; each energy call
 * runs only the recipe path and the fusion head. Rescaling by the design's
 * unoptimized node count keeps the annealing temperatures meaningful across
 * evaluators.
 */
class PredictorEvaluator final : public Evaluator {
 public:
  PredictorEvaluator(PredictorModel& model, const Aig& aig, uint64_t budget = UINT64_MAX);

 protected:
  double evaluate(const Recipe& recipe) override;

 private:
  PredictorModel& model_;
  nn::Tensor h_aig_;
  double scale_;
};

struct SaStep {
  double temperature{0.0};
  Recipe candidate;
  double energy{0.0};
  bool accepted{false};
};

struct SaTrace {
  std::vector<SaStep> steps;
  Recipe best;
  double best_energy{0.0};
  double wall_time{0.0};
};

/*! \brief Evaluator failure mid-anneal, carrying the steps completed so far. */
struct EvaluatorFailure : std::runtime_error {
  EvaluatorFailure(const std::string& msg, SaTrace trace)
      : std::runtime_error(msg), partial(std::move(trace)) {}
  SaTrace partial;
};

/*! \brief Generalized-annealing temperature at iteration k; T_0 == t_initial. */
double cooling(double t_initial, uint64_t k, double q_v);

/*! \brief Metropolis rule: downhill always, uphill with probability exp(-dE/T). */
bool accept(double temperature, double delta_energy, std::mt19937_64& rng);

/*! \brief Mutates a temperature-scaled, heavy-tail-distributed number of positions.
 *
 * The position count is clamp(round(L * T/t_initial * d), 1, L) with d drawn
 * from the distorted Cauchy-Lorentz visiting law of exponent q_v; at least one
 * position always changes, each to a uniformly chosen different token.
 */
Recipe neighbour(const Recipe& current, double temperature, double t_initial, double q_v,
                 std::mt19937_64& rng);

/*! \brief Runs the annealing loop for exactly q_max energy calls.
 *
 * The start recipe is evaluated first (one counted call) and seeds both the
 * chain and the best-so-far; each iteration evaluates one neighbour. The best
 * recipe is tracked separately from the chain, so uphill acceptance never
 * loses it. Deterministic given the config seed. An evaluator failure is
 * rethrown as EvaluatorFailure with the partial trace attached.
 */
SaTrace anneal(Evaluator& evaluator, const SaConfig& config);

}  // namespace aigforge

/*!
  \file transforms.hpp
  \brief Synthesis transformations and recipe application
*/

#pragma once

#include <cstdint>
#include <vector>

#include "aigforge/aig.hpp"
#include "aigforge/recipe.hpp"

namespace aigforge {

/*! \brief Depth-optimal reconstruction of multi-input AND cones.
 *
 * Collects maximal single-output AND cones and rebuilds each as a
 * Huffman-style tree ordered by arrival level. Depth never increases.
 */
Aig balance(const Aig& aig);

/*! \brief Cut rewriting against a precomputed four-input structure library.
 *
 * Enumerates 4-feasible cuts per node, canonicalizes each cut function by
 * input permutation and output complement, and replaces the cut cone when
 * the library structure saves nodes (or matches, with zero_gain).
 */
Aig rewrite(const Aig& aig, bool zero_gain = false);

/*! \brief Resynthesis of fanout-free cones via irredundant covers.
 *
 * Collapses each maximal fanout-free cone of up to 10 leaves to a truth
 * table, recomputes an irredundant sum-of-products, factors it into an
 * AND/OR/NOT form and accepts the result on positive gain (zero gain with
 * the flag).
 */
Aig refactor(const Aig& aig, bool zero_gain = false);

/*! \brief Windowed resubstitution with zero or one new node.
 *
 * For each node, simulates a reconvergence-bounded window and searches the
 * window for a divisor d (or pair d0, d1) whose function matches the node,
 * replacing it when the freed fanout-free cone outweighs the addition.
 */
Aig resub(const Aig& aig, bool zero_gain = false);

/*! \brief Dispatches one recipe step. */
Aig apply_transform(const Aig& aig, Transform t);

/*! \brief Final network and per-step statistics of one recipe run. */
struct SynthesisResult {
  Aig final;
  std::vector<AigStats> trajectory;  // length == steps + 1, [0] = input stats
  double wall_time{0.0};             // seconds
};

/*! \brief Folds the recipe left to right, recording stats after each step. */
SynthesisResult apply_recipe(const Aig& aig, const Recipe& recipe);

/*! \brief Node count of the synthesized network: the optimization target. */
uint64_t qor(const SynthesisResult& result);

}  // namespace aigforge

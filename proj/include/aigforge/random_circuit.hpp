/*!
  \file random_circuit.hpp
  \brief Seeded layered random AIG generator for harnesses and corpora
*/

#pragma once

#include <cstdint>

#include "aigforge/aig.hpp"

namespace aigforge {

struct RandomAigSpec {
  uint32_t num_pis{8};
  uint32_t num_pos{4};
  uint32_t target_ands{100};
  uint64_t seed{0};
};

/*! \brief Builds a layered random circuit.
 *
 * Gates draw fanins from earlier nodes with a bias toward recent layers, and
 * fanin polarities are random, which leaves plenty of redundancy for the
 * optimization passes to find. Deterministic per spec.
 */
Aig random_aig(const RandomAigSpec& spec);

}  // namespace aigforge

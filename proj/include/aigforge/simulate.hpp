/*!
  \file simulate.hpp
  \brief Bit-parallel simulation and equivalence checking
*/

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aigforge/aig.hpp"

namespace aigforge {

using Word = uint64_t;

/*! \brief Evaluates all POs over word-packed input patterns.
 *
 * `pi_words` holds one row of W words per PI; the result holds one row of W
 * words per PO. Bit t of word w is pattern 64*w + t.
 */
std::vector<std::vector<Word>> simulate(const Aig& aig,
                                        const std::vector<std::vector<Word>>& pi_words);

struct Counterexample {
  std::vector<bool> pi_values;
  uint32_t po_index{0};
};

struct EquivVerdict {
  enum class Kind { equivalent, counterexample, inconclusive };
  Kind kind{Kind::inconclusive};
  std::optional<Counterexample> cex;

  bool is_equivalent() const { return kind == Kind::equivalent; }
};

struct EquivOptions {
  enum class Mode { exhaustive, random };
  Mode mode{Mode::exhaustive};
  uint64_t n_vectors{10000};
  uint64_t seed{0};
};

/*! \brief Compares two AIGs with identical interfaces.
 *
 * Exhaustive mode (num_pis <= 16) is a decision procedure. Random mode
 * returns a counterexample or inconclusive, never equivalent.
 */
EquivVerdict check_equivalence(const Aig& a, const Aig& b, const EquivOptions& opt = {});

}  // namespace aigforge

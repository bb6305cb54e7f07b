/*!
  \file rewrite_db.hpp
  \brief Precomputed AND-structure library over all four-input functions
*/

#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>

#include "truthtab.hpp"

namespace aigforge {

/*! \brief Structure library used by cut rewriting.
 *
 * For every 16-bit truth table the library stores an AND-structure with
 * complemented edges that computes it. Structures found by bounded
 * exact-cost closure are minimal trees; the remainder come from a
 * Shannon/multiplexer decomposition. Built once, read-only afterwards.
 */
class RewriteDb {
 public:
  static const RewriteDb& instance();

  /*! \brief Upper bound on AND gates needed for f (tree counting). */
  int tree_cost(tt::Tt16 f) const { return cost_[f]; }

  /*! \brief Structure over leaves 0..3 computing f. */
  tt::Structure structure_for(tt::Tt16 f) const;

 private:
  RewriteDb();

  struct Rec {
    enum class Kind : uint8_t { none, const0, leaf, gate };
    Kind kind{Kind::none};
    uint16_t fa{0}, fb{0};
    uint8_t ca{0}, cb{0}, oc{0};
    uint8_t leaf{0};
  };

  struct CanonEntry {
    uint16_t repr;
    uint8_t perm_id;
    uint8_t output_compl;
  };

  void insert(tt::Tt16 f, int cost, const Rec& rec);
  int fill(tt::Tt16 f);
  tt::Structure materialize(tt::Tt16 f) const;

  std::array<uint8_t, 65536> cost_{};
  std::array<Rec, 65536> rec_{};
  std::array<CanonEntry, 65536> canon_{};
  std::array<std::array<int, 4>, 24> perms_{};
  std::array<std::array<int, 4>, 24> inv_perms_{};
  std::unordered_map<uint16_t, tt::Structure> structures_;
};

}  // namespace aigforge

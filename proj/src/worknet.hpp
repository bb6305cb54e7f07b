/*!
  \file worknet.hpp
  \brief Mutable AND-graph with structural hashing for the rewriting passes
*/

#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "aigforge/aig.hpp"
#include "truthtab.hpp"

namespace aigforge {

/*! \brief In-place editable AND-graph used by rewrite, refactor and resub.
 *
 * Var 0 is the constant, vars 1..num_pis the inputs, AND nodes follow; new
 * nodes are appended at the end. A replaced node is marked dead and forwards
 * to its replacement literal; fanin reads resolve through the forwarding
 * map with path compression. Reference counts track resolved fanout edges
 * including output references, so fanout-free cones can be detected by
 * counting alone.
 */
class WorkNet {
 public:
  explicit WorkNet(const Aig& aig);

  uint32_t num_pis() const { return n_pis_; }
  uint32_t first_and() const { return n_pis_ + 1; }
  uint32_t var_bound() const { return static_cast<uint32_t>(fanin0_.size()); }
  size_t alive_ands() const { return n_alive_; }

  bool is_and(uint32_t var) const { return var > n_pis_ && var < fanin0_.size(); }
  bool is_alive(uint32_t var) const { return !dead_[var]; }
  uint32_t refs(uint32_t var) const { return refs_[var]; }

  /*! \brief Follows replacement forwarding; result references a live var. */
  Literal resolve(Literal l);

  Literal fanin0(uint32_t var);
  Literal fanin1(uint32_t var);

  /*! \brief Writes resolved fanins back to the node. */
  void normalize(uint32_t var);

  /*! \brief Hashed AND with constant/idempotence rules; appends on miss. */
  Literal strash_and(Literal a, Literal b);

  /*! \brief Raw hash probe for an ordered live pair; no rules applied. */
  std::optional<uint32_t> lookup(Literal a, Literal b) const;

  /*! \brief Nodes that die when `root` loses all references.
   *
   * Counting walk without mutation; never descends into `keep_alive` vars.
   * The root itself is first in the returned list.
   */
  std::vector<uint32_t> mffc(uint32_t root, const std::vector<uint32_t>& keep_alive);

  /*! \brief Kills the listed nodes, dropping their fanins' reference counts. */
  void kill(const std::vector<uint32_t>& victims);

  /*! \brief Forwards dead var `v` to `with`, transferring its references. */
  void commit(uint32_t v, Literal with);

  /*! \brief Resolved output literals. */
  std::vector<Literal> outputs();

  /*! \brief Rebuilds a clean Aig: strashed, swept, outputs in order. */
  Aig extract();

 private:
  uint32_t n_pis_{0};
  size_t n_alive_{0};
  std::vector<Literal> fanin0_;
  std::vector<Literal> fanin1_;
  std::vector<uint8_t> dead_;
  std::vector<uint32_t> refs_;
  std::vector<Literal> repl_;
  std::vector<uint64_t> key_;
  std::unordered_map<uint64_t, uint32_t> hash_;
  std::vector<Literal> pos_;
  std::string name_;
};

/*! \brief Outcome of fitting a replacement structure against the net. */
struct StructureFit {
  bool viable{false};  // false when the candidate would reference the replaced node
  bool noop{false};    // candidate resolves to the replaced node itself
  int added{0};        // fresh AND nodes the replacement would append
  bool root_real{false};
  Literal root{lit_false};  // meaningful when root_real
};

/*! \brief Counts the cost of instantiating `s` without mutating the net.
 *
 * Mirrors strash_and's folding rules and hash probing, except that hits on
 * `victims` (nodes that will die) are treated as misses. `leaves[i]` binds
 * structure leaf i to a resolved literal.
 */
StructureFit fit_structure(WorkNet& net, const tt::Structure& s,
                           const std::vector<Literal>& leaves, uint32_t replaced,
                           const std::vector<uint32_t>& victims);

/*! \brief Instantiates `s` through strash_and; returns the root literal. */
Literal build_structure(WorkNet& net, const tt::Structure& s,
                        const std::vector<Literal>& leaves);

/*! \brief Rebuild through a fresh builder: deduplicated and swept. */
Aig strash_clean(const Aig& aig);

}  // namespace aigforge

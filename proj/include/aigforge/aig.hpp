/*!
  \file aig.hpp
  \brief And-inverter graph with structural hashing
*/

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace aigforge {

/*! \brief Edge reference: node index shifted left once, LSB marks complementation.
 *
 * Node 0 is the constant-false node, so literal 0 is constant false and
 * literal 1 constant true.
 */
struct Literal {
  uint32_t value{0};

  constexpr Literal() = default;
  constexpr explicit Literal(uint32_t v) : value(v) {}

  static constexpr Literal from_var(uint32_t var, bool compl_ = false) {
    return Literal{(var << 1) | (compl_ ? 1u : 0u)};
  }

  constexpr uint32_t var() const { return value >> 1; }
  constexpr bool complemented() const { return (value & 1u) != 0; }

  constexpr Literal operator!() const { return Literal{value ^ 1u}; }
  constexpr Literal operator^(bool c) const { return Literal{value ^ (c ? 1u : 0u)}; }

  constexpr bool operator==(const Literal&) const = default;
  constexpr bool operator<(const Literal& o) const { return value < o.value; }
};

inline constexpr Literal lit_false{0};
inline constexpr Literal lit_true{1};

struct AndGate {
  Literal fanin0;
  Literal fanin1;
};

/*! \brief Combinational AIG.
 *
 * Node indices are dense: node 0 is the constant, nodes 1..num_pis() are
 * primary inputs, and gate i sits at node num_pis() + 1 + i. Gates are stored
 * in topological order; both fanins of a gate reference strictly smaller
 * node indices.
 */
struct Aig {
  uint32_t n_pis{0};
  std::vector<AndGate> gates;
  std::vector<Literal> outputs;
  std::string name;

  uint32_t num_pis() const { return n_pis; }
  uint32_t num_pos() const { return static_cast<uint32_t>(outputs.size()); }
  uint32_t num_ands() const { return static_cast<uint32_t>(gates.size()); }
  uint32_t num_nodes() const { return 1 + n_pis + num_ands(); }

  bool is_const(uint32_t var) const { return var == 0; }
  bool is_pi(uint32_t var) const { return var >= 1 && var <= n_pis; }
  bool is_and(uint32_t var) const { return var > n_pis && var < num_nodes(); }
  uint32_t and_var(uint32_t gate_index) const { return 1 + n_pis + gate_index; }
  uint32_t gate_index(uint32_t var) const { return var - n_pis - 1; }
  const AndGate& gate_of(uint32_t var) const { return gates[gate_index(var)]; }
};

struct AigStats {
  uint64_t nodes{0};
  uint32_t depth{0};
  uint32_t pis{0};
  uint32_t pos{0};

  bool operator==(const AigStats&) const = default;
};

/*! \brief Node count (ANDs only), depth in AND levels, and interface counts. */
AigStats stats(const Aig& aig);

/*! \brief Per-node AND level; constants and PIs are level 0. */
std::vector<uint32_t> levels(const Aig& aig);

/*! \brief Checks dense topological storage and fanin ordering. */
bool is_well_formed(const Aig& aig);

/*! \brief Removes gates unreachable from any output, preserving gate order. */
Aig sweep(const Aig& aig);

/*! \brief Structural equality: same interface, gates and outputs. */
bool structurally_equal(const Aig& a, const Aig& b);

/*! \brief Incremental AIG constructor with structural hashing.
 *
 * strash_and applies the constant and unit rules (x*0 = 0, x*1 = x, x*x = x,
 * x*!x = 0), orders fanins canonically and reuses an existing gate when one
 * with the same fanin pair exists.
 */
class AigBuilder {
public:
  AigBuilder() = default;
  explicit AigBuilder(uint32_t n_pis) {
    for (uint32_t i = 0; i < n_pis; ++i) add_input();
  }

  Literal add_input() {
    ++n_pis_;
    if (!gates_.empty()) throw std::logic_error("inputs must be added before gates");
    return Literal::from_var(n_pis_);
  }

  uint32_t num_pis() const { return n_pis_; }
  uint32_t num_ands() const { return static_cast<uint32_t>(gates_.size()); }
  Literal pi(uint32_t index) const { return Literal::from_var(1 + index); }

  Literal strash_and(Literal a, Literal b) {
    if (a.value > b.value) std::swap(a, b);
    if (a == lit_false) return lit_false;
    if (a == lit_true) return b;
    if (a == b) return a;
    if ((a.value ^ b.value) == 1u) return lit_false;
    const uint64_t key = (static_cast<uint64_t>(a.value) << 32) | b.value;
    if (auto it = strash_.find(key); it != strash_.end())
      return Literal::from_var(it->second);
    const uint32_t var = 1 + n_pis_ + static_cast<uint32_t>(gates_.size());
    gates_.push_back(AndGate{a, b});
    strash_.emplace(key, var);
    return Literal::from_var(var);
  }

  Literal strash_or(Literal a, Literal b) { return !strash_and(!a, !b); }

  void add_output(Literal f) { outputs_.push_back(f); }

  Aig build() const {
    Aig aig;
    aig.n_pis = n_pis_;
    aig.gates = gates_;
    aig.outputs = outputs_;
    return aig;
  }

private:
  uint32_t n_pis_{0};
  std::vector<AndGate> gates_;
  std::vector<Literal> outputs_;
  std::unordered_map<uint64_t, uint32_t> strash_;
};

}  // namespace aigforge

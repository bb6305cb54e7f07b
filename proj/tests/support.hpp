#pragma once

#include <cstdint>
#include <vector>

#include "aigforge/aig.hpp"

namespace aigforge::test {

// Reference evaluator: one pattern at a time, recursive over the DAG. Slow on
// purpose; the bit-parallel simulator is validated against it.
inline std::vector<bool> naive_eval(const Aig& aig, const std::vector<bool>& pi_values) {
  std::vector<int8_t> value(aig.num_nodes(), -1);
  value[0] = 0;
  for (uint32_t i = 0; i < aig.n_pis; ++i) value[1 + i] = pi_values[i] ? 1 : 0;
  auto eval_lit = [&](auto&& self, Literal l) -> bool {
    const uint32_t var = l.var();
    if (value[var] < 0) {
      const AndGate& g = aig.gate_of(var);
      const bool v = self(self, g.fanin0) && self(self, g.fanin1);
      value[var] = v ? 1 : 0;
    }
    return (value[var] != 0) != l.complemented();
  };
  std::vector<bool> out;
  out.reserve(aig.num_pos());
  for (const Literal po : aig.outputs) out.push_back(eval_lit(eval_lit, po));
  return out;
}

// Longest PI-to-PO path in AND nodes, recomputed by breadth-first relaxation
// over an explicit adjacency list (independent of levels()).
inline uint32_t bfs_depth(const Aig& aig) {
  std::vector<uint32_t> dist(aig.num_nodes(), 0);
  // Gates are stored topologically, so a forward sweep relaxes every edge.
  for (uint32_t i = 0; i < aig.num_ands(); ++i) {
    const AndGate& g = aig.gates[i];
    const uint32_t v = aig.and_var(i);
    for (const Literal f : {g.fanin0, g.fanin1})
      if (dist[f.var()] + 1 > dist[v]) dist[v] = dist[f.var()] + 1;
  }
  uint32_t depth = 0;
  for (const Literal po : aig.outputs)
    if (dist[po.var()] > depth) depth = dist[po.var()];
  return depth;
}

}  // namespace aigforge::test

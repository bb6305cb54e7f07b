#include "aigforge/aig.hpp"

#include <algorithm>

namespace aigforge {

std::vector<uint32_t> levels(const Aig& aig) {
  std::vector<uint32_t> lv(aig.num_nodes(), 0);
  for (uint32_t i = 0; i < aig.num_ands(); ++i) {
    const AndGate& g = aig.gates[i];
    lv[aig.and_var(i)] = 1 + std::max(lv[g.fanin0.var()], lv[g.fanin1.var()]);
  }
  return lv;
}

AigStats stats(const Aig& aig) {
  AigStats s;
  s.nodes = aig.num_ands();
  s.pis = aig.num_pis();
  s.pos = aig.num_pos();
  const auto lv = levels(aig);
  uint32_t depth = 0;
  for (const Literal po : aig.outputs) depth = std::max(depth, lv[po.var()]);
  s.depth = depth;
  return s;
}

bool is_well_formed(const Aig& aig) {
  const uint32_t n = aig.num_nodes();
  for (uint32_t i = 0; i < aig.num_ands(); ++i) {
    const AndGate& g = aig.gates[i];
    const uint32_t var = aig.and_var(i);
    if (g.fanin0.var() >= var || g.fanin1.var() >= var) return false;
    if (g.fanin0.var() >= n || g.fanin1.var() >= n) return false;
  }
  for (const Literal po : aig.outputs)
    if (po.var() >= n) return false;
  return true;
}

Aig sweep(const Aig& aig) {
  std::vector<bool> used(aig.num_nodes(), false);
  used[0] = true;
  for (uint32_t v = 1; v <= aig.n_pis; ++v) used[v] = true;
  for (const Literal po : aig.outputs) used[po.var()] = true;
  for (uint32_t i = aig.num_ands(); i-- > 0;) {
    const uint32_t var = aig.and_var(i);
    if (!used[var]) continue;
    used[aig.gates[i].fanin0.var()] = true;
    used[aig.gates[i].fanin1.var()] = true;
  }

  std::vector<uint32_t> remap(aig.num_nodes(), 0);
  for (uint32_t v = 0; v <= aig.n_pis; ++v) remap[v] = v;
  Aig out;
  out.n_pis = aig.n_pis;
  out.name = aig.name;
  for (uint32_t i = 0; i < aig.num_ands(); ++i) {
    const uint32_t var = aig.and_var(i);
    if (!used[var]) continue;
    const AndGate& g = aig.gates[i];
    remap[var] = out.and_var(out.num_ands());
    out.gates.push_back(AndGate{
        Literal::from_var(remap[g.fanin0.var()], g.fanin0.complemented()),
        Literal::from_var(remap[g.fanin1.var()], g.fanin1.complemented())});
  }
  out.outputs.reserve(aig.outputs.size());
  for (const Literal po : aig.outputs)
    out.outputs.push_back(Literal::from_var(remap[po.var()], po.complemented()));
  return out;
}

bool structurally_equal(const Aig& a, const Aig& b) {
  if (a.n_pis != b.n_pis || a.gates.size() != b.gates.size() ||
      a.outputs.size() != b.outputs.size())
    return false;
  for (size_t i = 0; i < a.gates.size(); ++i)
    if (a.gates[i].fanin0 != b.gates[i].fanin0 || a.gates[i].fanin1 != b.gates[i].fanin1)
      return false;
  for (size_t i = 0; i < a.outputs.size(); ++i)
    if (a.outputs[i] != b.outputs[i]) return false;
  return true;
}

}  // namespace aigforge

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "aigforge/transforms.hpp"
#include "worknet.hpp"

namespace aigforge {

namespace {

constexpr size_t kLeafCap = 10;
constexpr size_t kConeCap = 64;

struct Cone {
  std::vector<uint32_t> internal;  // root first
  std::vector<uint32_t> leaves;    // ascending vars
};

/*! \brief Grows the fanout-free cone of `root` up to the leaf cap.
 *
 * A leaf joins the cone when every one of its references comes from inside
 * the cone, so the whole cone dies together with the root.
 */
Cone grow_cone(WorkNet& net, uint32_t root) {
  Cone cone;
  cone.internal.push_back(root);
  std::unordered_map<uint32_t, uint32_t> cone_edges;
  const auto add_edge = [&](uint32_t x) { ++cone_edges[x]; };
  const auto is_internal = [&](uint32_t x) {
    return std::find(cone.internal.begin(), cone.internal.end(), x) != cone.internal.end();
  };

  add_edge(net.fanin0(root).var());
  add_edge(net.fanin1(root).var());
  for (const Literal f : {net.fanin0(root), net.fanin1(root)}) {
    if (std::find(cone.leaves.begin(), cone.leaves.end(), f.var()) == cone.leaves.end())
      cone.leaves.push_back(f.var());
  }

  while (cone.internal.size() < kConeCap) {
    uint32_t pick = 0;
    bool found = false;
    for (const uint32_t l : cone.leaves) {
      if (!net.is_and(l) || cone_edges[l] != net.refs(l)) continue;
      size_t fresh = 0;
      for (const Literal f : {net.fanin0(l), net.fanin1(l)}) {
        const uint32_t x = f.var();
        if (!is_internal(x) &&
            std::find(cone.leaves.begin(), cone.leaves.end(), x) == cone.leaves.end())
          ++fresh;
      }
      if (net.fanin0(l).var() == net.fanin1(l).var() && fresh) fresh = 1;
      if (cone.leaves.size() - 1 + fresh > kLeafCap) continue;
      if (!found || l > pick) {
        pick = l;
        found = true;
      }
    }
    if (!found) break;
    cone.leaves.erase(std::find(cone.leaves.begin(), cone.leaves.end(), pick));
    cone.internal.push_back(pick);
    for (const Literal f : {net.fanin0(pick), net.fanin1(pick)}) {
      const uint32_t x = f.var();
      add_edge(x);
      if (!is_internal(x) &&
          std::find(cone.leaves.begin(), cone.leaves.end(), x) == cone.leaves.end())
        cone.leaves.push_back(x);
    }
  }
  std::sort(cone.leaves.begin(), cone.leaves.end());
  return cone;
}

}  // namespace

Aig refactor(const Aig& input, bool zero_gain) {
  const Aig aig = strash_clean(input);
  if (aig.num_ands() == 0) return aig;

  WorkNet net(aig);
  const uint32_t bound = net.var_bound();

  for (uint32_t v = net.first_and(); v < bound; ++v) {
    if (!net.is_alive(v)) continue;
    net.normalize(v);

    const Cone cone = grow_cone(net, v);
    if (cone.internal.size() < 2) continue;
    const int n_vars = static_cast<int>(cone.leaves.size());

    // Cone truth table over its leaves.
    std::unordered_map<uint32_t, tt::Table> tables;
    std::vector<tt::Table> leaf_tables;
    for (int i = 0; i < n_vars; ++i) {
      leaf_tables.push_back(tt::make_proj(i, n_vars));
      tables.emplace(cone.leaves[i], leaf_tables.back());
    }
    std::vector<uint32_t> stack{v};
    while (!stack.empty()) {
      const uint32_t u = stack.back();
      if (tables.count(u)) {
        stack.pop_back();
        continue;
      }
      const Literal f0 = net.fanin0(u);
      const Literal f1 = net.fanin1(u);
      bool ready = true;
      for (const Literal f : {f0, f1}) {
        if (!tables.count(f.var())) {
          stack.push_back(f.var());
          ready = false;
        }
      }
      if (!ready) continue;
      tt::Table t0 = tables.at(f0.var());
      if (f0.complemented()) t0 = tt::invert(std::move(t0));
      tt::Table t1 = tables.at(f1.var());
      if (f1.complemented()) t1 = tt::invert(std::move(t1));
      tables.emplace(u, tt::and_tt(t0, t1));
      stack.pop_back();
    }
    const tt::Table& f = tables.at(v);

    const std::vector<tt::Cube> cover = tt::isop(f, f, n_vars);
    const tt::Structure s = tt::factor_cover(cover, n_vars);
    if (tt::eval_structure(s, leaf_tables, n_vars) != f) continue;

    std::vector<Literal> leaf_lits;
    leaf_lits.reserve(cone.leaves.size());
    for (const uint32_t l : cone.leaves) leaf_lits.push_back(Literal::from_var(l, false));

    std::vector<uint32_t> keep;
    for (const int idx : tt::structure_leaves(s)) keep.push_back(cone.leaves[idx]);

    std::vector<uint32_t> victims = net.mffc(v, keep);
    const StructureFit fit = fit_structure(net, s, leaf_lits, v, victims);
    if (!fit.viable || fit.noop) continue;
    const int gain = static_cast<int>(victims.size()) - fit.added;
    if (gain < 0 || (gain == 0 && !zero_gain)) continue;

    net.kill(victims);
    const Literal root = build_structure(net, s, leaf_lits);
    net.commit(v, root);
  }
  return net.extract();
}

}  // namespace aigforge

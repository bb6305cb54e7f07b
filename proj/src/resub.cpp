#include <algorithm>
#include <unordered_map>
#include <vector>

#include "aigforge/transforms.hpp"
#include "worknet.hpp"

namespace aigforge {

namespace {

constexpr size_t kLeafCap = 12;
constexpr size_t kVolumeCap = 40;
constexpr size_t kDivisorCap = 48;

struct Window {
  std::vector<uint32_t> internal;  // root first
  std::vector<uint32_t> leaves;    // ascending vars
};

/*! \brief Grows a transitive-fanin window below `root`.
 *
 * Leaves expand reconvergence-first (fewest fresh leaves), bounded by the
 * leaf and volume caps so window truth tables stay small.
 */
Window grow_window(WorkNet& net, uint32_t root) {
  Window w;
  w.internal.push_back(root);
  const auto member = [](const std::vector<uint32_t>& xs, uint32_t x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
  };
  for (const Literal f : {net.fanin0(root), net.fanin1(root)}) {
    if (!member(w.leaves, f.var())) w.leaves.push_back(f.var());
  }

  while (w.internal.size() < kVolumeCap) {
    uint32_t pick = 0;
    int pick_fresh = 0;
    bool found = false;
    for (const uint32_t l : w.leaves) {
      if (!net.is_and(l)) continue;
      int fresh = 0;
      uint32_t f0 = net.fanin0(l).var();
      uint32_t f1 = net.fanin1(l).var();
      if (!member(w.internal, f0) && !member(w.leaves, f0)) ++fresh;
      if (f1 != f0 && !member(w.internal, f1) && !member(w.leaves, f1)) ++fresh;
      if (w.leaves.size() - 1 + fresh > kLeafCap) continue;
      if (!found || fresh < pick_fresh || (fresh == pick_fresh && l > pick)) {
        pick = l;
        pick_fresh = fresh;
        found = true;
      }
    }
    if (!found) break;
    w.leaves.erase(std::find(w.leaves.begin(), w.leaves.end(), pick));
    w.internal.push_back(pick);
    for (const Literal f : {net.fanin0(pick), net.fanin1(pick)}) {
      const uint32_t x = f.var();
      if (!member(w.internal, x) && !member(w.leaves, x)) w.leaves.push_back(x);
    }
  }
  std::sort(w.leaves.begin(), w.leaves.end());
  return w;
}

enum class Match { none, direct, inverted };

Match compare_tables(const tt::Table& h, const tt::Table& g) {
  bool direct = true, inverted = true;
  for (size_t i = 0; i < g.size() && (direct || inverted); ++i) {
    if (h[i] != g[i]) direct = false;
    if (h[i] != ~g[i]) inverted = false;
  }
  if (direct) return Match::direct;
  if (inverted) return Match::inverted;
  return Match::none;
}

}  // namespace

Aig resub(const Aig& input, bool zero_gain) {
  const Aig aig = strash_clean(input);
  if (aig.num_ands() == 0) return aig;

  WorkNet net(aig);
  const uint32_t bound = net.var_bound();

  // Epoch-stamped membership flags for the per-node divisor sweep.
  std::vector<uint32_t> mark;
  uint32_t epoch = 0;

  for (uint32_t v = net.first_and(); v < bound; ++v) {
    if (!net.is_alive(v)) continue;
    net.normalize(v);

    const Window w = grow_window(net, v);
    const int n_vars = static_cast<int>(w.leaves.size());

    std::unordered_map<uint32_t, tt::Table> tables;
    for (int i = 0; i < n_vars; ++i) tables.emplace(w.leaves[i], tt::make_proj(i, n_vars));
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
    const tt::Table g = tables.at(v);

    std::vector<uint32_t> divisors;
    for (const uint32_t x : w.leaves) divisors.push_back(x);
    for (const uint32_t x : w.internal)
      if (x != v) divisors.push_back(x);
    std::sort(divisors.begin(), divisors.end());
    if (divisors.size() > kDivisorCap) divisors.resize(kDivisorCap);

    // Side divisors: nodes outside the window whose fanins are already
    // simulated and independent of v. Their cones stay within the tabled
    // region, so they cannot lie in the fanout of v and are safe to
    // substitute without forming a cycle.
    ++epoch;
    mark.resize(net.var_bound(), 0);
    for (const auto& kv : tables) mark[kv.first] = epoch;
    for (uint32_t u = net.first_and(); u < bound && divisors.size() < kDivisorCap; ++u) {
      if (!net.is_alive(u) || mark[u] == epoch) continue;
      const Literal f0 = net.fanin0(u);
      const Literal f1 = net.fanin1(u);
      if (f0.var() == v || f1.var() == v) continue;
      if (mark[f0.var()] != epoch || mark[f1.var()] != epoch) continue;
      tt::Table t0 = tables.at(f0.var());
      if (f0.complemented()) t0 = tt::invert(std::move(t0));
      tt::Table t1 = tables.at(f1.var());
      if (f1.complemented()) t1 = tt::invert(std::move(t1));
      tables.emplace(u, tt::and_tt(t0, t1));
      mark[u] = epoch;
      divisors.push_back(u);
    }

    bool replaced = false;

    // Zero-divisor: the node duplicates an existing function.
    for (const uint32_t d : divisors) {
      const Match m = compare_tables(tables.at(d), g);
      if (m == Match::none) continue;
      const std::vector<uint32_t> victims = net.mffc(v, {d});
      net.kill(victims);
      net.commit(v, Literal::from_var(d, m == Match::inverted));
      replaced = true;
      break;
    }
    if (replaced) continue;

    // One-divisor: an AND of two window functions matches.
    for (size_t j = 1; j < divisors.size() && !replaced; ++j) {
      for (size_t i = 0; i < j && !replaced; ++i) {
        const tt::Table& ti = tables.at(divisors[i]);
        const tt::Table& tj = tables.at(divisors[j]);
        for (int pol = 0; pol < 4 && !replaced; ++pol) {
          tt::Table h(g.size());
          for (size_t wi = 0; wi < g.size(); ++wi) {
            const tt::Word a = (pol & 1) ? ~ti[wi] : ti[wi];
            const tt::Word b = (pol & 2) ? ~tj[wi] : tj[wi];
            h[wi] = a & b;
          }
          const Match m = compare_tables(h, g);
          if (m == Match::none) continue;

          tt::Structure s;
          const int32_t a = tt::make_op(tt::OpKind::leaf, 0, (pol & 1) != 0);
          const int32_t b = tt::make_op(tt::OpKind::leaf, 1, (pol & 2) != 0);
          s.root = tt::op_flip(tt::structure_and(s, a, b), m == Match::inverted);

          const std::vector<Literal> leaf_lits = {Literal::from_var(divisors[i], false),
                                                  Literal::from_var(divisors[j], false)};
          std::vector<uint32_t> victims = net.mffc(v, {divisors[i], divisors[j]});
          const StructureFit fit = fit_structure(net, s, leaf_lits, v, victims);
          if (!fit.viable || fit.noop) continue;
          const int gain = static_cast<int>(victims.size()) - fit.added;
          if (gain < 0 || (gain == 0 && !zero_gain)) continue;

          net.kill(victims);
          const Literal root = build_structure(net, s, leaf_lits);
          net.commit(v, root);
          replaced = true;
        }
      }
    }
  }
  return net.extract();
}

}  // namespace aigforge

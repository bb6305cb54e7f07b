#include <algorithm>
#include <array>
#include <vector>

#include "aigforge/transforms.hpp"
#include "rewrite_db.hpp"
#include "worknet.hpp"

namespace aigforge {

namespace {

constexpr size_t kMaxCuts = 8;  // merged cuts kept per node, plus the trivial cut

struct Cut {
  std::array<uint32_t, 4> leaves{};  // ascending, first n valid
  uint8_t n{0};
  tt::Tt16 tt{0};  // over leaf positions; unused positions replicate
};

Cut trivial_cut(uint32_t var) {
  Cut c;
  c.leaves[0] = var;
  c.n = 1;
  c.tt = tt::kProj4[0];
  return c;
}

/*! \brief Re-expresses `t` from `from`'s leaf positions inside `to`'s. */
tt::Tt16 expand_tt(tt::Tt16 t, const Cut& from, const Cut& to) {
  std::array<int, 4> pos{};
  for (int i = 0; i < from.n; ++i) {
    const auto* begin = to.leaves.data();
    pos[i] = static_cast<int>(std::find(begin, begin + to.n, from.leaves[i]) - begin);
  }
  tt::Tt16 r = 0;
  for (int m = 0; m < 16; ++m) {
    int src = 0;
    for (int i = 0; i < from.n; ++i)
      if (m & (1 << pos[i])) src |= 1 << i;
    if (t & (1 << src)) r |= static_cast<tt::Tt16>(1 << m);
  }
  return r;
}

bool merge_leaves(const Cut& a, const Cut& b, Cut& out) {
  int i = 0, j = 0, n = 0;
  while (i < a.n || j < b.n) {
    uint32_t next;
    if (j >= b.n || (i < a.n && a.leaves[i] <= b.leaves[j])) {
      next = a.leaves[i++];
      if (j < b.n && b.leaves[j] == next) ++j;
    } else {
      next = b.leaves[j++];
    }
    if (n == 4) return false;
    out.leaves[n++] = next;
  }
  out.n = static_cast<uint8_t>(n);
  return true;
}

std::vector<Cut> merge_cuts(const std::vector<Cut>& c0, bool compl0, const std::vector<Cut>& c1,
                            bool compl1, uint32_t var) {
  std::vector<Cut> merged;
  for (const Cut& a : c0) {
    for (const Cut& b : c1) {
      Cut u;
      if (!merge_leaves(a, b, u)) continue;
      const tt::Tt16 ta = expand_tt(a.tt, a, u) ^ (compl0 ? 0xFFFF : 0);
      const tt::Tt16 tb = expand_tt(b.tt, b, u) ^ (compl1 ? 0xFFFF : 0);
      u.tt = ta & tb;
      const auto same_leaves = [&](const Cut& c) {
        return c.n == u.n && std::equal(c.leaves.begin(), c.leaves.begin() + c.n, u.leaves.begin());
      };
      if (std::none_of(merged.begin(), merged.end(), same_leaves)) merged.push_back(u);
    }
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Cut& a, const Cut& b) { return a.n < b.n; });
  if (merged.size() > kMaxCuts) merged.resize(kMaxCuts);
  std::vector<Cut> cuts;
  cuts.reserve(merged.size() + 1);
  cuts.push_back(trivial_cut(var));
  cuts.insert(cuts.end(), merged.begin(), merged.end());
  return cuts;
}

}  // namespace

Aig rewrite(const Aig& input, bool zero_gain) {
  const Aig aig = strash_clean(input);
  if (aig.num_ands() == 0) return aig;

  WorkNet net(aig);
  const RewriteDb& db = RewriteDb::instance();
  const uint32_t bound = net.var_bound();

  std::vector<tt::Table> proj4;
  for (int i = 0; i < 4; ++i) proj4.push_back(tt::make_proj(i, 4));

  std::vector<std::vector<Cut>> cuts(bound);
  for (uint32_t v = 1; v <= net.num_pis(); ++v) cuts[v] = {trivial_cut(v)};
  for (uint32_t v = net.first_and(); v < bound; ++v) {
    const Literal f0 = net.fanin0(v);
    const Literal f1 = net.fanin1(v);
    cuts[v] = merge_cuts(cuts[f0.var()], f0.complemented(), cuts[f1.var()], f1.complemented(), v);
  }

  struct Candidate {
    int gain{-1};
    tt::Structure structure;
    std::vector<Literal> leaf_lits;
    std::vector<uint32_t> victims;
  };

  for (uint32_t v = net.first_and(); v < bound; ++v) {
    if (!net.is_alive(v)) continue;
    net.normalize(v);

    Candidate best;
    bool have = false;
    for (size_t ci = 1; ci < cuts[v].size(); ++ci) {
      const Cut& cut = cuts[v][ci];
      tt::Structure s = db.structure_for(cut.tt);
      if (tt::eval_structure(s, proj4, 4) != tt::Table{static_cast<tt::Word>(cut.tt) *
                                                       0x0001000100010001ull})
        continue;

      std::vector<Literal> leaf_lits(4, lit_false);
      for (int i = 0; i < cut.n; ++i)
        leaf_lits[i] = net.resolve(Literal::from_var(cut.leaves[i], false));

      std::vector<uint32_t> keep;
      for (const int idx : tt::structure_leaves(s)) {
        const uint32_t lv = leaf_lits[idx].var();
        if (std::find(keep.begin(), keep.end(), lv) == keep.end()) keep.push_back(lv);
      }
      std::vector<uint32_t> victims = net.mffc(v, keep);
      const StructureFit fit = fit_structure(net, s, leaf_lits, v, victims);
      if (!fit.viable || fit.noop) continue;
      const int gain = static_cast<int>(victims.size()) - fit.added;
      if (gain < 0 || (gain == 0 && !zero_gain)) continue;
      if (!have || gain > best.gain) {
        best = {gain, std::move(s), std::move(leaf_lits), std::move(victims)};
        have = true;
      }
    }
    if (!have) continue;
    net.kill(best.victims);
    const Literal root = build_structure(net, best.structure, best.leaf_lits);
    net.commit(v, root);
  }
  return net.extract();
}

}  // namespace aigforge

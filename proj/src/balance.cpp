#include <algorithm>
#include <queue>
#include <vector>

#include "aigforge/transforms.hpp"
#include "worknet.hpp"

namespace aigforge {

namespace {

constexpr Literal kUnset{0xFFFFFFFFu};

}  // namespace

Aig balance(const Aig& input) {
  const Aig aig = strash_clean(input);
  const size_t n_vars = size_t{1} + aig.n_pis + aig.num_ands();

  std::vector<uint32_t> fanout(n_vars, 0);
  std::vector<uint8_t> compl_used(n_vars, 0);
  std::vector<uint8_t> po_driven(n_vars, 0);
  for (const AndGate& g : aig.gates) {
    for (const Literal f : {g.fanin0, g.fanin1}) {
      ++fanout[f.var()];
      if (f.complemented()) compl_used[f.var()] = 1;
    }
  }
  for (const Literal po : aig.outputs) {
    ++fanout[po.var()];
    po_driven[po.var()] = 1;
    if (po.complemented()) compl_used[po.var()] = 1;
  }

  // A node is rebuilt as its own cone root when it is visible from outside
  // the cone: output-driven, shared, or consumed through a complemented edge.
  const auto is_root = [&](uint32_t var) {
    return aig.is_and(var) && (po_driven[var] || fanout[var] >= 2 || compl_used[var]);
  };

  AigBuilder b;
  for (uint32_t i = 0; i < aig.n_pis; ++i) b.add_input();
  std::vector<Literal> new_lit(n_vars, kUnset);
  new_lit[0] = lit_false;
  for (uint32_t i = 1; i <= aig.n_pis; ++i) new_lit[i] = Literal::from_var(i, false);

  std::vector<uint32_t> level(aig.n_pis + 1, 0);
  const auto bal_and = [&](Literal x, Literal y) {
    const uint32_t before = b.num_ands();
    const Literal r = b.strash_and(x, y);
    if (b.num_ands() > before)
      level.push_back(1 + std::max(level[x.var()], level[y.var()]));
    return r;
  };

  std::vector<Literal> stack, leaves;
  const auto collect_leaves = [&](uint32_t root) {
    leaves.clear();
    stack.assign({aig.gate_of(root).fanin0, aig.gate_of(root).fanin1});
    while (!stack.empty()) {
      const Literal l = stack.back();
      stack.pop_back();
      if (!l.complemented() && aig.is_and(l.var()) && !is_root(l.var())) {
        stack.push_back(aig.gate_of(l.var()).fanin0);
        stack.push_back(aig.gate_of(l.var()).fanin1);
      } else {
        leaves.push_back(l);
      }
    }
  };

  using Entry = std::pair<uint32_t, uint32_t>;  // (level, literal value)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;

  for (uint32_t i = 0; i < aig.num_ands(); ++i) {
    const uint32_t var = aig.and_var(i);
    if (!is_root(var)) continue;
    collect_leaves(var);

    std::vector<Literal> mapped;
    mapped.reserve(leaves.size());
    for (const Literal l : leaves) mapped.push_back(new_lit[l.var()] ^ l.complemented());
    std::sort(mapped.begin(), mapped.end(),
              [](Literal a, Literal c) { return a.value < c.value; });

    bool zero = false;
    std::vector<Literal> uniq;
    for (const Literal l : mapped) {
      if (l == lit_false) {
        zero = true;
        break;
      }
      if (l == lit_true) continue;
      if (!uniq.empty() && uniq.back() == l) continue;
      if (!uniq.empty() && uniq.back().var() == l.var()) {
        zero = true;  // x and its complement
        break;
      }
      uniq.push_back(l);
    }

    Literal result;
    if (zero) {
      result = lit_false;
    } else if (uniq.empty()) {
      result = lit_true;
    } else {
      for (const Literal l : uniq) heap.emplace(level[l.var()], l.value);
      while (heap.size() > 1) {
        const Literal x{heap.top().second};
        heap.pop();
        const Literal y{heap.top().second};
        heap.pop();
        const Literal r = bal_and(x, y);
        heap.emplace(level[r.var()], r.value);
      }
      result = Literal{heap.top().second};
      heap.pop();
    }
    new_lit[var] = result;
  }

  for (const Literal po : aig.outputs) b.add_output(new_lit[po.var()] ^ po.complemented());
  Aig out = sweep(b.build());
  out.name = aig.name;
  return out;
}

}  // namespace aigforge

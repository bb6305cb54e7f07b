#include "aigforge/random_circuit.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

namespace aigforge {

Aig random_aig(const RandomAigSpec& spec) {
  if (spec.num_pis < 2) throw std::invalid_argument("random_aig: need at least 2 PIs");
  if (spec.num_pos < 1) throw std::invalid_argument("random_aig: need at least 1 PO");
  std::mt19937_64 rng(spec.seed);

  AigBuilder builder(spec.num_pis);
  std::vector<Literal> pool;
  pool.reserve(spec.num_pis + spec.target_ands + 16);
  for (uint32_t i = 0; i < spec.num_pis; ++i) pool.push_back(builder.pi(i));

  // Fanin choice favors recent nodes so the circuit grows in layers instead
  // of collapsing into a flat two-level net; an occasional uniform pick adds
  // long reconvergent arcs like the skip connections of real netlists.
  std::geometric_distribution<size_t> recency(0.04);
  auto pick = [&]() -> Literal {
    const size_t back = (rng() % 8 == 0) ? rng() % pool.size()
                                         : std::min(recency(rng), pool.size() - 1);
    const Literal l = pool[pool.size() - 1 - back];
    return l ^ (rng() & 1);
  };

  // Deep towers of pure ANDs drift toward constants, so the growth mixes in
  // parity and choice composites that keep signal activity near one half.
  // The AND/OR share still leaves redundancy for the optimizers to harvest.
  // Gadget inputs are polarity-normalized so trivially complementary twins
  // hash together instead of inflating the node count.
  auto xor_of = [&](Literal a, Literal b) {
    const bool out_compl = a.complemented() != b.complemented();
    a = a ^ a.complemented();
    b = b ^ b.complemented();
    const Literal r =
        !builder.strash_and(!builder.strash_and(a, !b), !builder.strash_and(!a, b));
    return r ^ out_compl;
  };
  auto mux_of = [&](Literal s, Literal a, Literal b) {
    if (s.complemented()) {
      s = !s;
      std::swap(a, b);
    }
    return !builder.strash_and(!builder.strash_and(s, a), !builder.strash_and(!s, b));
  };

  size_t stall = 0;
  while (builder.num_ands() < spec.target_ands && stall < 8 * spec.target_ands + 64) {
    const uint32_t before = builder.num_ands();
    const Literal a = pick();
    const Literal b = pick();
    Literal r;
    const uint32_t roll = rng() % 100;
    if (roll < 30) {
      r = builder.strash_and(a, b);
    } else if (roll < 50) {
      r = builder.strash_or(a, b);
    } else if (roll < 80) {
      r = xor_of(a, b);
    } else if (roll < 95) {
      r = mux_of(pick(), a, b);
    } else {
      const Literal c = pick();  // majority of three
      r = builder.strash_or(builder.strash_and(a, b),
                            builder.strash_and(c, builder.strash_or(a, b)));
    }
    if (builder.num_ands() > before) {
      pool.push_back(r);
      stall = 0;
    } else {
      ++stall;
    }
  }

  // Fold every currently unreferenced head into the output cones so little
  // or nothing is swept away.
  const Aig grown = builder.build();
  std::vector<uint32_t> fanout(grown.num_nodes(), 0);
  for (const AndGate& g : grown.gates) {
    ++fanout[g.fanin0.var()];
    ++fanout[g.fanin1.var()];
  }
  std::vector<Literal> heads;
  for (const Literal l : pool) {
    if (l.var() <= spec.num_pis) continue;
    if (fanout[l.var()] > 0) continue;
    heads.push_back(l);
  }
  if (heads.empty()) heads.push_back(pool.back());
  std::shuffle(heads.begin(), heads.end(), rng);
  while (heads.size() > spec.num_pos) {
    const Literal a = heads.back();
    heads.pop_back();
    const Literal b = heads.back();
    heads.pop_back();
    heads.push_back(builder.strash_and(a ^ (rng() & 1), b ^ (rng() & 1)));
  }
  while (heads.size() < spec.num_pos) heads.push_back(heads[rng() % heads.size()] ^ 1);
  for (const Literal h : heads) builder.add_output(h ^ (rng() & 1));

  Aig out = sweep(builder.build());
  out.name = "rand" + std::to_string(spec.seed);
  return out;
}

}  // namespace aigforge

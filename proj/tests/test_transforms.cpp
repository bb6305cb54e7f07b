#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aigforge/aig.hpp"
#include "aigforge/aiger.hpp"
#include "aigforge/random_circuit.hpp"
#include "aigforge/recipe.hpp"
#include "aigforge/simulate.hpp"
#include "aigforge/transforms.hpp"
#include "support.hpp"

using namespace aigforge;

namespace {

Aig raw_aig(uint32_t n_pis, const std::vector<std::pair<uint32_t, uint32_t>>& gate_lits,
            const std::vector<uint32_t>& output_lits) {
  Aig aig;
  aig.n_pis = n_pis;
  for (const auto& [a, b] : gate_lits) aig.gates.push_back({Literal{a}, Literal{b}});
  for (const uint32_t o : output_lits) aig.outputs.push_back(Literal{o});
  REQUIRE(is_well_formed(aig));
  return aig;
}

bool equivalent(const Aig& a, const Aig& b) {
  EquivOptions opt;
  opt.mode = a.num_pis() <= 14 ? EquivOptions::Mode::exhaustive : EquivOptions::Mode::random;
  opt.seed = 1;
  opt.n_vectors = 10000;
  const EquivVerdict v = check_equivalence(a, b, opt);
  return opt.mode == EquivOptions::Mode::exhaustive ? v.is_equivalent() : !v.cex.has_value();
}

}  // namespace

TEST_CASE("balance reduces a skewed chain to optimal depth") {
  AigBuilder b(4);
  Literal f = b.pi(0);
  for (int i = 1; i < 4; ++i) f = b.strash_and(f, b.pi(i));
  b.add_output(f);
  const Aig chain = b.build();
  REQUIRE(test::bfs_depth(chain) == 3);

  const Aig out = balance(chain);
  CHECK(is_well_formed(out));
  CHECK(test::bfs_depth(out) == 2);
  CHECK(stats(out).nodes == 3);
  CHECK(equivalent(chain, out));
}

TEST_CASE("balance keeps the stats of an already balanced tree") {
  AigBuilder b(4);
  b.add_output(b.strash_and(b.strash_and(b.pi(0), b.pi(1)), b.strash_and(b.pi(2), b.pi(3))));
  const Aig tree = b.build();

  const Aig once = balance(tree);
  CHECK(stats(once) == stats(tree));
  CHECK(structurally_equal(balance(once), once));
}

TEST_CASE("balance on random networks: equivalent, depth never increases") {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    const Aig aig = random_aig({.num_pis = 12, .num_pos = 6, .target_ands = 200, .seed = seed});
    const Aig out = balance(aig);
    CHECK(is_well_formed(out));
    CHECK(test::bfs_depth(out) <= test::bfs_depth(aig));
    CHECK(equivalent(aig, out));
  }
}

TEST_CASE("rewrite collapses duplicated structure to one node") {
  // a AND b built twice, then ANDed together: three gates for one function.
  const Aig redundant = raw_aig(2, {{2, 4}, {2, 4}, {6, 8}}, {10});
  const Aig out = rewrite(redundant);
  CHECK(stats(out).nodes == 1);
  CHECK(equivalent(redundant, out));
}

TEST_CASE("rewrite shrinks a multiplexer built with slack") {
  // s ? a : b as three gates plus a redundant self-conjunction.
  const Aig mux = raw_aig(3, {{2, 4}, {3, 6}, {9, 11}, {12, 12}}, {15});
  const Aig out = rewrite(mux);
  CHECK(stats(out).nodes <= 3);
  CHECK(equivalent(mux, out));
}

TEST_CASE("rewrite without zero gain fixpoints on minimal structures") {
  AigBuilder b(3);
  b.add_output(b.strash_and(b.strash_and(b.pi(0), b.pi(1)), b.pi(2)));
  const Aig minimal = b.build();
  const Aig out = rewrite(minimal, false);
  CHECK(stats(out).nodes == 2);
  CHECK(equivalent(minimal, out));
}

TEST_CASE("refactor rebuilds a redundant cone") {
  // a*b*c computed through four gates: (a*b)*c AND (b*c).
  const Aig cone = raw_aig(3, {{2, 4}, {4, 6}, {8, 6}, {12, 10}}, {14});
  REQUIRE(stats(cone).nodes == 4);
  const Aig out = refactor(cone);
  CHECK(stats(out).nodes == 2);
  CHECK(equivalent(cone, out));
}

TEST_CASE("refactor fixpoints on an ISOP-minimal cone") {
  AigBuilder b(4);
  b.add_output(b.strash_and(b.strash_and(b.pi(0), b.pi(1)), b.strash_and(b.pi(2), b.pi(3))));
  const Aig minimal = b.build();
  const Aig out = refactor(minimal, false);
  CHECK(stats(out).nodes == stats(minimal).nodes);
  CHECK(equivalent(minimal, out));
}

TEST_CASE("refactor applied twenty times never raises the node count") {
  const Aig aig = random_aig({.num_pis = 10, .num_pos = 5, .target_ands = 300, .seed = 3});
  const Recipe recipe(20, Transform::refactor);
  const SynthesisResult r = apply_recipe(aig, recipe);
  REQUIRE(r.trajectory.size() == 21);
  for (size_t k = 1; k < r.trajectory.size(); ++k)
    CHECK(r.trajectory[k].nodes <= r.trajectory[k - 1].nodes);
  CHECK(equivalent(aig, r.final));
}

TEST_CASE("resub merges structurally distinct equivalents") {
  AigBuilder b(3);
  const Literal x = b.strash_and(b.strash_and(b.pi(0), b.pi(1)), b.pi(2));
  const Literal y = b.strash_and(b.pi(0), b.strash_and(b.pi(1), b.pi(2)));
  b.add_output(x);
  b.add_output(y);
  const Aig two_ways = b.build();
  REQUIRE(stats(two_ways).nodes == 4);

  const Aig out = resub(two_ways);
  // One implementation substitutes for the other; its two-node MFFC is freed.
  CHECK(stats(out).nodes == 2);
  CHECK(equivalent(two_ways, out));
}

TEST_CASE("resub fixpoints without functional redundancy") {
  AigBuilder b(4);
  const Literal f = b.strash_and(b.pi(0), b.pi(1));
  const Literal g = b.strash_and(b.pi(2), b.pi(3));
  b.add_output(b.strash_and(f, g));
  b.add_output(f);
  const Aig irredundant = b.build();
  const Aig out = resub(irredundant);
  CHECK(stats(out) == stats(irredundant));
  CHECK(equivalent(irredundant, out));
}

TEST_CASE("resub finds no counterexample over a random corpus") {
  EquivOptions opt;
  opt.mode = EquivOptions::Mode::random;
  opt.seed = 1;
  opt.n_vectors = 10000;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const Aig aig = random_aig({.num_pis = 16, .num_pos = 8, .target_ands = 150, .seed = seed});
    const Aig out = resub(aig);
    CHECK(stats(out).nodes <= stats(aig).nodes);
    CHECK_FALSE(check_equivalence(aig, out, opt).cex.has_value());
  }
}

TEST_CASE("every transform preserves the function exactly") {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    const Aig aig = random_aig(
        {.num_pis = 4 + static_cast<uint32_t>(seed), .num_pos = 4, .target_ands = 120, .seed = seed + 50});
    const AigStats before = stats(aig);
    const uint32_t depth_before = test::bfs_depth(aig);
    for (const Transform t : all_transforms) {
      const Aig out = apply_transform(aig, t);
      CHECK(is_well_formed(out));
      CHECK(equivalent(aig, out));
      if (t == Transform::balance)
        CHECK(test::bfs_depth(out) <= depth_before);
      else
        CHECK(stats(out).nodes <= before.nodes);
      CHECK(stats(out).pis == before.pis);
      CHECK(stats(out).pos == before.pos);
    }
  }
}

TEST_CASE("transforms handle degenerate outputs") {
  // Constant POs, a PI alias, a gate that folds to constant false, a
  // complemented gate PO and a duplicated PO.
  const Aig odd = raw_aig(2, {{2, 3}, {2, 4}}, {0, 1, 2, 5, 6, 8, 8, 9});
  for (const Transform t : all_transforms) {
    const Aig out = apply_transform(odd, t);
    CHECK(is_well_formed(out));
    CHECK(out.num_pos() == odd.num_pos());
    CHECK(equivalent(odd, out));
  }
}

TEST_CASE("apply_recipe records one stats entry per step") {
  AigBuilder b(6);
  Literal f = b.pi(0);
  for (int i = 1; i < 6; ++i) f = b.strash_and(f, b.pi(i));
  b.add_output(f);
  const Aig chain = b.build();

  const Recipe recipe(20, Transform::balance);
  const SynthesisResult r = apply_recipe(chain, recipe);
  REQUIRE(r.trajectory.size() == 21);
  CHECK(r.trajectory[0] == stats(chain));
  CHECK(r.trajectory[1].depth == 3);  // ceil(log2(6))
  for (size_t k = 2; k < r.trajectory.size(); ++k) CHECK(r.trajectory[k] == r.trajectory[1]);
  CHECK(r.wall_time >= 0.0);
  CHECK(equivalent(chain, r.final));
}

TEST_CASE("the resyn2 seed recipe never increases the node count") {
  const Aig aig = random_aig({.num_pis = 12, .num_pos = 8, .target_ands = 500, .seed = 9});
  const SynthesisResult r = apply_recipe(aig, resyn2_seed(20));
  REQUIRE(r.trajectory.size() == 21);
  for (size_t k = 1; k < r.trajectory.size(); ++k)
    CHECK(r.trajectory[k].nodes <= r.trajectory[k - 1].nodes);
  CHECK(qor(r) <= stats(aig).nodes);
  CHECK(equivalent(aig, r.final));
}

TEST_CASE("any recipe on the empty network yields zeros") {
  const Aig empty;
  const SynthesisResult r = apply_recipe(empty, parse_recipe("balance; rewrite -z; resub"));
  CHECK(r.final.num_nodes() == 1);
  CHECK(r.final.num_pos() == 0);
  REQUIRE(r.trajectory.size() == 4);
  for (const AigStats& s : r.trajectory) CHECK(s == AigStats{});
  CHECK(qor(r) == 0);
}

TEST_CASE("qor projects the final node count") {
  const Aig aig = random_aig({.num_pis = 10, .num_pos = 4, .target_ands = 200, .seed = 21});
  const SynthesisResult r = apply_recipe(aig, resyn2());
  CHECK(qor(r) == stats(r.final).nodes);
}

TEST_CASE("an empty recipe only sweeps") {
  const Aig aig = random_aig({.num_pis = 8, .num_pos = 3, .target_ands = 80, .seed = 2});
  const SynthesisResult r = apply_recipe(aig, {});
  REQUIRE(r.trajectory.size() == 1);
  CHECK(r.trajectory[0] == stats(aig));
  CHECK(structurally_equal(r.final, sweep(aig)));
}

TEST_CASE("recipes are deterministic down to the serialized bytes") {
  const Aig aig = random_aig({.num_pis = 12, .num_pos = 6, .target_ands = 400, .seed = 33});
  const Recipe recipe = parse_recipe(
      "balance; rewrite; refactor; resub; rewrite -z; refactor -z; resub -z; balance");
  const SynthesisResult r1 = apply_recipe(aig, recipe);
  const SynthesisResult r2 = apply_recipe(aig, recipe);
  CHECK(write_aiger(r1.final) == write_aiger(r2.final));
  CHECK(r1.trajectory.size() == r2.trajectory.size());
  for (size_t k = 0; k < r1.trajectory.size(); ++k) CHECK(r1.trajectory[k] == r2.trajectory[k]);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aigforge/aig.hpp"
#include "aigforge/aiger.hpp"
#include "aigforge/random_circuit.hpp"

using namespace aigforge;

TEST_CASE("parse smallest AND circuit") {
  const Aig a = parse_aiger("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n");
  CHECK(a.num_pis() == 2);
  CHECK(a.num_pos() == 1);
  REQUIRE(a.num_ands() == 1);
  CHECK(a.gates[0].fanin0.value == 2);
  CHECK(a.gates[0].fanin1.value == 4);
  CHECK(a.outputs[0].value == 6);
}

TEST_CASE("parse inverter") {
  const Aig a = parse_aiger("aag 1 1 0 1 0\n2\n3\n");
  CHECK(a.num_pis() == 1);
  CHECK(a.num_ands() == 0);
  CHECK(a.outputs[0].value == 3);
}

TEST_CASE("latches rejected") {
  try {
    parse_aiger("aag 2 1 1 0 0\n2\n4 2\n");
    FAIL("expected AigerError");
  } catch (const AigerError& e) {
    CHECK(e.kind() == AigerError::Kind::latch_present);
    CHECK(e.line() == 1);
  }
}

TEST_CASE("binary format rejected") {
  try {
    parse_aiger("aig 3 2 0 1 1\n6\n");
    FAIL("expected AigerError");
  } catch (const AigerError& e) {
    CHECK(e.kind() == AigerError::Kind::malformed_header);
  }
}

TEST_CASE("malformed header") {
  for (const char* doc : {"", "avg 1 1 0 1 0\n", "aag 1 1 0 1\n", "aag x 1 0 1 0\n", "aag 0 2 0 0 2\n"}) {
    try {
      parse_aiger(doc);
      FAIL("expected AigerError for: ", doc);
    } catch (const AigerError& e) {
      CHECK(e.kind() == AigerError::Kind::malformed_header);
      CHECK(e.line() == 1);
    }
  }
}

TEST_CASE("forward reference caught with line number") {
  try {
    parse_aiger("aag 4 2 0 1 2\n2\n4\n6\n6 8 2\n8 2 4\n");
    FAIL("expected AigerError");
  } catch (const AigerError& e) {
    CHECK(e.kind() == AigerError::Kind::forward_reference);
    CHECK(e.line() == 5);
  }
}

TEST_CASE("output referencing undefined variable") {
  try {
    parse_aiger("aag 3 2 0 1 0\n2\n4\n6\n");
    FAIL("expected AigerError");
  } catch (const AigerError& e) {
    CHECK(e.kind() == AigerError::Kind::forward_reference);
  }
}

TEST_CASE("literal out of range caught with line number") {
  try {
    parse_aiger("aag 3 2 0 1 1\n2\n4\n6\n6 2 9\n");
    FAIL("expected AigerError");
  } catch (const AigerError& e) {
    CHECK(e.kind() == AigerError::Kind::literal_out_of_range);
    CHECK(e.line() == 5);
  }
}

TEST_CASE("truncated document") {
  try {
    parse_aiger("aag 3 2 0 1 1\n2\n4\n");
    FAIL("expected AigerError");
  } catch (const AigerError& e) {
    CHECK(e.kind() == AigerError::Kind::malformed_body);
  }
}

TEST_CASE("write smallest AND circuit byte-exactly") {
  AigBuilder b(2);
  b.add_output(b.strash_and(b.pi(0), b.pi(1)));
  CHECK(write_aiger(b.build()) == "aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n");
}

TEST_CASE("write empty Aig") {
  CHECK(write_aiger(Aig{}) == "aag 0 0 0 0 0\n");
}

TEST_CASE("symbol table and comments ignored") {
  const Aig a = parse_aiger("aag 1 1 0 1 0\n2\n2\ni0 x\no0 y\nc\nanything goes\n");
  CHECK(a.num_pis() == 1);
  CHECK(a.outputs[0].value == 2);
}

TEST_CASE("round trip is structural identity") {
  for (uint64_t seed = 0; seed < 25; ++seed) {
    const Aig a = random_aig({.num_pis = 8, .num_pos = 3, .target_ands = 50, .seed = seed});
    const Aig back = parse_aiger(write_aiger(a));
    CHECK(structurally_equal(a, back));
    // A second trip is byte-stable.
    CHECK(write_aiger(back) == write_aiger(a));
  }
}

TEST_CASE("sparse variable numbering is densified") {
  // Gap: M=9 but only 1 input and 2 ANDs; AND variables 7 and 9.
  const Aig a = parse_aiger("aag 9 2 0 1 2\n2\n4\n18\n14 2 4\n18 14 5\n");
  CHECK(a.num_ands() == 2);
  CHECK(a.gates[1].fanin0.value == Literal::from_var(3, false).value);
  const Aig back = parse_aiger(write_aiger(a));
  CHECK(structurally_equal(a, back));
}

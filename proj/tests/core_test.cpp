#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "lll/instance.hpp"

using namespace lll;
using namespace lll::testing;

TEST_CASE("distribution validation") {
  Distribution d{{make_rational(1, 2), make_rational(1, 2)}};
  REQUIRE_NOTHROW(d.validate(false));

  Distribution bad_sum{{make_rational(1, 2), make_rational(1, 3)}};
  REQUIRE_THROWS_AS(bad_sum.validate(false), InvariantViolation);

  Distribution zero{{make_rational(1, 1), Rational(0)}};
  REQUIRE_THROWS_AS(zero.validate(false), InvariantViolation);
  REQUIRE_NOTHROW(zero.validate(true));  // synthetic variables may carry zeros

  Distribution negative{{make_rational(3, 2), make_rational(-1, 2)}};
  REQUIRE_THROWS_AS(negative.validate(true), InvariantViolation);

  REQUIRE_THROWS_AS(Distribution{}.validate(false), InvariantViolation);
}

TEST_CASE("partial assignment basics") {
  PartialAssignment pa;
  REQUIRE(pa.empty());
  pa.set(3, 1);
  pa.set(1, 0);
  REQUIRE(pa.scope() == std::vector<VariableId>{1, 3});
  REQUIRE(pa.at(3) == 1);
  REQUIRE(pa.contains(1));
  REQUIRE_FALSE(pa.contains(2));
  REQUIRE_THROWS_AS(pa.at(2), InvariantViolation);

  PartialAssignment other;
  other.set(2, 1);
  other.set(1, 0);
  PartialAssignment merged = pa.merged(other);
  REQUIRE(merged.scope() == std::vector<VariableId>{1, 2, 3});

  PartialAssignment conflicting;
  conflicting.set(1, 1);
  REQUIRE_THROWS_AS(pa.merged(conflicting), InvariantViolation);
}

TEST_CASE("event construction and occurrence") {
  LLLInstance inst;
  VariableId x = inst.add_variable("x", fair_bit());
  VariableId y = inst.add_variable("y",
      Distribution{{make_rational(1, 3), make_rational(1, 3), make_rational(1, 3)}});
  EventId e = inst.add_event("e", {x, y}, {{1, 2}, {0, 0}});
  EventId never = inst.add_event("never", {x}, {});
  inst.freeze();

  Assignment a{1, 2};
  REQUIRE(inst.event_occurs(e, a));
  REQUIRE_FALSE(inst.event_occurs(never, a));
  a = {0, 0};
  REQUIRE(inst.event_occurs(e, a));
  a = {1, 1};
  REQUIRE_FALSE(inst.event_occurs(e, a));

  PartialAssignment pa;
  pa.set(x, 0);
  pa.set(y, 0);
  REQUIRE(inst.event_occurs(e, pa));

  PartialAssignment missing;
  missing.set(x, 0);
  REQUIRE_THROWS_AS(inst.event_occurs(e, missing), InvariantViolation);
}

TEST_CASE("event validation errors") {
  LLLInstance inst;
  VariableId x = inst.add_variable("x", fair_bit());
  REQUIRE_THROWS_AS(inst.add_event("dup", {x, x}, {}), InvariantViolation);
  REQUIRE_THROWS_AS(inst.add_event("oob", {x}, {{2}}), InvariantViolation);
  REQUIRE_THROWS_AS(inst.add_event("arity", {x}, {{0, 1}}), InvariantViolation);
  REQUIRE_THROWS_AS(inst.add_event("unknown", {5}, {}), InvariantViolation);

  LLLInstance clash;
  clash.add_variable("x", fair_bit());
  clash.add_variable("x", fair_bit());
  REQUIRE_THROWS_AS(clash.freeze(), InvariantViolation);
}

TEST_CASE("dependency graph is symmetric and loop-free") {
  for (const LLLInstance& inst :
       {pair_instance(), path3_instance(), chain_instance(4), cycle5_instance(),
        two_component_instance(), counterexample_instance(6)}) {
    auto adj = dependency_graph(inst);
    for (EventId e = 0; e < adj.size(); ++e) {
      for (EventId nb : adj[e]) {
        REQUIRE(nb != e);
        const auto& back = adj[nb];
        REQUIRE(std::find(back.begin(), back.end(), e) != back.end());
      }
    }
  }
}

TEST_CASE("dependency graph edges require a shared variable") {
  LLLInstance path3 = path3_instance();
  REQUIRE(path3.neighbors(0) == std::vector<EventId>{1});
  REQUIRE(path3.neighbors(1) == std::vector<EventId>{0});

  LLLInstance two = two_component_instance();
  REQUIRE(two.neighbors(0).empty());
  REQUIRE(two.neighbors(1).empty());
}

TEST_CASE("balls grow by dependency distance") {
  LLLInstance chain = chain_instance(4);
  Region lambda{0};
  REQUIRE(ball(chain, lambda, 0) == Region{0});
  REQUIRE(ball(chain, lambda, 1) == Region{0, 1});
  REQUIRE(ball(chain, lambda, 2) == Region{0, 1, 2});
  REQUIRE(ball(chain, lambda, 100) == Region{0, 1, 2, 3});

  REQUIRE_THROWS_AS(ball(chain, Region{}, 1), InvariantViolation);
  REQUIRE_THROWS_AS(ball(chain, Region{7}, 1), InvariantViolation);
  REQUIRE_THROWS_AS(ball(chain, Region{1, 0}, 1), InvariantViolation);
  REQUIRE_THROWS_AS(ball(chain, lambda, -1), InvariantViolation);
}

TEST_CASE("rings partition the ball variables") {
  LLLInstance chain = chain_instance(4);
  Region lambda{0};
  REQUIRE(ring(chain, lambda, 0, 0) == std::vector<VariableId>{0, 1});
  REQUIRE(ring(chain, lambda, 1, 1) == std::vector<VariableId>{2});
  REQUIRE(ring(chain, lambda, 2, 2) == std::vector<VariableId>{3});
  REQUIRE(ring(chain, lambda, 3, 3) == std::vector<VariableId>{4});
  REQUIRE(ring(chain, lambda, 4, 4).empty());
  REQUIRE(ring(chain, lambda, 1, 2) == std::vector<VariableId>{2, 3});
  REQUIRE(ring(chain, lambda, 2, kInfiniteRadius) ==
          std::vector<VariableId>{3, 4});
  REQUIRE_THROWS_AS(ring(chain, lambda, 2, 1), InvariantViolation);

  // Disjointness and coverage: vbl(B_r) is the disjoint union of rings 0..r.
  for (int r = 0; r <= 3; ++r) {
    std::vector<VariableId> collected;
    for (int i = 0; i <= r; ++i) {
      for (VariableId v : ring(chain, lambda, i, i)) {
        REQUIRE(std::find(collected.begin(), collected.end(), v) ==
                collected.end());
        collected.push_back(v);
      }
    }
    std::sort(collected.begin(), collected.end());
    REQUIRE(collected == region_variables(chain, ball(chain, lambda, r)));
  }
}

TEST_CASE("infinite ring spans cover other components") {
  LLLInstance two = two_component_instance();
  Region lambda{0};
  REQUIRE(ring(two, lambda, 1, kInfiniteRadius) ==
          std::vector<VariableId>{2, 3});
  REQUIRE(ring(two, lambda, 0, kInfiniteRadius) ==
          std::vector<VariableId>{0, 1, 2, 3});
}

TEST_CASE("cycle geometry wraps both ways") {
  LLLInstance cyc = cycle5_instance();
  Region lambda{0};  // event on (x1, x2)
  REQUIRE(ball(cyc, lambda, 1) == Region{0, 1, 4});
  REQUIRE(ring(cyc, lambda, 0, 0) == std::vector<VariableId>{0, 1});
  REQUIRE(ring(cyc, lambda, 1, 1) == std::vector<VariableId>{2, 4});
  REQUIRE(ring(cyc, lambda, 2, 2) == std::vector<VariableId>{3});
}

TEST_CASE("event rings classify by span membership") {
  LLLInstance chain = chain_instance(4);
  Region lambda{0};
  EventRings rings = event_rings(chain, lambda, 1, 2);  // span {x3, x4}
  REQUIRE(rings.intersecting == Region{1, 2, 3});
  REQUIRE(rings.contained == Region{2});

  // Containment implies intersection on every span of every builder.
  for (const LLLInstance& inst :
       {pair_instance(), path3_instance(), chain_instance(4),
        cycle5_instance(), two_component_instance()}) {
    for (int i = 0; i <= 2; ++i) {
      for (int j = i; j <= 3; ++j) {
        EventRings er = event_rings(inst, Region{0}, i, j);
        for (EventId e : er.contained)
          REQUIRE(std::binary_search(er.intersecting.begin(),
                                     er.intersecting.end(), e));
      }
    }
  }
}

TEST_CASE("variable-free events have no ring position") {
  LLLInstance inst;
  VariableId x = inst.add_variable("x", fair_bit());
  inst.add_event("a", {x}, {{1}});
  inst.add_event_codes("tick", {}, {0}, /*synthetic=*/true);
  inst.freeze();
  EventRings er = event_rings(inst, Region{0}, 0, kInfiniteRadius);
  REQUIRE(er.intersecting == Region{0});
  REQUIRE(er.contained == Region{0});
  Assignment y{0};
  REQUIRE(inst.event_occurs(1, y));  // still a real event for occurrence
}

TEST_CASE("sub_instance restricts and preserves full region") {
  LLLInstance path3 = path3_instance();
  LLLInstance full = sub_instance(path3, Region{0, 1});
  REQUIRE(full == path3);
  REQUIRE(full.gamma() == path3.gamma());

  LLLInstance left = sub_instance(path3, Region{0});
  REQUIRE(left.num_variables() == 2);
  REQUIRE(left.num_events() == 1);
  REQUIRE(left.variable(0).name == "x1");
  REQUIRE(left.variable(1).name == "x2");
  REQUIRE_FALSE(left.gamma().has_value());
  Assignment y{1, 1};
  REQUIRE(left.event_occurs(0, y));
}

TEST_CASE("extend_instance appends without mutating the original") {
  LLLInstance pair = pair_instance();
  std::vector<Variable> new_vars{
      Variable{"z", fair_bit(), /*synthetic=*/true}};
  std::vector<BadEvent> new_events{
      BadEvent{"lambda", {2}, {1}, /*synthetic=*/true}};
  LLLInstance bigger = extend_instance(pair, new_vars, new_events);
  REQUIRE(bigger.num_variables() == 3);
  REQUIRE(bigger.num_events() == 2);
  REQUIRE(bigger.variable(2).synthetic);
  REQUIRE(bigger.event(1).synthetic);
  REQUIRE(pair.num_variables() == 2);
  REQUIRE(pair.num_events() == 1);

  std::vector<Variable> colliding{Variable{"x1", fair_bit(), false}};
  REQUIRE_THROWS_AS(extend_instance(pair, colliding, {}), InvariantViolation);
}

TEST_CASE("canonical form is stable and distinguishes instances") {
  LLLInstance a = path3_instance();
  LLLInstance b = path3_instance();
  REQUIRE(a.canonical() == b.canonical());
  REQUIRE(a.canonical() != pair_instance().canonical());
  LLLInstance again = sub_instance(a, Region{0, 1});
  REQUIRE(again.canonical() == a.canonical());
}

TEST_CASE("enumeration size respects the budget") {
  LLLInstance chain = chain_instance(4);
  std::vector<VariableId> all{0, 1, 2, 3, 4};
  REQUIRE(chain.enumeration_size(all, 32) == 32);
  REQUIRE_THROWS_AS(chain.enumeration_size(all, 31), BudgetExceeded);
  try {
    chain.enumeration_size(all, 31);
  } catch (const BudgetExceeded& e) {
    REQUIRE(e.requested() == 32);
    REQUIRE(e.budget() == 31);
  }
}

// Copyright 2026 The recdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "recdp/expr.hpp"
#include "testutil.hpp"

using namespace recdp;
namespace tu = recdp::testutil;

TEST_CASE("parse and print round-trip") {
  for (const char* text : {"a", "a&b", "a|b", "a&b|c", "(a|b)&c", "true", "false",
                           "b&c&(a|d)", "(a|b)&(a|c)&(b|d)", "e_a_b&e_b.c"}) {
    Expr e = parse_expr(text);
    Expr again = parse_expr(to_string(e));
    CHECK(to_string(e) == to_string(again));
    CHECK(truth_equivalent(e, again));
  }
  CHECK(to_string(parse_expr("  a &\tb | c ")) == "a&b|c");
  CHECK_THROWS_AS(parse_expr("a &"), ParseError);
  CHECK_THROWS_AS(parse_expr("(a"), ParseError);
  CHECK_THROWS_AS(parse_expr("a b"), ParseError);
  CHECK_THROWS_AS(parse_expr(""), ParseError);
}

TEST_CASE("identifier validity") {
  CHECK(is_valid_identifier("a"));
  CHECK(is_valid_identifier("_x9.y-z"));
  CHECK(!is_valid_identifier("9a"));
  CHECK(!is_valid_identifier(""));
  CHECK(!is_valid_identifier("true"));
  CHECK(!is_valid_identifier("false"));
  CHECK_THROWS_AS(Expr::var("8bad"), DataError);
}

TEST_CASE("evaluate") {
  Expr abc = parse_expr("a&b&c");
  CHECK(evaluate(abc, {{"a", 1}, {"b", 1}, {"c", 1}}) == 1);
  CHECK(evaluate(parse_expr("a|b"), {{"a", 0}, {"b", 0}}) == 0);
  CHECK(evaluate(parse_expr("(a|b)&(a|c)"), {{"a", 0}, {"b", 1}, {"c", 0}}) == 0);
  CHECK_THROWS_AS(evaluate(abc, {{"a", 1}, {"b", 1}}), DataError);
}

TEST_CASE("substitute_const keeps structure") {
  Expr e = substitute_const(parse_expr("a&b"), "a", false);
  CHECK(to_string(e) == "false&b");
  Expr f = substitute_const(parse_expr("a|b&a"), "a", true);
  CHECK(to_string(f) == "true|b&true");
  CHECK(to_string(substitute_const(parse_expr("b"), "a", false)) == "b");
}

TEST_CASE("fold_constants") {
  CHECK(to_string(fold_constants(parse_expr("false&b"))) == "false");
  CHECK(to_string(fold_constants(parse_expr("true|b&true"))) == "true");
  CHECK(to_string(fold_constants(parse_expr("(a|false)&(true&b)"))) == "a&b");
  // Result is a constant or constant-free.
  tu::Rng rng(7);
  auto pool = tu::participant_pool(4);
  for (int it = 0; it < 200; ++it) {
    Expr e = tu::random_expr(rng, pool, 4, /*allow_constants=*/true);
    Expr folded = fold_constants(e);
    if (!folded.is_constant()) {
      std::vector<Expr> stack{folded};
      while (!stack.empty()) {
        Expr top = stack.back();
        stack.pop_back();
        CHECK(!top.is_constant());
        if (top.kind() == Expr::Kind::kAnd || top.kind() == Expr::Kind::kOr) {
          stack.push_back(top.left());
          stack.push_back(top.right());
        }
      }
    }
    // Folding preserves phi.
    for (int trial = 0; trial < 5; ++trial) {
      RealAssignment f = tu::random_assignment(rng, pool);
      CHECK(phi_eval(e, f) == doctest::Approx(phi_eval(folded, f)).epsilon(1e-12));
    }
  }
}

TEST_CASE("to_dnf") {
  CHECK(to_string(to_dnf(parse_expr("b&c&(a|d)"))) == "b&c&a|b&c&d");
  CHECK(to_string(to_dnf(parse_expr("a&b"))) == "a&b");
  CHECK(to_string(to_dnf(parse_expr("(a|b)&(c|d)"))) == "a&c|a&d|b&c|b&d");
  CHECK(to_string(to_dnf(parse_expr("true|a"))) == "true");
  // No idempotence: duplicates survive.
  CHECK(to_string(to_dnf(parse_expr("a&a"))) == "a&a");
  // Clause-limit guard.
  Expr wide = parse_expr("(a|b)&(a|b)&(a|b)&(a|b)");
  CHECK_THROWS_AS(to_dnf(wide, 8), CapacityError);
  // DNF is truth-equivalent to the input.
  tu::Rng rng(11);
  auto pool = tu::participant_pool(5);
  for (int it = 0; it < 100; ++it) {
    Expr e = tu::random_expr(rng, pool, 4);
    Expr d = to_dnf(e);
    CHECK(truth_equivalent(e, d));
  }
}

TEST_CASE("phi_eval worked values") {
  CHECK(phi_eval(parse_expr("a&b&c"), {{"a", 1}, {"b", 1}, {"c", 0}}) == doctest::Approx(0.0));
  CHECK(phi_eval(parse_expr("a|b"), {{"a", 0.5}, {"b", 0.5}}) == doctest::Approx(0.5));
  CHECK(phi_eval(parse_expr("(a|b)&(a|c)"), {{"a", 0.6}, {"b", 0.2}, {"c", 0.3}}) ==
        doctest::Approx(0.2));
  CHECK_THROWS_AS(phi_eval(parse_expr("a&b"), {{"a", 0.5}}), DataError);
}

TEST_CASE("phi_star_eval truncated linearity examples") {
  Expr a = parse_expr("a");
  CHECK(phi_star_eval(a, {{"a", 0.3}}, 1.0) == doctest::Approx(0.3));
  CHECK(phi_star_eval(a, {{"a", 0.3}}, 2.0) == doctest::Approx(0.6));
  CHECK(phi_star_eval(parse_expr("true"), {{"a", 0.7}}, 3.0) == doctest::Approx(0.0));
  Expr ab = parse_expr("a&b");
  RealAssignment f{{"a", 0.4}, {"b", 0.4}};
  CHECK(phi_star_eval(ab, f, 3.0) ==
        doctest::Approx(std::min(1.0, 3.0 * phi_star_eval(ab, f, 1.0))).epsilon(1e-12));
  CHECK_THROWS_AS(phi_star_eval(a, {{"a", 0.1}}, 0.5), DataError);
}

TEST_CASE("phi_sensitivity figure rows") {
  Expr cnf = parse_expr("(a|b)&(a|c)&(b|d)");
  CHECK(phi_sensitivity(cnf, "a") == 2);
  CHECK(phi_sensitivity(cnf, "b") == 2);
  CHECK(phi_sensitivity(cnf, "c") == 1);
  CHECK(phi_sensitivity(cnf, "d") == 1);
  Expr dnf = parse_expr("(a&b)|(a&c)|(b&d)");
  for (const char* p : {"a", "b", "c", "d"}) CHECK(phi_sensitivity(dnf, p) == 1);
  Expr conj = parse_expr("a&b&c");
  for (const char* p : {"a", "b", "c"}) CHECK(phi_sensitivity(conj, p) == 1);
  CHECK(phi_sensitivity(conj, "z") == 0);
  CHECK(phi_sensitivity(parse_expr("a&a"), "a") == 2);
  CHECK(phi_sensitivity(Expr::constant(true), "a") == 0);
}

TEST_CASE("phi_sensitivities bulk map agrees with single") {
  tu::Rng rng(13);
  auto pool = tu::participant_pool(5);
  for (int it = 0; it < 200; ++it) {
    Expr e = tu::random_expr(rng, pool, 4, /*allow_constants=*/true);
    auto all = phi_sensitivities(e);
    for (const ParticipantId& p : pool) {
      int expected = phi_sensitivity(e, p);
      int got = all.count(p) ? all.at(p) : 0;
      CHECK(expected == got);
    }
  }
}

TEST_CASE("truth_equivalent") {
  CHECK(truth_equivalent(parse_expr("a|b"), parse_expr("b|a")));
  CHECK(truth_equivalent(parse_expr("b&c&(a|d)"), parse_expr("(a&b&c)|(b&c&d)")));
  CHECK(!truth_equivalent(parse_expr("a&b"), parse_expr("a|b")));
  CHECK_THROWS_AS(truth_equivalent(parse_expr("a"), parse_expr("b"), 0), CapacityError);
}

TEST_CASE("phi properties on random expressions") {
  tu::Rng rng(17);
  auto pool = tu::participant_pool(5);
  for (int it = 0; it < 150; ++it) {
    Expr e = tu::random_expr(rng, pool, 4, /*allow_constants=*/true);

    // Correctness on Boolean points.
    for (int trial = 0; trial < 8; ++trial) {
      BoolAssignment b = tu::random_bool_assignment(rng, pool);
      RealAssignment f;
      for (const auto& [p, v] : b) f[p] = v;
      CHECK(phi_eval(e, f) == doctest::Approx(evaluate(e, b)).epsilon(1e-12));
    }

    // Naturalness.
    {
      RealAssignment f = tu::random_assignment(rng, pool);
      const ParticipantId& p = pool[tu::rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
      RealAssignment f0 = f;
      f0[p] = 0.0;
      CHECK(phi_eval(e, f0) ==
            doctest::Approx(phi_eval(substitute_const(e, p, false), f0)).epsilon(1e-12));
      RealAssignment f1 = f;
      f1[p] = 1.0;
      CHECK(phi_eval(e, f1) ==
            doctest::Approx(phi_eval(substitute_const(e, p, true), f1)).epsilon(1e-12));
    }

    // Monotonicity and midpoint convexity.
    for (int trial = 0; trial < 5; ++trial) {
      RealAssignment f = tu::random_assignment(rng, pool);
      RealAssignment g = tu::random_assignment(rng, pool);
      RealAssignment lo = f, mid = f;
      for (const auto& [p, v] : g) {
        lo[p] = std::min(f[p], v);
        mid[p] = 0.5 * (f[p] + v);
      }
      CHECK(phi_eval(e, lo) <= phi_eval(e, f) + 1e-12);
      CHECK(phi_eval(e, mid) <= 0.5 * (phi_eval(e, f) + phi_eval(e, g)) + 1e-12);
    }

    // Truncated linearity.
    {
      RealAssignment f = tu::random_assignment(rng, pool);
      double c = 1.0 + 4.0 * tu::rand_unit(rng);
      CHECK(phi_star_eval(e, f, c) ==
            doctest::Approx(std::min(1.0, c * phi_star_eval(e, f, 1.0))).epsilon(1e-12));
    }

    // Lipschitz bound via phi-sensitivities.
    {
      RealAssignment f = tu::random_assignment(rng, pool);
      RealAssignment g = f;
      double bound = 0.0;
      for (const ParticipantId& p : pool) {
        double bump = tu::rand_unit(rng) * (1.0 - f[p]);
        g[p] = f[p] + bump;
        bound += bump * phi_sensitivity(e, p);
      }
      CHECK(phi_eval(e, g) - phi_eval(e, f) <= bound + 1e-12);
    }

    // Invariant transformations leave phi unchanged.
    Expr rewritten = e;
    for (int step = 0; step < 6; ++step) {
      rewritten = tu::random_invariant_rewrite(rng, rewritten, pool);
    }
    for (int trial = 0; trial < 4; ++trial) {
      RealAssignment f = tu::random_assignment(rng, pool);
      CHECK(phi_eval(e, f) == doctest::Approx(phi_eval(rewritten, f)).epsilon(1e-12));
    }
  }
}

TEST_CASE("DNF without repeated clause variables has unit sensitivities") {
  tu::Rng rng(23);
  auto pool = tu::participant_pool(6);
  for (int it = 0; it < 100; ++it) {
    // Clauses of distinct variables.
    int clauses = tu::rand_int(rng, 1, 4);
    Expr dnf;
    bool first = true;
    for (int c = 0; c < clauses; ++c) {
      std::vector<ParticipantId> chosen = pool;
      std::shuffle(chosen.begin(), chosen.end(), rng);
      int len = tu::rand_int(rng, 1, 3);
      Expr clause = Expr::var(chosen[0]);
      for (int i = 1; i < len; ++i) clause = Expr::make_and(clause, Expr::var(chosen[i]));
      dnf = first ? clause : Expr::make_or(dnf, clause);
      first = false;
    }
    for (const ParticipantId& p : pool) {
      CHECK(phi_sensitivity(dnf, p) <= 1);
    }
  }
}

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
#include "doctest.h"
#include "recdp/krelation.hpp"
#include "testutil.hpp"

using namespace recdp;
namespace tu = recdp::testutil;

namespace {

AnnotatedRelation make_relation(const Schema& schema,
                                const std::vector<std::pair<std::vector<std::string>,
                                                            std::string>>& rows) {
  AnnotatedRelation r{schema};
  for (const auto& [values, annotation] : rows) {
    r.add_row(Tuple{values}, parse_expr(annotation));
  }
  return r;
}

// The triangle-counting relation of the fig3 graph, written by hand.
AnnotatedRelation triangle_relation() {
  AnnotatedRelation r = make_relation(
      {"match"}, {{{"abc"}, "a&b&c"}, {{"bcd"}, "b&c&d"}, {{"cde"}, "c&d&e"}});
  r.set_participants({"a", "b", "c", "d", "e"});
  return r;
}

}  // namespace

TEST_CASE("add_row folds and drops dead rows") {
  AnnotatedRelation r{Schema{"x"}};
  r.add_row(Tuple{{"1"}}, parse_expr("a&false"));
  CHECK(r.rows().empty());
  r.add_row(Tuple{{"1"}}, parse_expr("a|false"));
  CHECK(to_string(r.rows().begin()->second) == "a");
  CHECK(r.participants() == std::set<ParticipantId>{"a"});
  // Duplicate tuples merge with OR.
  r.add_row(Tuple{{"1"}}, parse_expr("b"));
  CHECK(to_string(r.rows().begin()->second) == "a|b");
  CHECK_THROWS_AS(r.add_row(Tuple{{"1", "2"}}, parse_expr("a")), SchemaError);
}

TEST_CASE("union") {
  AnnotatedRelation r1 = make_relation({"x"}, {{{"t"}, "a"}});
  AnnotatedRelation r2 = make_relation({"x"}, {{{"t"}, "b"}});
  AnnotatedRelation u = union_relations(r1, r2);
  CHECK(to_string(u.rows().begin()->second) == "a|b");

  AnnotatedRelation empty{Schema{"x"}};
  CHECK(to_string(union_relations(r1, empty).rows().begin()->second) == "a");

  AnnotatedRelation r3 = make_relation({"x"}, {{{"s"}, "b"}});
  AnnotatedRelation disjoint = union_relations(r1, r3);
  CHECK(disjoint.rows().size() == 2);

  AnnotatedRelation other{Schema{"y"}};
  CHECK_THROWS_AS(union_relations(r1, other), SchemaError);
}

TEST_CASE("project groups and folds disjunctions") {
  AnnotatedRelation r = make_relation(
      {"X", "Y", "W"},
      {{{"b", "c", "a"}, "a&b&c"}, {{"b", "c", "d"}, "b&c&d"}});
  AnnotatedRelation p = project(r, {"X", "Y"});
  REQUIRE(p.rows().size() == 1);
  const auto& [tuple, ann] = *p.rows().begin();
  CHECK(tuple.values == std::vector<std::string>{"b", "c"});
  CHECK(truth_equivalent(ann, parse_expr("b&c&(a|d)")));

  // Projection onto the full schema is the identity.
  AnnotatedRelation full = project(r, {"X", "Y", "W"});
  CHECK(full.rows().size() == r.rows().size());

  // Degenerate projection: everything groups into the empty tuple.
  AnnotatedRelation none = project(make_relation({"X"}, {{{"v"}, "a"}}), {});
  REQUIRE(none.rows().size() == 1);
  CHECK(none.rows().begin()->first.values.empty());
  CHECK(to_string(none.rows().begin()->second) == "a");

  CHECK_THROWS_AS(project(r, {"Z"}), SchemaError);
}

TEST_CASE("select") {
  AnnotatedRelation r = make_relation({"A"}, {{{"1"}, "a"}, {{"2"}, "b"}});
  CHECK(select(r, [](const Tuple&) { return true; }).rows().size() == 2);
  CHECK(select(r, [](const Tuple&) { return false; }).rows().empty());
  AnnotatedRelation one = select(r, [](const Tuple& t) { return t.values[0] == "1"; });
  REQUIRE(one.rows().size() == 1);
  CHECK(to_string(one.rows().begin()->second) == "a");
  CHECK(one.participants() == r.participants());
}

TEST_CASE("natural_join") {
  AnnotatedRelation r1 = make_relation({"A", "B"}, {{{"1", "2"}, "a"}});
  AnnotatedRelation r2 = make_relation({"B", "C"}, {{{"2", "3"}, "b"}});
  AnnotatedRelation j = natural_join(r1, r2);
  REQUIRE(j.rows().size() == 1);
  CHECK(j.schema() == Schema{"A", "B", "C"});
  CHECK(j.rows().begin()->first.values == std::vector<std::string>{"1", "2", "3"});
  CHECK(to_string(j.rows().begin()->second) == "a&b");

  AnnotatedRelation empty{Schema{"B", "C"}};
  CHECK(natural_join(r1, empty).rows().empty());

  // Disjoint schemas produce the cartesian product.
  AnnotatedRelation left = make_relation({"A"}, {{{"1"}, "a"}});
  AnnotatedRelation right = make_relation({"B"}, {{{"7"}, "b"}, {{"8"}, "c"}});
  AnnotatedRelation product = natural_join(left, right);
  REQUIRE(product.rows().size() == 2);
  std::vector<std::string> annotations;
  for (const auto& [t, ann] : product.rows()) annotations.push_back(to_string(ann));
  CHECK(annotations == std::vector<std::string>{"a&b", "a&c"});
}

TEST_CASE("rename") {
  AnnotatedRelation r = make_relation({"A", "B"}, {{{"1", "2"}, "x"}});
  AnnotatedRelation same = rename(r, {{"A", "A"}, {"B", "B"}});
  CHECK(same.schema() == r.schema());

  AnnotatedRelation single = make_relation({"A"}, {{{"1"}, "a"}});
  AnnotatedRelation renamed = rename(single, {{"A", "B"}});
  CHECK(renamed.schema() == Schema{"B"});
  CHECK(renamed.rows().begin()->first.values == std::vector<std::string>{"1"});

  AnnotatedRelation swapped = rename(r, {{"A", "B"}, {"B", "A"}});
  CHECK(swapped.schema() == Schema{"B", "A"});
  CHECK(swapped.rows().begin()->first.values == std::vector<std::string>{"1", "2"});

  CHECK_THROWS_AS(rename(r, {{"A", "C"}, {"B", "C"}}), SchemaError);
  CHECK_THROWS_AS(rename(r, {{"A", "C"}}), SchemaError);
}

TEST_CASE("remove_participant") {
  AnnotatedRelation tri = triangle_relation();
  AnnotatedRelation no_c = remove_participant(tri, "c");
  CHECK(no_c.rows().empty());
  CHECK(!no_c.participants().count("c"));
  CHECK(no_c.participants().size() == 4);

  AnnotatedRelation r = make_relation({"x"}, {{{"t"}, "a|b"}});
  AnnotatedRelation no_a = remove_participant(r, "a");
  CHECK(to_string(no_a.rows().begin()->second) == "b");

  // Removing a participant that annotates nothing only shrinks the set.
  AnnotatedRelation padded = make_relation({"x"}, {{{"t"}, "a"}});
  padded.add_participant("ghost");
  AnnotatedRelation dropped = remove_participant(padded, "ghost");
  CHECK(dropped.rows().size() == 1);
  CHECK(!dropped.participants().count("ghost"));

  CHECK_THROWS_AS(remove_participant(r, "zz"), DataError);
}

TEST_CASE("impact") {
  AnnotatedRelation tri = triangle_relation();
  CHECK(impact(tri, "c").size() == 3);
  CHECK(impact(tri, "a").size() == 1);
  CHECK(impact(tri, "a").begin()->values == std::vector<std::string>{"abc"});

  // Folding removes vacuous occurrences before the scan.
  AnnotatedRelation vac = make_relation({"x"}, {{{"t"}, "a|true"}});
  CHECK(impact(vac, "a").empty());
}

TEST_CASE("universal empirical sensitivity") {
  AnnotatedRelation tri = triangle_relation();
  auto [per, max_value] = universal_empirical_sensitivity(tri, LinearQuery::count());
  CHECK(per.at("a") == doctest::Approx(1.0));
  CHECK(per.at("b") == doctest::Approx(2.0));
  CHECK(per.at("c") == doctest::Approx(3.0));
  CHECK(per.at("d") == doctest::Approx(2.0));
  CHECK(per.at("e") == doctest::Approx(1.0));
  CHECK(max_value == doctest::Approx(3.0));

  AnnotatedRelation empty{Schema{"x"}};
  CHECK(universal_empirical_sensitivity(empty, LinearQuery::count()).second ==
        doctest::Approx(0.0));

  AnnotatedRelation weighted = make_relation(
      {"id", "w"}, {{{"t1", "2"}, "a"}, {{"t2", "3"}, "a"}});
  CHECK(universal_empirical_sensitivity(weighted, LinearQuery::column("w")).first.at("a") ==
        doctest::Approx(5.0));
}

TEST_CASE("query_true_answer") {
  CHECK(query_true_answer(triangle_relation(), LinearQuery::count()) == doctest::Approx(3.0));
  CHECK(query_true_answer(AnnotatedRelation{Schema{"x"}}, LinearQuery::count()) ==
        doctest::Approx(0.0));
  AnnotatedRelation r = make_relation({"id", "w"}, {{{"t1", "2.5"}, "a"}});
  CHECK(query_true_answer(r, LinearQuery::column("w")) == doctest::Approx(2.5));
  AnnotatedRelation neg = make_relation({"id", "w"}, {{{"t1", "-1"}, "a"}});
  CHECK_THROWS_AS(query_true_answer(neg, LinearQuery::column("w")), DataError);
}

TEST_CASE("monotone class and answer monotonicity under removal") {
  tu::Rng rng(31);
  for (int it = 0; it < 80; ++it) {
    AnnotatedRelation r = tu::random_relation(rng, 5, 8, 4);
    for (const ParticipantId& p : r.participants()) {
      AnnotatedRelation smaller = remove_participant(r, p);
      for (const auto& [t, ann] : smaller.rows()) {
        CHECK(r.rows().count(t) == 1);
      }
      CHECK(query_true_answer(smaller, LinearQuery::count()) <=
            query_true_answer(r, LinearQuery::count()) + 1e-12);
    }
  }
}

TEST_CASE("impact over-approximation is sound") {
  tu::Rng rng(37);
  for (int it = 0; it < 60; ++it) {
    AnnotatedRelation r = tu::random_relation(rng, 5, 8, 4);
    for (const ParticipantId& p : r.participants()) {
      std::set<Tuple> hit = impact(r, p);
      for (const auto& [t, ann] : r.rows()) {
        if (hit.count(t)) continue;
        Expr substituted = fold_constants(substitute_const(ann, p, false));
        CHECK(to_string(substituted) == to_string(ann));
      }
    }
  }
}

TEST_CASE("safe annotation: operators commute with participant removal") {
  tu::Rng rng(41);
  for (int it = 0; it < 40; ++it) {
    AnnotatedRelation r1 = tu::random_relation(rng, 4, 6, 3);
    AnnotatedRelation r2 = tu::random_relation(rng, 4, 6, 3);

    auto equivalent = [](const AnnotatedRelation& x, const AnnotatedRelation& y) {
      REQUIRE(x.rows().size() == y.rows().size());
      auto ix = x.rows().begin();
      auto iy = y.rows().begin();
      for (; ix != x.rows().end(); ++ix, ++iy) {
        CHECK(ix->first == iy->first);
        CHECK(truth_equivalent(ix->second, iy->second));
      }
    };

    for (const ParticipantId& p : r1.participants()) {
      AnnotatedRelation r1_removed = remove_participant(r1, p);
      // union: both sides share the participant pool by construction
      if (r2.participants().count(p)) {
        AnnotatedRelation joined = natural_join(r1, r2);
        AnnotatedRelation removed_after = remove_participant(joined, p);
        AnnotatedRelation removed_before =
            natural_join(r1_removed, remove_participant(r2, p));
        equivalent(removed_after, removed_before);

        AnnotatedRelation unioned = union_relations(r1, r2);
        equivalent(remove_participant(unioned, p),
                   union_relations(r1_removed, remove_participant(r2, p)));
      }
      AnnotatedRelation projected = project(r1, {});
      equivalent(remove_participant(projected, p), project(r1_removed, {}));

      AnnotatedRelation selected =
          select(r1, [](const Tuple& t) { return t.values[0] != "t0"; });
      equivalent(remove_participant(selected, p),
                 select(r1_removed, [](const Tuple& t) { return t.values[0] != "t0"; }));
    }
  }
}

TEST_CASE("annotated table io round-trip") {
  AnnotatedRelation tri = triangle_relation();
  std::string text = format_annotated_table(tri);
  AnnotatedRelation back = parse_annotated_table(text);
  CHECK(back.schema() == tri.schema());
  CHECK(back.participants() == tri.participants());
  REQUIRE(back.rows().size() == tri.rows().size());
  auto ia = back.rows().begin();
  auto ib = tri.rows().begin();
  for (; ia != back.rows().end(); ++ia, ++ib) {
    CHECK(ia->first == ib->first);
    CHECK(to_string(ia->second) == to_string(ib->second));
  }
}

TEST_CASE("annotated table parse errors") {
  CHECK_THROWS_AS(parse_annotated_table("no header\n"), ParseError);
  CHECK_THROWS_AS(parse_annotated_table("#schema\tA\n"), ParseError);
  CHECK_THROWS_AS(parse_annotated_table("#schema\tA\t@annotation\n1\ta\textra\n"), ParseError);
  CHECK_THROWS_AS(parse_annotated_table("#schema\tA\t@annotation\n1\ta&\n"), ParseError);
  // Implicit participants default to the union of annotation variables.
  AnnotatedRelation r = parse_annotated_table("#schema\tA\t@annotation\n1\ta&b\n");
  CHECK(r.participants() == std::set<ParticipantId>{"a", "b"});
  // Comments and blank lines are ignored.
  AnnotatedRelation c = parse_annotated_table(
      "#schema\tA\t@annotation\n# comment\n\n1\ta\n");
  CHECK(c.rows().size() == 1);
}

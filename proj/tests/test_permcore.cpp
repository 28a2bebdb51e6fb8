#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <set>

#include "doctest.h"
#include "mindim/errors.hpp"
#include "mindim/limits.hpp"
#include "mindim/permcore.hpp"
#include "oracles.hpp"

using namespace mindim;

namespace {

GeneratedGroup a5() {
  return GeneratedGroup(5, {Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), Perm::from_cycles(5, {{0, 1, 2}})},
                        "A5");
}

std::shared_ptr<const StabilizerChain> chain_of(const GeneratedGroup& g) {
  return std::make_shared<const StabilizerChain>(g);
}

}  // namespace

TEST_CASE("perm basics") {
  Perm p = Perm::from_cycles(5, {{0, 1, 2}});
  Perm q = Perm::from_cycles(5, {{2, 3}});
  CHECK((p * q)[0] == 1);
  CHECK((p * q)[1] == 3);  // 1 -> 2 -> 3
  CHECK((p * p.inverse()).is_identity());
  CHECK(p.order() == 3);
  CHECK((p * q).order() == 4);
  CHECK(Perm::parse_cycles(5, "(0 1 2)") == p);
  CHECK(Perm::parse_cycles(5, "()").is_identity());
  CHECK(p.conjugate_by(q) == q.inverse() * p * q);
  CHECK(p.pow(-1) == p.inverse());
  CHECK(p.to_cycle_string() == "(0 1 2)");
  CHECK_THROWS_AS(Perm(std::vector<Point>{0, 0, 1}), InputError);
  CHECK_THROWS_AS(Perm(std::vector<Point>{0, 3, 1}), InputError);
}

TEST_CASE("stabilizer chain orders") {
  CHECK(StabilizerChain(a5()).order() == 60);
  CHECK(StabilizerChain(GeneratedGroup(2, {Perm::from_cycles(2, {{0, 1}})})).order() == 2);
  CHECK(StabilizerChain(GeneratedGroup(4, {Perm(4)})).order() == 1);
  CHECK_THROWS_AS(GeneratedGroup(3, {}), InputError);
  CHECK_THROWS_AS(GeneratedGroup(3, {Perm(4)}), InputError);
}

TEST_CASE("base points follow the smallest moved point rule") {
  GeneratedGroup g(6, {Perm::from_cycles(6, {{3, 4, 5}}), Perm::from_cycles(6, {{4, 5}})});
  StabilizerChain c(g);
  CHECK(c.base().front() == 3);
  CHECK(c.order() == 6);
  StabilizerChain c2(g, {5, 0});
  CHECK(c2.base()[0] == 5);
  CHECK(c2.base()[1] == 0);
  CHECK(c2.order() == 6);
}

TEST_CASE("chain order equals closure count on the corpus") {
  const char* files[] = {"a5.grp", "a6.grp", "a7.grp", "a8.grp", "a9.grp", "s5.grp", "l2_7.grp",
                         "l2_8.grp", "l2_11.grp", "l2_13.grp", "m11.grp", "m12.grp", "m22.grp",
                         "u3_3.grp", "u4_2.grp"};
  for (const char* f : files) {
    CAPTURE(f);
    auto raw = oracle::read_group_file(oracle::data_path(f));
    StabilizerChain c(GeneratedGroup(raw.degree, raw.gens));
    CHECK(c.order() == raw.order);
    if (raw.order <= 1000000) CHECK(oracle::closure(raw.degree, raw.gens).size() == raw.order);
  }
}

TEST_CASE("rank and unrank are inverse bijections") {
  auto raw = oracle::read_group_file(oracle::data_path("m11.grp"));
  StabilizerChain c(GeneratedGroup(raw.degree, raw.gens));
  auto elems = oracle::closure(raw.degree, raw.gens);
  std::set<std::uint64_t> ranks;
  for (const Perm& e : elems) {
    auto r = c.rank(e);
    REQUIRE(r.has_value());
    CHECK(*r == c.rank_member(e));
    CHECK(c.unrank(*r) == e);
    ranks.insert(*r);
  }
  CHECK(ranks.size() == 7920);
  CHECK(*ranks.rbegin() == 7919);
  std::uint64_t expect = 0;
  bool ordered = true;
  c.for_each_element([&](std::uint64_t r, const Perm& e) {
    ordered = ordered && r == expect++ && c.unrank(r) == e;
  });
  CHECK(ordered);
  CHECK(expect == 7920);
  CHECK_FALSE(c.contains(Perm::from_cycles(11, {{0, 1}})));
  CHECK_FALSE(c.rank(Perm::from_cycles(11, {{0, 1}})).has_value());
}

TEST_CASE("membership is exact") {
  StabilizerChain c(a5());
  auto all = oracle::closure_set(5, a5().generators);
  // every permutation of 5 points
  std::vector<Point> img{0, 1, 2, 3, 4};
  do {
    Perm p(img);
    CHECK(c.contains(p) == (all.count(p) == 1));
  } while (std::next_permutation(img.begin(), img.end()));
}

TEST_CASE("orbits") {
  GeneratedGroup trivial(5, {Perm(5)});
  CHECK(orbit(trivial, 3).points == std::vector<Point>{3});
  auto o = orbit(a5(), 0);
  std::vector<Point> pts = o.points;
  std::sort(pts.begin(), pts.end());
  CHECK(pts == std::vector<Point>{0, 1, 2, 3, 4});
  CHECK(o.points.front() == 0);
  for (Point p : o.points) CHECK(o.transporter(a5().generators, p)[0] == p);
  GeneratedGroup v(4, {Perm::from_cycles(4, {{0, 1}, {2, 3}})});
  CHECK(orbit(v, 0).points == std::vector<Point>{0, 1});
  CHECK_THROWS_AS(orbit(v, 4), InputError);
}

TEST_CASE("orbit lengths divide the group order") {
  for (const char* f : {"m12.grp", "u3_3.grp", "l2_13.grp"}) {
    auto raw = oracle::read_group_file(oracle::data_path(f));
    StabilizerChain g(GeneratedGroup(raw.degree, raw.gens));
    for (const auto& cls : raw.classes)
      for (const auto& orb : orbits(raw.degree, cls.gens)) CHECK(cls.order % orb.size() == 0);
    for (const auto& orb : orbits(raw.degree, raw.gens)) CHECK(g.order() % orb.size() == 0);
  }
}

TEST_CASE("coset actions") {
  auto g = chain_of(a5());
  SUBCASE("point stabilizer gives the natural action") {
    CosetAction act(g, {Perm::from_cycles(5, {{1, 2, 3}}), Perm::from_cycles(5, {{2, 3, 4}})});
    CHECK(act.degree() == 5);
    for (const Perm& x : oracle::closure(5, a5().generators))
      CHECK(act.image(x).cycle_type() == x.cycle_type());
    CHECK(act.point_of(Perm(5)) == 0);
  }
  SUBCASE("subgroup of order 2") {
    CosetAction act(g, {Perm::from_cycles(5, {{0, 1}, {2, 3}})});
    CHECK(act.degree() == 30);
    CHECK(act.degree() * 2 == 60);
  }
  SUBCASE("action is a homomorphism") {
    CosetAction act(g, {Perm::from_cycles(5, {{0, 1, 2}})});
    auto elems = oracle::closure(5, a5().generators);
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
      const Perm& x = elems[rng() % elems.size()];
      const Perm& y = elems[rng() % elems.size()];
      CHECK(act.image(x * y) == act.image(x) * act.image(y));
    }
    // point stabilizer of 0 is H
    for (const Perm& x : elems) CHECK((act.act(0, x) == 0) == (x[3] == 3 && x[4] == 4));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(CosetAction(g, {Perm::from_cycles(5, {{0, 1}})}), InputError);
    auto saved = limits().max_degree;
    limits().max_degree = 10;
    CHECK_THROWS_AS(CosetAction(g, {Perm::from_cycles(5, {{0, 1}, {2, 3}})}), ResourceError);
    limits().max_degree = saved;
  }
}

TEST_CASE("coset action on M22 over L3(4)") {
  auto raw = oracle::read_group_file(oracle::data_path("m22.grp"));
  auto g = chain_of(GeneratedGroup(raw.degree, raw.gens));
  const auto& l34 = raw.classes.front();
  CHECK(l34.name == "L3(4)");
  CosetAction act(g, l34.gens);
  CHECK(act.degree() == 22);
  StabilizerChain image(act.as_group());
  CHECK(image.order() == 443520);
  CHECK(is_primitive(act).primitive);
}

TEST_CASE("primitivity") {
  CHECK(is_primitive(a5()).primitive);
  GeneratedGroup c4(4, {Perm::from_cycles(4, {{0, 1, 2, 3}})});
  auto r = is_primitive(c4);
  CHECK_FALSE(r.primitive);
  CHECK(r.block == std::vector<Point>{0, 2});
  CosetAction act(chain_of(a5()), {Perm::from_cycles(5, {{0, 1, 2}})});
  CHECK(act.degree() == 20);
  auto r2 = is_primitive(act);
  CHECK_FALSE(r2.primitive);
  // the intermediate S3 = <(0 1 2), (0 1)(3 4)> gives blocks of size 2
  CHECK(r2.block.size() == 2);
  GeneratedGroup intransitive(4, {Perm::from_cycles(4, {{0, 1}})});
  CHECK_THROWS_AS(is_primitive(intransitive), InputError);
}

TEST_CASE("maximal classes act primitively, proper subgroups do not") {
  for (const char* f : {"a5.grp", "a6.grp", "l2_7.grp", "m11.grp", "u3_3.grp"}) {
    CAPTURE(f);
    auto raw = oracle::read_group_file(oracle::data_path(f));
    auto g = chain_of(GeneratedGroup(raw.degree, raw.gens));
    for (const auto& cls : raw.classes) {
      CAPTURE(cls.name);
      CosetAction act(g, cls.gens);
      CHECK(act.degree() == cls.index);
      CHECK(is_primitive(act).primitive);
      // a cyclic subgroup of a maximal subgroup of composite order is proper and non-maximal
      CosetAction sub(g, {cls.gens.front()});
      if (sub.degree() != act.degree()) CHECK_FALSE(is_primitive(sub).primitive);
    }
  }
}

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "mindim/errors.hpp"
#include "mindim/groupanalysis.hpp"
#include "mindim/limits.hpp"
#include "oracles.hpp"

using namespace mindim;

namespace {

std::shared_ptr<const StabilizerChain> chain(std::size_t n, std::vector<Perm> gens) {
  return std::make_shared<const StabilizerChain>(GeneratedGroup(n, std::move(gens)));
}

std::shared_ptr<const StabilizerChain> a5() {
  return chain(5, {Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), Perm::from_cycles(5, {{0, 1, 2}})});
}

std::shared_ptr<const StabilizerChain> corpus(const char* file) {
  auto raw = oracle::read_group_file(oracle::data_path(file));
  return chain(raw.degree, raw.gens);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Class sizes of prime-order elements by conjugating with every group element.
std::multiset<std::pair<std::uint64_t, std::uint64_t>> brute_classes(const std::vector<Perm>& elems) {
  std::set<Perm> done;
  std::multiset<std::pair<std::uint64_t, std::uint64_t>> out;
  for (const auto& x : elems) {
    if (!is_prime(x.order()) || done.count(x)) continue;
    std::set<Perm> cls;
    for (const auto& g : elems) cls.insert(g.inverse() * x * g);
    done.insert(cls.begin(), cls.end());
    out.insert({x.order(), cls.size()});
  }
  return out;
}

}  // namespace

TEST_CASE("enumerate_elements") {
  CHECK(enumerate_elements(*chain(4, {Perm(4)})).size() == 1);
  auto e = enumerate_elements(*a5());
  CHECK(std::set<Perm>(e.begin(), e.end()).size() == 60);
  auto m11 = corpus("m11.grp");
  auto e2 = enumerate_elements(*m11);
  auto oracle_set = oracle::closure_set(m11->degree(), m11->group().generators);
  CHECK(std::set<Perm>(e2.begin(), e2.end()).size() == 7920);
  bool all_in = true;
  for (const auto& x : e2) all_in = all_in && oracle_set.count(x) == 1;
  CHECK(all_in);
  auto saved = limits().max_elements;
  limits().max_elements = 100;
  CHECK_THROWS_AS(enumerate_elements(*m11), ResourceError);
  limits().max_elements = saved;
}

TEST_CASE("prime order classes") {
  SUBCASE("S3") {
    auto s3 = chain(3, {Perm::from_cycles(3, {{0, 1}}), Perm::from_cycles(3, {{0, 1, 2}})});
    auto t = prime_order_classes(*s3);
    REQUIRE(t.classes.size() == 2);
    CHECK(t.classes[0].element_order == 2);
    CHECK(t.classes[0].size == 3);
    CHECK(t.classes[1].element_order == 3);
    CHECK(t.classes[1].size == 2);
  }
  SUBCASE("A5") {
    auto t = prime_order_classes(*a5());
    std::vector<std::pair<unsigned, std::uint64_t>> got;
    for (const auto& c : t.classes) got.push_back({c.element_order, c.size});
    CHECK(got == std::vector<std::pair<unsigned, std::uint64_t>>{{2, 15}, {3, 20}, {5, 12}, {5, 12}});
  }
  SUBCASE("trivial group") { CHECK(prime_order_classes(*chain(3, {Perm(3)})).classes.empty()); }
  SUBCASE("agrees with brute force") {
    for (const char* f : {"a5.grp", "a6.grp", "l2_7.grp", "l2_8.grp", "l2_11.grp", "s5.grp", "m11.grp"}) {
      CAPTURE(f);
      auto g = corpus(f);
      auto t = prime_order_classes(*g);
      std::multiset<std::pair<std::uint64_t, std::uint64_t>> got;
      for (const auto& c : t.classes) got.insert({c.element_order, c.size});
      CHECK(got == brute_classes(oracle::closure(g->degree(), g->group().generators)));
    }
  }
  SUBCASE("class sizes sum to prime order element counts") {
    for (const char* f : {"a7.grp", "a8.grp", "u3_3.grp", "u4_2.grp", "l2_13.grp", "m12.grp"}) {
      CAPTURE(f);
      auto g = corpus(f);
      auto t = prime_order_classes(*g);
      std::map<std::uint64_t, std::uint64_t> by_class, by_count;
      for (const auto& c : t.classes) {
        by_class[c.element_order] += c.size;
        CHECK(c.representative.cycle_type() == c.cycle_type);
      }
      for (const auto& x : oracle::closure(g->degree(), g->group().generators))
        if (is_prime(x.order())) by_count[x.order()]++;
      CHECK(by_class == by_count);
      // members share cycle type
      bool ok = true;
      g->for_each_element([&](std::uint64_t r, const Perm& x) {
        if (t.class_of[r] >= 0) ok = ok && x.cycle_type() == t.classes[t.class_of[r]].cycle_type;
      });
      CHECK(ok);
    }
  }
}

TEST_CASE("subgroup intersection") {
  auto g = a5();
  auto h = make_subgroup(g, {Perm::from_cycles(5, {{1, 2, 3}}), Perm::from_cycles(5, {{2, 3, 4}})});
  auto k = make_subgroup(g, {Perm::from_cycles(5, {{0, 2, 3}}), Perm::from_cycles(5, {{2, 3, 4}})});
  auto d = make_subgroup(g, {Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), Perm::from_cycles(5, {{1, 4}, {2, 3}})});
  CHECK(h.order == 12);
  CHECK(d.order == 10);
  CHECK(*subgroup_intersection(h, h).keys == *h.keys);
  auto hk = subgroup_intersection(h, k);
  CHECK(hk.order == 3);
  CHECK(StabilizerChain(GeneratedGroup(5, hk.generators)).order() == 3);
  CHECK(*subgroup_intersection(h, k).keys == *subgroup_intersection(k, h).keys);
  CHECK(*subgroup_intersection(subgroup_intersection(h, k), d).keys ==
        *subgroup_intersection(h, subgroup_intersection(k, d)).keys);
  CHECK(intersection_size(*h.keys, *d.keys) == subgroup_intersection(h, d).order);
  CHECK_THROWS_AS(make_subgroup(g, {Perm::from_cycles(5, {{0, 1}})}), InputError);
  auto other = a5();
  auto h2 = make_subgroup(other, h.generators);
  CHECK_THROWS_AS(subgroup_intersection(h, h2), InputError);
}

TEST_CASE("core") {
  auto g = a5();
  auto h = make_subgroup(g, {Perm::from_cycles(5, {{1, 2, 3}}), Perm::from_cycles(5, {{2, 3, 4}})});
  CHECK(core(h).order == 1);
  auto c4 = chain(4, {Perm::from_cycles(4, {{0, 1, 2, 3}})});
  auto z = make_subgroup(c4, {Perm::from_cycles(4, {{0, 2}, {1, 3}})});
  auto cz = core(z);
  CHECK(cz.order == 2);
  CHECK(*cz.keys == *z.keys);
  CHECK(is_normal(z));
  CHECK_FALSE(is_normal(h));
  // core equals the kernel of the coset action, checked for S4 and its Klein four subgroup
  auto s4 = chain(4, {Perm::from_cycles(4, {{0, 1, 2, 3}}), Perm::from_cycles(4, {{0, 1}})});
  auto d8 = make_subgroup(s4, {Perm::from_cycles(4, {{0, 1, 2, 3}}), Perm::from_cycles(4, {{0, 2}})});
  auto k = core(d8);
  CHECK(k.order == 4);
  CHECK(is_normal(k));
}

TEST_CASE("frattini") {
  SUBCASE("simple group") {
    auto raw = oracle::read_group_file(oracle::data_path("a5.grp"));
    auto g = chain(raw.degree, raw.gens);
    std::vector<SubgroupRecord> all;
    for (const auto& cls : raw.classes) {
      auto h = make_subgroup(g, cls.gens, cls.name);
      CosetAction act(g, h.generators);
      auto conj = expand_conjugates(h, act);
      CHECK(conj.size() == cls.index);
      for (auto& c : conj) all.push_back(c);
    }
    CHECK(all.size() == 21);
    CHECK(frattini(all, true).order == 1);
    CHECK_THROWS_AS(frattini(all, false), PreconditionError);
  }
  SUBCASE("C4") {
    auto c4 = chain(4, {Perm::from_cycles(4, {{0, 1, 2, 3}})});
    auto z = make_subgroup(c4, {Perm::from_cycles(4, {{0, 2}, {1, 3}})});
    CosetAction act(c4, z.generators);
    auto conj = expand_conjugates(z, act, false);
    CHECK(conj.size() == 1);
    CHECK_THROWS_AS(expand_conjugates(z, act, true), InternalError);
    CHECK(frattini(conj, true).order == 2);
  }
}

TEST_CASE("double cosets") {
  auto g = a5();
  auto h = make_subgroup(g, {Perm::from_cycles(5, {{1, 2, 3}}), Perm::from_cycles(5, {{2, 3, 4}})});
  auto dc = double_cosets(h, h);
  std::vector<std::uint64_t> sizes;
  for (const auto& d : dc) sizes.push_back(d.size);
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::uint64_t>{12, 48});
  auto whole = make_subgroup(g, g->group().generators);
  auto one = double_cosets(whole, whole);
  CHECK(one.size() == 1);
  CHECK(one[0].size == 60);
  // sizes sum to |G| and |HgK| = |H| |K| / |H^g cap K|
  auto k = make_subgroup(g, {Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), Perm::from_cycles(5, {{1, 4}, {2, 3}})});
  std::uint64_t total = 0;
  for (const auto& d : double_cosets(h, k)) {
    total += d.size;
    auto hg = make_subgroup(g, {h.generators[0].conjugate_by(d.representative),
                                h.generators[1].conjugate_by(d.representative)});
    CHECK(d.size * intersection_size(*hg.keys, *k.keys) == 12 * 10);
  }
  CHECK(total == 60);
  auto raw = oracle::read_group_file(oracle::data_path("m22.grp"));
  auto m22 = chain(raw.degree, raw.gens);
  auto l34 = make_subgroup(m22, raw.classes.front().gens, "L3(4)");
  std::vector<std::size_t> lens;
  for (const auto& d : double_cosets(l34, l34)) lens.push_back(d.orbit_length);
  std::sort(lens.begin(), lens.end());
  CHECK(lens == std::vector<std::size_t>{1, 21});
}

TEST_CASE("conjugate expansion matches coset stabilizers") {
  auto raw = oracle::read_group_file(oracle::data_path("l2_7.grp"));
  auto g = chain(raw.degree, raw.gens);
  for (const auto& cls : raw.classes) {
    auto h = make_subgroup(g, cls.gens, cls.name);
    CosetAction act(g, h.generators);
    auto conj = expand_conjugates(h, act);
    REQUIRE(conj.size() == act.degree());
    for (Point p = 0; p < act.degree(); ++p) {
      // every element of the conjugate fixes point p
      bool ok = true;
      for (auto key : *conj[p].keys) ok = ok && act.act(p, g->unrank(key)) == p;
      CHECK(ok);
      CHECK(conj[p].order == h.order);
    }
  }
}

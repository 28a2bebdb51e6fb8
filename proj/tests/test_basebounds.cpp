#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "doctest.h"
#include "mindim/basebounds.hpp"
#include "mindim/errors.hpp"
#include "oracles.hpp"

using namespace mindim;

namespace {

std::shared_ptr<const StabilizerChain> chain(std::size_t n, std::vector<Perm> gens) {
  return std::make_shared<const StabilizerChain>(GeneratedGroup(n, std::move(gens)));
}

std::shared_ptr<const StabilizerChain> a5() {
  return chain(5, {Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), Perm::from_cycles(5, {{0, 1, 2}})});
}

SubgroupRecord a4(const std::shared_ptr<const StabilizerChain>& g) {
  return make_subgroup(g, {Perm::from_cycles(5, {{1, 2, 3}}), Perm::from_cycles(5, {{2, 3, 4}})}, "A4");
}

SubgroupRecord s3(const std::shared_ptr<const StabilizerChain>& g) {
  return make_subgroup(g, {Perm::from_cycles(5, {{0, 1, 2}}), Perm::from_cycles(5, {{0, 1}, {3, 4}})}, "S3");
}

// Minimal number of conjugates of H meeting in the core, by trying every subset of conjugates.
std::size_t brute_base_size(std::size_t degree, const std::vector<Perm>& g_gens, const std::vector<Perm>& h_gens) {
  auto elems = oracle::closure(degree, g_gens);
  std::map<Perm, int> index;
  for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i);
  auto h = oracle::closure(degree, h_gens);
  std::set<std::vector<int>> conj_set;
  for (const auto& g : elems) {
    std::vector<int> c;
    for (const auto& x : h) c.push_back(index[g.inverse() * x * g]);
    std::sort(c.begin(), c.end());
    conj_set.insert(c);
  }
  std::vector<std::vector<int>> conj(conj_set.begin(), conj_set.end());
  std::vector<int> core = conj[0];
  for (const auto& c : conj) {
    std::vector<int> t;
    std::set_intersection(core.begin(), core.end(), c.begin(), c.end(), std::back_inserter(t));
    core = t;
  }
  for (std::size_t size = 1; size <= conj.size(); ++size) {
    std::vector<std::size_t> pick(size);
    std::function<bool(std::size_t, std::size_t, const std::vector<int>&)> rec =
        [&](std::size_t depth, std::size_t start, const std::vector<int>& cur) {
          if (depth == size) return cur.size() == core.size();
          for (std::size_t i = start; i < conj.size(); ++i) {
            std::vector<int> t;
            if (depth == 0)
              t = conj[i];
            else
              std::set_intersection(cur.begin(), cur.end(), conj[i].begin(), conj[i].end(), std::back_inserter(t));
            if (rec(depth + 1, i + 1, t)) return true;
          }
          return false;
        };
    if (rec(0, 0, {})) return size;
  }
  return 0;
}

}  // namespace

TEST_CASE("regular orbit witness") {
  auto g = a5();
  auto r = regular_orbit_witness(s3(g), s3(g));
  REQUIRE(r.conjugator.has_value());
  CHECK(std::count(r.orbit_lengths.begin(), r.orbit_lengths.end(), 6) >= 1);
  auto conj = make_subgroup(g, {s3(g).generators[0].conjugate_by(*r.conjugator),
                                s3(g).generators[1].conjugate_by(*r.conjugator)});
  CHECK(intersection_size(*conj.keys, *s3(g).keys) == 1);
  auto r2 = regular_orbit_witness(a4(g), a4(g));
  CHECK_FALSE(r2.conjugator.has_value());
  CHECK(r2.orbit_lengths == std::vector<std::size_t>{1, 4});
  auto raw = oracle::read_group_file(oracle::data_path("m22.grp"));
  auto m22 = chain(raw.degree, raw.gens);
  auto l34 = make_subgroup(m22, raw.classes.front().gens);
  CHECK_FALSE(regular_orbit_witness(l34, l34).conjugator.has_value());
}

TEST_CASE("base size") {
  auto g = a5();
  auto r = base_size(a4(g));
  CHECK(r.b == 3);
  CHECK(r.witness.conjugators.size() == 3);
  CHECK(replay_base_witness(r.witness) == 1);
  CHECK(base_size(s3(g)).b == 2);
  auto whole = make_subgroup(g, g->group().generators);
  CHECK_THROWS_AS(base_size(whole), PreconditionError);
  auto raw = oracle::read_group_file(oracle::data_path("m22.grp"));
  auto m22 = chain(raw.degree, raw.gens);
  auto l34 = make_subgroup(m22, raw.classes.front().gens);
  auto rm = base_size(l34);
  CHECK(rm.b == 5);
  CHECK(replay_base_witness(rm.witness) == 1);
}

TEST_CASE("base size agrees with brute force on small groups") {
  for (const char* f : {"a5.grp", "s5.grp", "l2_7.grp", "a6.grp", "l2_8.grp", "l2_11.grp", "l2_13.grp"}) {
    auto raw = oracle::read_group_file(oracle::data_path(f));
    auto g = chain(raw.degree, raw.gens);
    for (const auto& cls : raw.classes) {
      CAPTURE(f);
      CAPTURE(cls.name);
      auto h = make_subgroup(g, cls.gens, cls.name);
      CosetAction act(g, h.generators);
      auto r = base_size(act, h);
      CHECK(r.b == brute_base_size(raw.degree, raw.gens, cls.gens));
      auto k = core(h, act).order;
      CHECK(replay_base_witness(r.witness) == k);
      // information bound |G : core| <= |G : H|^b
      CHECK(std::pow(static_cast<double>(cls.index), static_cast<double>(r.b)) >=
            static_cast<double>(raw.order / static_cast<std::uint64_t>(k)) - 0.5);
    }
  }
}

TEST_CASE("intersection criteria") {
  auto g = a5();
  CHECK_FALSE(order_criterion(s3(g), s3(g)).verdict);
  CHECK(order_criterion(a4(g), a4(g)).verdict);
  CosetAction act(g, a4(g).generators);
  auto dcs = double_cosets(act, a4(g));
  std::vector<Perm> reps;
  for (const auto& d : dcs) reps.push_back(d.representative);
  auto c = double_coset_criterion(act, a4(g), reps);
  CHECK(c.verdict);
  CHECK(c.lhs == 60);
  CHECK_THROWS_AS(double_coset_criterion(act, a4(g), {reps[0], reps[0]}), InputError);
  auto raw = oracle::read_group_file(oracle::data_path("m22.grp"));
  auto m22 = chain(raw.degree, raw.gens);
  SubgroupRecord h = make_subgroup(m22, raw.classes.front().gens);
  for (const auto& cls : raw.classes)
    if (cls.order == 5760) CHECK(order_criterion(h, make_subgroup(m22, cls.gens)).verdict);
}

TEST_CASE("fixed point ratios and qhat") {
  auto g = a5();
  auto h = a4(g);
  CosetAction act(g, h.generators);
  auto classes = prime_order_classes(*g);
  auto f3 = fpr(Perm::from_cycles(5, {{0, 1, 2}}), act, h, &classes);
  CHECK(f3.value == Rational(2, 5));
  REQUIRE(f3.route_b.has_value());
  CHECK(*f3.route_b == Rational(2, 5));
  CHECK(fpr(Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), act, h, &classes).value == 0);
  CHECK_THROWS_AS(fpr(Perm(5), act, h, &classes), PreconditionError);
  CHECK(qhat(act, h, classes, 2).value == Rational(19, 5));
  auto q4 = qhat(act, h, classes, 4);
  CHECK(q4.value == Rational(67, 125));
  CHECK(q4.implies_bound());
  CHECK(to_string(q4.value) == "67/125");
  CHECK_THROWS_AS(qhat(act, h, classes, 1), PreconditionError);
}

TEST_CASE("monte carlo non-base estimate") {
  auto g = a5();
  auto h = a4(g);
  CosetAction act(g, h.generators);
  CHECK(exact_nonbase_probability(act, 2) == 1);
  CHECK(exact_nonbase_probability(act, 3) == Rational(13, 25));
  auto m = monte_carlo_nonbase(act, 3, 20000, 17);
  double p = 13.0 / 25.0, sigma = std::sqrt(p * (1 - p) / 20000);
  CHECK(std::abs(m.frequency() - p) < 4 * sigma);
  auto again = monte_carlo_nonbase(act, 3, 20000, 17);
  CHECK(again.failures == m.failures);
  CHECK(monte_carlo_nonbase(act, 2, 1000, 1).failures == 1000);
  CHECK(monte_carlo_nonbase(act, 6, 1000, 1).frequency() < 0.2);
}

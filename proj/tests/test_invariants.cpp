#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "mindim/errors.hpp"
#include "mindim/invariants.hpp"
#include "oracles.hpp"

using namespace mindim;

namespace {

std::shared_ptr<const StabilizerChain> chain(std::size_t n, std::vector<Perm> gens) {
  return std::make_shared<const StabilizerChain>(GeneratedGroup(n, std::move(gens)));
}

MaximalCollection load(const std::string& file) {
  auto raw = oracle::read_group_file(oracle::data_path(file));
  auto g = chain(raw.degree, raw.gens);
  std::vector<SubgroupRecord> reps;
  for (const auto& c : raw.classes) reps.push_back(make_subgroup(g, c.gens, c.name));
  return MaximalCollection(g, reps, true);
}

using Set = std::vector<int>;

Set meet(const Set& a, const Set& b) {
  Set out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Every maximal subgroup as a sorted set of element indices, from closures and conjugation.
struct BruteGroup {
  std::size_t order = 0;
  std::vector<Set> maximals;
  std::vector<int> class_of;
  Set frattini;
};

BruteGroup brute(std::size_t degree, const std::vector<Perm>& gens, const std::vector<std::vector<Perm>>& classes) {
  BruteGroup b;
  auto elems = oracle::closure(degree, gens);
  b.order = elems.size();
  std::map<Perm, int> index;
  for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    auto h = oracle::closure(degree, classes[c]);
    std::set<Set> conj;
    for (const auto& g : elems) {
      Set s;
      for (const auto& x : h) s.push_back(index[g.inverse() * x * g]);
      std::sort(s.begin(), s.end());
      conj.insert(s);
    }
    for (const auto& s : conj) {
      b.maximals.push_back(s);
      b.class_of.push_back(static_cast<int>(c));
    }
  }
  b.frattini = b.maximals[0];
  for (const auto& m : b.maximals) b.frattini = meet(b.frattini, m);
  return b;
}

std::size_t others_size(const BruteGroup& b, const std::vector<int>& s, std::size_t skip) {
  Set cur;
  bool first = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == skip) continue;
    cur = first ? b.maximals[s[i]] : meet(cur, b.maximals[s[i]]);
    first = false;
  }
  return first ? b.order : cur.size();
}

bool brute_irredundant(const BruteGroup& b, const std::vector<int>& s) {
  std::size_t total = others_size(b, s, s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (others_size(b, s, i) == total) return false;
  return true;
}

struct BruteInvariants {
  std::size_t mindim = 0, maxdim = 0, alpha = 0;
};

// Grows all irredundant sets level by level; subsets of irredundant sets are irredundant.
BruteInvariants brute_invariants(const BruteGroup& b) {
  BruteInvariants r;
  const int n = static_cast<int>(b.maximals.size());
  std::vector<std::vector<int>> level;
  for (int i = 0; i < n; ++i) level.push_back({i});
  // alpha over all subsets in increasing size
  for (std::size_t size = 1; r.alpha == 0; ++size) {
    std::vector<int> pick(size);
    std::function<bool(std::size_t, int, const Set&)> rec = [&](std::size_t d, int start, const Set& cur) {
      if (d == size) return cur == b.frattini;
      for (int i = start; i < n; ++i)
        if (rec(d + 1, i + 1, d == 0 ? b.maximals[i] : meet(cur, b.maximals[i]))) return true;
      return false;
    };
    if (rec(0, 0, {})) r.alpha = size;
  }
  for (std::size_t size = 1; !level.empty(); ++size) {
    r.maxdim = size;
    std::vector<std::vector<int>> next;
    for (const auto& s : level) {
      bool extended = false;
      for (int i = 0; i < n; ++i) {
        if (std::find(s.begin(), s.end(), i) != s.end()) continue;
        auto t = s;
        t.push_back(i);
        if (!brute_irredundant(b, t)) continue;
        extended = true;
        if (i > s.back()) next.push_back(t);
      }
      if (!extended && r.mindim == 0) r.mindim = size;
    }
    level = std::move(next);
  }
  return r;
}

// Least number of conjugates of each class meeting in the core, minimized over classes with core = Frat.
std::size_t brute_beta(const BruteGroup& b) {
  std::size_t best = 0;
  for (int c = 0; c <= *std::max_element(b.class_of.begin(), b.class_of.end()); ++c) {
    std::vector<int> members;
    for (std::size_t i = 0; i < b.maximals.size(); ++i)
      if (b.class_of[i] == c) members.push_back(static_cast<int>(i));
    Set core = b.maximals[members[0]];
    for (int i : members) core = meet(core, b.maximals[i]);
    if (core != b.frattini) continue;
    for (std::size_t size = 1; size <= members.size(); ++size) {
      std::function<bool(std::size_t, std::size_t, const Set&)> rec = [&](std::size_t d, std::size_t start,
                                                                          const Set& cur) {
        if (d == size) return cur == core;
        for (std::size_t i = start; i < members.size(); ++i)
          if (rec(d + 1, i + 1, d == 0 ? b.maximals[members[i]] : meet(cur, b.maximals[members[i]]))) return true;
        return false;
      };
      if (rec(0, 0, {})) {
        if (best == 0 || size < best) best = size;
        break;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("irredundancy") {
  auto g = chain(5, {Perm::from_cycles(5, {{0, 1, 2, 3, 4}}), Perm::from_cycles(5, {{0, 1, 2}})});
  auto a4 = make_subgroup(g, {Perm::from_cycles(5, {{1, 2, 3}}), Perm::from_cycles(5, {{2, 3, 4}})});
  auto a4b = make_subgroup(g, {Perm::from_cycles(5, {{0, 2, 3}}), Perm::from_cycles(5, {{2, 3, 4}})});
  CHECK(subgroup_intersection(a4, a4b).order == 3);
  CHECK(is_irredundant({a4, a4b}));
  CHECK_FALSE(is_irredundant({a4, a4b, a4}));
  CHECK_FALSE(is_irredundant({a4, a4}));
  CHECK(is_irredundant({a4}));
  CHECK_FALSE(is_irredundant({make_subgroup(g, g->group().generators)}));
  CHECK(is_irredundant(std::vector<SubgroupRecord>{}));
}

TEST_CASE("irredundancy agrees with brute force on random sets") {
  auto raw = oracle::read_group_file(oracle::data_path("a6.grp"));
  auto mc = load("a6.grp");
  std::vector<std::vector<Perm>> cls;
  for (const auto& c : raw.classes) cls.push_back(c.gens);
  auto b = brute(raw.degree, raw.gens, cls);
  REQUIRE(b.maximals.size() == mc.size());
  // match collection members to brute-force sets through their element sets
  auto elems = oracle::closure(raw.degree, raw.gens);
  std::map<Perm, int> index;
  for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i);
  std::map<Set, int> where;
  for (std::size_t i = 0; i < b.maximals.size(); ++i) where[b.maximals[i]] = static_cast<int>(i);
  std::vector<int> to_brute(mc.size());
  for (std::size_t i = 0; i < mc.size(); ++i) {
    Set s;
    for (auto key : mc.conjugates()[i].element_keys()) s.push_back(index[mc.group()->unrank(key)]);
    std::sort(s.begin(), s.end());
    REQUIRE(where.count(s));
    to_brute[i] = where[s];
  }
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, mc.size() - 1);
  int irredundant = 0;
  for (int t = 0; t < 400; ++t) {
    MemberSet m;
    std::vector<int> s;
    std::size_t k = 1 + t % 5;
    for (std::size_t j = 0; j < k; ++j) {
      m.push_back(pick(rng));
      s.push_back(to_brute[m.back()]);
    }
    bool v = is_irredundant(mc, m);
    irredundant += v;
    CHECK(v == brute_irredundant(b, s));
    CHECK(replay_intersection_order(mc, m) == others_size(b, s, s.size()));
  }
  CHECK(irredundant > 50);
}

TEST_CASE("maximal collection") {
  auto mc = load("a5.grp");
  CHECK(mc.class_count() == 3);
  CHECK(mc.size() == 21);
  CHECK(mc.frattini().order == 1);
  for (std::size_t i = 0; i < mc.size(); ++i) {
    auto c = mc.class_of(i);
    CHECK(mc.index_of(c, mc.point_of(i)) == i);
    const auto& rep = mc.representatives()[c];
    auto conj = make_subgroup(mc.group(), {rep.generators[0].conjugate_by(mc.conjugator(i)),
                                           rep.generators[1].conjugate_by(mc.conjugator(i))});
    CHECK(*conj.keys == *mc.conjugates()[i].keys);
  }
  // an intermediate subgroup is rejected by the primitivity certificate
  auto g = mc.group();
  auto a3 = make_subgroup(g, {Perm::from_cycles(5, {{0, 1, 2}})}, "A3");
  CHECK_THROWS_AS(MaximalCollection(g, {a3}, true), InputError);
  MaximalCollection partial(g, {mc.representatives()[0]}, false);
  CHECK_THROWS_AS(compute_alpha(partial), PreconditionError);
  CHECK_THROWS_AS(compute_mindim(partial), PreconditionError);
  CHECK_THROWS_AS(compute_maxdim(partial), PreconditionError);
  CHECK_THROWS_AS(compute_beta(partial), PreconditionError);
}

TEST_CASE("invariants agree with brute force on small groups") {
  for (const char* f : {"a5.grp", "s5.grp", "l2_7.grp", "a6.grp", "l2_8.grp"}) {
    CAPTURE(f);
    auto raw = oracle::read_group_file(oracle::data_path(f));
    std::vector<std::vector<Perm>> cls;
    for (const auto& c : raw.classes) cls.push_back(c.gens);
    auto b = brute(raw.degree, raw.gens, cls);
    auto expect = brute_invariants(b);
    auto mc = load(f);
    CHECK(mc.frattini().order == b.frattini.size());
    auto a = compute_alpha(mc);
    CHECK(a.value == expect.alpha);
    CHECK(replay_intersection_order(mc, a.witness) == b.frattini.size());
    auto m = compute_mindim(mc, a);
    CHECK(m.exact());
    CHECK(m.upper == expect.mindim);
    CHECK(is_maximal_irredundant(mc, m.witness));
    auto x = compute_maxdim(mc);
    CHECK(x.exact);
    CHECK(x.value == expect.maxdim);
    CHECK(is_irredundant(mc, x.witness));
    auto be = compute_beta(mc);
    REQUIRE(be.value.has_value());
    CHECK(*be.value == brute_beta(b));
    CHECK(replay_base_witness(be.witness) == b.frattini.size());
  }
}

TEST_CASE("alternating group values") {
  auto a5 = load("a5.grp");
  InvariantReport r5;
  r5.alpha = compute_alpha(a5);
  r5.mindim = compute_mindim(a5, r5.alpha);
  r5.beta = compute_beta(a5);
  r5.maxdim = compute_maxdim(a5);
  CHECK(r5.alpha->value == 2);
  CHECK(r5.mindim->upper == 2);
  CHECK(*r5.beta->value == 2);
  CHECK(r5.maxdim->value == 3);
  CHECK(r5.maxdim->exact);
  CHECK(minmax_compare(r5) == Verdict::holds);
  CHECK(chain_consistent(r5));

  auto a6 = load("a6.grp");
  InvariantReport r6;
  r6.alpha = compute_alpha(a6);
  r6.mindim = compute_mindim(a6, r6.alpha);
  r6.maxdim = compute_maxdim(a6);
  CHECK(r6.alpha->value == 3);
  CHECK(r6.mindim->exact());
  CHECK(r6.mindim->upper == 3);
  CHECK(r6.maxdim->value == 4);
  CHECK(minmax_compare(r6) == Verdict::holds);
}

TEST_CASE("S3 has Maxdim 2") {
  auto g = chain(3, {Perm::from_cycles(3, {{0, 1}}), Perm::from_cycles(3, {{0, 1, 2}})});
  auto t = make_subgroup(g, {Perm::from_cycles(3, {{0, 1}})}, "2");
  auto c3 = make_subgroup(g, {Perm::from_cycles(3, {{0, 1, 2}})}, "3");
  MaximalCollection mc(g, {t, c3}, true);
  CHECK(mc.size() == 4);
  CHECK(mc.normal(1));
  auto x = compute_maxdim(mc);
  CHECK(x.exact);
  CHECK(x.value == 2);
  CHECK(compute_mindim(mc).upper == 2);
  // only the three point stabilizers are core-free
  CHECK(*compute_beta(mc).value == 2);
}

TEST_CASE("maxdim falls back to a minimal base") {
  auto mc = load("a6.grp");
  auto x = compute_maxdim(mc, MaxdimOptions{1});
  CHECK_FALSE(x.exact);
  // A6 on 6 points needs 4 base points
  CHECK(x.value == 4);
  CHECK(x.base_class.has_value());
  CHECK(is_irredundant(mc, x.witness));
  CHECK(x.witness.size() == x.value);
}

TEST_CASE("values do not depend on the chosen conjugate of the data") {
  auto raw = oracle::read_group_file(oracle::data_path("l2_7.grp"));
  Perm s = Perm::from_cycles(raw.degree, {{0, 3, 5}, {1, 6}});
  std::vector<Perm> gens;
  for (const auto& x : raw.gens) gens.push_back(x.conjugate_by(s));
  auto g = chain(raw.degree, gens);
  std::vector<SubgroupRecord> reps;
  for (const auto& c : raw.classes) {
    std::vector<Perm> h;
    for (const auto& x : c.gens) h.push_back(x.conjugate_by(s));
    reps.push_back(make_subgroup(g, h, c.name));
  }
  MaximalCollection conj(g, reps, true);
  auto base = load("l2_7.grp");
  CHECK(compute_alpha(conj).value == compute_alpha(base).value);
  CHECK(compute_mindim(conj).upper == compute_mindim(base).upper);
  CHECK(*compute_beta(conj).value == *compute_beta(base).value);
}

TEST_CASE("mixed witness in a small case") {
  auto mc = load("a6.grp");
  // classes 3 and 4 are the two S4 classes
  auto w = mixed_base_witness(mc, 3, 4);
  REQUIRE(w.has_value());
  CHECK(w->intersection_order == 1);
  CHECK(replay_mixed_witness(mc, *w) == 1);
}

#include "mindim/basebounds.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>

#include "mindim/errors.hpp"
#include "mindim/limits.hpp"

namespace mindim {

std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

// ---------------------------------------------------------------- StabilizerTable

StabilizerTable::StabilizerTable(const CosetAction& action) : degree_(action.degree()) {
  StabilizerChain img(GeneratedGroup(degree_, action.stabilizer_images()));
  if (img.order() > limits().max_elements ||
      img.order() * degree_ > BigInt(limits().max_elements) * 200)
    throw ResourceError("budget exceeded: stabilizer table too large");
  count_ = img.order_u64();
  table_.reserve(count_ * degree_);
  img.for_each_element([&](std::uint64_t, const Perm& x) {
    table_.insert(table_.end(), x.images().begin(), x.images().end());
  });
  for (std::size_t p = 0; p < degree_; ++p)
    if (table_[p] != p) throw InternalError("stabilizer table: first element is not the identity");
}

std::vector<std::vector<Point>> StabilizerTable::orbits(const std::vector<std::uint32_t>& elements) const {
  std::vector<std::uint8_t> seen(degree_, 0);
  std::vector<std::vector<Point>> out;
  for (Point p = 0; p < degree_; ++p) {
    if (seen[p]) continue;
    std::vector<Point> orb;
    for (auto e : elements) {
      Point q = table_[e * degree_ + p];
      if (!seen[q]) {
        seen[q] = 1;
        orb.push_back(q);
      }
    }
    std::sort(orb.begin(), orb.end());
    out.push_back(std::move(orb));
  }
  return out;
}

std::vector<std::uint32_t> StabilizerTable::fixing(const std::vector<std::uint32_t>& elements, Point p) const {
  std::vector<std::uint32_t> out;
  for (auto e : elements)
    if (table_[e * degree_ + p] == p) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------- regular orbits

RegularOrbitResult regular_orbit_witness(const CosetAction& action, const SubgroupRecord& k) {
  std::vector<Perm> images;
  for (const auto& x : k.generators) images.push_back(action.image(x));
  RegularOrbitResult r;
  for (const auto& o : orbits(action.degree(), images)) {
    r.orbit_lengths.push_back(o.size());
    if (!r.point && BigInt(o.size()) == k.order) {
      r.point = o.front();
      r.conjugator = action.representative(o.front());
    }
  }
  std::sort(r.orbit_lengths.begin(), r.orbit_lengths.end());
  return r;
}

RegularOrbitResult regular_orbit_witness(const SubgroupRecord& h, const SubgroupRecord& k) {
  if (h.parent != k.parent) throw InputError("regular orbit: subgroups of different groups");
  CosetAction action(h.parent, h.generators);
  return regular_orbit_witness(action, k);
}

// ---------------------------------------------------------------- base size

namespace {

std::uint64_t index_hash(const std::vector<std::uint32_t>& v) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ v.size();
  for (auto x : v) {
    h ^= x;
    h *= 0x100000001b3ull;
  }
  return h;
}

class BaseSearch {
 public:
  explicit BaseSearch(const StabilizerTable& t) : t_(t) {}

  std::vector<Point> greedy() const {
    std::vector<std::uint32_t> s(t_.size());
    for (std::uint32_t i = 0; i < s.size(); ++i) s[i] = i;
    std::vector<Point> pts;
    while (s.size() > 1) {
      auto orbs = t_.orbits(s);
      const std::vector<Point>* best = nullptr;
      for (const auto& o : orbs)
        if (!best || o.size() > best->size()) best = &o;
      pts.push_back(best->front());
      s = t_.fixing(s, best->front());
    }
    return pts;
  }

  // Points p_2, ..., p_c with trivial pointwise stabilizer in H, if c - 1 of them suffice.
  std::optional<std::vector<Point>> search(std::size_t depth) {
    std::vector<std::uint32_t> s(t_.size());
    for (std::uint32_t i = 0; i < s.size(); ++i) s[i] = i;
    path_.clear();
    if (dfs(s, depth)) return path_;
    return std::nullopt;
  }

 private:
  bool dfs(const std::vector<std::uint32_t>& s, std::size_t remaining) {
    if (s.size() == 1) return true;
    if (remaining == 0) return false;
    if ((++visits_ & 0xff) == 0) deadline_.check("base size search");
    std::uint64_t h = index_hash(s);
    auto it = memo_.find(h);
    if (it != memo_.end())
      for (const auto& [set, depth] : it->second)
        if (depth >= remaining && set == s) return false;
    auto orbs = t_.orbits(s);
    std::sort(orbs.begin(), orbs.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
    });
    // every further point divides |S| by at most the longest orbit length
    BigInt reach = 1;
    for (std::size_t i = 0; i < remaining; ++i) reach *= orbs.front().size();
    if (reach >= s.size()) {
      for (const auto& o : orbs) {
        if (o.size() == 1) break;
        path_.push_back(o.front());
        if (dfs(t_.fixing(s, o.front()), remaining - 1)) return true;
        path_.pop_back();
      }
    }
    auto& bucket = memo_[h];
    bool updated = false;
    for (auto& [set, depth] : bucket)
      if (set == s) {
        depth = std::max(depth, remaining);
        updated = true;
      }
    if (!updated) bucket.emplace_back(s, remaining);
    return false;
  }

  const StabilizerTable& t_;
  Deadline deadline_;
  std::uint64_t visits_ = 0;
  std::vector<Point> path_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::vector<std::uint32_t>, std::size_t>>> memo_;
};

}  // namespace

BaseSizeResult base_size(const CosetAction& action, const SubgroupRecord& h) {
  const std::size_t n = action.degree();
  if (n <= 1) throw PreconditionError("base size: H must be a proper subgroup");
  StabilizerTable table(action);
  BaseSizeResult r;
  // |G : core| = n |H : core| <= n^b
  BigInt target = BigInt(table.size()) * n, power = 1;
  r.lower_bound = 0;
  while (power < target) {
    power *= n;
    ++r.lower_bound;
  }
  r.lower_bound = std::max<std::size_t>(r.lower_bound, 1);
  BaseSearch search(table);
  std::vector<Point> best = search.greedy();
  r.greedy_upper = best.size() + 1;
  std::size_t b = r.greedy_upper;
  try {
    for (std::size_t c = r.lower_bound; c < r.greedy_upper; ++c) {
      if (auto pts = search.search(c - 1)) {
        best = *pts;
        b = c;
        break;
      }
    }
  } catch (const ResourceError&) {
    throw ResourceError("budget exceeded: base size in [" + std::to_string(r.lower_bound) + ", " +
                        std::to_string(r.greedy_upper) + "]");
  }
  r.b = b;
  r.witness.h = h;
  r.witness.points.push_back(0);
  for (Point p : best) r.witness.points.push_back(p);
  for (Point p : r.witness.points) r.witness.conjugators.push_back(action.representative(p));
  StabilizerChain hc(GeneratedGroup(action.parent().degree(), action.subgroup_generators()));
  r.witness.intersection_order = hc.order() / table.size();
  return r;
}

BaseSizeResult base_size(const SubgroupRecord& h) {
  CosetAction action(h.parent, h.generators);
  return base_size(action, h);
}

BigInt replay_base_witness(const BaseWitness& w) {
  std::optional<ElementKeys> cur;
  for (const auto& g : w.conjugators) {
    std::vector<Perm> gens;
    for (const auto& x : w.h.generators) gens.push_back(x.conjugate_by(g));
    auto keys = element_keys(*w.h.parent, gens);
    cur = cur ? intersect_keys(*cur, keys) : keys;
  }
  return cur ? BigInt(cur->size()) : BigInt(0);
}

// ---------------------------------------------------------------- criteria

CriterionResult order_criterion(const SubgroupRecord& h, const SubgroupRecord& k) {
  if (h.parent != k.parent) throw InputError("criterion: subgroups of different groups");
  CriterionResult r;
  r.lhs = h.order * k.order;
  r.rhs = h.parent->order();
  r.verdict = r.lhs > r.rhs;
  return r;
}

CriterionResult double_coset_criterion(const CosetAction& action, const SubgroupRecord& k,
                                       const std::vector<Perm>& reps) {
  std::vector<Perm> images;
  for (const auto& x : k.generators) images.push_back(action.image(x));
  auto orbs = orbits(action.degree(), images);
  std::vector<std::size_t> orbit_of(action.degree());
  for (std::size_t i = 0; i < orbs.size(); ++i)
    for (Point p : orbs[i]) orbit_of[p] = i;
  StabilizerChain hc(GeneratedGroup(action.parent().degree(), action.subgroup_generators()));
  BigInt hk = hc.order() * k.order;
  CriterionResult r;
  r.lhs = 0;
  r.rhs = action.parent().order() - hk;
  std::vector<bool> used(orbs.size(), false);
  bool small = true;
  for (const auto& x : reps) {
    if (!action.parent().contains(x)) throw InputError("criterion: representative not in G");
    std::size_t o = orbit_of[action.point_of(x)];
    if (used[o]) throw InputError("criterion: representatives share a double coset");
    used[o] = true;
    BigInt size = hc.order() * orbs[o].size();
    r.sizes.push_back(static_cast<std::uint64_t>(size));
    small = small && size < hk;
    r.lhs += size;
  }
  r.verdict = small && r.lhs > r.rhs;
  return r;
}

// ---------------------------------------------------------------- fixed point ratios

namespace {

std::uint64_t fixed_points(const CosetAction& action, const Perm& x) {
  std::uint64_t f = 0;
  for (Point p = 0; p < action.degree(); ++p) f += action.act(p, x) == p;
  return f;
}

}  // namespace

FprValue fpr(const Perm& x, const CosetAction& action, const SubgroupRecord& h, const ClassTable* classes) {
  const StabilizerChain& g = action.parent();
  if (!g.contains(x)) throw InputError("fpr: element not in G");
  FprValue v;
  v.route_a = Rational(BigInt(fixed_points(action, x)), BigInt(action.degree()));
  v.value = v.route_a;
  if (classes && h.has_keys()) {
    std::int32_t id = classes->class_of[g.rank_member(x)];
    if (id < 0) throw PreconditionError("fpr: element does not have prime order");
    std::uint64_t meet = 0;
    for (auto k : h.element_keys()) meet += classes->class_of[k] == id;
    v.route_b = Rational(BigInt(meet), BigInt(classes->classes[id].size));
    if (*v.route_b != v.route_a) throw InternalError("fpr: fixed point count disagrees with class count");
  }
  return v;
}

QhatResult qhat(const CosetAction& action, const SubgroupRecord& h, const ClassTable& classes, unsigned c) {
  if (action.degree() <= 1) throw PreconditionError("qhat: H must be a proper subgroup");
  if (c < 2) throw PreconditionError("qhat: c must be at least 2");
  std::vector<std::uint64_t> meet(classes.classes.size(), 0);
  bool route_b = h.has_keys();
  if (route_b)
    for (auto k : h.element_keys())
      if (classes.class_of[k] >= 0) ++meet[classes.class_of[k]];
  QhatResult r;
  r.c = c;
  r.value = 0;
  for (std::size_t i = 0; i < classes.classes.size(); ++i) {
    const auto& cls = classes.classes[i];
    QhatTerm t;
    t.class_index = i;
    t.class_size = cls.size;
    t.fixed_points = fixed_points(action, cls.representative);
    t.fpr = Rational(BigInt(t.fixed_points), BigInt(action.degree()));
    if (route_b) {
      if (Rational(BigInt(meet[i]), BigInt(cls.size)) != t.fpr)
        throw InternalError("qhat: fixed point count disagrees with class count");
      t.route_b = true;
    }
    Rational term = t.fpr;
    Rational p = 1;
    for (unsigned j = 0; j < c; ++j) p *= term;
    r.value += Rational(BigInt(cls.size)) * p;
    r.terms.push_back(t);
  }
  return r;
}

// ---------------------------------------------------------------- Monte Carlo

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct FixerBits {
  std::size_t words = 0;
  std::size_t size = 0;
  std::vector<std::uint64_t> bits;  // degree rows of `words` words
};

FixerBits fixer_bits(const StabilizerTable& t) {
  FixerBits f;
  f.words = (t.size() + 63) / 64;
  f.size = t.size();
  f.bits.assign(f.words * t.degree(), 0);
  for (std::size_t e = 0; e < t.size(); ++e)
    for (Point p = 0; p < t.degree(); ++p)
      if (t.image(e, p) == p) f.bits[p * f.words + e / 64] |= std::uint64_t{1} << (e % 64);
  return f;
}

// True iff some non-identity element fixes every listed point.
bool stabilized(const FixerBits& f, const std::vector<Point>& pts, std::vector<std::uint64_t>& acc) {
  if (pts.empty()) return f.size > 1;
  acc.assign(f.bits.begin() + pts[0] * f.words, f.bits.begin() + (pts[0] + 1) * f.words);
  acc[0] &= ~std::uint64_t{1};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const std::uint64_t* row = f.bits.data() + pts[i] * f.words;
    bool any = false;
    for (std::size_t w = 0; w < f.words; ++w) {
      acc[w] &= row[w];
      any = any || acc[w];
    }
    if (!any) return false;
  }
  for (auto w : acc)
    if (w) return true;
  return false;
}

}  // namespace

MonteCarloResult monte_carlo_nonbase(const CosetAction& action, unsigned c, std::uint64_t trials,
                                     std::uint64_t seed) {
  if (c < 1) throw PreconditionError("monte carlo: c must be positive");
  StabilizerTable t(action);
  FixerBits f = fixer_bits(t);
  const std::size_t n = action.degree();
  auto run = [&](std::uint64_t begin, std::uint64_t end) {
    std::uint64_t fails = 0;
    std::vector<Point> pts(c - 1);
    std::vector<std::uint64_t> acc;
    Deadline deadline;
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      if ((trial & 0xfff) == 0) deadline.check("monte carlo");
      // the first point is the coset H itself, by transitivity
      std::mt19937_64 rng(splitmix(seed ^ splitmix(trial)));
      std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
      for (auto& p : pts) p = pick(rng);
      fails += stabilized(f, pts, acc);
    }
    return fails;
  };
  unsigned threads = std::max(1u, limits().threads);
  MonteCarloResult r;
  r.trials = trials;
  if (threads == 1 || trials < 1024) {
    r.failures = run(0, trials);
    return r;
  }
  std::vector<std::uint64_t> part(threads, 0);
  parallel_for(threads, [&](std::size_t i) {
    part[i] = run(trials * i / threads, trials * (i + 1) / threads);
  });
  for (auto x : part) r.failures += x;
  return r;
}

Rational exact_nonbase_probability(const CosetAction& action, unsigned c) {
  if (c < 1) throw PreconditionError("exact probability: c must be positive");
  StabilizerTable t(action);
  FixerBits f = fixer_bits(t);
  const std::size_t n = action.degree();
  BigInt total = 1;
  for (unsigned i = 1; i < c; ++i) total *= n;
  if (total > limits().max_enumeration) throw ResourceError("budget exceeded: too many tuples");
  std::vector<Point> pts(c - 1, 0);
  std::vector<std::uint64_t> acc;
  BigInt bad = 0;
  while (true) {
    bad += stabilized(f, pts, acc);
    std::size_t i = 0;
    while (i < pts.size() && ++pts[i] == n) pts[i++] = 0;
    if (i == pts.size()) break;
  }
  return Rational(bad, total);
}

}  // namespace mindim

#include "mindim/invariants.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>

#include "mindim/errors.hpp"
#include "mindim/limits.hpp"

namespace mindim {

struct MaximalCollection::Expansion {
  std::once_flag once;
  std::vector<SubgroupRecord> conj;
  std::vector<std::size_t> cls_of;
  std::vector<Point> point;
  std::vector<std::size_t> start;
  std::vector<std::vector<std::size_t>> index_of_point;
  std::once_flag frat_once;
  SubgroupRecord frat;
};

MaximalCollection::MaximalCollection(std::shared_ptr<const StabilizerChain> group,
                                     std::vector<SubgroupRecord> representatives, bool complete, bool certify)
    : group_(std::move(group)), reps_(std::move(representatives)), complete_(complete),
      lazy_(std::make_shared<Expansion>()) {
  actions_.resize(reps_.size());
  normal_.resize(reps_.size());
  std::vector<std::string> failure(reps_.size());
  parallel_for(reps_.size(), [&](std::size_t c) {
    const auto& h = reps_[c];
    if (h.parent != group_) throw InputError("maximal collection: class " + h.name + " has a different parent");
    if (h.order == group_->order())
      throw InputError("maximal collection: class " + h.name + " is the whole group");
    auto act = std::make_shared<const CosetAction>(group_, h.generators);
    if (certify) {
      auto pr = is_primitive(*act);
      if (!pr.primitive)
        failure[c] = "maximal collection: class " + h.name + " has an imprimitive coset action (block of size " +
                     std::to_string(pr.block.size()) + ")";
    }
    actions_[c] = act;
  });
  for (const auto& f : failure)
    if (!f.empty()) throw InputError(f);
  for (std::size_t c = 0; c < reps_.size(); ++c) normal_[c] = is_normal(reps_[c]);
}

void MaximalCollection::require_complete(const char* what) const {
  if (!complete_) throw PreconditionError(std::string(what) + ": the maximal subgroup list is not complete");
}

const std::vector<SubgroupRecord>& MaximalCollection::conjugates() const {
  std::call_once(lazy_->once, [this] {
    std::vector<std::vector<SubgroupRecord>> per(reps_.size());
    parallel_for(reps_.size(), [&](std::size_t c) {
      per[c] = expand_conjugates(reps_[c], *actions_[c], !normal_[c]);
    });
    auto& e = *lazy_;
    for (std::size_t c = 0; c < reps_.size(); ++c) {
      e.start.push_back(e.conj.size());
      std::vector<std::size_t> idx(actions_[c]->degree());
      for (Point p = 0; p < idx.size(); ++p) idx[p] = e.conj.size() + (normal_[c] ? 0 : p);
      e.index_of_point.push_back(std::move(idx));
      for (std::size_t j = 0; j < per[c].size(); ++j) {
        e.conj.push_back(std::move(per[c][j]));
        e.cls_of.push_back(c);
        e.point.push_back(static_cast<Point>(j));
      }
    }
    e.start.push_back(e.conj.size());
  });
  return lazy_->conj;
}

std::size_t MaximalCollection::class_of(std::size_t i) const {
  conjugates();
  return lazy_->cls_of[i];
}

std::size_t MaximalCollection::class_start(std::size_t cls) const {
  conjugates();
  return lazy_->start[cls];
}

std::size_t MaximalCollection::class_size(std::size_t cls) const {
  conjugates();
  return lazy_->start[cls + 1] - lazy_->start[cls];
}

Point MaximalCollection::point_of(std::size_t i) const {
  conjugates();
  return lazy_->point[i];
}

const Perm& MaximalCollection::conjugator(std::size_t i) const {
  return actions_[class_of(i)]->representative(point_of(i));
}

std::size_t MaximalCollection::index_of(std::size_t cls, Point p) const {
  conjugates();
  return lazy_->index_of_point[cls][p];
}

const SubgroupRecord& MaximalCollection::frattini() const {
  require_complete("frattini");
  std::call_once(lazy_->frat_once, [this] { lazy_->frat = mindim::frattini(conjugates(), complete_); });
  return lazy_->frat;
}

namespace {

// Intersection of the others, or the whole group when there are none.
struct Others {
  const ElementKeys* keys = nullptr;
  std::uint64_t size(const ElementKeys& c) const { return keys ? intersection_size(*keys, c) : c.size(); }
};

// An irredundant set with its total intersection and, per member, the intersection of the others.
struct IrredundantState {
  MemberSet members;
  std::vector<std::shared_ptr<const ElementKeys>> total;  // one per depth
  std::vector<std::vector<std::shared_ptr<const ElementKeys>>> others;

  const ElementKeys& top() const { return *total.back(); }
};

class Engine {
 public:
  explicit Engine(const MaximalCollection& mc) : mc_(mc), conj_(mc.conjugates()) {
    const std::size_t k = mc.class_count();
    second_.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t a = mc.class_start(c);
      for (std::size_t j = c; j < k; ++j) {
        if (mc.normal(j)) {
          if (mc.class_start(j) != a) second_[c].push_back(mc.class_start(j));
          continue;
        }
        std::vector<std::size_t> found;
        for (const auto& d : double_cosets(mc.action(j), mc.representatives()[c])) {
          std::size_t b = mc.index_of(j, d.point);
          if (b != a) found.push_back(b);
        }
        std::sort(found.begin(), found.end());
        found.erase(std::unique(found.begin(), found.end()), found.end());
        second_[c].insert(second_[c].end(), found.begin(), found.end());
      }
    }
    max_index_.resize(k + 1, 1);
    for (std::size_t c = k; c-- > 0;)
      max_index_[c] = std::max<std::uint64_t>(max_index_[c + 1], mc.action(c).degree());
  }

  const ElementKeys& keys(std::size_t i) const { return conj_[i].element_keys(); }
  const std::vector<std::size_t>& second(std::size_t c) const { return second_[c]; }
  // Conjugates of classes >= c, in global order.
  std::size_t pool_begin(std::size_t c) const { return mc_.class_start(c); }
  std::size_t size() const { return conj_.size(); }
  std::uint64_t max_index(std::size_t c) const { return max_index_[c]; }

  // Whether adding conjugate i keeps the state irredundant.
  bool extends(const IrredundantState& s, std::size_t i) const {
    const ElementKeys& c = keys(i);
    std::uint64_t t = intersection_size(s.top(), c);
    if (t == s.top().size()) return false;
    for (const auto& o : s.others.back())
      if (Others{o.get()}.size(c) <= t) return false;
    return true;
  }

  void push(IrredundantState& s, std::size_t i) const {
    const ElementKeys& c = keys(i);
    std::vector<std::shared_ptr<const ElementKeys>> next;
    if (s.members.empty()) {
      next.push_back(nullptr);
      s.total.push_back(conj_[i].keys);
    } else {
      for (const auto& o : s.others.back())
        next.push_back(o ? std::make_shared<const ElementKeys>(intersect_keys(*o, c)) : conj_[i].keys);
      next.push_back(s.total.back());
      s.total.push_back(std::make_shared<const ElementKeys>(intersect_keys(s.top(), c)));
    }
    s.others.push_back(std::move(next));
    s.members.push_back(i);
  }

  void pop(IrredundantState& s) const {
    s.members.pop_back();
    s.total.pop_back();
    s.others.pop_back();
  }

  bool maximal(const IrredundantState& s) const {
    for (std::size_t i = 0; i < size(); ++i)
      if (extends(s, i)) return false;
    return true;
  }

 private:
  const MaximalCollection& mc_;
  const std::vector<SubgroupRecord>& conj_;
  std::vector<std::vector<std::size_t>> second_;
  std::vector<std::uint64_t> max_index_;
};

std::uint64_t saturating_cap(std::uint64_t base, std::uint64_t factor, std::size_t times) {
  std::uint64_t cap = base;
  for (std::size_t i = 0; i < times; ++i) {
    if (cap > std::numeric_limits<std::uint64_t>::max() / factor) return std::numeric_limits<std::uint64_t>::max();
    cap *= factor;
  }
  return cap;
}

// Runs search(c) for each class, stopping classes above the lowest success.
template <class Search>
std::optional<std::pair<std::size_t, MemberSet>> first_success(std::size_t classes, Search search) {
  std::atomic<std::size_t> best{classes};
  std::vector<std::optional<MemberSet>> found(classes);
  parallel_for(classes, [&](std::size_t c) {
    if (best.load() < c) return;
    found[c] = search(c, best);
    if (found[c]) {
      std::size_t cur = best.load();
      while (c < cur && !best.compare_exchange_weak(cur, c)) {
      }
    }
  });
  for (std::size_t c = 0; c < classes; ++c)
    if (found[c]) return std::make_pair(c, *found[c]);
  return std::nullopt;
}

class NodeCounter {
 public:
  explicit NodeCounter(const char* what) : what_(what) {}
  void tick() {
    if ((++nodes_ & 0x3ff) == 0) deadline_.check(what_);
  }
  std::uint64_t nodes() const { return nodes_; }

 private:
  const char* what_;
  Deadline deadline_;
  std::uint64_t nodes_ = 0;
};

// A set of r maximal subgroups meeting in the Frattini subgroup, with first member class c.
std::optional<MemberSet> alpha_search(const Engine& e, const MaximalCollection& mc, std::size_t c, std::size_t r,
                                      std::uint64_t frat, const std::atomic<std::size_t>& best,
                                      std::atomic<std::uint64_t>& total_nodes) {
  NodeCounter counter("alpha search");
  const std::size_t a = mc.class_start(c);
  const ElementKeys& ka = e.keys(a);
  if (ka.size() > saturating_cap(frat, e.max_index(c), r - 1)) return std::nullopt;
  MemberSet chosen{a, 0};
  std::vector<std::size_t> pool;
  std::function<bool(const ElementKeys&, std::size_t, std::size_t)> dfs = [&](const ElementKeys& cur,
                                                                                std::size_t rem,
                                                                                std::size_t pos) -> bool {
    counter.tick();
    if (best.load() < c) return false;
    if (cur.size() == frat) return true;
    if (rem == 0) return false;
    if (cur.size() > saturating_cap(frat, e.max_index(mc.class_of(chosen[1])), rem)) return false;
    for (std::size_t p = pos; p < pool.size(); ++p) {
      std::size_t i = pool[p];
      if (i == chosen[0] || i == chosen[1]) continue;
      auto next = intersect_keys(cur, e.keys(i));
      if (next.size() == cur.size()) continue;
      if (rem == 1 && next.size() != frat) continue;
      chosen.push_back(i);
      if (dfs(next, rem - 1, p + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  bool ok = false;
  for (std::size_t b : e.second(c)) {
    chosen.resize(1);
    chosen.push_back(b);
    auto cur = intersect_keys(ka, e.keys(b));
    if (cur.size() == frat) {
      ok = true;
      break;
    }
    if (r <= 2) continue;
    // candidates by ascending order, then global index
    pool.clear();
    for (std::size_t i = e.pool_begin(mc.class_of(b)); i < e.size(); ++i) pool.push_back(i);
    std::stable_sort(pool.begin(), pool.end(),
                     [&](std::size_t x, std::size_t y) { return e.keys(x).size() < e.keys(y).size(); });
    if (dfs(cur, r - 2, 0)) {
      ok = true;
      break;
    }
  }
  total_nodes += counter.nodes();
  if (!ok) return std::nullopt;
  return chosen;
}

// An irredundant s-set with first member class c that no maximal subgroup extends.
std::optional<MemberSet> maximal_irredundant_search(const Engine& e, const MaximalCollection& mc, std::size_t c,
                                                    std::size_t s, const std::atomic<std::size_t>& best,
                                                    std::atomic<std::uint64_t>& sets) {
  NodeCounter counter("mindim search");
  IrredundantState st;
  e.push(st, mc.class_start(c));
  std::uint64_t checked = 0;
  std::function<bool(std::size_t)> dfs = [&](std::size_t pos) -> bool {
    counter.tick();
    if (best.load() < c) return false;
    if (st.members.size() == s) {
      ++checked;
      return e.maximal(st);
    }
    for (std::size_t i = pos; i < e.size(); ++i) {
      if (i == st.members[0] || i == st.members[1] || !e.extends(st, i)) continue;
      e.push(st, i);
      if (dfs(i + 1)) return true;
      e.pop(st);
    }
    return false;
  };
  bool ok = false;
  if (s == 1) {
    ++checked;
    ok = e.maximal(st);
  } else {
    for (std::size_t b : e.second(c)) {
      if (!e.extends(st, b)) continue;
      e.push(st, b);
      if (dfs(e.pool_begin(mc.class_of(b)))) {
        ok = true;
        break;
      }
      e.pop(st);
    }
  }
  sets += checked;
  if (!ok) return std::nullopt;
  return st.members;
}

// Least b with |G : core| <= n^b.
std::size_t base_lower_bound(const BigInt& image_order, std::size_t degree) {
  BigInt target = image_order, p = 1;
  std::size_t b = 0;
  while (p < target) {
    p *= degree;
    ++b;
  }
  return b;
}

}  // namespace

bool is_irredundant(const std::vector<SubgroupRecord>& sets) {
  const std::size_t n = sets.size();
  if (n == 0) return true;
  for (const auto& s : sets)
    if (s.parent != sets[0].parent) throw InputError("irredundancy: subgroups of different groups");
  if (n == 1) return sets[0].order != sets[0].parent->order();
  std::vector<ElementKeys> prefix(n + 1), suffix(n + 1);
  prefix[1] = sets[0].element_keys();
  for (std::size_t i = 1; i < n; ++i) prefix[i + 1] = intersect_keys(prefix[i], sets[i].element_keys());
  suffix[n - 1] = sets[n - 1].element_keys();
  for (std::size_t i = n - 1; i-- > 0;) suffix[i] = intersect_keys(suffix[i + 1], sets[i].element_keys());
  const std::size_t total = prefix[n].size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t others;
    if (i == 0)
      others = suffix[1].size();
    else if (i == n - 1)
      others = prefix[n - 1].size();
    else
      others = intersection_size(prefix[i], suffix[i + 1]);
    if (others == total) return false;
  }
  return true;
}

bool is_irredundant(const MaximalCollection& mc, const MemberSet& members) {
  std::vector<SubgroupRecord> sets;
  for (auto i : members) sets.push_back(mc.conjugates().at(i));
  return is_irredundant(sets);
}

bool is_maximal_irredundant(const MaximalCollection& mc, const MemberSet& members) {
  if (!is_irredundant(mc, members)) return false;
  Engine e(mc);
  IrredundantState st;
  for (auto i : members) e.push(st, i);
  return e.maximal(st);
}

BigInt replay_intersection_order(const MaximalCollection& mc, const MemberSet& members) {
  if (members.empty()) return mc.group()->order();
  ElementKeys cur;
  for (std::size_t k = 0; k < members.size(); ++k) {
    std::size_t i = members[k];
    const auto& rep = mc.representatives()[mc.class_of(i)];
    const Perm& r = mc.conjugator(i);
    std::vector<Perm> gens;
    for (const auto& x : rep.generators) gens.push_back(x.conjugate_by(r));
    auto keys = element_keys(*mc.group(), gens);
    cur = k == 0 ? keys : intersect_keys(cur, keys);
  }
  return cur.size();
}

AlphaResult compute_alpha(const MaximalCollection& mc) {
  mc.require_complete("alpha");
  AlphaResult out;
  if (mc.class_count() == 0) return out;
  const std::uint64_t frat = mc.frattini().order_u64();
  Engine e(mc);
  for (std::size_t c = 0; c < mc.class_count(); ++c)
    if (e.keys(mc.class_start(c)).size() == frat) {
      out.value = 1;
      out.witness = {mc.class_start(c)};
      return out;
    }
  std::atomic<std::uint64_t> nodes{0};
  for (std::size_t r = 2;; ++r) {
    auto hit = first_success(mc.class_count(), [&](std::size_t c, const std::atomic<std::size_t>& best) {
      return alpha_search(e, mc, c, r, frat, best, nodes);
    });
    if (hit) {
      out.value = r;
      out.witness = hit->second;
      out.nodes = nodes.load();
      return out;
    }
    if (r > 64) throw InternalError("alpha: no intersection reached the Frattini subgroup");
  }
}

MindimResult compute_mindim(const MaximalCollection& mc, const std::optional<AlphaResult>& alpha_hint) {
  mc.require_complete("mindim");
  MindimResult out;
  if (mc.size() == 0) return out;
  Engine e(mc);
  // greedy extension gives some maximal irredundant set
  IrredundantState st;
  e.push(st, 0);
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < e.size() && !grew; ++i)
      if (e.extends(st, i)) {
        e.push(st, i);
        grew = true;
      }
  }
  out.upper = st.members.size();
  out.witness = st.members;
  out.note = "upper bound from greedy extension";
  std::optional<AlphaResult> a = alpha_hint;
  try {
    if (!a) a = compute_alpha(mc);
  } catch (const ResourceError&) {
    out.budget_exceeded = true;
  }
  if (a && a->value <= out.upper) {
    // a minimal set meeting in the Frattini subgroup is maximal irredundant
    out.upper = a->value;
    out.witness = a->witness;
    out.note = "upper bound from alpha";
  }
  out.lower = std::min<std::size_t>(out.upper, mc.size() > 1 ? 2 : 1);
  std::atomic<std::uint64_t> sets{0};
  try {
    for (std::size_t s = out.lower; s < out.upper; ++s) {
      sets = 0;
      auto hit = first_success(mc.class_count(), [&](std::size_t c, const std::atomic<std::size_t>& best) {
        return maximal_irredundant_search(e, mc, c, s, best, sets);
      });
      if (hit) {
        out.upper = s;
        out.witness = hit->second;
        out.note = "maximal irredundant set found by search";
        break;
      }
      out.extended.push_back({s, sets.load()});
      out.lower = s + 1;
    }
  } catch (const ResourceError&) {
    out.budget_exceeded = true;
  }
  if (out.budget_exceeded) out.note += "; time budget exceeded";
  return out;
}

BetaResult compute_beta(const MaximalCollection& mc) {
  mc.require_complete("beta");
  BetaResult out;
  const BigInt frat = mc.frattini().order;
  std::vector<BetaTerm> eligible;
  for (std::size_t c = 0; c < mc.class_count(); ++c) {
    const auto& h = mc.representatives()[c];
    if (core(h, mc.action(c)).order != frat) continue;
    BetaTerm t;
    t.cls = c;
    t.lower_bound = base_lower_bound(StabilizerChain(mc.action(c).as_group()).order(), mc.action(c).degree());
    eligible.push_back(t);
  }
  std::stable_sort(eligible.begin(), eligible.end(),
                   [](const BetaTerm& x, const BetaTerm& y) { return x.lower_bound < y.lower_bound; });
  for (auto& t : eligible) {
    if (out.value && t.lower_bound >= *out.value) {
      out.terms.push_back(t);
      continue;
    }
    auto r = base_size(mc.action(t.cls), mc.representatives()[t.cls]);
    t.b = r.b;
    if (!out.value || r.b < *out.value) {
      out.value = r.b;
      out.cls = t.cls;
      out.witness = r.witness;
    }
    out.terms.push_back(t);
  }
  std::sort(out.terms.begin(), out.terms.end(), [](const BetaTerm& x, const BetaTerm& y) { return x.cls < y.cls; });
  return out;
}

MemberSet base_members(const MaximalCollection& mc, std::size_t cls, const BaseWitness& w) {
  MemberSet out;
  for (Point p : w.points) out.push_back(mc.index_of(cls, p));
  return out;
}

MaxdimResult compute_maxdim(const MaximalCollection& mc, const MaxdimOptions& options) {
  mc.require_complete("maxdim");
  MaxdimResult out;
  if (mc.size() == 0) {
    out.exact = true;
    return out;
  }
  Engine e(mc);
  out.value = 1;
  out.witness = {0};
  std::uint64_t nodes = 0;
  bool exhausted = false;
  Deadline deadline;
  IrredundantState st;
  std::function<void(std::size_t)> dfs = [&](std::size_t pos) {
    if (exhausted) return;
    if (++nodes > options.max_nodes || ((nodes & 0x3ff) == 0 && deadline.expired())) {
      exhausted = true;
      return;
    }
    if (st.members.size() > out.value) {
      out.value = st.members.size();
      out.witness = st.members;
    }
    for (std::size_t i = pos; i < e.size() && !exhausted; ++i) {
      if (i == st.members[0] || i == st.members[1] || !e.extends(st, i)) continue;
      e.push(st, i);
      dfs(i + 1);
      e.pop(st);
    }
  };
  for (std::size_t c = 0; c < mc.class_count() && !exhausted; ++c) {
    e.push(st, mc.class_start(c));
    for (std::size_t b : e.second(c)) {
      if (exhausted) break;
      if (!e.extends(st, b)) continue;
      e.push(st, b);
      dfs(e.pool_begin(mc.class_of(b)));
      e.pop(st);
    }
    e.pop(st);
  }
  out.nodes = nodes;
  out.exact = !exhausted;
  if (out.exact) return out;
  // a minimal base of the smallest-index class is an irredundant set
  std::size_t cls = 0;
  for (std::size_t c = 1; c < mc.class_count(); ++c)
    if (mc.action(c).degree() < mc.action(cls).degree()) cls = c;
  auto r = base_size(mc.action(cls), mc.representatives()[cls]);
  if (r.b > out.value) {
    auto members = base_members(mc, cls, r.witness);
    if (!is_irredundant(mc, members)) throw InternalError("maxdim: minimal base is not irredundant");
    out.value = r.b;
    out.witness = members;
    out.base_class = cls;
  }
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    default:
      return "inconclusive";
  }
}

Verdict minmax_compare(const InvariantReport& report) {
  if (!report.mindim || !report.maxdim) return Verdict::inconclusive;
  const auto& lo = *report.mindim;
  const auto& hi = *report.maxdim;
  if (lo.upper < hi.value) return Verdict::holds;
  if (hi.exact && lo.lower >= hi.value) return Verdict::fails;
  return Verdict::inconclusive;
}

bool chain_consistent(const InvariantReport& report) {
  if (report.mindim && report.mindim->exact() && report.alpha && report.mindim->upper > report.alpha->value)
    return false;
  if (report.alpha && report.beta && report.beta->value && report.alpha->value > *report.beta->value) return false;
  return true;
}

std::optional<MixedWitness> mixed_base_witness(const MaximalCollection& mc, std::size_t h_class,
                                               std::size_t k_class) {
  const auto& h = mc.representatives().at(h_class);
  std::vector<std::size_t> ks;
  if (mc.normal(k_class)) {
    ks.push_back(mc.class_start(k_class));
  } else {
    for (const auto& d : double_cosets(mc.action(k_class), h)) ks.push_back(mc.index_of(k_class, d.point));
  }
  for (std::size_t k : ks) {
    auto l = subgroup_from_keys(mc.group(), intersect_keys(h.element_keys(), mc.conjugates()[k].element_keys()));
    auto r = regular_orbit_witness(mc.action(h_class), l);
    if (!r.conjugator) continue;
    MixedWitness w;
    w.h_class = h_class;
    w.k_class = k_class;
    w.k_member = k;
    w.x = *r.conjugator;
    w.intersection_order = replay_mixed_witness(mc, w);
    return w;
  }
  return std::nullopt;
}

BigInt replay_mixed_witness(const MaximalCollection& mc, const MixedWitness& w) {
  const auto& g = *mc.group();
  const auto& h = mc.representatives().at(w.h_class);
  const auto& k = mc.representatives().at(w.k_class);
  std::vector<Perm> hx, kr;
  for (const auto& x : h.generators) hx.push_back(x.conjugate_by(w.x));
  for (const auto& x : k.generators) kr.push_back(x.conjugate_by(mc.conjugator(w.k_member)));
  auto cur = intersect_keys(element_keys(g, h.generators), element_keys(g, hx));
  return intersect_keys(cur, element_keys(g, kr)).size();
}

}  // namespace mindim

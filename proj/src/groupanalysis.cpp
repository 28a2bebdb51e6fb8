#include "mindim/groupanalysis.hpp"

#include <algorithm>
#include <unordered_map>

#include "mindim/errors.hpp"
#include "mindim/limits.hpp"

namespace mindim {

namespace {

std::uint64_t keys_hash(const ElementKeys& k) {
  std::uint64_t h = 1469598103934665603ull;
  for (auto x : k) {
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 1099511628211ull;
  }
  return h;
}

void check_budget(const BigInt& order, const char* what) {
  if (order > limits().max_elements)
    throw ResourceError(std::string("budget exceeded: ") + what + " has order above the element limit");
}

}  // namespace

const ElementKeys& SubgroupRecord::element_keys() const {
  if (!keys) throw ResourceError("budget exceeded: subgroup element set not materialized");
  return *keys;
}

std::uint64_t SubgroupRecord::order_u64() const {
  if (order > std::numeric_limits<std::uint64_t>::max()) throw ResourceError("order exceeds 64 bits");
  return static_cast<std::uint64_t>(order);
}

std::vector<Perm> enumerate_elements(const StabilizerChain& chain) {
  check_budget(chain.order(), "group");
  std::vector<Perm> out;
  out.reserve(chain.order_u64());
  chain.for_each_element([&](std::uint64_t, const Perm& x) { out.push_back(x); });
  return out;
}

ElementKeys element_keys(const StabilizerChain& parent, const std::vector<Perm>& generators) {
  StabilizerChain h(GeneratedGroup(parent.degree(), generators));
  check_budget(h.order(), "subgroup");
  ElementKeys keys;
  keys.reserve(h.order_u64());
  h.for_each_element([&](std::uint64_t, const Perm& x) { keys.push_back(parent.rank_member(x)); });
  std::sort(keys.begin(), keys.end());
  return keys;
}

SubgroupRecord make_subgroup(std::shared_ptr<const StabilizerChain> parent, std::vector<Perm> generators,
                             std::string name, bool materialize) {
  if (!parent) throw InputError("subgroup: missing parent group");
  if (generators.empty()) generators.push_back(Perm(parent->degree()));
  for (const auto& g : generators)
    if (g.degree() != parent->degree() || !parent->contains(g))
      throw InputError("subgroup: generator not in the parent group" + (name.empty() ? "" : " (" + name + ")"));
  SubgroupRecord r;
  r.parent = parent;
  r.generators = std::move(generators);
  r.name = std::move(name);
  StabilizerChain h(GeneratedGroup(parent->degree(), r.generators));
  r.order = h.order();
  if (materialize && r.order <= limits().max_elements) {
    auto keys = std::make_shared<ElementKeys>();
    keys->reserve(h.order_u64());
    h.for_each_element([&](std::uint64_t, const Perm& x) { keys->push_back(parent->rank_member(x)); });
    std::sort(keys->begin(), keys->end());
    r.keys = keys;
  }
  return r;
}

std::vector<Perm> generators_from_keys(const StabilizerChain& parent, const ElementKeys& keys) {
  std::vector<Perm> gens;
  if (keys.empty()) throw InputError("subgroup: empty element set");
  StabilizerChain cur;
  BigInt order = 1;
  for (auto k : keys) {
    if (order == keys.size()) break;
    Perm x = parent.unrank(k);
    if (x.is_identity()) continue;
    if (!gens.empty() && cur.contains(x)) continue;
    gens.push_back(x);
    cur = StabilizerChain(GeneratedGroup(parent.degree(), gens));
    order = cur.order();
  }
  if (gens.empty()) gens.push_back(Perm(parent.degree()));
  if (order != keys.size()) throw InternalError("subgroup: element set is not closed");
  return gens;
}

SubgroupRecord subgroup_from_keys(std::shared_ptr<const StabilizerChain> parent, ElementKeys keys,
                                  std::string name) {
  SubgroupRecord r;
  r.generators = generators_from_keys(*parent, keys);
  r.parent = std::move(parent);
  r.order = keys.size();
  r.keys = std::make_shared<const ElementKeys>(std::move(keys));
  r.name = std::move(name);
  return r;
}

ClassTable prime_order_classes(const StabilizerChain& g) {
  check_budget(g.order(), "group");
  const std::uint64_t n = g.order_u64();
  ClassTable t;
  t.class_of.assign(n, -1);
  std::vector<std::uint8_t> prime(n, 0);
  auto is_prime = [](std::uint64_t m) {
    if (m < 2) return false;
    for (std::uint64_t d = 2; d * d <= m; ++d)
      if (m % d == 0) return false;
    return true;
  };
  g.for_each_element([&](std::uint64_t r, const Perm& x) { prime[r] = is_prime(x.order()); });
  const auto& gens = g.group().generators;
  std::vector<std::uint64_t> queue;
  for (std::uint64_t r = 0; r < n; ++r) {
    if (!prime[r] || t.class_of[r] != -1) continue;
    // conjugation orbit of the least unvisited element
    auto id = static_cast<std::int32_t>(t.classes.size());
    ConjClass c;
    c.representative = g.unrank(r);
    c.representative_rank = r;
    c.element_order = static_cast<unsigned>(c.representative.order());
    c.cycle_type = c.representative.cycle_type();
    queue.assign(1, r);
    t.class_of[r] = id;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      Perm x = g.unrank(queue[i]);
      for (const auto& s : gens) {
        std::uint64_t y = g.rank_member(x.conjugate_by(s));
        if (t.class_of[y] == -1) {
          t.class_of[y] = id;
          queue.push_back(y);
        } else if (t.class_of[y] != id) {
          throw InternalError("conjugacy classes: orbit overlap");
        }
      }
    }
    c.size = queue.size();
    if (n % c.size != 0) throw InternalError("conjugacy classes: class size does not divide the order");
    t.classes.push_back(std::move(c));
  }
  // canonical order
  std::vector<std::size_t> perm(t.classes.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = t.classes[a];
    const auto& y = t.classes[b];
    if (x.element_order != y.element_order) return x.element_order < y.element_order;
    if (x.cycle_type != y.cycle_type) return x.cycle_type < y.cycle_type;
    return x.representative_rank < y.representative_rank;
  });
  std::vector<std::int32_t> new_id(perm.size());
  std::vector<ConjClass> sorted;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    new_id[perm[i]] = static_cast<std::int32_t>(i);
    sorted.push_back(std::move(t.classes[perm[i]]));
  }
  t.classes = std::move(sorted);
  for (auto& c : t.class_of)
    if (c >= 0) c = new_id[c];
  return t;
}

ElementKeys intersect_keys(const ElementKeys& a, const ElementKeys& b) {
  ElementKeys out;
  const ElementKeys& small = a.size() <= b.size() ? a : b;
  const ElementKeys& big = a.size() <= b.size() ? b : a;
  if (small.size() * 16 < big.size()) {
    for (auto x : small)
      if (std::binary_search(big.begin(), big.end(), x)) out.push_back(x);
    return out;
  }
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::size_t intersection_size(const ElementKeys& a, const ElementKeys& b) {
  const ElementKeys& small = a.size() <= b.size() ? a : b;
  const ElementKeys& big = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  if (small.size() * 16 < big.size()) {
    for (auto x : small) n += std::binary_search(big.begin(), big.end(), x);
    return n;
  }
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

SubgroupRecord subgroup_intersection(const SubgroupRecord& h, const SubgroupRecord& k) {
  if (h.parent != k.parent) throw InputError("intersection: subgroups of different groups");
  return subgroup_from_keys(h.parent, intersect_keys(h.element_keys(), k.element_keys()));
}

SubgroupRecord core(const SubgroupRecord& h, const CosetAction& action) {
  const StabilizerChain& g = *h.parent;
  StabilizerChain hc(GeneratedGroup(g.degree(), h.generators));
  // the image of H in the coset action has order |H : core|
  StabilizerChain img(GeneratedGroup(action.degree(), action.stabilizer_images()));
  BigInt core_order = hc.order() / img.order();
  check_budget(core_order, "core");
  ElementKeys keys;
  if (core_order == 1) {
    keys.push_back(g.rank_member(Perm(g.degree())));
    return subgroup_from_keys(h.parent, std::move(keys));
  }
  check_budget(hc.order(), "subgroup");
  hc.for_each_element([&](std::uint64_t, const Perm& x) {
    if (keys.size() == core_order) return;
    for (Point p = 0; p < action.degree(); ++p)
      if (action.act(p, x) != p) return;
    keys.push_back(g.rank_member(x));
  });
  std::sort(keys.begin(), keys.end());
  if (keys.size() != core_order) throw InternalError("core: kernel size mismatch");
  return subgroup_from_keys(h.parent, std::move(keys));
}

SubgroupRecord core(const SubgroupRecord& h) {
  CosetAction action(h.parent, h.generators);
  return core(h, action);
}

SubgroupRecord frattini(const std::vector<SubgroupRecord>& maximals, bool complete) {
  if (!complete) throw PreconditionError("frattini: maximal subgroup list not marked complete");
  if (maximals.empty()) throw PreconditionError("frattini: no maximal subgroups given");
  ElementKeys cur = maximals.front().element_keys();
  for (std::size_t i = 1; i < maximals.size() && cur.size() > 1; ++i) {
    if (maximals[i].parent != maximals.front().parent) throw InputError("frattini: mixed parents");
    cur = intersect_keys(cur, maximals[i].element_keys());
  }
  return subgroup_from_keys(maximals.front().parent, std::move(cur), "Frat");
}

bool is_normal(const SubgroupRecord& h) {
  StabilizerChain hc(GeneratedGroup(h.parent->degree(), h.generators));
  for (const auto& x : h.generators)
    for (const auto& s : h.parent->group().generators)
      if (!hc.contains(x.conjugate_by(s))) return false;
  return true;
}

std::vector<DoubleCoset> double_cosets(const CosetAction& action, const SubgroupRecord& k) {
  std::vector<Perm> images;
  for (const auto& x : k.generators) images.push_back(action.image(x));
  auto orbs = orbits(action.degree(), images);
  StabilizerChain hc(GeneratedGroup(action.parent().degree(), action.subgroup_generators()));
  std::uint64_t h_order = hc.order_u64();
  std::vector<DoubleCoset> out;
  for (const auto& o : orbs) {
    DoubleCoset d;
    d.point = o.front();
    d.representative = action.representative(d.point);
    d.orbit_length = o.size();
    d.size = h_order * o.size();
    out.push_back(d);
  }
  return out;
}

std::vector<DoubleCoset> double_cosets(const SubgroupRecord& h, const SubgroupRecord& k) {
  if (h.parent != k.parent) throw InputError("double cosets: subgroups of different groups");
  CosetAction action(h.parent, h.generators);
  return double_cosets(action, k);
}

std::vector<SubgroupRecord> expand_conjugates(const SubgroupRecord& h, const CosetAction& action,
                                               bool self_normalizing) {
  const StabilizerChain& g = *h.parent;
  StabilizerChain hc(GeneratedGroup(g.degree(), h.generators));
  check_budget(hc.order(), "subgroup");
  std::vector<Perm> elems;
  elems.reserve(hc.order_u64());
  hc.for_each_element([&](std::uint64_t, const Perm& x) { elems.push_back(x); });
  std::vector<SubgroupRecord> out;
  out.reserve(action.degree());
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
  for (Point p = 0; p < action.degree(); ++p) {
    const Perm& r = action.representative(p);
    auto keys = std::make_shared<ElementKeys>();
    keys->reserve(elems.size());
    for (const auto& x : elems) keys->push_back(g.rank_member(x.conjugate_by(r)));
    std::sort(keys->begin(), keys->end());
    auto& bucket = seen[keys_hash(*keys)];
    bool repeat = false;
    for (auto j : bucket) repeat = repeat || *out[j].keys == *keys;
    if (repeat) {
      if (self_normalizing)
        throw InternalError("conjugate expansion: " + (h.name.empty() ? std::string("subgroup") : h.name) +
                            " is not self-normalizing");
      continue;
    }
    bucket.push_back(out.size());
    SubgroupRecord c;
    c.parent = h.parent;
    for (const auto& x : h.generators) c.generators.push_back(x.conjugate_by(r));
    c.order = hc.order();
    c.keys = keys;
    c.tags = h.tags;
    c.name = h.name;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace mindim

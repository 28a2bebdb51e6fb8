#include "mindim/permcore.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "mindim/errors.hpp"
#include "mindim/limits.hpp"

namespace mindim {

namespace {

Point smallest_moved_point(const Perm& p) {
  for (Point x = 0; x < p.degree(); ++x)
    if (p[x] != x) return x;
  throw InternalError("identity has no moved point");
}

}  // namespace

GeneratedGroup::GeneratedGroup(std::size_t deg, std::vector<Perm> gens, std::string name)
    : degree(deg), generators(std::move(gens)), label(std::move(name)) {
  if (degree == 0) throw InputError("group degree must be positive");
  if (generators.empty()) throw InputError("generator list is empty");
  for (const Perm& g : generators)
    if (g.degree() != degree) throw InputError("generator degree differs from group degree");
}

Perm Orbit::transporter(const std::vector<Perm>& generators, Point p) const {
  if (!contains(p)) throw InputError("point not in orbit");
  std::vector<std::int32_t> word;
  for (Point x = p; via[x] != -1; x = parent[x]) word.push_back(via[x]);
  Perm g(via.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it) g = g * generators[*it];
  return g;
}

Orbit orbit(std::size_t degree, const std::vector<Perm>& generators, Point point) {
  if (point >= degree) throw InputError("orbit point out of range");
  Orbit o;
  o.start = point;
  o.via.assign(degree, -2);
  o.parent.assign(degree, 0);
  o.via[point] = -1;
  o.parent[point] = point;
  o.points.push_back(point);
  for (std::size_t head = 0; head < o.points.size(); ++head) {
    Point x = o.points[head];
    for (std::size_t i = 0; i < generators.size(); ++i) {
      Point y = generators[i][x];
      if (o.via[y] == -2) {
        o.via[y] = static_cast<std::int32_t>(i);
        o.parent[y] = x;
        o.points.push_back(y);
      }
    }
  }
  return o;
}

Orbit orbit(const GeneratedGroup& group, Point point) {
  return orbit(group.degree, group.generators, point);
}

std::vector<std::vector<Point>> orbits(std::size_t degree, const std::vector<Perm>& generators) {
  std::vector<std::vector<Point>> result;
  std::vector<char> seen(degree, 0);
  for (Point p = 0; p < degree; ++p) {
    if (seen[p]) continue;
    std::vector<Point> orb{p};
    seen[p] = 1;
    for (std::size_t head = 0; head < orb.size(); ++head)
      for (const Perm& g : generators) {
        Point y = g[orb[head]];
        if (!seen[y]) {
          seen[y] = 1;
          orb.push_back(y);
        }
      }
    result.push_back(std::move(orb));
  }
  return result;
}

StabilizerChain::StabilizerChain(const GeneratedGroup& group, std::vector<Point> prefix_base)
    : group_(group) {
  for (Point b : prefix_base) {
    if (b >= group_.degree) throw InputError("base point out of range");
    append_level(b);
  }
  std::vector<Perm> gens;
  for (const Perm& g : group_.generators)
    if (!g.is_identity()) gens.push_back(g);
  for (const Perm& g : gens) {
    bool fixes_base = true;
    for (const Level& lv : levels_) fixes_base = fixes_base && g[lv.base] == lv.base;
    if (fixes_base) append_level(smallest_moved_point(g));
  }
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    for (const Perm& g : gens) {
      bool fixes = true;
      for (std::size_t m = 0; m < l; ++m) fixes = fixes && g[levels_[m].base] == levels_[m].base;
      if (fixes) levels_[l].gens.push_back(g);
    }
    rebuild_orbit(levels_[l]);
  }
  schreier_sims();

  order_ = 1;
  std::uint64_t w = 1;
  bool fits = true;
  for (Level& lv : levels_) {
    lv.weight = fits ? w : 0;
    order_ *= lv.orbit.size();
    if (fits) {
      if (w > std::numeric_limits<std::uint64_t>::max() / lv.orbit.size())
        fits = false;
      else
        w *= lv.orbit.size();
    }
  }
  for (const Perm& g : group_.generators)
    if (!contains(g)) throw InternalError("generator does not sift through its own chain");
}

void StabilizerChain::append_level(Point b) {
  Level lv;
  lv.base = b;
  lv.index.assign(group_.degree, -1);
  levels_.push_back(std::move(lv));
  rebuild_orbit(levels_.back());
}

void StabilizerChain::rebuild_orbit(Level& lv) const {
  std::size_t n = group_.degree;
  lv.orbit.assign(1, lv.base);
  std::fill(lv.index.begin(), lv.index.end(), -1);
  lv.index[lv.base] = 0;
  lv.fwd.assign(1, Perm(n));
  lv.inv.assign(1, Perm(n));
  for (std::size_t head = 0; head < lv.orbit.size(); ++head) {
    Point x = lv.orbit[head];
    for (const Perm& s : lv.gens) {
      Point y = s[x];
      if (lv.index[y] >= 0) continue;
      lv.index[y] = static_cast<std::int32_t>(lv.orbit.size());
      lv.orbit.push_back(y);
      Perm u = lv.fwd[head] * s;
      lv.inv.push_back(u.inverse());
      lv.fwd.push_back(std::move(u));
    }
  }
}

std::size_t StabilizerChain::sift(Perm& g, std::size_t from) const {
  for (std::size_t l = from; l < levels_.size(); ++l) {
    const Level& lv = levels_[l];
    std::int32_t i = lv.index[g[lv.base]];
    if (i < 0) return l;
    if (i > 0) g = g * lv.inv[i];
  }
  return levels_.size();
}

void StabilizerChain::schreier_sims() {
  // Per-level resume position (orbit index, generator index); pairs before it
  // yield Schreier generators that are known to sift to the identity.
  std::vector<std::pair<std::size_t, std::size_t>> cursor(levels_.size(), {0, 0});
  std::size_t i = levels_.size();
  while (i > 0) {
    std::size_t l = i - 1;
    bool restarted = false;
    auto& [pi, si] = cursor[l];
    for (; pi < levels_[l].orbit.size() && !restarted; ++pi) {
      for (; si < levels_[l].gens.size(); ++si) {
        const Level& lv = levels_[l];
        const Perm& s = lv.gens[si];
        Point img = s[lv.orbit[pi]];
        Perm y = lv.fwd[pi] * s * lv.inv[lv.index[img]];
        std::size_t stop = sift(y, l + 1);
        if (y.is_identity()) continue;
        if (stop == levels_.size()) {
          append_level(smallest_moved_point(y));
          cursor.emplace_back(0, 0);
        }
        for (std::size_t m = l + 1; m <= stop; ++m) {
          levels_[m].gens.push_back(y);
          rebuild_orbit(levels_[m]);
          cursor[m] = {0, 0};
        }
        i = stop + 1;
        restarted = true;
        break;
      }
      if (restarted) break;
      si = 0;
    }
    if (!restarted) --i;
  }
}

std::vector<Point> StabilizerChain::base() const {
  std::vector<Point> b;
  for (const Level& lv : levels_) b.push_back(lv.base);
  return b;
}

std::vector<Perm> StabilizerChain::strong_generators() const {
  std::vector<Perm> s;
  for (const Level& lv : levels_)
    for (const Perm& g : lv.gens)
      if (std::find(s.begin(), s.end(), g) == s.end()) s.push_back(g);
  return s;
}

std::uint64_t StabilizerChain::order_u64() const {
  if (order_ > std::numeric_limits<std::uint64_t>::max())
    throw ResourceError("group order does not fit in 64 bits");
  return static_cast<std::uint64_t>(order_);
}

bool StabilizerChain::contains(const Perm& g) const {
  if (g.degree() != degree()) return false;
  Perm r = g;
  return sift(r, 0) == levels_.size() && r.is_identity();
}

std::optional<std::uint64_t> StabilizerChain::rank(const Perm& g) const {
  if (g.degree() != degree()) return std::nullopt;
  order_u64();
  Perm r = g;
  std::uint64_t rk = 0;
  for (const Level& lv : levels_) {
    std::int32_t i = lv.index[r[lv.base]];
    if (i < 0) return std::nullopt;
    rk += static_cast<std::uint64_t>(i) * lv.weight;
    if (i > 0) r = r * lv.inv[i];
  }
  if (!r.is_identity()) return std::nullopt;
  return rk;
}

std::uint64_t StabilizerChain::rank_member(const Perm& g) const {
  std::size_t k = levels_.size();
  Point cur[64];
  std::vector<Point> heap;
  Point* img = cur;
  if (k > 64) {
    heap.resize(k);
    img = heap.data();
  }
  for (std::size_t l = 0; l < k; ++l) img[l] = g[levels_[l].base];
  std::uint64_t rk = 0;
  for (std::size_t l = 0; l < k; ++l) {
    const Level& lv = levels_[l];
    std::int32_t i = lv.index[img[l]];
    if (i < 0) throw InputError("element is not in the group");
    rk += static_cast<std::uint64_t>(i) * lv.weight;
    if (i > 0) {
      const Perm& u = lv.inv[i];
      for (std::size_t m = l + 1; m < k; ++m) img[m] = u[img[m]];
    }
  }
  return rk;
}

Perm StabilizerChain::unrank(std::uint64_t r) const {
  if (r >= order_) throw InputError("rank out of range");
  Perm g(degree());
  for (std::size_t l = levels_.size(); l-- > 0;) {
    const Level& lv = levels_[l];
    std::uint64_t digit = (r / lv.weight) % lv.orbit.size();
    if (digit) g = g * lv.fwd[digit];
  }
  return g;
}

CosetAction::CosetAction(std::shared_ptr<const StabilizerChain> g,
                         const std::vector<Perm>& h_generators)
    : g_(std::move(g)), h_gens_(h_generators) {
  std::size_t n = g_->degree();
  g_->order_u64();
  if (h_gens_.empty()) h_gens_.push_back(Perm(n));
  for (const Perm& h : h_gens_)
    if (!g_->contains(h)) throw InputError("subgroup generator is not in the group");
  h_ = StabilizerChain(GeneratedGroup(n, h_gens_), g_->base());
  if (g_->order() % h_.order() != 0) throw InternalError("subgroup order does not divide group order");
  BigInt index = g_->order() / h_.order();
  if (index > limits().max_degree)
    throw ResourceError("coset action degree " + index.str() + " exceeds budget " +
                        std::to_string(limits().max_degree));
  std::size_t idx = static_cast<std::size_t>(index);

  const auto& gens = g_->group().generators;
  reps_.reserve(idx);
  reps_.push_back(Perm(n));
  label_.reserve(idx * 2);
  label_.emplace(g_->rank_member(canonical(Perm(n))), 0);
  std::vector<std::vector<Point>> images(gens.size());
  for (std::size_t p = 0; p < reps_.size(); ++p) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      Perm x = reps_[p] * gens[s];
      std::uint64_t key = g_->rank_member(canonical(x));
      auto [it, inserted] = label_.emplace(key, static_cast<Point>(reps_.size()));
      if (inserted) {
        if (reps_.size() >= idx) throw InternalError("coset enumeration exceeded the index");
        reps_.push_back(std::move(x));
      }
      images[s].push_back(it->second);
    }
  }
  if (reps_.size() != idx) throw InternalError("coset enumeration did not reach the index");
  for (auto& img : images) gen_images_.emplace_back(std::move(img));
  for (const Perm& h : h_gens_) h_images_.push_back(image(h));
}

Perm CosetAction::canonical(const Perm& g) const {
  Perm c = g;
  for (std::size_t l = 0; l < h_.levels(); ++l) {
    const auto& orb = h_.orbit(l);
    if (orb.size() == 1) continue;
    std::size_t best = 0;
    Point best_img = c[orb[0]];
    for (std::size_t i = 1; i < orb.size(); ++i) {
      Point v = c[orb[i]];
      if (v < best_img) {
        best_img = v;
        best = i;
      }
    }
    if (best) c = h_.transversal(l, best) * c;
  }
  return c;
}

Point CosetAction::point_of(const Perm& g) const {
  auto it = label_.find(g_->rank_member(canonical(g)));
  if (it == label_.end()) throw InternalError("coset label not found");
  return it->second;
}

Perm CosetAction::image(const Perm& x) const {
  std::vector<Point> img(degree());
  for (Point p = 0; p < degree(); ++p) img[p] = act(p, x);
  return Perm(std::move(img));
}

GeneratedGroup CosetAction::as_group() const {
  return GeneratedGroup(degree(), gen_images_, g_->group().label + " on cosets");
}

std::vector<Point> minimal_block(std::size_t degree, const std::vector<Perm>& generators, Point p) {
  std::vector<Point> parent(degree);
  std::iota(parent.begin(), parent.end(), Point{0});
  auto find = [&](Point x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::deque<std::pair<Point, Point>> queue;
  parent[find(p)] = find(0);
  queue.emplace_back(0, p);
  while (!queue.empty()) {
    auto [a, b] = queue.front();
    queue.pop_front();
    for (const Perm& s : generators) {
      Point x = find(s[a]), y = find(s[b]);
      if (x == y) continue;
      parent[std::max(x, y)] = std::min(x, y);
      queue.emplace_back(s[a], s[b]);
    }
  }
  std::vector<Point> block;
  Point root = find(0);
  for (Point x = 0; x < degree; ++x)
    if (find(x) == root) block.push_back(x);
  return block;
}

namespace {

PrimitivityResult primitivity(std::size_t degree, const std::vector<Perm>& generators,
                              const std::vector<Perm>& stabilizer_of_zero) {
  PrimitivityResult result;
  if (degree <= 2) return result;
  for (const auto& suborbit : orbits(degree, stabilizer_of_zero)) {
    if (suborbit[0] == 0) continue;
    std::vector<Point> block = minimal_block(degree, generators, suborbit[0]);
    if (block.size() < degree && (result.primitive || block.size() < result.block.size())) {
      result.primitive = false;
      result.block = std::move(block);
    }
  }
  return result;
}

}  // namespace

PrimitivityResult is_primitive(const GeneratedGroup& group) {
  if (orbit(group, 0).points.size() != group.degree)
    throw InputError("primitivity test needs a transitive group");
  StabilizerChain chain(group, {0});
  std::vector<Perm> stab = chain.levels() > 1 ? chain.level_generators(1) : std::vector<Perm>{};
  return primitivity(group.degree, group.generators, stab);
}

PrimitivityResult is_primitive(const CosetAction& action) {
  return primitivity(action.degree(), action.generator_images(), action.stabilizer_images());
}

}  // namespace mindim

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mindim/perm.hpp"

namespace mindim {

using BigInt = boost::multiprecision::cpp_int;

// A group given by generating permutations of a common degree.
struct GeneratedGroup {
  GeneratedGroup() = default;
  // Throws InputError on an empty generator list or mixed degrees.
  GeneratedGroup(std::size_t degree, std::vector<Perm> generators, std::string label = {});

  std::size_t degree = 0;
  std::vector<Perm> generators;
  std::string label;
};

// An orbit in discovery order with its Schreier vector.
struct Orbit {
  Point start = 0;
  std::vector<Point> points;
  // Per point of the domain: index of the generator that first reached it,
  // -1 for the start point and -2 for points outside the orbit.
  std::vector<std::int32_t> via;
  std::vector<Point> parent;

  bool contains(Point p) const { return p < via.size() && via[p] != -2; }
  // An element of the group mapping `start` to `p`, read off the Schreier vector.
  Perm transporter(const std::vector<Perm>& generators, Point p) const;
};

Orbit orbit(std::size_t degree, const std::vector<Perm>& generators, Point point);
Orbit orbit(const GeneratedGroup& group, Point point);

// Orbits of a group as a partition; each orbit listed in discovery order, orbits ordered by least point.
std::vector<std::vector<Point>> orbits(std::size_t degree, const std::vector<Perm>& generators);

// Base and strong generating set built by deterministic Schreier-Sims.
// Elements are identified by a rank in [0, order): the mixed-radix number whose
// digit at level l is the index of the transversal element used at that level.
class StabilizerChain {
 public:
  StabilizerChain() = default;
  // The chain's base starts with `prefix_base` (kept even where a level is
  // trivial) and is extended by the smallest-moved-point rule.
  explicit StabilizerChain(const GeneratedGroup& group, std::vector<Point> prefix_base = {});

  std::size_t degree() const { return group_.degree; }
  const GeneratedGroup& group() const { return group_; }
  std::size_t levels() const { return levels_.size(); }
  std::vector<Point> base() const;
  const std::vector<Point>& orbit(std::size_t level) const { return levels_[level].orbit; }
  // Strong generators fixing the first `level` base points.
  const std::vector<Perm>& level_generators(std::size_t level) const { return levels_[level].gens; }
  // u with base[level]^u = orbit(level)[i], and its inverse.
  const Perm& transversal(std::size_t level, std::size_t i) const { return levels_[level].fwd[i]; }
  const Perm& transversal_inverse(std::size_t level, std::size_t i) const {
    return levels_[level].inv[i];
  }
  std::int64_t orbit_index(std::size_t level, Point p) const { return levels_[level].index[p]; }
  std::vector<Perm> strong_generators() const;

  const BigInt& order() const { return order_; }
  // Throws ResourceError if the order does not fit in 64 bits.
  std::uint64_t order_u64() const;

  bool contains(const Perm& g) const;
  // Rank of g, or nullopt when g is not in the group.
  std::optional<std::uint64_t> rank(const Perm& g) const;
  // Rank of an element known to lie in the group; only base images are read.
  std::uint64_t rank_member(const Perm& g) const;
  Perm unrank(std::uint64_t r) const;

  // Calls f(rank, element) for every element in ascending rank order.
  template <class F>
  void for_each_element(F&& f) const;

 private:
  struct Level {
    Point base = 0;
    std::vector<Perm> gens;
    std::vector<Point> orbit;
    std::vector<std::int32_t> index;
    std::vector<Perm> fwd;
    std::vector<Perm> inv;
    std::uint64_t weight = 1;
  };

  void rebuild_orbit(Level& level) const;
  // Sifts g from level `from`; returns the level where sifting stopped.
  std::size_t sift(Perm& g, std::size_t from) const;
  void schreier_sims();
  void append_level(Point b);
  template <class F>
  void walk(std::size_t level, const Perm& prefix, std::uint64_t rank, F& f) const;

  GeneratedGroup group_;
  std::vector<Level> levels_;
  BigInt order_ = 1;
};

template <class F>
void StabilizerChain::walk(std::size_t level, const Perm& prefix, std::uint64_t rank,
                           F& f) const {
  const Level& lv = levels_[level];
  for (std::size_t i = 0; i < lv.fwd.size(); ++i) {
    Perm next = prefix * lv.fwd[i];
    std::uint64_t r = rank + i * lv.weight;
    if (level == 0)
      f(r, next);
    else
      walk(level - 1, next, r, f);
  }
}

template <class F>
void StabilizerChain::for_each_element(F&& f) const {
  Perm id(degree());
  if (levels_.empty()) {
    f(std::uint64_t{0}, id);
    return;
  }
  walk(levels_.size() - 1, id, 0, f);
}

// The action of G on the right cosets of H. Point 0 is the coset H itself.
// Each coset is labelled by the rank in G of its lexicographically least
// element, compared by base images.
class CosetAction {
 public:
  // Throws InputError if some generator of H is not in G and ResourceError if
  // |G:H| exceeds limits().max_degree.
  CosetAction(std::shared_ptr<const StabilizerChain> g, const std::vector<Perm>& h_generators);

  std::size_t degree() const { return reps_.size(); }
  const StabilizerChain& parent() const { return *g_; }
  std::shared_ptr<const StabilizerChain> parent_ptr() const { return g_; }
  const StabilizerChain& subgroup_chain() const { return h_; }
  const std::vector<Perm>& subgroup_generators() const { return h_gens_; }
  // Images of G's generators, in the order of G's generator list.
  const std::vector<Perm>& generator_images() const { return gen_images_; }
  // Images of H's generators; they generate the stabilizer of point 0.
  const std::vector<Perm>& stabilizer_images() const { return h_images_; }
  const Perm& representative(Point p) const { return reps_[p]; }

  // The coset H g as a point.
  Point point_of(const Perm& g) const;
  Point act(Point p, const Perm& x) const { return point_of(reps_[p] * x); }
  // The permutation induced by x on all cosets.
  Perm image(const Perm& x) const;
  // Canonical (least) element of the coset H g.
  Perm canonical(const Perm& g) const;
  GeneratedGroup as_group() const;

 private:
  std::shared_ptr<const StabilizerChain> g_;
  StabilizerChain h_;
  std::vector<Perm> h_gens_;
  std::vector<Perm> reps_;
  std::vector<Perm> gen_images_;
  std::vector<Perm> h_images_;
  std::unordered_map<std::uint64_t, Point> label_;
};

struct PrimitivityResult {
  bool primitive = true;
  // On failure: a minimal nontrivial block containing point 0, sorted.
  std::vector<Point> block;
};

// Throws InputError if the group is not transitive.
PrimitivityResult is_primitive(const GeneratedGroup& group);
PrimitivityResult is_primitive(const CosetAction& action);

// Smallest block containing 0 and p for the group generated by `generators`.
std::vector<Point> minimal_block(std::size_t degree, const std::vector<Perm>& generators, Point p);

}  // namespace mindim

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mindim/groupanalysis.hpp"
#include "mindim/permcore.hpp"

namespace mindim {

using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& r);

// The image of H in its coset action, as a table of element images.
// Element 0 is the identity.
class StabilizerTable {
 public:
  explicit StabilizerTable(const CosetAction& action);

  std::size_t degree() const { return degree_; }
  std::size_t size() const { return count_; }
  Point image(std::size_t element, Point p) const { return table_[element * degree_ + p]; }
  // Orbits of the subgroup formed by `elements` (which must be closed), listed by least point.
  std::vector<std::vector<Point>> orbits(const std::vector<std::uint32_t>& elements) const;
  std::vector<std::uint32_t> fixing(const std::vector<std::uint32_t>& elements, Point p) const;

 private:
  std::size_t degree_ = 0;
  std::size_t count_ = 0;
  std::vector<Point> table_;
};

// Conjugates H^{g_1}, ..., H^{g_c} whose intersection is the core of H.
struct BaseWitness {
  SubgroupRecord h;
  std::vector<Perm> conjugators;
  std::vector<Point> points;
  BigInt intersection_order = 0;
};

struct BaseSizeResult {
  std::size_t b = 0;
  std::size_t lower_bound = 0;  // from |G : core| <= |G : H|^b
  std::size_t greedy_upper = 0;
  BaseWitness witness;
};

struct RegularOrbitResult {
  std::optional<Perm> conjugator;
  std::optional<Point> point;
  std::vector<std::size_t> orbit_lengths;
};

// A coset H g whose stabilizer K cap H^g is trivial, if one exists.
RegularOrbitResult regular_orbit_witness(const CosetAction& action_on_h, const SubgroupRecord& k);
RegularOrbitResult regular_orbit_witness(const SubgroupRecord& h, const SubgroupRecord& k);

// Exact b(G, H). Throws ResourceError (with bounds in the message) when the deadline passes.
BaseSizeResult base_size(const CosetAction& action, const SubgroupRecord& h);
BaseSizeResult base_size(const SubgroupRecord& h);
// Intersection order of the witness conjugates, recomputed from element sets.
BigInt replay_base_witness(const BaseWitness& w);

struct CriterionResult {
  bool verdict = false;
  BigInt lhs, rhs;
  std::vector<std::uint64_t> sizes;
};

// |H||K| > |G|.
CriterionResult order_criterion(const SubgroupRecord& h, const SubgroupRecord& k);
// Every listed |HxK| < |H||K| and their sum exceeds |G| - |H||K|.
// Throws InputError if two representatives share a double coset.
CriterionResult double_coset_criterion(const CosetAction& action_on_h, const SubgroupRecord& k,
                                       const std::vector<Perm>& reps);

struct FprValue {
  Rational value;
  Rational route_a;
  std::optional<Rational> route_b;
};

// Fixed point ratio of x on the cosets of H; route (b) is used when `classes` is given.
FprValue fpr(const Perm& x, const CosetAction& action, const SubgroupRecord& h, const ClassTable* classes);

struct QhatTerm {
  std::size_t class_index = 0;
  std::uint64_t class_size = 0;
  std::uint64_t fixed_points = 0;
  Rational fpr;
  bool route_b = false;
};

struct QhatResult {
  Rational value;
  unsigned c = 0;
  std::vector<QhatTerm> terms;
  bool implies_bound() const { return value < 1; }
};

// Sum over prime order classes of |x^G| fpr(x)^c, exactly. Throws PreconditionError if H = G or c < 2.
QhatResult qhat(const CosetAction& action, const SubgroupRecord& h, const ClassTable& classes, unsigned c);

struct MonteCarloResult {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double frequency() const { return trials ? static_cast<double>(failures) / trials : 0.0; }
};

// Frequency of uniform c-tuples of cosets whose pointwise stabilizer exceeds the core.
// Trial t draws from its own generator seeded by (seed, t).
MonteCarloResult monte_carlo_nonbase(const CosetAction& action, unsigned c, std::uint64_t trials,
                                     std::uint64_t seed);
// Exact non-base probability over all c-tuples, for small degrees.
Rational exact_nonbase_probability(const CosetAction& action, unsigned c);

}  // namespace mindim

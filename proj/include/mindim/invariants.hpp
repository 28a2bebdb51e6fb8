#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mindim/basebounds.hpp"
#include "mindim/groupanalysis.hpp"
#include "mindim/permcore.hpp"

namespace mindim {

// Maximal subgroup class representatives of a group, with their coset actions
// and, on demand, every conjugate.
class MaximalCollection {
 public:
  MaximalCollection() = default;
  // Checks that each representative's coset action is primitive; throws
  // InputError naming the first class that fails.
  MaximalCollection(std::shared_ptr<const StabilizerChain> group, std::vector<SubgroupRecord> representatives,
                    bool complete, bool certify = true);

  const std::shared_ptr<const StabilizerChain>& group() const { return group_; }
  const std::vector<SubgroupRecord>& representatives() const { return reps_; }
  std::size_t class_count() const { return reps_.size(); }
  const CosetAction& action(std::size_t cls) const { return *actions_[cls]; }
  bool normal(std::size_t cls) const { return normal_[cls]; }
  bool complete() const { return complete_; }
  // Throws PreconditionError unless the collection is complete.
  void require_complete(const char* what) const;

  // Conjugates of every class, class by class; within a class in coset point order.
  // The first conjugate of each class is its representative.
  const std::vector<SubgroupRecord>& conjugates() const;
  std::size_t size() const { return conjugates().size(); }
  std::size_t class_of(std::size_t i) const;
  std::size_t class_start(std::size_t cls) const;
  std::size_t class_size(std::size_t cls) const;
  // Coset point of the representative's action whose stabilizer is conjugate i.
  Point point_of(std::size_t i) const;
  // r with conjugate i equal to rep^r.
  const Perm& conjugator(std::size_t i) const;
  // Global index of the conjugate fixing coset point p of class cls.
  std::size_t index_of(std::size_t cls, Point p) const;

  // Intersection of all maximal subgroups. Throws PreconditionError unless complete.
  const SubgroupRecord& frattini() const;

 private:
  struct Expansion;
  std::shared_ptr<const StabilizerChain> group_;
  std::vector<SubgroupRecord> reps_;
  std::vector<std::shared_ptr<const CosetAction>> actions_;
  std::vector<bool> normal_;
  bool complete_ = false;
  std::shared_ptr<Expansion> lazy_;
};

// Members of a collection named by global conjugate index.
using MemberSet = std::vector<std::size_t>;

// True iff dropping any single member strictly enlarges the intersection.
bool is_irredundant(const std::vector<SubgroupRecord>& sets);
bool is_irredundant(const MaximalCollection& mc, const MemberSet& members);
// True iff the members are irredundant and no further maximal subgroup extends them.
bool is_maximal_irredundant(const MaximalCollection& mc, const MemberSet& members);

// Intersection order recomputed from conjugated generators without cached element sets.
BigInt replay_intersection_order(const MaximalCollection& mc, const MemberSet& members);

struct AlphaResult {
  std::size_t value = 0;
  MemberSet witness;
  std::uint64_t nodes = 0;
};

// Least number of maximal subgroups meeting in the Frattini subgroup.
AlphaResult compute_alpha(const MaximalCollection& mc);

struct MindimResult {
  std::size_t lower = 0;
  std::size_t upper = 0;
  // A maximal irredundant set of size `upper`.
  MemberSet witness;
  // Irredundant sets (up to conjugacy) shown to extend, per size below `lower`.
  std::vector<std::pair<std::size_t, std::uint64_t>> extended;
  bool budget_exceeded = false;
  std::string note;
  bool exact() const { return lower == upper; }
};

// Least size of a maximal irredundant set. When `alpha_hint` is given it caps the
// search; otherwise alpha is computed first. A time budget yields an interval.
MindimResult compute_mindim(const MaximalCollection& mc, const std::optional<AlphaResult>& alpha_hint = std::nullopt);

struct BetaTerm {
  std::size_t cls = 0;
  std::optional<std::size_t> b;  // unset when skipped by its lower bound
  std::size_t lower_bound = 0;
};

struct BetaResult {
  std::optional<std::size_t> value;  // unset means infinity
  std::optional<std::size_t> cls;
  BaseWitness witness;
  std::vector<BetaTerm> terms;
};

// Least b(G, H) over maximal H whose core is the Frattini subgroup.
BetaResult compute_beta(const MaximalCollection& mc);

struct MaxdimOptions {
  std::uint64_t max_nodes = 200000;
};

struct MaxdimResult {
  std::size_t value = 0;
  bool exact = false;
  MemberSet witness;
  // Set when the bound comes from a minimal base of this class.
  std::optional<std::size_t> base_class;
  std::uint64_t nodes = 0;
};

// Largest size of an irredundant set. Falls back to a lower bound, from the best set
// found and from a minimal base of the smallest-index class, once the node budget is spent.
MaxdimResult compute_maxdim(const MaximalCollection& mc, const MaxdimOptions& options = {});

// Conjugates H^{g_1}, ..., H^{g_b} of a minimal base of the class, as members.
MemberSet base_members(const MaximalCollection& mc, std::size_t cls, const BaseWitness& w);

struct InvariantReport {
  std::optional<MindimResult> mindim;
  std::optional<AlphaResult> alpha;
  std::optional<BetaResult> beta;
  std::optional<MaxdimResult> maxdim;
  double seconds = 0.0;
};

enum class Verdict { holds, fails, inconclusive };
const char* to_string(Verdict v);

// Mindim < Maxdim.
Verdict minmax_compare(const InvariantReport& report);

// Mindim <= alpha <= beta, checked only when the values involved are exact.
bool chain_consistent(const InvariantReport& report);

struct MixedWitness {
  std::size_t h_class = 0, k_class = 0;
  std::size_t k_member = 0;  // conjugate of the K class
  Perm x;                    // H cap H^x cap K = 1
  BigInt intersection_order = 0;
};

// Searches K-conjugates and cosets H x with H cap H^x cap K trivial.
std::optional<MixedWitness> mixed_base_witness(const MaximalCollection& mc, std::size_t h_class,
                                               std::size_t k_class);
BigInt replay_mixed_witness(const MaximalCollection& mc, const MixedWitness& w);

}  // namespace mindim

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mindim/permcore.hpp"

namespace mindim {

// Sorted ranks, in the parent chain, of the elements of a subgroup.
using ElementKeys = std::vector<std::uint64_t>;

struct SubgroupRecord {
  std::shared_ptr<const StabilizerChain> parent;
  std::vector<Perm> generators;
  BigInt order = 1;
  std::shared_ptr<const ElementKeys> keys;
  std::vector<std::string> tags;
  std::string name;

  bool has_keys() const { return keys != nullptr; }
  const ElementKeys& element_keys() const;
  std::uint64_t order_u64() const;
};

// Throws InputError if a generator is not in the parent. Keys are
// materialized when `materialize` is set and the order is within limits().max_elements.
SubgroupRecord make_subgroup(std::shared_ptr<const StabilizerChain> parent, std::vector<Perm> generators,
                             std::string name = {}, bool materialize = true);
// A subgroup given by its element keys; generators are chosen greedily from the keys.
SubgroupRecord subgroup_from_keys(std::shared_ptr<const StabilizerChain> parent, ElementKeys keys,
                                  std::string name = {});
std::vector<Perm> generators_from_keys(const StabilizerChain& parent, const ElementKeys& keys);

// Every element once, in rank order. Throws ResourceError above limits().max_elements.
std::vector<Perm> enumerate_elements(const StabilizerChain& chain);
ElementKeys element_keys(const StabilizerChain& parent, const std::vector<Perm>& generators);

struct ConjClass {
  Perm representative;
  std::uint64_t representative_rank = 0;
  unsigned element_order = 0;
  std::uint64_t size = 0;
  std::vector<std::size_t> cycle_type;
};

struct ClassTable {
  std::vector<ConjClass> classes;
  // Per rank of G: index into classes, or -1 when the element does not have prime order.
  std::vector<std::int32_t> class_of;
};

// Conjugacy classes of elements of prime order, sorted by (order, cycle type, representative rank).
ClassTable prime_order_classes(const StabilizerChain& g);

ElementKeys intersect_keys(const ElementKeys& a, const ElementKeys& b);
std::size_t intersection_size(const ElementKeys& a, const ElementKeys& b);
// Throws InputError for different parents.
SubgroupRecord subgroup_intersection(const SubgroupRecord& h, const SubgroupRecord& k);

// Kernel of the action on the cosets of H.
SubgroupRecord core(const SubgroupRecord& h);
SubgroupRecord core(const SubgroupRecord& h, const CosetAction& action);

// Intersection of all maximal subgroups. Throws PreconditionError unless complete.
SubgroupRecord frattini(const std::vector<SubgroupRecord>& maximals, bool complete);

bool is_normal(const SubgroupRecord& h);

struct DoubleCoset {
  Perm representative;
  std::uint64_t size = 0;
  std::size_t orbit_length = 0;
  Point point = 0;
};

// The double cosets H g K as K-orbits on the cosets of H.
std::vector<DoubleCoset> double_cosets(const CosetAction& action_on_h, const SubgroupRecord& k);
std::vector<DoubleCoset> double_cosets(const SubgroupRecord& h, const SubgroupRecord& k);

// The distinct conjugates H^r over coset representatives r, in point order.
// With `self_normalizing`, asserts there is one conjugate per coset.
std::vector<SubgroupRecord> expand_conjugates(const SubgroupRecord& h, const CosetAction& action,
                                              bool self_normalizing = true);

}  // namespace mindim

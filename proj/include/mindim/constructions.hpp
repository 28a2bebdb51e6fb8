#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mindim/gfq.hpp"
#include "mindim/groupanalysis.hpp"
#include "mindim/invariants.hpp"
#include "mindim/permcore.hpp"

namespace mindim {

// True iff n = 2p with p a prime other than 11 and 2p - 1 not a prime power.
bool aset_contains(std::uint64_t n);

// Joint stabilizer of named subspaces. g is a solution iff for some alternative
// every pair (from, to) has from * g contained in to.
struct StabilizerProblem {
  std::shared_ptr<const FormSpace> space;
  std::vector<std::pair<std::string, Subspace>> subspaces;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> alternatives;
  // Keep only members of Omega; otherwise every isometry counts.
  bool omega = false;
};

struct StabilizerOutcome {
  std::vector<std::size_t> dimensions;  // solution-space dimension per alternative
  std::uint64_t candidates = 0;         // matrices enumerated
  std::vector<Matrix> isometries;       // invertible form-preserving solutions, sorted
  std::vector<Matrix> stabilizer;       // the isometries in Omega when requested
  bool budget_exceeded = false;
};

// Solves each alternative linearly, enumerates the solution spaces and filters
// by invertibility, form preservation and optionally Omega membership.
StabilizerOutcome solve_stabilizer(const StabilizerProblem& problem);

struct CertificateCheck {
  std::string name;
  bool passed = false;
};

struct WitnessCertificate {
  // sp4, ortho-odd, ortho-even-lemma66, ortho-even-theorem68 or g2
  std::string construction;
  std::vector<std::pair<std::string, std::int64_t>> parameters;
  std::optional<StabilizerProblem> problem;
  std::optional<StabilizerOutcome> outcome;
  std::vector<std::pair<std::string, Matrix>> elements;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<CertificateCheck> checks;
  bool verdict = false;
  std::string summary;

  std::int64_t parameter(const std::string& name) const;
  const Matrix* element(const std::string& name) const;
  const std::string* value(const std::string& name) const;
};

// Canonical JSON text; equal certificates serialize to identical bytes.
std::string to_json(const WitnessCertificate& cert);
// Throws InputError on malformed input.
WitnessCertificate certificate_from_json(const std::string& text);

struct ReplayResult {
  bool reproduced = false;  // rebuilding from the parameters gives identical bytes
  bool verdict = false;     // verdict recomputed from the serialized data alone
  std::string detail;
};

// Re-solves the serialized stabilizer problem (or, for g2, re-enumerates the
// serialized subgroup) and rebuilds the construction from its parameters.
ReplayResult replay_certificate(const WitnessCertificate& cert);

// Joint stabilizer in Sp4(q) of the pairs {U, W} and {U', W'}; expected {+-I}.
// q odd and at least 5.
WitnessCertificate sp4_witness(std::uint32_t q);

// Joint stabilizer in Omega_n(q) of U and W for n = 4m+1 or 4m+3; expected trivial.
// n and q odd, n >= 7.
WitnessCertificate ortho_odd_witness(std::uint32_t n, std::uint32_t q);

// Stabilizer of W, W1, W2 in O_{4m}^+(q); every element must be some T_a.
// A and B default to a primitive companion matrix and E12(1).
WitnessCertificate lemma66_witness(std::uint32_t m, std::uint32_t q,
                                   const std::optional<Matrix>& a = std::nullopt,
                                   const std::optional<Matrix>& b = std::nullopt);

// Stabilizer in Omega_n^+(q) of the three (k+1)-spaces for n = 2k; expected trivial.
// k >= 5 prime, q even.
WitnessCertificate theorem68_witness(std::uint32_t n, std::uint32_t q);

struct SolubleGamma {
  std::shared_ptr<const StabilizerChain> group;
  MaximalCollection maximals;
  InvariantReport report;
  // B1X, B2X, B3X, B K1, B K2 as members of the collection.
  MemberSet five_set;
  bool five_set_maximal_irredundant = false;
  BigInt x_order = 0, x_frattini_order = 0;
  std::vector<CertificateCheck> checks;
};

// The soluble group (A1 x A2 x A3):X of order 23328 with its 30 maximal subgroups.
SolubleGamma soluble_gamma();

struct G2Witness {
  std::uint32_t q = 0;
  std::vector<Matrix> generators;    // of G2(q) on F_q^6
  std::vector<Matrix> h_generators;  // of H = L2(q) x L2(q)
  Matrix g;
  // Permutation form on nonzero vectors, when the degree fits the limits.
  std::shared_ptr<const StabilizerChain> chain;
  std::optional<SubgroupRecord> h;
  WitnessCertificate certificate;
};

// G2(q) for q in {2, 4, 8} with H and g = x_b(1) x_{a+b}(1) x_{-b}(1).
G2Witness g2_group(std::uint32_t q);

}  // namespace mindim

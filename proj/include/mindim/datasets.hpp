#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mindim/invariants.hpp"
#include "mindim/permcore.hpp"

namespace mindim {

struct ClassRecord {
  std::string name;
  BigInt order = 0;
  BigInt index = 0;
  std::vector<std::string> tags;
  std::vector<Perm> generators;
};

// A corpus group with its maximal subgroup class representatives.
struct GroupFile {
  int version = 1;
  std::string name;
  std::size_t degree = 0;
  BigInt order = 0;
  bool complete = false;
  bool stretch = false;
  std::string provenance;
  std::vector<Perm> generators;
  std::vector<ClassRecord> classes;
};

// Throws InputError with a line number on malformed text.
GroupFile parse_group_file(const std::string& text);
GroupFile read_group_file(const std::string& path);
// Canonical text: classes sorted by index, then decreasing order, then name.
std::string serialize(const GroupFile& file);

// A path as given, else <data dir>/<name> or <data dir>/<name>.grp.
std::string resolve_group_path(const std::string& path_or_name);

enum class ValidationMode { fast, oracle };

struct ClassValidation {
  std::string name;
  bool generators_in_group = false;
  BigInt order = 0;
  bool order_matches = false;
  bool index_matches = false;
  bool primitive = false;
  std::vector<Point> block;  // a nontrivial block when imprimitive
};

struct OracleValidation {
  std::size_t subgroups = 0;         // all subgroups of G
  std::size_t maximal_subgroups = 0;
  std::size_t listed_conjugates = 0;  // maximal subgroups covered by the listed classes
  bool classes_distinct = false;      // no two listed classes are conjugate
  bool complete = false;              // every maximal subgroup is conjugate to a listed one
};

struct ValidationReport {
  BigInt computed_order = 0;
  bool order_matches = false;
  std::vector<ClassValidation> classes;
  std::optional<OracleValidation> oracle;
  // Each failing condition, naming the class when there is one.
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Fast mode checks orders, indices, membership and primitivity of each coset action.
// Oracle mode also enumerates every subgroup; refused with PreconditionError when |G| > 500.
ValidationReport validate_record(const GroupFile& file, ValidationMode mode,
                                 std::shared_ptr<const StabilizerChain> chain = nullptr);

struct LoadedGroup {
  GroupFile file;
  std::string path;
  std::shared_ptr<const StabilizerChain> chain;
  MaximalCollection maximals;
  std::optional<ValidationReport> validation;
};

// Parses, builds the stabilizer chain and the maximal collection. Unless
// `skip_validate` is set, runs fast validation and throws InputError naming the
// first failure.
LoadedGroup load_group(const std::string& path_or_name, bool skip_validate = false);

struct ManifestEntry {
  std::string file;
  std::uint32_t crc32 = 0;
  std::string role;  // default or stretch
};

std::vector<ManifestEntry> read_manifest(const std::string& dir);
std::uint32_t file_crc32(const std::string& path);
// Entries whose file checksum differs from the manifest.
std::vector<std::string> manifest_mismatches(const std::string& dir);

}  // namespace mindim

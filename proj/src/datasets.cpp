#include "mindim/datasets.hpp"

#include <algorithm>
#include <boost/crc.hpp>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mindim/errors.hpp"
#include "mindim/gfq.hpp"
#include "mindim/groupanalysis.hpp"
#include "mindim/limits.hpp"

namespace mindim {

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      lines_.emplace_back(n, line);
    }
  }

  // Reports the most recently consumed line.
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_ == 0 ? 0 : pos_ - 1, what); }
  // Reports the line about to be consumed.
  [[noreturn]] void fail_here(const std::string& what) const { fail_at(pos_, what); }

  // The rest of the line after `key`.
  std::string expect(const std::string& key) {
    if (pos_ >= lines_.size()) fail_here("unexpected end of file, expected '" + key + "'");
    const std::string& line = lines_[pos_].second;
    if (line == key) {
      ++pos_;
      return {};
    }
    if (line.compare(0, key.size() + 1, key + " ") != 0) fail_here("expected '" + key + "'");
    ++pos_;
    return line.substr(key.size() + 1);
  }

  bool peek(const std::string& key) const {
    if (pos_ >= lines_.size()) return false;
    const std::string& line = lines_[pos_].second;
    return line == key || line.compare(0, key.size() + 1, key + " ") == 0;
  }

  std::string next_line() {
    if (pos_ >= lines_.size()) fail_here("unexpected end of file");
    return lines_[pos_++].second;
  }

  bool done() const { return pos_ >= lines_.size(); }

  BigInt big(const std::string& key) {
    std::string v = expect(key);
    if (v.empty() || !std::all_of(v.begin(), v.end(), ::isdigit)) fail("'" + key + "' needs a decimal integer");
    return BigInt(v);
  }

  std::size_t count(const std::string& key) {
    BigInt b = big(key);
    if (b > 100000000) fail("'" + key + "' is too large");
    return static_cast<std::size_t>(b);
  }

  bool flag(const std::string& key) {
    std::string v = expect(key);
    if (v == "true") return true;
    if (v == "false") return false;
    fail("'" + key + "' must be true or false");
  }

  Perm perm(std::size_t degree) {
    std::istringstream ls(next_line());
    std::vector<Point> img;
    long long x;
    while (ls >> x) {
      if (x < 0) fail("negative point in permutation");
      img.push_back(static_cast<Point>(x));
    }
    if (!ls.eof()) fail("non-numeric permutation entry");
    if (img.size() != degree) fail("permutation has " + std::to_string(img.size()) + " images, expected " +
                                   std::to_string(degree));
    try {
      return Perm(img);
    } catch (const InputError& e) {
      fail(e.what());
    }
  }

 private:
  [[noreturn]] void fail_at(std::size_t i, const std::string& what) const {
    std::size_t n = i < lines_.size() ? lines_[i].first : (lines_.empty() ? 0 : lines_.back().first + 1);
    throw InputError("group file line " + std::to_string(n) + ": " + what);
  }

  std::vector<std::pair<std::size_t, std::string>> lines_;
  std::size_t pos_ = 0;
};

std::vector<ClassRecord> canonical_classes(std::vector<ClassRecord> cs) {
  std::stable_sort(cs.begin(), cs.end(), [](const ClassRecord& a, const ClassRecord& b) {
    if (a.index != b.index) return a.index < b.index;
    if (a.order != b.order) return a.order > b.order;
    return a.name < b.name;
  });
  return cs;
}

void write_perm(std::ostringstream& os, const Perm& p) {
  for (std::size_t i = 0; i < p.degree(); ++i) os << (i ? " " : "") << p[static_cast<Point>(i)];
  os << '\n';
}

std::vector<Perm> generators_or_identity(std::size_t degree, const std::vector<Perm>& gens) {
  return gens.empty() ? std::vector<Perm>{Perm(degree)} : gens;
}

using Bits = std::vector<std::uint64_t>;

bool test_bit(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1; }
void set_bit(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }

bool subset_of(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

// Exhaustive subgroup lattice of a small group given by its multiplication table.
OracleValidation oracle_validate(const StabilizerChain& chain, const std::vector<std::vector<Perm>>& class_gens) {
  const std::size_t n = static_cast<std::size_t>(chain.order());
  std::vector<Perm> elems(n);
  for (std::size_t i = 0; i < n; ++i) elems[i] = chain.unrank(i);
  std::vector<std::vector<std::uint32_t>> mul(n, std::vector<std::uint32_t>(n));
  std::vector<std::uint32_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      mul[i][j] = static_cast<std::uint32_t>(chain.rank_member(elems[i] * elems[j]));
    inv[i] = static_cast<std::uint32_t>(chain.rank_member(elems[i].inverse()));
  }
  const std::size_t words = (n + 63) / 64;
  // closure of a set of elements under multiplication
  auto close = [&](Bits b) {
    std::vector<std::uint32_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (test_bit(b, i)) members.push_back(static_cast<std::uint32_t>(i));
    std::vector<std::uint32_t> gens = members;
    for (std::size_t head = 0; head < members.size(); ++head)
      for (auto g : gens) {
        auto y = mul[members[head]][g];
        if (!test_bit(b, y)) {
          set_bit(b, y);
          members.push_back(y);
        }
      }
    return b;
  };
  Bits identity(words, 0);
  set_bit(identity, 0);
  std::set<Bits> all{identity};
  std::vector<Bits> queue{identity};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Bits s = queue[head];
    for (std::size_t g = 0; g < n; ++g) {
      if (test_bit(s, g)) continue;
      Bits t = s;
      set_bit(t, g);
      t = close(t);
      if (all.insert(t).second) queue.push_back(t);
    }
  }
  Bits whole(words, 0);
  for (std::size_t i = 0; i < n; ++i) set_bit(whole, i);
  std::vector<Bits> proper;
  for (const auto& s : all)
    if (s != whole) proper.push_back(s);
  std::vector<Bits> maximal;
  for (const auto& s : proper) {
    bool is_max = true;
    for (const auto& t : proper)
      if (t != s && subset_of(s, t)) {
        is_max = false;
        break;
      }
    if (is_max) maximal.push_back(s);
  }
  auto conjugate = [&](const Bits& s, std::size_t g) {
    Bits c(words, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (test_bit(s, i)) set_bit(c, mul[mul[inv[g]][i]][g]);
    return c;
  };
  OracleValidation out;
  out.subgroups = all.size();
  out.maximal_subgroups = maximal.size();
  std::set<Bits> covered;
  bool distinct = true;
  for (const auto& gens : class_gens) {
    Bits b(words, 0);
    for (const auto& g : gens) set_bit(b, chain.rank_member(g));
    b = close(b);
    std::set<Bits> conj;
    for (std::size_t g = 0; g < n; ++g) conj.insert(conjugate(b, g));
    for (const auto& c : conj)
      if (!covered.insert(c).second) distinct = false;
  }
  out.listed_conjugates = covered.size();
  out.classes_distinct = distinct;
  std::set<Bits> maximal_set(maximal.begin(), maximal.end());
  out.complete = distinct && covered == maximal_set;
  return out;
}

}  // namespace

GroupFile parse_group_file(const std::string& text) {
  LineReader r(text);
  GroupFile f;
  std::string v = r.expect("mindim-group");
  if (v != "1") r.fail("unsupported format version '" + v + "'");
  f.version = 1;
  f.name = r.expect("name");
  f.degree = r.count("degree");
  if (f.degree == 0) r.fail("degree must be positive");
  if (f.degree > limits().max_degree)
    throw ResourceError("budget exceeded: degree " + std::to_string(f.degree) + " exceeds max_degree");
  f.order = r.big("order");
  f.complete = r.flag("complete");
  f.stretch = r.flag("stretch");
  f.provenance = r.expect("provenance");
  std::size_t ng = r.count("generators");
  for (std::size_t i = 0; i < ng; ++i) f.generators.push_back(r.perm(f.degree));
  std::size_t nc = r.count("classes");
  for (std::size_t c = 0; c < nc; ++c) {
    ClassRecord cr;
    cr.name = r.expect("class");
    if (cr.name.empty()) r.fail("class needs a name");
    cr.order = r.big("order");
    cr.index = r.big("index");
    if (r.peek("tags")) {
      std::istringstream ts(r.expect("tags"));
      std::string t;
      while (ts >> t) cr.tags.push_back(t);
    }
    std::size_t k = r.count("generators");
    for (std::size_t i = 0; i < k; ++i) cr.generators.push_back(r.perm(f.degree));
    f.classes.push_back(std::move(cr));
  }
  r.expect("end");
  if (!r.done()) r.fail_here("content after 'end'");
  return f;
}

GroupFile read_group_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open group file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_group_file(ss.str());
}

std::string serialize(const GroupFile& f) {
  std::ostringstream os;
  os << "mindim-group " << f.version << '\n';
  os << "name " << f.name << '\n';
  os << "degree " << f.degree << '\n';
  os << "order " << f.order << '\n';
  os << "complete " << (f.complete ? "true" : "false") << '\n';
  os << "stretch " << (f.stretch ? "true" : "false") << '\n';
  os << "provenance " << f.provenance << '\n';
  os << "generators " << f.generators.size() << '\n';
  for (const auto& g : f.generators) write_perm(os, g);
  auto classes = canonical_classes(f.classes);
  os << "classes " << classes.size() << '\n';
  for (const auto& c : classes) {
    os << "class " << c.name << '\n';
    os << "order " << c.order << '\n';
    os << "index " << c.index << '\n';
    if (!c.tags.empty()) {
      os << "tags";
      for (const auto& t : c.tags) os << ' ' << t;
      os << '\n';
    }
    os << "generators " << c.generators.size() << '\n';
    for (const auto& g : c.generators) write_perm(os, g);
  }
  os << "end\n";
  return os.str();
}

std::string resolve_group_path(const std::string& p) {
  namespace fs = std::filesystem;
  if (fs::exists(p)) return p;
  for (const std::string& candidate : {data_dir() + "/" + p, data_dir() + "/" + p + ".grp"})
    if (fs::exists(candidate)) return candidate;
  throw InputError("no group file or corpus name '" + p + "'");
}

ValidationReport validate_record(const GroupFile& f, ValidationMode mode, std::shared_ptr<const StabilizerChain> chain) {
  if (f.generators.empty()) throw InputError("group file " + f.name + " has no generators");
  if (!chain) chain = std::make_shared<const StabilizerChain>(GeneratedGroup(f.degree, f.generators, f.name));
  ValidationReport rep;
  rep.computed_order = chain->order();
  rep.order_matches = rep.computed_order == f.order;
  if (!rep.order_matches)
    rep.failures.push_back("order mismatch: declared " + f.order.str() + ", computed " + rep.computed_order.str());
  if (mode == ValidationMode::oracle && rep.computed_order > 500)
    throw PreconditionError("oracle validation is limited to groups of order at most 500");

  rep.classes.resize(f.classes.size());
  parallel_for(f.classes.size(), [&](std::size_t c) {
    const ClassRecord& cr = f.classes[c];
    ClassValidation& v = rep.classes[c];
    v.name = cr.name;
    v.generators_in_group = std::all_of(cr.generators.begin(), cr.generators.end(),
                                        [&](const Perm& g) { return chain->contains(g); });
    if (!v.generators_in_group) return;
    auto gens = generators_or_identity(f.degree, cr.generators);
    StabilizerChain h(GeneratedGroup(f.degree, gens));
    v.order = h.order();
    v.order_matches = v.order == cr.order;
    v.index_matches = v.order * cr.index == rep.computed_order;
    if (v.order == rep.computed_order) return;
    CosetAction act(chain, gens);
    auto pr = is_primitive(act);
    v.primitive = pr.primitive;
    v.block = pr.block;
  });
  for (const auto& v : rep.classes) {
    std::string cls = "class " + v.name + ": ";
    if (!v.generators_in_group) {
      rep.failures.push_back(cls + "generator outside the group");
      continue;
    }
    const auto& cr = f.classes[static_cast<std::size_t>(&v - rep.classes.data())];
    if (!v.order_matches)
      rep.failures.push_back(cls + "order mismatch: declared " + cr.order.str() + ", computed " + v.order.str());
    if (!v.index_matches) rep.failures.push_back(cls + "index mismatch: declared " + cr.index.str());
    if (v.order == rep.computed_order) {
      rep.failures.push_back(cls + "is the whole group");
      continue;
    }
    if (!v.primitive) {
      std::ostringstream os;
      os << cls << "coset action is imprimitive (block of size " << v.block.size() << ":";
      for (auto p : v.block) os << ' ' << p;
      os << ")";
      rep.failures.push_back(os.str());
    }
  }
  if (mode == ValidationMode::oracle && rep.failures.empty()) {
    std::vector<std::vector<Perm>> gens;
    for (const auto& c : f.classes) gens.push_back(c.generators);
    rep.oracle = oracle_validate(*chain, gens);
    if (!rep.oracle->classes_distinct) rep.failures.push_back("two listed classes are conjugate");
    if (!rep.oracle->complete)
      rep.failures.push_back("maximal subgroup list is incomplete: " + std::to_string(rep.oracle->maximal_subgroups) +
                             " maximal subgroups, " + std::to_string(rep.oracle->listed_conjugates) + " listed");
  }
  return rep;
}

LoadedGroup load_group(const std::string& path_or_name, bool skip_validate) {
  LoadedGroup g;
  g.path = resolve_group_path(path_or_name);
  g.file = read_group_file(g.path);
  if (g.file.generators.empty()) throw InputError("group file " + g.file.name + " has no generators");
  g.chain = std::make_shared<const StabilizerChain>(GeneratedGroup(g.file.degree, g.file.generators, g.file.name));
  if (!skip_validate) {
    g.validation = validate_record(g.file, ValidationMode::fast, g.chain);
    if (!g.validation->ok()) throw InputError(g.file.name + ": " + g.validation->failures.front());
  }
  std::vector<SubgroupRecord> reps;
  for (const auto& c : g.file.classes) {
    auto rec = make_subgroup(g.chain, generators_or_identity(g.file.degree, c.generators), c.name);
    rec.tags = c.tags;
    reps.push_back(std::move(rec));
  }
  g.maximals = MaximalCollection(g.chain, std::move(reps), g.file.complete, false);
  return g;
}

std::vector<ManifestEntry> read_manifest(const std::string& dir) {
  std::string path = dir + "/MANIFEST";
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ManifestEntry e;
    std::string crc;
    if (!(ls >> e.file >> crc >> e.role)) throw InputError("malformed manifest line: " + line);
    try {
      e.crc32 = static_cast<std::uint32_t>(std::stoul(crc, nullptr, 16));
    } catch (const std::exception&) {
      throw InputError("malformed manifest checksum: " + crc);
    }
    out.push_back(e);
  }
  return out;
}

std::uint32_t file_crc32(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string s = ss.str();
  boost::crc_32_type crc;
  crc.process_bytes(s.data(), s.size());
  return crc.checksum();
}

std::vector<std::string> manifest_mismatches(const std::string& dir) {
  std::vector<std::string> bad;
  for (const auto& e : read_manifest(dir)) {
    std::string p = dir + "/" + e.file;
    if (!std::filesystem::exists(p) || file_crc32(p) != e.crc32) bad.push_back(e.file);
  }
  return bad;
}

}  // namespace mindim

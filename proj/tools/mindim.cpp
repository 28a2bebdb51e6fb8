#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mindim/constructions.hpp"
#include "mindim/datasets.hpp"
#include "mindim/errors.hpp"
#include "mindim/invariants.hpp"
#include "mindim/limits.hpp"

using namespace mindim;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "mindim-report/1";

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kBudget = 3, kInternal = 4 };

struct Options {
  bool json = false;
  bool timing = false;
  bool skip_validate = false;
  std::uint64_t seed = 1;
  std::string output;
  std::string replay;
};

// Result of one subcommand: machine form, human form and exit code.
struct Outcome {
  Json inputs = Json::object();
  Json results = Json::object();
  std::vector<std::string> budgets_hit;
  std::ostringstream text;
  int code = kOk;
};

std::string str(const BigInt& b) { return b.str(); }

Json perm_json(const Perm& p) {
  Json a = Json::array();
  for (std::size_t i = 0; i < p.degree(); ++i) a.push_back(p[static_cast<Point>(i)]);
  return a;
}

Perm perm_from_json(const Json& j) { return Perm(j.get<std::vector<Point>>()); }

std::string perm_cycles(const Perm& p) {
  std::string out;
  std::vector<bool> seen(p.degree(), false);
  for (std::size_t i = 0; i < p.degree(); ++i) {
    if (seen[i] || p[static_cast<Point>(i)] == i) continue;
    out += "(";
    for (Point x = static_cast<Point>(i); !seen[x]; x = p[x]) {
      seen[x] = true;
      out += (out.back() == '(' ? "" : ",") + std::to_string(x);
    }
    out += ")";
  }
  return out.empty() ? "()" : out;
}

std::size_t find_class(const LoadedGroup& g, const std::string& key) {
  for (std::size_t c = 0; c < g.file.classes.size(); ++c)
    if (g.file.classes[c].name == key) return c;
  if (!key.empty() && std::all_of(key.begin(), key.end(), ::isdigit)) {
    std::size_t k = std::stoul(key);
    if (k >= 1 && k <= g.file.classes.size()) return k - 1;
  }
  throw InputError("group " + g.file.name + " has no class '" + key + "'");
}

Json member_json(const MaximalCollection& mc, const LoadedGroup& g, std::size_t i) {
  Json m;
  m["index"] = i;
  m["class"] = g.file.classes[mc.class_of(i)].name;
  m["conjugator"] = perm_json(mc.conjugator(i));
  return m;
}

Json members_json(const LoadedGroup& g, const MemberSet& ms) {
  Json a = Json::array();
  for (auto i : ms) a.push_back(member_json(g.maximals, g, i));
  return a;
}

std::string members_text(const LoadedGroup& g, const MemberSet& ms) {
  std::string out;
  for (auto i : ms) {
    if (!out.empty()) out += ", ";
    out += g.file.classes[g.maximals.class_of(i)].name + "^" + perm_cycles(g.maximals.conjugator(i));
  }
  return "{" + out + "}";
}

// Member indices from a stored list, checked against the stored conjugators.
MemberSet members_from_json(const LoadedGroup& g, const Json& a) {
  MemberSet ms;
  for (const auto& m : a) {
    std::size_t i = m.at("index").get<std::size_t>();
    if (i >= g.maximals.size()) throw InputError("replay: member index out of range");
    if (g.file.classes[g.maximals.class_of(i)].name != m.at("class").get<std::string>() ||
        g.maximals.conjugator(i) != perm_from_json(m.at("conjugator")))
      throw InputError("replay: member " + std::to_string(i) + " does not match the group data");
    ms.push_back(i);
  }
  return ms;
}

LoadedGroup load(const Options& o, const std::string& name, Outcome& out) {
  auto g = load_group(name, o.skip_validate);
  out.inputs["group"] = g.file.name;
  out.inputs["file"] = std::filesystem::path(g.path).filename().string();
  out.inputs["validated"] = g.validation.has_value();
  return g;
}

// ---------------------------------------------------------------- group commands

void cmd_info(const Options& o, const std::string& group, Outcome& out) {
  auto g = load(o, group, out);
  const auto& f = g.file;
  auto& r = out.results;
  r["name"] = f.name;
  r["degree"] = f.degree;
  r["order"] = str(g.chain->order());
  r["complete"] = f.complete;
  r["stretch"] = f.stretch;
  r["provenance"] = f.provenance;
  out.text << f.name << ": degree " << f.degree << ", order " << g.chain->order() << "\n"
           << "maximal classes: " << f.classes.size() << (f.complete ? " (complete)" : " (incomplete)") << "\n";
  Json cls = Json::array();
  for (std::size_t c = 0; c < f.classes.size(); ++c) {
    const auto& rep = g.maximals.representatives()[c];
    BigInt core_order = core(rep, g.maximals.action(c)).order;
    Json j;
    j["name"] = f.classes[c].name;
    j["order"] = str(rep.order);
    j["index"] = str(f.classes[c].index);
    j["normal"] = g.maximals.normal(c);
    j["core_order"] = str(core_order);
    j["tags"] = f.classes[c].tags;
    cls.push_back(j);
    out.text << "  " << f.classes[c].name << ": order " << rep.order << ", index " << f.classes[c].index
             << (g.maximals.normal(c) ? ", normal" : "") << (core_order == 1 ? ", core-free" : "") << "\n";
  }
  r["classes"] = cls;
  if (f.complete) {
    auto fr = g.maximals.frattini().order;
    r["frattini_order"] = str(fr);
    out.text << "Frattini subgroup order: " << fr << "\n";
  }
}

void cmd_basesize(const Options& o, const std::string& group, const std::string& cls, Outcome& out) {
  auto g = load(o, group, out);
  std::size_t c = find_class(g, cls);
  out.inputs["class"] = g.file.classes[c].name;
  const auto& rep = g.maximals.representatives()[c];
  auto b = base_size(g.maximals.action(c), rep);
  auto& r = out.results;
  r["b"] = b.b;
  r["lower_bound"] = b.lower_bound;
  r["greedy_upper"] = b.greedy_upper;
  r["core_order"] = str(b.witness.intersection_order);
  Json conj = Json::array();
  for (const auto& x : b.witness.conjugators) conj.push_back(perm_json(x));
  r["conjugators"] = conj;
  out.text << "b(" << g.file.name << ", " << g.file.classes[c].name << ") = " << b.b << "\n"
           << "bounds: lower " << b.lower_bound << ", greedy upper " << b.greedy_upper << "\n"
           << "witness conjugators:";
  for (const auto& x : b.witness.conjugators) out.text << " " << perm_cycles(x);
  out.text << "\nintersection order " << b.witness.intersection_order << "\n";
}

void cmd_invariant(const Options& o, const std::string& which, const std::string& group, std::uint64_t max_nodes,
                   Outcome& out) {
  auto g = load(o, group, out);
  const auto& mc = g.maximals;
  mc.require_complete(which.c_str());
  auto& r = out.results;
  const std::string& name = g.file.name;
  if (which == "alpha") {
    auto a = compute_alpha(mc);
    r["alpha"] = a.value;
    r["witness"] = members_json(g, a.witness);
    r["frattini_order"] = str(mc.frattini().order);
    out.text << "alpha(" << name << ") = " << a.value << "\nwitness " << members_text(g, a.witness) << "\n";
  } else if (which == "mindim") {
    auto m = compute_mindim(mc);
    r["exact"] = m.exact();
    if (m.exact())
      r["mindim"] = m.upper;
    else
      r["mindim"] = nullptr;
    r["lower"] = m.lower;
    r["upper"] = m.upper;
    r["witness"] = members_json(g, m.witness);
    Json ext = Json::array();
    for (auto [size, count] : m.extended) ext.push_back({{"size", size}, {"irredundant_sets", count}});
    r["extended"] = ext;
    if (!m.note.empty()) r["note"] = m.note;
    if (m.budget_exceeded) out.budgets_hit.push_back("time budget during Mindim search");
    if (m.exact())
      out.text << "Mindim(" << name << ") = " << m.upper << "\n";
    else
      out.text << "Mindim(" << name << ") in [" << m.lower << ", " << m.upper << "]\n";
    out.text << "maximal irredundant witness " << members_text(g, m.witness) << "\n";
  } else if (which == "beta") {
    auto b = compute_beta(mc);
    if (b.value) {
      r["beta"] = *b.value;
      r["class"] = g.file.classes[*b.cls].name;
      Json conj = Json::array();
      for (const auto& x : b.witness.conjugators) conj.push_back(perm_json(x));
      r["conjugators"] = conj;
      out.text << "beta(" << name << ") = " << *b.value << " (class " << g.file.classes[*b.cls].name << ")\n";
    } else {
      r["beta"] = nullptr;
      r["infinite"] = true;
      out.text << "beta(" << name << ") = infinity (no maximal subgroup has core equal to the Frattini subgroup)\n";
    }
    Json terms = Json::array();
    for (const auto& t : b.terms) {
      Json j{{"class", g.file.classes[t.cls].name}, {"lower_bound", t.lower_bound}};
      j["b"] = t.b ? Json(*t.b) : Json(nullptr);
      terms.push_back(j);
    }
    r["terms"] = terms;
  } else {
    MaxdimOptions mo;
    mo.max_nodes = max_nodes;
    out.inputs["max_nodes"] = max_nodes;
    auto m = compute_maxdim(mc, mo);
    r["maxdim"] = m.value;
    r["exact"] = m.exact;
    r["witness"] = members_json(g, m.witness);
    if (m.base_class) r["base_class"] = g.file.classes[*m.base_class].name;
    r["nodes"] = m.nodes;
    if (!m.exact) out.budgets_hit.push_back("node budget during Maxdim search");
    out.text << "Maxdim(" << name << ") " << (m.exact ? "= " : ">= ") << m.value << "\n"
             << "irredundant witness " << members_text(g, m.witness) << "\n";
  }
}

void cmd_qhat(const Options& o, const std::string& group, const std::string& cls, unsigned c, std::uint64_t trials,
              Outcome& out) {
  auto g = load(o, group, out);
  std::size_t k = find_class(g, cls);
  out.inputs["class"] = g.file.classes[k].name;
  out.inputs["c"] = c;
  out.inputs["trials"] = trials;
  out.inputs["seed"] = o.seed;
  const auto& act = g.maximals.action(k);
  auto table = prime_order_classes(*g.chain);
  auto q = qhat(act, g.maximals.representatives()[k], table, c);
  auto& r = out.results;
  r["qhat"] = to_string(q.value);
  r["implies_base_size_at_most_c"] = q.implies_bound();
  Json terms = Json::array();
  for (const auto& t : q.terms)
    terms.push_back({{"class_order", table.classes[t.class_index].element_order},
                     {"class_size", t.class_size},
                     {"fixed_points", t.fixed_points},
                     {"fpr", to_string(t.fpr)},
                     {"route_b", t.route_b}});
  r["terms"] = terms;
  out.text << "Qhat(" << g.file.name << ", " << g.file.classes[k].name << ", " << c << ") = " << to_string(q.value)
           << " ~ " << static_cast<double>(q.value) << "\n"
           << (q.implies_bound() ? "< 1, so b <= " + std::to_string(c) : ">= 1, no conclusion") << "\n";
  if (trials > 0) {
    auto mcr = monte_carlo_nonbase(act, c, trials, o.seed);
    r["monte_carlo"] = {{"trials", mcr.trials}, {"failures", mcr.failures}};
    out.text << "Monte Carlo non-base frequency " << mcr.failures << "/" << mcr.trials << "\n";
  }
}

void cmd_criteria(const Options& o, const std::string& group, const std::string& hs, const std::string& ks,
                  Outcome& out) {
  auto g = load(o, group, out);
  std::size_t hc = find_class(g, hs), kc = find_class(g, ks);
  out.inputs["h_class"] = g.file.classes[hc].name;
  out.inputs["k_class"] = g.file.classes[kc].name;
  const auto& h = g.maximals.representatives()[hc];
  const auto& k = g.maximals.representatives()[kc];
  const auto& act = g.maximals.action(hc);
  auto oc = order_criterion(h, k);
  std::vector<Perm> reps;
  for (const auto& d : double_cosets(act, k)) reps.push_back(d.representative);
  auto dc = double_coset_criterion(act, k, reps);
  auto ro = regular_orbit_witness(act, k);
  auto& r = out.results;
  r["order_criterion"] = {{"verdict", oc.verdict}, {"hk", str(oc.lhs)}, {"group_order", str(oc.rhs)}};
  r["double_coset_criterion"] = {{"verdict", dc.verdict}, {"sizes", dc.sizes}};
  r["regular_orbit"] = ro.conjugator.has_value();
  if (ro.conjugator) r["regular_orbit_conjugator"] = perm_json(*ro.conjugator);
  bool no_regular = oc.verdict || dc.verdict;
  if (no_regular && ro.conjugator) throw InternalError("criterion holds but a regular orbit was found");
  out.text << "order criterion |H||K| > |G|: " << (oc.verdict ? "true" : "false") << " (" << oc.lhs << " vs "
           << oc.rhs << ")\n"
           << "double coset criterion over " << reps.size()
           << " double cosets: " << (dc.verdict ? "true" : "false") << "\n";
  if (ro.conjugator)
    out.text << "regular orbit: K meets H^x trivially for x = " << perm_cycles(*ro.conjugator) << "\n";
  else
    out.text << "no regular orbit of K on the cosets of H\n";
  if (!no_regular) out.code = kNegative;
}

// ---------------------------------------------------------------- verify

void certificate_outcome(const WitnessCertificate& cert, Outcome& out) {
  out.results["certificate"] = Json::parse(to_json(cert));
  out.results["verdict"] = cert.verdict;
  out.text << cert.construction << ":";
  for (const auto& [k, v] : cert.parameters) out.text << " " << k << "=" << v;
  out.text << "\n";
  if (cert.outcome) {
    out.text << "solution space dimensions:";
    for (auto d : cert.outcome->dimensions) out.text << " " << d;
    out.text << "; candidates " << cert.outcome->candidates << "; stabilizer size "
             << cert.outcome->stabilizer.size() << "\n";
  }
  for (const auto& [k, v] : cert.values) out.text << k << " = " << v << "\n";
  for (const auto& c : cert.checks) out.text << (c.passed ? "  ok   " : "  FAIL ") << c.name << "\n";
  out.text << "verdict: " << (cert.verdict ? "verified" : "not verified") << "\n" << cert.summary << "\n";
  if (cert.outcome && cert.outcome->budget_exceeded) {
    out.budgets_hit.push_back("enumeration budget");
  } else if (!cert.verdict) {
    out.code = kNegative;
  }
}

Matrix parse_matrix(const std::string& text, std::uint32_t q) {
  const Field& f = Field::get(q);
  std::vector<Vec> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::istringstream rs(row);
    Vec v;
    long long x;
    while (rs >> x) {
      if (x < 0 || x >= static_cast<long long>(q)) throw InputError("matrix entry out of range: " + std::to_string(x));
      v.push_back(static_cast<Elt>(x));
    }
    if (!rs.eof()) throw InputError("malformed matrix '" + text + "'");
    rows.push_back(v);
  }
  if (rows.empty() || rows.size() != rows[0].size())
    throw InputError("matrix must be square: '" + text + "'");
  for (const auto& r : rows)
    if (r.size() != rows.size()) throw InputError("matrix must be square: '" + text + "'");
  return Matrix::from_rows(f, rows);
}

struct VerifyParams {
  std::string what;
  std::uint32_t q = 0, n = 0, m = 0;
  std::string variant = "lemma66";
  std::string a, b;
};

void cmd_verify(const VerifyParams& p, Outcome& out) {
  out.inputs["construction"] = p.what;
  if (p.what == "sp4") {
    std::uint32_t q = p.q ? p.q : 5;
    out.inputs["q"] = q;
    certificate_outcome(sp4_witness(q), out);
  } else if (p.what == "ortho-odd") {
    std::uint32_t n = p.n ? p.n : 7, q = p.q ? p.q : 3;
    out.inputs["n"] = n;
    out.inputs["q"] = q;
    certificate_outcome(ortho_odd_witness(n, q), out);
  } else if (p.what == "ortho-even") {
    std::uint32_t q = p.q ? p.q : 2;
    out.inputs["variant"] = p.variant;
    out.inputs["q"] = q;
    if (p.variant == "lemma66") {
      std::uint32_t m = p.m ? p.m : 2;
      out.inputs["m"] = m;
      std::optional<Matrix> a, b;
      if (!p.a.empty()) a = parse_matrix(p.a, q);
      if (!p.b.empty()) b = parse_matrix(p.b, q);
      certificate_outcome(lemma66_witness(m, q, a, b), out);
    } else if (p.variant == "theorem68") {
      std::uint32_t n = p.n ? p.n : 10;
      out.inputs["n"] = n;
      certificate_outcome(theorem68_witness(n, q), out);
    } else {
      throw InputError("unknown ortho-even variant '" + p.variant + "' (lemma66 or theorem68)");
    }
  } else if (p.what == "g2") {
    std::uint32_t q = p.q ? p.q : 4;
    out.inputs["q"] = q;
    auto w = g2_group(q);
    certificate_outcome(w.certificate, out);
  } else if (p.what == "soluble") {
    auto s = soluble_gamma();
    const auto& mc = s.maximals;
    auto& r = out.results;
    r["order"] = str(s.group->order());
    r["maximal_subgroups"] = mc.size();
    r["frattini_order"] = str(mc.frattini().order);
    r["alpha"] = s.report.alpha ? Json(s.report.alpha->value) : Json(nullptr);
    if (s.report.mindim) {
      r["mindim_lower"] = s.report.mindim->lower;
      r["mindim_upper"] = s.report.mindim->upper;
    }
    r["beta"] = s.report.beta && s.report.beta->value ? Json(*s.report.beta->value) : Json(nullptr);
    Json five = Json::array();
    for (auto i : s.five_set) five.push_back({{"index", i}, {"name", mc.representatives()[mc.class_of(i)].name},
                                              {"conjugator", perm_json(mc.conjugator(i))}});
    r["five_set"] = five;
    r["five_set_maximal_irredundant"] = s.five_set_maximal_irredundant;
    Json checks = Json::array();
    bool ok = s.five_set_maximal_irredundant;
    for (const auto& c : s.checks) {
      checks.push_back({{"name", c.name}, {"passed", c.passed}});
      ok = ok && c.passed;
    }
    r["checks"] = checks;
    r["verdict"] = ok;
    out.text << "soluble group of order " << s.group->order() << " with " << mc.size()
             << " maximal subgroups, Frattini order " << mc.frattini().order << "\n";
    if (s.report.alpha) out.text << "alpha = " << s.report.alpha->value << "\n";
    if (s.report.mindim && s.report.mindim->exact())
      out.text << "Mindim = " << s.report.mindim->upper << "\n";
    else if (s.report.mindim)
      out.text << "Mindim in [" << s.report.mindim->lower << ", " << s.report.mindim->upper << "]\n";
    out.text << "beta = " << (s.report.beta && s.report.beta->value ? std::to_string(*s.report.beta->value) : "infinity")
             << "\n";
    out.text << "five-set maximal irredundant: " << (s.five_set_maximal_irredundant ? "yes" : "no") << "\n";
    for (const auto& c : s.checks) out.text << (c.passed ? "  ok   " : "  FAIL ") << c.name << "\n";
    if (!ok) out.code = kNegative;
  } else {
    throw InputError("unknown construction '" + p.what + "' (sp4, ortho-odd, ortho-even, g2, soluble)");
  }
}

void cmd_validate(const std::string& file, bool oracle_mode, Outcome& out) {
  auto path = resolve_group_path(file);
  auto f = read_group_file(path);
  out.inputs["file"] = std::filesystem::path(path).filename().string();
  out.inputs["mode"] = oracle_mode ? "oracle" : "fast";
  auto rep = validate_record(f, oracle_mode ? ValidationMode::oracle : ValidationMode::fast);
  auto& r = out.results;
  r["name"] = f.name;
  r["computed_order"] = str(rep.computed_order);
  r["order_matches"] = rep.order_matches;
  Json cls = Json::array();
  for (const auto& c : rep.classes)
    cls.push_back({{"name", c.name},
                   {"order", str(c.order)},
                   {"generators_in_group", c.generators_in_group},
                   {"order_matches", c.order_matches},
                   {"index_matches", c.index_matches},
                   {"primitive", c.primitive},
                   {"block", c.block}});
  r["classes"] = cls;
  out.text << f.name << ": computed order " << rep.computed_order << (rep.order_matches ? " (matches)" : "") << "\n";
  for (const auto& c : rep.classes)
    out.text << "  " << c.name << ": order " << c.order << (c.primitive ? ", primitive" : ", not primitive") << "\n";
  if (rep.oracle) {
    const auto& ov = *rep.oracle;
    r["oracle"] = {{"subgroups", ov.subgroups},
                   {"maximal_subgroups", ov.maximal_subgroups},
                   {"listed_conjugates", ov.listed_conjugates},
                   {"classes_distinct", ov.classes_distinct},
                   {"complete", ov.complete}};
    out.text << "oracle: " << ov.subgroups << " subgroups, " << ov.maximal_subgroups << " maximal, "
             << ov.listed_conjugates << " covered by the listed classes" << (ov.complete ? ", complete" : "")
             << "\n";
  }
  r["failures"] = rep.failures;
  r["ok"] = rep.ok();
  for (const auto& e : rep.failures) out.text << "FAIL " << e << "\n";
  out.text << (rep.ok() ? "valid" : "invalid") << "\n";
  if (!rep.ok()) out.code = kNegative;
}

void cmd_aset(std::uint64_t n, Outcome& out) {
  bool in = aset_contains(n);
  out.inputs["n"] = n;
  out.results["member"] = in;
  out.text << n << (in ? " is in A" : " is not in A") << "\n" << (in ? "true" : "false") << "\n";
  if (!in) out.code = kNegative;
}

// ---------------------------------------------------------------- replay

void cmd_replay(const Options& o, const std::string& path, Outcome& out) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open report " + path);
  Json rep;
  try {
    rep = Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
  if (rep.value("schema", "") != kSchema) throw InputError("not a " + std::string(kSchema) + " report");
  const std::string cmd = rep.at("command").get<std::string>();
  const Json& inputs = rep.at("inputs");
  const Json& res = rep.at("results");
  out.inputs["report"] = std::filesystem::path(path).filename().string();
  out.inputs["command"] = cmd;
  bool ok = false;
  std::string detail;
  if (cmd == "verify" && res.contains("certificate")) {
    auto cert = certificate_from_json(res.at("certificate").dump());
    auto rr = replay_certificate(cert);
    ok = rr.reproduced && rr.verdict == cert.verdict;
    detail = rr.detail;
    out.results["reproduced"] = rr.reproduced;
    out.results["verdict"] = rr.verdict;
  } else if (cmd == "verify") {
    Outcome again;
    cmd_verify({inputs.at("construction").get<std::string>()}, again);
    ok = again.results == res;
    detail = ok ? "rebuilt report is identical" : "rebuilt report differs";
  } else if (cmd == "basesize" || cmd == "beta") {
    auto g = load_group(inputs.at("file").get<std::string>(), o.skip_validate);
    std::size_t c = find_class(g, cmd == "basesize" ? inputs.at("class").get<std::string>()
                                                    : res.at("class").get<std::string>());
    const auto& h = g.maximals.representatives()[c];
    BaseWitness w;
    w.h = h;
    for (const auto& x : res.at("conjugators")) w.conjugators.push_back(perm_from_json(x));
    for (const auto& x : w.conjugators)
      if (!g.chain->contains(x)) throw InputError("replay: conjugator outside the group");
    BigInt inter = replay_base_witness(w);
    BigInt core_order = core(h, g.maximals.action(c)).order;
    std::size_t b = res.at(cmd == "basesize" ? "b" : "beta").get<std::size_t>();
    ok = inter == core_order && w.conjugators.size() == b;
    detail = "intersection order " + inter.str() + ", core order " + core_order.str();
  } else if (cmd == "alpha" || cmd == "mindim" || cmd == "maxdim") {
    auto g = load_group(inputs.at("file").get<std::string>(), o.skip_validate);
    MemberSet ms = members_from_json(g, res.at("witness"));
    BigInt inter = replay_intersection_order(g.maximals, ms);
    if (cmd == "alpha") {
      ok = inter == g.maximals.frattini().order && ms.size() == res.at("alpha").get<std::size_t>();
      detail = "witness meets in a subgroup of order " + inter.str();
    } else if (cmd == "mindim") {
      ok = is_maximal_irredundant(g.maximals, ms) && ms.size() == res.at("upper").get<std::size_t>();
      detail = "witness of size " + std::to_string(ms.size()) +
               (is_maximal_irredundant(g.maximals, ms) ? " is" : " is not") + " maximal irredundant, reported " +
               res.at("upper").dump();
    } else {
      ok = is_irredundant(g.maximals, ms) && ms.size() == res.at("maxdim").get<std::size_t>();
      detail = "witness of size " + std::to_string(ms.size()) + (is_irredundant(g.maximals, ms) ? " is" : " is not") +
               " irredundant, reported " + res.at("maxdim").dump();
    }
  } else if (cmd == "criteria") {
    auto g = load_group(inputs.at("file").get<std::string>(), o.skip_validate);
    const auto& h = g.maximals.representatives()[find_class(g, inputs.at("h_class").get<std::string>())];
    const auto& k = g.maximals.representatives()[find_class(g, inputs.at("k_class").get<std::string>())];
    if (res.contains("regular_orbit_conjugator")) {
      Perm x = perm_from_json(res.at("regular_orbit_conjugator"));
      std::vector<Perm> gens;
      for (const auto& y : h.generators) gens.push_back(y.conjugate_by(x));
      auto hx = make_subgroup(g.chain, gens);
      BigInt inter = subgroup_intersection(hx, k).order;
      ok = inter == 1;
      detail = "K meets H^x in a subgroup of order " + inter.str();
    } else {
      ok = order_criterion(h, k).verdict == res.at("order_criterion").at("verdict").get<bool>();
      detail = "no stored witness; order criterion recomputed";
    }
  } else {
    throw InputError("reports of '" + cmd + "' carry no witness to replay");
  }
  out.results["replayed"] = ok;
  out.results["detail"] = detail;
  out.text << "replay of " << cmd << ": " << (ok ? "verified" : "NOT verified") << " (" << detail << ")\n";
  if (!ok) out.code = kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal and maximal irredundant sets of maximal subgroups, base sizes and witness checks."};
  app.require_subcommand(0, 1);
  app.failure_message(CLI::FailureMessage::help);
  app.fallthrough();
  Options o;
  Limits& lim = limits();
  std::uint64_t max_enum = lim.max_enumeration;
  app.add_flag("--json", o.json, "Emit a JSON report");
  app.add_option("--output", o.output, "Write the report to a file");
  app.add_option("--replay", o.replay, "Re-verify the witness stored in a JSON report");
  app.add_flag("--timing", o.timing, "Include wall-clock time in the report");
  app.add_option("--max-degree", lim.max_degree, "Largest coset action degree")->capture_default_str();
  app.add_option("--max-elements", lim.max_elements, "Largest materialized element set")->capture_default_str();
  app.add_option("--max-enumeration", max_enum, "Largest enumerated solution space")->capture_default_str();
  app.add_option("--budget-seconds", lim.budget_seconds, "Time budget for searches, 0 for none")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for randomized estimates")->capture_default_str();
  app.add_option("--threads", lim.threads, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
  app.add_flag("--skip-validate", o.skip_validate, "Load group files without validation");

  std::string group, cls, cls2, file;
  unsigned c = 2;
  std::uint64_t trials = 10000, n = 0;
  bool oracle_mode = false;
  VerifyParams vp;

  auto* info = app.add_subcommand("info", "Describe a group and its maximal classes");
  info->add_option("group", group, "Group file or corpus name")->required();
  auto* bs = app.add_subcommand("basesize", "Exact base size b(G, H)");
  bs->add_option("group", group)->required();
  bs->add_option("class", cls, "Class name or 1-based position")->required();
  std::vector<std::pair<std::string, CLI::App*>> inv;
  std::uint64_t max_nodes = MaxdimOptions{}.max_nodes;
  for (const char* w : {"alpha", "mindim", "beta", "maxdim"}) {
    auto* s = app.add_subcommand(w, std::string("Compute ") + w + " of a group");
    s->add_option("group", group)->required();
    inv.emplace_back(w, s);
  }
  inv.back().second->add_option("--max-nodes", max_nodes, "Search nodes before falling back to a lower bound")
      ->capture_default_str();
  auto* qh = app.add_subcommand("qhat", "Exact Qhat(G, H, c) with a Monte Carlo estimate");
  qh->add_option("group", group)->required();
  qh->add_option("class", cls)->required();
  qh->add_option("c", c)->required()->check(CLI::Range(2u, 64u));
  qh->add_option("--trials", trials, "Monte Carlo trials, 0 to skip")->capture_default_str();
  auto* cr = app.add_subcommand("criteria", "Order and double coset criteria for H and K");
  cr->add_option("group", group)->required();
  cr->add_option("h_class", cls, "Class H")->required();
  cr->add_option("k_class", cls2, "Class K")->required();
  auto* as = app.add_subcommand("aset", "Membership of n in the set A");
  as->add_option("n", n)->required();
  auto* ve = app.add_subcommand("verify", "Build and check a witness construction");
  ve->add_option("construction", vp.what, "sp4, ortho-odd, ortho-even, g2 or soluble")->required();
  ve->add_option("--q", vp.q, "Field size");
  ve->add_option("--n", vp.n, "Dimension");
  ve->add_option("--m", vp.m, "Half rank for lemma66");
  ve->add_option("--variant", vp.variant, "lemma66 or theorem68")->capture_default_str();
  ve->add_option("--a", vp.a, "Matrix A as rows of element codes separated by ';'");
  ve->add_option("--b", vp.b, "Matrix B as rows of element codes separated by ';'");
  auto* va = app.add_subcommand("validate", "Validate a group file");
  va->add_option("file", file)->required();
  va->add_flag("--oracle", oracle_mode, "Exhaustive subgroup enumeration (order at most 500)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return e.get_exit_code() == 0 ? rc : kInput;
  }
  lim.max_enumeration = max_enum;
  if (app.get_subcommands().empty() && o.replay.empty()) {
    std::cerr << app.help();
    return kInput;
  }

  Outcome out;
  std::string command = o.replay.empty() ? app.get_subcommands().front()->get_name() : "replay";
  auto start = std::chrono::steady_clock::now();
  int code = kOk;
  std::string error;
  try {
    if (!o.replay.empty()) cmd_replay(o, o.replay, out);
    else if (info->parsed()) cmd_info(o, group, out);
    else if (bs->parsed()) cmd_basesize(o, group, cls, out);
    else if (qh->parsed()) cmd_qhat(o, group, cls, c, trials, out);
    else if (cr->parsed()) cmd_criteria(o, group, cls, cls2, out);
    else if (as->parsed()) cmd_aset(n, out);
    else if (ve->parsed()) cmd_verify(vp, out);
    else if (va->parsed()) cmd_validate(file, oracle_mode, out);
    else
      for (auto& [w, s] : inv)
        if (s->parsed()) cmd_invariant(o, w, group, max_nodes, out);
    code = out.budgets_hit.empty() ? out.code : kBudget;
  } catch (const ResourceError& e) {
    error = e.what();
    out.budgets_hit.push_back(e.what());
    code = kBudget;
  } catch (const InputError& e) {
    error = e.what();
    code = kInput;
  } catch (const PreconditionError& e) {
    error = e.what();
    code = kInput;
  } catch (const InternalError& e) {
    error = std::string("internal error: ") + e.what();
    code = kInternal;
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string text;
  if (o.json) {
    Json rep;
    rep["schema"] = kSchema;
    rep["command"] = command;
    rep["inputs"] = out.inputs;
    rep["results"] = out.results;
    rep["budgets_hit"] = out.budgets_hit;
    if (!error.empty()) rep["error"] = error;
    rep["exit_code"] = code;
    rep["seed"] = o.seed;
    if (o.timing) rep["wall_seconds"] = seconds;
    text = rep.dump(2) + "\n";
  } else {
    text = out.text.str();
    for (const auto& b : out.budgets_hit)
      if (b != error) text += "budget exceeded: " + b + "\n";
    if (o.timing) text += "wall-clock " + std::to_string(seconds) + " s\n";
  }
  if (!error.empty()) std::cerr << "error: " << error << "\n";
  if (o.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.output);
    if (!f) {
      std::cerr << "error: cannot write " << o.output << "\n";
      return kInput;
    }
    f << text;
  }
  return code;
}

#include "mindim/constructions.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "mindim/errors.hpp"
#include "mindim/limits.hpp"

namespace mindim {

namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- integers

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s && composite; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

// r^k, or 0 when it exceeds 64 bits.
std::uint64_t checked_pow(std::uint64_t r, unsigned k) {
  unsigned __int128 acc = 1;
  for (unsigned i = 0; i < k; ++i) {
    acc *= r;
    if (acc > UINT64_MAX) return 0;
  }
  return static_cast<std::uint64_t>(acc);
}

bool is_prime_power_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (unsigned k = 1; k < 64; ++k) {
    auto r = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / k)));
    if (k > 1 && r < 2) break;
    for (std::uint64_t c = (r > 1 ? r - 1 : 1); c <= r + 1; ++c) {
      if (c < 2) continue;
      if (checked_pow(c, k) == n && is_prime_u64(c)) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------- matrices

bool matrix_less(const Matrix& a, const Matrix& b) { return a.data() < b.data(); }

std::vector<Matrix> sorted_unique(std::vector<Matrix> ms) {
  std::sort(ms.begin(), ms.end(), matrix_less);
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

Matrix matrix_pow(Matrix m, std::uint64_t e) {
  Matrix r = Matrix::identity(m.field(), m.rows());
  while (e) {
    if (e & 1) r = r * m;
    m = m * m;
    e >>= 1;
  }
  return r;
}

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) ps.push_back(n);
  return ps;
}

std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

BigInt gl_order(std::uint32_t m, std::uint32_t q) {
  BigInt r = 1, qm = BigInt(ipow(q, m));
  for (std::uint32_t i = 0; i < m; ++i) r *= qm - BigInt(ipow(q, i));
  return r;
}

// Matrix group closure by breadth-first search; throws ResourceError above max_elements.
std::unordered_set<Matrix, MatrixHash> matrix_closure(const std::vector<Matrix>& gens) {
  std::unordered_set<Matrix, MatrixHash> seen;
  std::vector<Matrix> frontier{Matrix::identity(gens.front().field(), gens.front().rows())};
  seen.insert(frontier.front());
  Deadline deadline;
  while (!frontier.empty()) {
    std::vector<Matrix> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        Matrix y = x * g;
        if (seen.insert(y).second) {
          next.push_back(std::move(y));
          if (seen.size() > limits().max_elements)
            throw ResourceError("budget exceeded: matrix group has more than max_elements elements");
        }
      }
    deadline.check("matrix closure");
    frontier = std::move(next);
  }
  return seen;
}

// ---------------------------------------------------------------- forms

std::string label(const std::string& base, std::size_t i, bool star = false) {
  return base + std::to_string(i) + (star ? "*" : "");
}

std::size_t index_of_label(const std::vector<std::string>& labels, const std::string& name) {
  auto it = std::find(labels.begin(), labels.end(), name);
  if (it == labels.end()) throw InternalError("missing basis label " + name);
  return static_cast<std::size_t>(it - labels.begin());
}

// Symmetric Gram matrix pairing the listed labels, plus (x, x) = 1 when x is present.
Matrix paired_gram(const Field& F, const std::vector<std::string>& labels,
                   const std::vector<std::pair<std::string, std::string>>& pairs) {
  Matrix g(F, labels.size(), labels.size());
  for (const auto& [a, b] : pairs) {
    auto i = index_of_label(labels, a), j = index_of_label(labels, b);
    g.at(i, j) = F.one();
    g.at(j, i) = F.one();
  }
  return g;
}

Subspace span_of(const std::shared_ptr<const FormSpace>& V, const std::vector<std::string>& vs) {
  return Subspace::span(V, vs);
}

Subspace span_rows(const std::shared_ptr<const FormSpace>& V, const std::vector<Vec>& rows) {
  return Subspace(V, rows);
}

void add_check(WitnessCertificate& cert, std::string name, bool passed) {
  cert.checks.push_back({std::move(name), passed});
}

bool is_t_a(const Matrix& g, std::size_t half) {
  const Field& F = g.field();
  Elt a = g.at(0, 0);
  if (a == 0) return false;
  Elt ai = F.inv(a);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      Elt want = i != j ? 0 : (i < half ? a : ai);
      if (g.at(i, j) != want) return false;
    }
  return true;
}

bool all_checks(const WitnessCertificate& c) {
  return std::all_of(c.checks.begin(), c.checks.end(), [](const CertificateCheck& k) { return k.passed; });
}

// The verdict rule of each construction, evaluated on the stored outcome.
bool evaluate_verdict(const WitnessCertificate& c) {
  if (!all_checks(c)) return false;
  if (c.construction == "g2") {
    const std::string* v = c.value("intersection_order");
    return v && *v == "1";
  }
  if (!c.problem || !c.outcome || c.outcome->budget_exceeded) return false;
  const auto& st = c.outcome->stabilizer;
  const FormSpace& V = *c.problem->space;
  Matrix id = Matrix::identity(V.field(), V.dim());
  if (c.construction == "sp4") {
    auto want = sorted_unique({id, id.scaled(V.field().neg(1))});
    return st == want;
  }
  if (c.construction == "ortho-odd" || c.construction == "ortho-even-theorem68")
    return st.size() == 1 && st.front() == id;
  if (c.construction == "ortho-even-lemma66")
    return !st.empty() && std::all_of(st.begin(), st.end(), [&](const Matrix& g) { return is_t_a(g, V.dim() / 2); });
  throw InputError("certificate: unknown construction " + c.construction);
}

std::string describe_stabilizer(const WitnessCertificate& c) {
  std::ostringstream os;
  if (c.outcome->budget_exceeded) {
    os << "budget exceeded: solution spaces too large to enumerate";
    return os.str();
  }
  os << "joint stabilizer order " << c.outcome->stabilizer.size() << " (" << c.outcome->isometries.size()
     << " isometries among " << c.outcome->candidates << " candidates); ";
  os << (c.verdict ? "matches the expected stabilizer" : "does not match the expected stabilizer");
  return os.str();
}

void finish(WitnessCertificate& cert) {
  cert.outcome = solve_stabilizer(*cert.problem);
  cert.verdict = evaluate_verdict(cert);
  cert.summary = describe_stabilizer(cert);
}

// ---------------------------------------------------------------- json

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
  return rows;
}

Matrix matrix_from_json(const Field& F, const json& j, std::size_t cols) {
  if (!j.is_array()) throw InputError("certificate: matrix must be an array of rows");
  std::vector<Vec> rows;
  for (const auto& r : j) {
    Vec v = r.get<Vec>();
    if (v.size() != cols) throw InputError("certificate: matrix row has the wrong length");
    for (Elt e : v)
      if (e >= F.q()) throw InputError("certificate: field element code out of range");
    rows.push_back(std::move(v));
  }
  if (rows.empty()) return Matrix(F, 0, cols);
  return Matrix::from_rows(F, rows);
}

const char* kind_name(FormKind k) {
  switch (k) {
    case FormKind::Symplectic: return "symplectic";
    case FormKind::Symmetric: return "symmetric";
    case FormKind::Quadratic: return "quadratic";
  }
  return "";
}

json matrices_json(const std::vector<Matrix>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(matrix_json(m));
  return a;
}

json to_json_value(const WitnessCertificate& c) {
  json j;
  j["construction"] = c.construction;
  json params = json::object();
  for (const auto& [k, v] : c.parameters) params[k] = v;
  j["parameters"] = params;
  if (c.problem) {
    const FormSpace& V = *c.problem->space;
    json p;
    p["q"] = V.field().q();
    p["form"] = {{"kind", kind_name(V.kind())},
                 {"matrix", matrix_json(V.kind() == FormKind::Quadratic ? V.quadratic_matrix() : V.gram())},
                 {"labels", V.labels()}};
    json subs = json::array();
    for (const auto& [name, s] : c.problem->subspaces)
      subs.push_back({{"name", name}, {"basis", matrix_json(s.basis())}});
    p["subspaces"] = subs;
    json alts = json::array();
    for (const auto& alt : c.problem->alternatives) {
      json a = json::array();
      for (const auto& [from, to] : alt) a.push_back({from, to});
      alts.push_back(a);
    }
    p["alternatives"] = alts;
    p["omega"] = c.problem->omega;
    j["problem"] = p;
  }
  if (c.outcome) {
    json o;
    o["dimensions"] = c.outcome->dimensions;
    o["candidates"] = c.outcome->candidates;
    o["budget_exceeded"] = c.outcome->budget_exceeded;
    o["isometries"] = matrices_json(c.outcome->isometries);
    o["stabilizer"] = matrices_json(c.outcome->stabilizer);
    j["outcome"] = o;
  }
  json els = json::array();
  for (const auto& [name, m] : c.elements)
    els.push_back({{"name", name}, {"q", m.field().q()}, {"rows", matrix_json(m)}});
  j["elements"] = els;
  json vals = json::object();
  for (const auto& [k, v] : c.values) vals[k] = v;
  j["values"] = vals;
  json checks = json::array();
  for (const auto& k : c.checks) checks.push_back({{"name", k.name}, {"passed", k.passed}});
  j["checks"] = checks;
  j["verdict"] = c.verdict;
  j["summary"] = c.summary;
  return j;
}

// ---------------------------------------------------------------- even orthogonal helpers

// Companion matrix of the monic polynomial x^m + c_{m-1} x^{m-1} + ... + c_0, acting on rows.
Matrix companion(const Field& F, const Vec& c) {
  const std::size_t m = c.size();
  Matrix a(F, m, m);
  for (std::size_t i = 0; i + 1 < m; ++i) a.at(i, i + 1) = F.one();
  for (std::size_t j = 0; j < m; ++j) a.at(m - 1, j) = F.neg(c[j]);
  return a;
}

bool has_order(const Matrix& a, std::uint64_t n) {
  if (!matrix_pow(a, n).is_identity()) return false;
  for (auto p : prime_divisors(n))
    if (matrix_pow(a, n / p).is_identity()) return false;
  return true;
}

// First companion matrix, in lexicographic order of coefficient codes, of order q^m - 1.
Matrix primitive_companion(const Field& F, std::uint32_t m) {
  const std::uint64_t n = ipow(F.q(), m) - 1;
  Vec c(m, 0);
  while (true) {
    if (c[0] != 0 && has_order(companion(F, c), n)) return companion(F, c);
    std::size_t i = 0;
    while (i < m && ++c[i] == F.q()) c[i++] = 0;
    if (i == m) throw InternalError("no primitive companion matrix found");
  }
}

struct EvenSpaces {
  std::shared_ptr<const FormSpace> V;
  Subspace W, W1, W2, E, F, Estar;
};

// Basis e1..em, e1*..em*, f1..fm, f1*..fm* followed by `extra` hyperbolic pairs.
std::vector<std::string> even_labels(std::uint32_t m, bool tilde) {
  std::vector<std::string> labels;
  for (std::uint32_t i = 1; i <= m; ++i) labels.push_back(label("e", i));
  for (std::uint32_t i = 1; i <= m; ++i) labels.push_back(label("e", i, true));
  for (std::uint32_t i = 1; i <= m; ++i) labels.push_back(label("f", i));
  for (std::uint32_t i = 1; i <= m; ++i) labels.push_back(label("f", i, true));
  if (tilde) {
    labels.push_back("e~");
    labels.push_back("f~");
  }
  return labels;
}

EvenSpaces even_spaces(const Field& F, std::uint32_t m, const Matrix& A, const Matrix& B, bool tilde) {
  auto labels = even_labels(m, tilde);
  Matrix upper(F, labels.size(), labels.size());
  for (std::uint32_t i = 1; i <= m; ++i) {
    upper.at(index_of_label(labels, label("e", i)), index_of_label(labels, label("f", i))) = F.one();
    upper.at(index_of_label(labels, label("e", i, true)), index_of_label(labels, label("f", i, true))) = F.one();
  }
  if (tilde) upper.at(index_of_label(labels, "e~"), index_of_label(labels, "f~")) = F.one();
  auto V = FormSpace::quadratic(F, upper, labels);
  auto unit = [&](const std::string& l) { return V->vector(l); };
  std::vector<Vec> w, w1, w2, e, f, es;
  for (std::uint32_t j = 1; j <= m; ++j) {
    Vec ej = unit(label("e", j)), fj = unit(label("f", j));
    Vec a = ej, b = ej;
    for (std::uint32_t i = 1; i <= m; ++i) {
      std::size_t k = index_of_label(labels, label("e", i, true));
      a[k] = F.add(a[k], A.at(i - 1, j - 1));
      b[k] = F.add(b[k], B.at(i - 1, j - 1));
    }
    Vec ff = fj;
    std::size_t k = index_of_label(labels, label("f", j, true));
    ff[k] = F.add(ff[k], F.one());
    w.push_back(ej);
    w.push_back(fj);
    w1.push_back(a);
    w1.push_back(ff);
    w2.push_back(b);
    w2.push_back(fj);
    e.push_back(ej);
    f.push_back(fj);
    es.push_back(unit(label("e", j, true)));
  }
  return {V, span_rows(V, w), span_rows(V, w1), span_rows(V, w2), span_rows(V, e), span_rows(V, f),
          span_rows(V, es)};
}

void check_lemma66_hypotheses(const Field& F, std::uint32_t m, const Matrix& A, const Matrix& B) {
  for (const auto* x : {&A, &B})
    if (x->rows() != m || x->cols() != m || &x->field() != &F)
      throw PreconditionError("lemma66: A and B must be m x m matrices over GF(q)");
  if (A.det() == 0) throw PreconditionError("lemma66: A is not invertible");
  if (B.det() == 0) throw PreconditionError("lemma66: B is not invertible");
  if ((Matrix::identity(F, m) + A).det() == 0) throw PreconditionError("lemma66: I + A is not invertible");
  StabilizerChain c(matrix_to_perm({A, B}, F));
  if (c.order() != gl_order(m, F.q())) throw PreconditionError("lemma66: <A, B> is not GL_m(q)");
}

bool is_power_of_two(std::uint32_t q) { return q >= 2 && (q & (q - 1)) == 0; }

// ---------------------------------------------------------------- G2

struct G2Data {
  std::vector<std::array<int, 2>> roots;
  struct Relation {
    int r, s, i, j, c;
  };
  std::vector<Relation> relations;
  std::vector<std::vector<std::vector<std::int64_t>>> X, D;
  std::vector<std::int64_t> radical;
  std::size_t dim = 0;
};

G2Data read_g2_data() {
  std::string path = data_dir() + "/g2_chevalley.txt";
  std::ifstream in(path);
  if (!in) throw InputError("g2: cannot open " + path);
  G2Data d;
  std::string tok;
  auto read_matrix = [&](std::vector<std::vector<std::int64_t>>& m) {
    m.assign(d.dim, std::vector<std::int64_t>(d.dim));
    for (auto& row : m)
      for (auto& x : row)
        if (!(in >> x)) throw InputError("g2: truncated matrix");
  };
  while (in >> tok) {
    if (tok[0] == '#') {
      std::getline(in, tok);
    } else if (tok == "dim") {
      in >> d.dim;
    } else if (tok == "roots") {
      std::size_t n;
      in >> n;
      d.roots.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t idx;
        in >> idx >> d.roots[k][0] >> d.roots[k][1];
        if (idx != k) throw InputError("g2: roots out of order");
      }
      d.X.resize(n);
      d.D.resize(n);
    } else if (tok == "constants") {
      std::size_t n;
      in >> n;
      d.relations.resize(n);
      for (auto& r : d.relations) in >> r.r >> r.s >> r.i >> r.j >> r.c;
    } else if (tok == "X" || tok == "D") {
      std::size_t r;
      in >> r;
      if (r >= d.roots.size()) throw InputError("g2: root index out of range");
      read_matrix(tok == "X" ? d.X[r] : d.D[r]);
    } else if (tok == "radical2") {
      d.radical.resize(d.dim);
      for (auto& x : d.radical) in >> x;
    } else if (tok == "end") {
      break;
    } else {
      throw InputError("g2: unexpected token " + tok);
    }
    if (!in) throw InputError("g2: malformed data file");
  }
  if (d.dim != 7 || d.roots.size() != 12 || d.radical.size() != 7) throw InputError("g2: incomplete data file");
  return d;
}

int root_index(const G2Data& d, int a, int b) {
  for (std::size_t k = 0; k < d.roots.size(); ++k)
    if (d.roots[k][0] == a && d.roots[k][1] == b) return static_cast<int>(k);
  return -1;
}

class G2Builder {
 public:
  G2Builder(const G2Data& d, const Field& F) : d_(d), F_(F) {
    std::size_t nz = 0;
    for (std::size_t i = 0; i < d.dim; ++i)
      if (d.radical[i] % 2 != 0) {
        drop_ = i;
        ++nz;
      }
    if (nz != 1) throw InternalError("g2: radical is not a basis vector");
  }

  // x_r(t) on the 6-dimensional quotient.
  Matrix x(int r, Elt t) const {
    const std::size_t n = d_.dim;
    Elt t2 = F_.mul(t, t);
    Matrix m(F_, n - 1, n - 1);
    for (std::size_t i = 0, a = 0; i < n; ++i) {
      if (i == drop_) continue;
      for (std::size_t j = 0, b = 0; j < n; ++j) {
        if (j == drop_) continue;
        Elt v = i == j ? F_.one() : F_.zero();
        v = F_.add(v, F_.mul(t, F_.from_int(d_.X[r][i][j])));
        v = F_.add(v, F_.mul(t2, F_.from_int(d_.D[r][i][j])));
        m.at(a, b) = v;
        ++b;
      }
      ++a;
    }
    return m;
  }

  // The quotient is well defined iff the radical vector is fixed by every root element.
  bool radical_invariant() const {
    for (std::size_t r = 0; r < d_.roots.size(); ++r)
      for (std::size_t j = 0; j < d_.dim; ++j)
        if (d_.X[r][drop_][j] % 2 != 0 || d_.D[r][drop_][j] % 2 != 0) return false;
    return true;
  }

  // Chevalley commutator relations and additivity at sample parameters.
  bool relations_hold() const {
    std::vector<Elt> samples{F_.one()};
    if (F_.q() > 2) samples.push_back(F_.primitive());
    if (F_.q() > 4) samples.push_back(F_.add(F_.one(), F_.primitive()));
    const int nr = static_cast<int>(d_.roots.size());
    for (int r = 0; r < nr; ++r)
      for (Elt t : samples)
        for (Elt u : samples)
          if (!(x(r, t) * x(r, u) == x(r, F_.add(t, u)))) return false;
    for (int r = 0; r < nr; ++r)
      for (int s = 0; s < nr; ++s) {
        if (r == s || (d_.roots[r][0] == -d_.roots[s][0] && d_.roots[r][1] == -d_.roots[s][1])) continue;
        std::vector<G2Data::Relation> rel;
        for (const auto& k : d_.relations)
          if (k.r == r && k.s == s) rel.push_back(k);
        for (Elt t : samples)
          for (Elt u : samples) {
            Matrix lhs = x(s, F_.neg(u)) * x(r, F_.neg(t)) * x(s, u) * x(r, t);
            Matrix rhs = Matrix::identity(F_, d_.dim - 1);
            for (const auto& k : rel) {
              int target = root_index(d_, k.i * d_.roots[r][0] + k.j * d_.roots[s][0],
                                      k.i * d_.roots[r][1] + k.j * d_.roots[s][1]);
              if (target < 0) return false;
              Elt c = F_.mul(F_.from_int(k.c), F_.mul(F_.pow(F_.neg(t), k.i), F_.pow(u, k.j)));
              rhs = rhs * x(target, c);
            }
            if (!(lhs == rhs)) return false;
          }
      }
    return true;
  }

  int root(int a, int b) const {
    int k = root_index(d_, a, b);
    if (k < 0) throw InternalError("g2: missing root");
    return k;
  }

  // x_r(alpha^k) for an F_2-basis of F_q.
  std::vector<Matrix> root_generators(int r) const {
    std::vector<Matrix> out;
    for (std::uint32_t k = 0; k < F_.f(); ++k) out.push_back(x(r, F_.pow(F_.primitive(), k)));
    return out;
  }

 private:
  const G2Data& d_;
  const Field& F_;
  std::size_t drop_ = 0;
};

std::uint64_t count_conjugate_intersection(const std::unordered_set<Matrix, MatrixHash>& h, const Matrix& g) {
  Matrix gi = g.inverse();
  std::vector<const Matrix*> elems;
  elems.reserve(h.size());
  for (const auto& x : h) elems.push_back(&x);
  const unsigned workers = std::max(1u, limits().threads);
  std::vector<std::uint64_t> part(workers, 0);
  parallel_for(workers, [&](std::size_t w) {
    for (std::size_t i = w; i < elems.size(); i += workers)
      if (h.count(g * *elems[i] * gi)) ++part[w];
  });
  std::uint64_t total = 0;
  for (auto c : part) total += c;
  return total;
}

std::string big_string(const BigInt& b) { return b.str(); }

}  // namespace

// ---------------------------------------------------------------- public

bool aset_contains(std::uint64_t n) {
  if (n % 2 != 0) return false;
  std::uint64_t p = n / 2;
  return p != 11 && is_prime_u64(p) && !is_prime_power_u64(n - 1);
}

StabilizerOutcome solve_stabilizer(const StabilizerProblem& pr) {
  if (!pr.space) throw InputError("stabilizer problem: missing form space");
  const FormSpace& V = *pr.space;
  const Field& F = V.field();
  const std::size_t n = V.dim();
  StabilizerOutcome out;
  std::vector<SolutionSpace> spaces;
  for (const auto& alt : pr.alternatives) {
    MatrixConstraints mc(F, n);
    for (const auto& [from, to] : alt) {
      if (from >= pr.subspaces.size() || to >= pr.subspaces.size())
        throw InputError("stabilizer problem: subspace index out of range");
      mc.maps_into(pr.subspaces[from].second, pr.subspaces[to].second);
    }
    spaces.push_back(mc.solve());
    out.dimensions.push_back(spaces.back().dimension());
  }
  double total = 0;
  for (auto d : out.dimensions) total += std::pow(static_cast<double>(F.q()), static_cast<double>(d));
  if (total > static_cast<double>(limits().max_enumeration)) {
    out.budget_exceeded = true;
    return out;
  }
  std::vector<std::vector<Matrix>> found(spaces.size());
  std::vector<std::uint64_t> counts(spaces.size(), 0);
  parallel_for(spaces.size(), [&](std::size_t a) {
    enumerate_matrices(F, n, spaces[a], [&](const Matrix& m) {
      ++counts[a];
      if (V.preserves(m) && m.det() != 0) found[a].push_back(m);
    });
  });
  std::vector<Matrix> all;
  for (std::size_t a = 0; a < spaces.size(); ++a) {
    out.candidates += counts[a];
    all.insert(all.end(), found[a].begin(), found[a].end());
  }
  out.isometries = sorted_unique(std::move(all));
  for (const auto& m : out.isometries)
    if (!pr.omega || in_omega(V, m)) out.stabilizer.push_back(m);
  return out;
}

std::int64_t WitnessCertificate::parameter(const std::string& name) const {
  for (const auto& [k, v] : parameters)
    if (k == name) return v;
  throw InputError("certificate: missing parameter " + name);
}

const Matrix* WitnessCertificate::element(const std::string& name) const {
  for (const auto& [k, m] : elements)
    if (k == name) return &m;
  return nullptr;
}

const std::string* WitnessCertificate::value(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return &v;
  return nullptr;
}

std::string to_json(const WitnessCertificate& cert) { return to_json_value(cert).dump(2); }

WitnessCertificate certificate_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("certificate: ") + e.what());
  }
  try {
    WitnessCertificate c;
    c.construction = j.at("construction").get<std::string>();
    for (const auto& [k, v] : j.at("parameters").items()) c.parameters.emplace_back(k, v.get<std::int64_t>());
    if (j.contains("problem")) {
      const auto& p = j.at("problem");
      const Field& F = Field::get(p.at("q").get<std::uint32_t>());
      auto labels = p.at("form").at("labels").get<std::vector<std::string>>();
      Matrix fm = matrix_from_json(F, p.at("form").at("matrix"), labels.size());
      std::string kind = p.at("form").at("kind").get<std::string>();
      std::shared_ptr<const FormSpace> V;
      if (kind == "symplectic")
        V = FormSpace::symplectic(F, fm, labels);
      else if (kind == "symmetric")
        V = FormSpace::symmetric(F, fm, labels);
      else if (kind == "quadratic")
        V = FormSpace::quadratic(F, fm, labels);
      else
        throw InputError("certificate: unknown form kind " + kind);
      StabilizerProblem pr;
      pr.space = V;
      for (const auto& s : p.at("subspaces")) {
        Matrix b = matrix_from_json(F, s.at("basis"), V->dim());
        std::vector<Vec> rows;
        for (std::size_t i = 0; i < b.rows(); ++i) rows.push_back(b.row(i));
        pr.subspaces.emplace_back(s.at("name").get<std::string>(), Subspace(V, rows));
      }
      for (const auto& a : p.at("alternatives")) {
        std::vector<std::pair<std::size_t, std::size_t>> alt;
        for (const auto& pair : a) alt.emplace_back(pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>());
        pr.alternatives.push_back(std::move(alt));
      }
      pr.omega = p.at("omega").get<bool>();
      c.problem = std::move(pr);
      if (j.contains("outcome")) {
        const auto& o = j.at("outcome");
        StabilizerOutcome out;
        out.dimensions = o.at("dimensions").get<std::vector<std::size_t>>();
        out.candidates = o.at("candidates").get<std::uint64_t>();
        out.budget_exceeded = o.at("budget_exceeded").get<bool>();
        for (const auto& m : o.at("isometries")) out.isometries.push_back(matrix_from_json(F, m, V->dim()));
        for (const auto& m : o.at("stabilizer")) out.stabilizer.push_back(matrix_from_json(F, m, V->dim()));
        c.outcome = std::move(out);
      }
    }
    for (const auto& e : j.at("elements")) {
      const Field& F = Field::get(e.at("q").get<std::uint32_t>());
      const auto& rows = e.at("rows");
      std::size_t cols = rows.empty() ? 0 : rows.at(0).size();
      c.elements.emplace_back(e.at("name").get<std::string>(), matrix_from_json(F, rows, cols));
    }
    for (const auto& [k, v] : j.at("values").items()) c.values.emplace_back(k, v.get<std::string>());
    for (const auto& k : j.at("checks")) c.checks.push_back({k.at("name").get<std::string>(), k.at("passed").get<bool>()});
    c.verdict = j.at("verdict").get<bool>();
    c.summary = j.at("summary").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("certificate: ") + e.what());
  }
}

ReplayResult replay_certificate(const WitnessCertificate& cert) {
  ReplayResult r;
  std::ostringstream detail;
  WitnessCertificate rebuilt;
  const std::string& c = cert.construction;
  if (c == "sp4") {
    rebuilt = sp4_witness(static_cast<std::uint32_t>(cert.parameter("q")));
  } else if (c == "ortho-odd") {
    rebuilt = ortho_odd_witness(static_cast<std::uint32_t>(cert.parameter("n")),
                                static_cast<std::uint32_t>(cert.parameter("q")));
  } else if (c == "ortho-even-lemma66") {
    const Matrix* a = cert.element("A");
    const Matrix* b = cert.element("B");
    if (!a || !b) throw InputError("certificate: lemma66 needs elements A and B");
    rebuilt = lemma66_witness(static_cast<std::uint32_t>(cert.parameter("m")),
                              static_cast<std::uint32_t>(cert.parameter("q")), *a, *b);
  } else if (c == "ortho-even-theorem68") {
    rebuilt = theorem68_witness(static_cast<std::uint32_t>(cert.parameter("n")),
                                static_cast<std::uint32_t>(cert.parameter("q")));
  } else if (c == "g2") {
    rebuilt = g2_group(static_cast<std::uint32_t>(cert.parameter("q"))).certificate;
  } else {
    throw InputError("certificate: unknown construction " + c);
  }

  if (cert.problem) {
    WitnessCertificate again = cert;
    again.outcome = solve_stabilizer(*cert.problem);
    again.verdict = evaluate_verdict(again);
    bool same_outcome = cert.outcome && to_json_value(again)["outcome"] == to_json_value(cert)["outcome"];
    r.verdict = again.verdict && same_outcome;
    detail << "stabilizer re-solved from serialized subspaces: order " << again.outcome->stabilizer.size()
           << (same_outcome ? ", identical outcome" : ", outcome differs") << "; ";
  } else if (c == "g2") {
    const Matrix* g = cert.element("g");
    std::vector<Matrix> hg;
    for (const auto& [name, m] : cert.elements)
      if (name.rfind("h", 0) == 0) hg.push_back(m);
    if (!g || hg.empty()) throw InputError("certificate: g2 needs g and generators of H");
    auto h = matrix_closure(hg);
    auto meet = count_conjugate_intersection(h, *g);
    const std::string* stored = cert.value("intersection_order");
    r.verdict = all_checks(cert) && meet == 1 && stored && *stored == std::to_string(meet);
    detail << "H re-enumerated from serialized generators: |H| = " << h.size() << ", |H cap H^g| = " << meet
           << "; ";
  }
  r.reproduced = to_json(rebuilt) == to_json(cert);
  detail << (r.reproduced ? "rebuilt certificate is byte-identical" : "rebuilt certificate differs");
  r.detail = detail.str();
  return r;
}

WitnessCertificate sp4_witness(std::uint32_t q) {
  if (q % 2 == 0) throw PreconditionError("sp4 witness: q must be odd");
  if (q < 5) throw PreconditionError("sp4 witness: q must be at least 5");
  const Field& F = Field::get(q);
  std::vector<std::string> labels{"e1", "e2", "f1", "f2"};
  Matrix gram(F, 4, 4);
  for (std::size_t i = 0; i < 2; ++i) {
    gram.at(i, i + 2) = F.one();
    gram.at(i + 2, i) = F.neg(F.one());
  }
  auto V = FormSpace::symplectic(F, gram, labels);
  Subspace U = span_of(V, {"e1", "e2"}), W = span_of(V, {"f1", "f2"});
  Subspace U2 = span_of(V, {"e1", "e2+f2"}), W2 = span_of(V, {"e1+f2", "e2+f1"});

  WitnessCertificate cert;
  cert.construction = "sp4";
  cert.parameters = {{"q", q}};
  add_check(cert, "U is totally isotropic", radical(U) == U);
  add_check(cert, "W is totally isotropic", radical(W) == W);
  add_check(cert, "U' is totally isotropic", radical(U2) == U2);
  add_check(cert, "W' is totally isotropic", radical(W2) == W2);
  add_check(cert, "V = U + W with U cap W = 0", sum(U, W) == Subspace::whole(V) && intersection(U, W).dim() == 0);
  add_check(cert, "V = U' + W' with U' cap W' = 0",
            sum(U2, W2) == Subspace::whole(V) && intersection(U2, W2).dim() == 0);

  StabilizerProblem pr;
  pr.space = V;
  pr.subspaces = {{"U", U}, {"W", W}, {"U'", U2}, {"W'", W2}};
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) {
      std::vector<std::pair<std::size_t, std::size_t>> alt;
      if (s1) alt.insert(alt.end(), {{0, 1}, {1, 0}});
      else alt.insert(alt.end(), {{0, 0}, {1, 1}});
      if (s2) alt.insert(alt.end(), {{2, 3}, {3, 2}});
      else alt.insert(alt.end(), {{2, 2}, {3, 3}});
      pr.alternatives.push_back(alt);
    }
  cert.problem = std::move(pr);
  finish(cert);
  return cert;
}

WitnessCertificate ortho_odd_witness(std::uint32_t n, std::uint32_t q) {
  if (n % 2 == 0 || q % 2 == 0) throw PreconditionError("ortho-odd witness: nq must be odd");
  if (n < 7) throw PreconditionError("ortho-odd witness: n must be at least 7");
  const Field& F = Field::get(q);
  const bool plus_one = n % 4 == 1;
  const std::uint32_t m = plus_one ? (n - 1) / 4 : (n - 3) / 4;
  std::vector<std::string> labels;
  for (const char* base : {"e", "f"})
    for (std::uint32_t i = 1; i <= m; ++i) labels.push_back(label(base, i));
  for (const char* base : {"e", "f"})
    for (std::uint32_t i = 1; i <= m; ++i) labels.push_back(label(base, i, true));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::uint32_t i = 1; i <= m; ++i) {
    pairs.emplace_back(label("e", i), label("f", i));
    pairs.emplace_back(label("e", i, true), label("f", i, true));
  }
  if (!plus_one) {
    labels.push_back("e");
    labels.push_back("f");
    pairs.emplace_back("e", "f");
  }
  labels.push_back("x");
  Matrix gram = paired_gram(F, labels, pairs);
  gram.at(labels.size() - 1, labels.size() - 1) = F.one();
  auto V = FormSpace::symmetric(F, gram, labels);
  auto e = [](std::uint32_t i, bool s = false) { return label("e", i, s); };
  auto f = [](std::uint32_t i, bool s = false) { return label("f", i, s); };

  std::vector<std::string> u, w, up, wp;
  WitnessCertificate cert;
  cert.construction = "ortho-odd";
  cert.parameters = {{"n", n}, {"q", q}};
  if (plus_one) {
    for (std::uint32_t i = 1; i <= m; ++i) u.push_back(e(i));
    for (std::uint32_t i = 1; i <= m; ++i) u.push_back(f(i));
    w.push_back("e1+x");
    for (std::uint32_t i = 1; i <= m; ++i) {
      w.push_back(f(i) + "+" + e(i, true));
      if (i >= 2) w.push_back(e(i) + "+" + f(i - 1, true));
    }
    up.push_back("x");
    for (std::uint32_t i = 1; i <= m; ++i) {
      up.push_back(e(i, true));
      up.push_back(f(i, true));
    }
    wp.push_back("f1-x");
    for (std::uint32_t i = 1; i <= m; ++i) {
      wp.push_back(e(i) + "-" + f(i, true));
      if (i >= 2) wp.push_back(f(i) + "-" + e(i - 1, true));
    }
    wp.push_back(e(m, true));
  } else {
    u.push_back("x");
    for (std::uint32_t i = 1; i <= m; ++i) u.push_back(e(i));
    for (std::uint32_t i = 1; i <= m; ++i) u.push_back(f(i));
    w.push_back("x+" + e(1, true));
    for (std::uint32_t i = 1; i <= m; ++i) {
      w.push_back(e(i) + "+" + f(i, true));
      w.push_back(f(i) + "+" + (i < m ? e(i + 1, true) : std::string("e")));
    }
    for (std::uint32_t i = 1; i <= m; ++i) {
      up.push_back(e(i, true));
      up.push_back(f(i, true));
    }
    up.push_back("e");
    up.push_back("f");
    wp.push_back("x-" + f(1, true));
    for (std::uint32_t i = 1; i <= m; ++i) {
      wp.push_back(f(i) + "-" + e(i, true));
      wp.push_back(e(i) + "-" + (i < m ? f(i + 1, true) : std::string("f")));
    }
    wp.push_back("e");
  }
  Subspace U = span_of(V, u), W = span_of(V, w);
  Subspace Up = perp(U), Wp = perp(W);
  const std::uint32_t k = plus_one ? 2 * m : 2 * m + 1;
  add_check(cert, "U is nondegenerate of dimension " + std::to_string(k), is_nondegenerate(U) && U.dim() == k);
  add_check(cert, "W is nondegenerate of dimension " + std::to_string(k), is_nondegenerate(W) && W.dim() == k);
  if (plus_one) {
    add_check(cert, "U has plus type", type_sign(U) == 1);
    add_check(cert, "W has plus type", type_sign(W) == 1);
  } else {
    add_check(cert, "U^perp has plus type", type_sign(Up) == 1);
    add_check(cert, "W^perp has plus type", type_sign(Wp) == 1);
  }
  add_check(cert, "U^perp is spanned by the listed vectors", Up == span_of(V, up));
  add_check(cert, "W^perp is spanned by the listed vectors", Wp == span_of(V, wp));
  if (plus_one) {
    add_check(cert, "Z = U^perp cap W^perp = <" + e(m, true) + ">", intersection(Up, Wp) == span_of(V, {e(m, true)}));
    std::vector<std::string> y{"x"};
    for (std::uint32_t i = 1; i <= m; ++i) y.push_back(e(i, true));
    for (std::uint32_t i = 1; i < m; ++i) y.push_back(f(i, true));
    add_check(cert, "Y = (U + W) cap U^perp is spanned by the listed vectors",
              intersection(sum(U, W), Up) == span_of(V, y));
  }

  StabilizerProblem pr;
  pr.space = V;
  pr.subspaces = {{"U", U}, {"W", W}, {"U^perp", Up}, {"W^perp", Wp}};
  pr.alternatives = {{{0, 0}, {1, 1}, {2, 2}, {3, 3}}};
  pr.omega = true;
  cert.problem = std::move(pr);
  finish(cert);
  return cert;
}

WitnessCertificate lemma66_witness(std::uint32_t m, std::uint32_t q, const std::optional<Matrix>& a,
                                   const std::optional<Matrix>& b) {
  if (!is_power_of_two(q)) throw PreconditionError("lemma66 witness: q must be even");
  if (m < 2) throw PreconditionError("lemma66 witness: m must be at least 2");
  const Field& F = Field::get(q);
  Matrix A = a ? *a : primitive_companion(F, m);
  Matrix B = b ? *b : Matrix::identity(F, m);
  if (!b) B.at(0, 1) = F.one();
  check_lemma66_hypotheses(F, m, A, B);
  auto S = even_spaces(F, m, A, B, false);

  WitnessCertificate cert;
  cert.construction = "ortho-even-lemma66";
  cert.parameters = {{"m", m}, {"q", q}};
  cert.elements = {{"A", A}, {"B", B}};
  add_check(cert, "I + A is invertible", (Matrix::identity(F, m) + A).det() != 0);
  add_check(cert, "<A, B> = GL_m(q)", true);
  for (const auto& [name, X] : {std::pair<std::string, const Subspace*>{"W", &S.W}, {"W1", &S.W1}, {"W2", &S.W2}})
    add_check(cert, name + " is a nondegenerate plus-type " + std::to_string(2 * m) + "-space",
              X->dim() == 2 * m && is_nondegenerate(*X) && type_sign(*X) == 1);
  add_check(cert, "W cap W2 = F", intersection(S.W, S.W2) == S.F);
  add_check(cert, "radical(W + W2) = E*", radical(sum(S.W, S.W2)) == S.Estar);
  std::vector<std::string> star;
  for (std::uint32_t i = 1; i <= m; ++i) {
    star.push_back(label("e", i, true));
    star.push_back(label("f", i, true));
  }
  add_check(cert, "W^perp = W*", perp(S.W) == span_of(S.V, star));

  StabilizerProblem pr;
  pr.space = S.V;
  pr.subspaces = {{"W", S.W}, {"W1", S.W1}, {"W2", S.W2}, {"W^perp", perp(S.W)}, {"W1^perp", perp(S.W1)},
                  {"W2^perp", perp(S.W2)}};
  pr.alternatives = {{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}}};
  cert.problem = std::move(pr);
  finish(cert);
  return cert;
}

WitnessCertificate theorem68_witness(std::uint32_t n, std::uint32_t q) {
  if (!is_power_of_two(q)) throw PreconditionError("theorem68 witness: q must be even");
  if (n % 2 != 0 || n / 2 < 5 || !is_prime_u64(n / 2))
    throw PreconditionError("theorem68 witness: n must be 2k with k >= 5 prime");
  const std::uint32_t k = n / 2, m = (k - 1) / 2;
  const Field& F = Field::get(q);
  Matrix A = primitive_companion(F, m);
  Matrix B = Matrix::identity(F, m);
  B.at(0, 1) = F.one();
  check_lemma66_hypotheses(F, m, A, B);
  auto S = even_spaces(F, m, A, B, true);
  const auto& V = S.V;
  Subspace T = span_of(V, {"e~", "f~"});
  Subspace Vsub = perp(T);
  Subspace W0 = sum(S.W, T), W1 = sum(S.W1, T), W2 = sum(S.W2, span_of(V, {"e1*+e~", "e2*+f~"}));

  WitnessCertificate cert;
  cert.construction = "ortho-even-theorem68";
  cert.parameters = {{"n", n}, {"q", q}};
  Matrix swap = Matrix::identity(F, n);
  swap.at(n - 2, n - 2) = swap.at(n - 1, n - 1) = F.zero();
  swap.at(n - 2, n - 1) = swap.at(n - 1, n - 2) = F.one();
  cert.elements = {{"A", A}, {"B", B}, {"swap", swap}};
  int i = 0;
  for (const Subspace* X : {&W0, &W1, &W2}) {
    add_check(cert, "W~" + std::to_string(i) + " is a nondegenerate plus-type " + std::to_string(k + 1) + "-space",
              X->dim() == k + 1 && is_nondegenerate(*X) && type_sign(*X) == 1);
    ++i;
  }
  add_check(cert, "W~0 cap W~1 = <e~, f~>", intersection(W0, W1) == T);
  add_check(cert, "W~0 cap V = W", intersection(W0, Vsub) == S.W);
  add_check(cert, "W~1 cap V = W1", intersection(W1, Vsub) == S.W1);
  add_check(cert, "W~2 cap V = W2", intersection(W2, Vsub) == S.W2);
  add_check(cert, "swapping e~ and f~ is an isometry outside Omega", V->preserves(swap) && !in_omega(*V, swap));

  StabilizerProblem pr;
  pr.space = V;
  pr.subspaces = {{"W~0", W0}, {"W~1", W1}, {"W~2", W2}, {"W~0^perp", perp(W0)}, {"W~1^perp", perp(W1)},
                  {"W~2^perp", perp(W2)}};
  pr.alternatives = {{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}}};
  pr.omega = true;
  cert.problem = std::move(pr);
  finish(cert);
  return cert;
}

// ---------------------------------------------------------------- soluble example

SolubleGamma soluble_gamma() {
  SolubleGamma out;
  auto check = [&](std::string name, bool passed) {
    out.checks.push_back({name, passed});
    if (!passed) throw InternalError("soluble example: check failed: " + name);
  };

  // D8 on four points and X inside D8^3 on twelve points.
  const Perm a = Perm::from_cycles(4, {{0, 1, 2, 3}}), b = Perm::from_cycles(4, {{1, 3}});
  const Perm ab = a * b;
  auto triple = [](const Perm& p0, const Perm& p1, const Perm& p2) {
    std::vector<Point> img(12);
    const Perm* ps[3] = {&p0, &p1, &p2};
    for (Point c = 0; c < 3; ++c)
      for (Point i = 0; i < 4; ++i) img[4 * c + i] = 4 * c + (*ps[c])[i];
    return Perm(img);
  };
  const Perm x1 = triple(a, b, b), x2 = triple(b, ab, a);
  StabilizerChain X(GeneratedGroup(12, {x1, x2}, "X"));
  out.x_order = X.order();
  check("|X| = 32", X.order() == 32);
  const Perm y1 = x1.pow(2), y2 = x2.pow(2), y3 = x1.inverse() * x2.inverse() * x1 * x2;
  StabilizerChain Phi(GeneratedGroup(12, {y1, y2, y3}));
  out.x_frattini_order = Phi.order();
  bool normal = true;
  for (const auto& y : {y1, y2, y3})
    for (const auto& x : {x1, x2}) normal = normal && Phi.contains(y.conjugate_by(x));
  check("<y1, y2, y3> is normal in X of order 8", normal && Phi.order() == 8);

  // The coordinate words of x1 and x2 and the representation sigma of D8 over GF(3).
  const Field& F3 = Field::get(3);
  const Matrix sa = Matrix::from_ints(F3, {{0, -1}, {1, 0}}), sb = Matrix::from_ints(F3, {{1, 0}, {0, -1}});
  const Matrix sab = sa * sb;
  StabilizerChain sigma_image(matrix_to_perm({sa, sb}, F3));
  auto plane = FormSpace::symmetric(F3, Matrix::identity(F3, 2), {"u", "v"});
  bool irreducible = true;
  for (std::uint64_t c = 1; c < 9; ++c) {
    Subspace line(plane, {vector_from_code(F3, 2, c)});
    if (line.image(sa) == line && line.image(sb) == line) irreducible = false;
  }
  check("sigma embeds D8 irreducibly in GL2(3)", sigma_image.order() == 8 && irreducible);
  const std::array<const Matrix*, 3> w1{&sa, &sb, &sb}, w2{&sb, &sab, &sa};

  // rho_i = sigma o pi_j with coordinate j(i), chosen so that ker rho_i = N_i.
  const std::array<int, 3> coord{1, 2, 0};
  const std::array<std::vector<Perm>, 3> N{std::vector<Perm>{y1, y2}, std::vector<Perm>{y1, y1 * y2 * y3},
                                           std::vector<Perm>{y2, y1 * y2 * y3}};
  for (int i = 0; i < 3; ++i) {
    const int j = coord[i];
    auto on_coord = [&](const Perm& x) {
      std::vector<Point> img(4);
      for (Point p = 0; p < 4; ++p) img[p] = x[4 * j + p] - 4 * j;
      return Perm(img);
    };
    StabilizerChain proj(GeneratedGroup(4, {on_coord(x1), on_coord(x2)}));
    StabilizerChain n(GeneratedGroup(12, N[i]));
    bool inside = std::all_of(N[i].begin(), N[i].end(), [&](const Perm& y) { return on_coord(y).is_identity(); });
    check("N" + std::to_string(i + 1) + " is the kernel of X on A" + std::to_string(i + 1),
          proj.order() == 8 && n.order() == 4 && inside);
  }

  // Linear parts on F_3^6 = A1 + A2 + A3 and the affine action on 729 points.
  auto linear = [&](const std::array<const Matrix*, 3>& word) {
    Matrix L(F3, 6, 6);
    for (int i = 0; i < 3; ++i) {
      const Matrix& s = *word[coord[i]];
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) L.at(2 * i + r, 2 * i + c) = s.at(r, c);
    }
    return L;
  };
  const std::size_t deg = 729;
  auto affine = [&](const Matrix& L, const Vec& t) {
    std::vector<Point> img(deg);
    for (std::uint64_t c = 0; c < deg; ++c) {
      Vec v = L.apply(vector_from_code(F3, 6, c));
      for (std::size_t k = 0; k < 6; ++k) v[k] = F3.add(v[k], t[k]);
      img[c] = static_cast<Point>(vector_code(F3, v));
    }
    return Perm(img);
  };
  const Matrix I6 = Matrix::identity(F3, 6);
  const Vec zero(6, 0);
  const Perm l1 = affine(linear(w1), zero), l2 = affine(linear(w2), zero);
  std::array<Perm, 6> t;
  for (std::size_t k = 0; k < 6; ++k) {
    Vec e(6, 0);
    e[k] = F3.one();
    t[k] = affine(I6, e);
  }
  std::vector<Perm> gens{l1, l2};
  gens.insert(gens.end(), t.begin(), t.end());
  out.group = std::make_shared<const StabilizerChain>(GeneratedGroup(deg, gens, "Gamma"));
  check("|Gamma| = 23328", out.group->order() == 23328);

  // Maximal subgroups: B K_i for the three maximal K_i of X, and B_i X.
  const Perm ly1 = l1.pow(2), ly2 = l2.pow(2), ly3 = l1.inverse() * l2.inverse() * l1 * l2;
  std::vector<Perm> all_t(t.begin(), t.end());
  std::vector<SubgroupRecord> reps;
  const std::array<Perm, 3> k_top{l1, l2, l1 * l2};
  for (int i = 0; i < 3; ++i) {
    std::vector<Perm> g = all_t;
    g.insert(g.end(), {k_top[i], ly1, ly2, ly3});
    reps.push_back(make_subgroup(out.group, g, "B.K" + std::to_string(i + 1)));
  }
  for (int i = 0; i < 3; ++i) {
    std::vector<Perm> g{l1, l2};
    for (int j = 0; j < 3; ++j)
      if (j != i) g.insert(g.end(), {t[2 * j], t[2 * j + 1]});
    reps.push_back(make_subgroup(out.group, g, "B" + std::to_string(i + 1) + ".X"));
  }
  MaximalCollection listed(out.group, reps, false, true);
  check("30 maximal subgroups listed", listed.size() == 30);
  ElementKeys meet = listed.conjugates().front().element_keys();
  for (const auto& h : listed.conjugates()) meet = intersect_keys(meet, h.element_keys());
  check("the 30 maximal subgroups meet trivially", meet.size() == 1);
  out.maximals = MaximalCollection(out.group, reps, true, false);

  const auto& mc = out.maximals;
  out.five_set = {mc.class_start(3), mc.class_start(4), mc.class_start(5), mc.class_start(0), mc.class_start(1)};
  out.five_set_maximal_irredundant = is_maximal_irredundant(mc, out.five_set);

  auto start = std::chrono::steady_clock::now();
  out.report.alpha = compute_alpha(mc);
  out.report.mindim = compute_mindim(mc, out.report.alpha);
  out.report.beta = compute_beta(mc);
  out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------- G2

G2Witness g2_group(std::uint32_t q) {
  if (q != 2 && q != 4 && q != 8) throw PreconditionError("g2: q must be 2, 4 or 8");
  const Field& F = Field::get(q);
  static const G2Data data = read_g2_data();
  G2Builder build(data, F);
  if (!build.radical_invariant()) throw InternalError("g2: radical vector is not invariant");
  if (!build.relations_hold()) throw InternalError("g2: Chevalley commutator relations fail");

  G2Witness out;
  out.q = q;
  for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}) {
    auto gs = build.root_generators(build.root(i, j));
    out.generators.insert(out.generators.end(), gs.begin(), gs.end());
  }
  std::vector<Matrix> f1, f2;
  for (auto [i, j] : std::vector<std::pair<int, int>>{{3, 2}, {-3, -2}}) {
    auto gs = build.root_generators(build.root(i, j));
    f1.insert(f1.end(), gs.begin(), gs.end());
  }
  for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 0}, {-1, 0}}) {
    auto gs = build.root_generators(build.root(i, j));
    f2.insert(f2.end(), gs.begin(), gs.end());
  }
  out.h_generators = f1;
  out.h_generators.insert(out.h_generators.end(), f2.begin(), f2.end());
  out.g = build.x(build.root(0, 1), F.one()) * build.x(build.root(1, 1), F.one()) *
          build.x(build.root(0, -1), F.one());

  WitnessCertificate& cert = out.certificate;
  cert.construction = "g2";
  cert.parameters = {{"q", q}};
  cert.elements.emplace_back("g", out.g);
  for (std::size_t i = 0; i < out.h_generators.size(); ++i)
    cert.elements.emplace_back("h" + std::to_string(i + 1), out.h_generators[i]);
  add_check(cert, "radical of the reduction mod 2 is invariant", true);
  add_check(cert, "Chevalley commutator relations hold", true);

  bool commute = true;
  for (const auto& x : f1)
    for (const auto& y : f2) commute = commute && (x * y == y * x);
  add_check(cert, "the two factors of H commute", commute);
  const std::uint64_t l2 = static_cast<std::uint64_t>(q) * (static_cast<std::uint64_t>(q) * q - 1);
  auto c1 = matrix_closure(f1).size(), c2 = matrix_closure(f2).size();
  add_check(cert, "each factor of H has order q(q^2 - 1)", c1 == l2 && c2 == l2);
  auto h = matrix_closure(out.h_generators);
  add_check(cert, "|H| = (q(q^2 - 1))^2", h.size() == l2 * l2);
  const std::uint64_t meet = count_conjugate_intersection(h, out.g);

  const std::uint64_t degree = ipow(q, 6) - 1;
  if (degree <= limits().max_degree) {
    out.chain = std::make_shared<const StabilizerChain>(matrix_to_perm(out.generators, F));
    BigInt q6 = BigInt(ipow(q, 6)), q2 = BigInt(ipow(q, 2));
    BigInt expected = q6 * (q6 - 1) * (q2 - 1);
    cert.values.emplace_back("group_order", big_string(out.chain->order()));
    add_check(cert, "|G| = q^6 (q^6 - 1)(q^2 - 1)", out.chain->order() == expected);
    std::vector<Perm> hp, hgp;
    Perm gp = matrix_to_perm(out.g);
    for (const auto& x : out.h_generators) {
      hp.push_back(matrix_to_perm(x));
      hgp.push_back(hp.back().conjugate_by(gp));
    }
    out.h = make_subgroup(out.chain, hp, "H");
    StabilizerChain hc(GeneratedGroup(out.chain->degree(), hp));
    StabilizerChain hgc(GeneratedGroup(out.chain->degree(), hgp));
    std::uint64_t perm_meet = 0;
    hc.for_each_element([&](std::uint64_t, const Perm& x) {
      if (hgc.contains(x)) ++perm_meet;
    });
    add_check(cert, "permutation and matrix enumerations agree", perm_meet == meet && hc.order() == h.size());
  }
  cert.values.emplace_back("h_order", std::to_string(h.size()));
  cert.values.emplace_back("intersection_order", std::to_string(meet));
  cert.verdict = evaluate_verdict(cert);
  cert.summary = "|H| = " + std::to_string(h.size()) + ", |H cap H^g| = " + std::to_string(meet);
  return out;
}

}  // namespace mindim

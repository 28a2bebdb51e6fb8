#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "mindim/constructions.hpp"
#include "mindim/errors.hpp"
#include "oracles.hpp"

using namespace mindim;

namespace {

// ---------------------------------------------------------------- integers

bool naive_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool naive_prime_power(int n) {
  if (n < 2) return false;
  int p = 2;
  while (n % p != 0) ++p;
  while (n % p == 0) n /= p;
  return n == 1;
}

// ---------------------------------------------------------------- prime-field linear algebra

using IntMat = std::vector<std::vector<int>>;

int md(long x, int p) { return static_cast<int>(((x % p) + p) % p); }

int inv_mod(int a, int p) {
  for (int x = 1; x < p; ++x)
    if (a * x % p == 1) return x;
  return 0;
}

// Basis of {x : rows . x = 0}.
IntMat null_space(IntMat rows, int ncols, int p) {
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (int c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t k = r;
    while (k < rows.size() && rows[k][c] == 0) ++k;
    if (k == rows.size()) continue;
    std::swap(rows[k], rows[r]);
    int iv = inv_mod(rows[r][c], p);
    for (auto& x : rows[r]) x = md(static_cast<long>(x) * iv, p);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != r && rows[i][c] != 0) {
        int f = rows[i][c];
        for (int j = 0; j < ncols; ++j) rows[i][j] = md(rows[i][j] - static_cast<long>(f) * rows[r][j], p);
      }
    pivot_col.push_back(c);
    ++r;
  }
  IntMat basis;
  for (int free = 0; free < ncols; ++free) {
    if (std::find(pivot_col.begin(), pivot_col.end(), free) != pivot_col.end()) continue;
    std::vector<int> v(ncols, 0);
    v[free] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = md(-rows[i][free], p);
    basis.push_back(v);
  }
  return basis;
}

int rank_mod(IntMat rows, int ncols, int p) { return ncols - static_cast<int>(null_space(rows, ncols, p).size()); }

IntMat to_ints(const Matrix& m) {
  IntMat out(m.rows(), std::vector<int>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = static_cast<int>(m.field().to_vector_code(m.at(i, j)));
  return out;
}

int dot_mod(const std::vector<int>& u, const std::vector<int>& v, int p) {
  long s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += static_cast<long>(u[i]) * v[i];
  return md(s, p);
}

std::vector<int> row_times(const std::vector<int>& v, const IntMat& g, int p) {
  std::vector<int> out(g.size(), 0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    long s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) s += static_cast<long>(v[i]) * g[i][j];
    out[j] = md(s, p);
  }
  return out;
}

struct OracleResult {
  std::vector<std::size_t> dimensions;
  std::set<IntMat> isometries;
};

// Independent stabilizer computation over a prime field from the serialized problem.
OracleResult oracle_stabilizer(const StabilizerProblem& pr) {
  const FormSpace& V = *pr.space;
  const int p = static_cast<int>(V.field().q());
  const int n = static_cast<int>(V.dim());
  IntMat form = to_ints(V.kind() == FormKind::Quadratic ? V.quadratic_matrix() : V.gram());
  IntMat bil = form;
  if (V.kind() == FormKind::Quadratic)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) bil[i][j] = md(form[i][j] + form[j][i], p);
  auto bilinear = [&](const std::vector<int>& u, const std::vector<int>& v) {
    return dot_mod(row_times(u, bil, p), v, p);
  };
  auto quad = [&](const std::vector<int>& v) {
    long s = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) s += static_cast<long>(form[i][j]) * v[i] * v[j];
    return md(s, p);
  };
  OracleResult out;
  for (const auto& alt : pr.alternatives) {
    IntMat eqs;
    for (auto [from, to] : alt) {
      IntMat u = to_ints(pr.subspaces[from].second.basis());
      IntMat ann = null_space(to_ints(pr.subspaces[to].second.basis()), n, p);
      for (const auto& ui : u)
        for (const auto& c : ann) {
          std::vector<int> e(n * n);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) e[i * n + j] = md(static_cast<long>(ui[i]) * c[j], p);
          eqs.push_back(e);
        }
    }
    IntMat sol = null_space(eqs, n * n, p);
    out.dimensions.push_back(sol.size());
    std::vector<int> coef(sol.size(), 0);
    while (true) {
      IntMat g(n, std::vector<int>(n, 0));
      for (std::size_t k = 0; k < sol.size(); ++k)
        for (int t = 0; t < n * n; ++t) g[t / n][t % n] = md(g[t / n][t % n] + coef[k] * sol[k][t], p);
      bool ok = rank_mod(g, n, p) == n;
      for (int i = 0; i < n && ok; ++i) {
        std::vector<int> ei(n, 0);
        ei[i] = 1;
        auto gi = row_times(ei, g, p);
        if (V.kind() == FormKind::Quadratic && quad(gi) != form[i][i]) ok = false;
        for (int j = 0; j < n && ok; ++j) {
          std::vector<int> ej(n, 0);
          ej[j] = 1;
          if (bilinear(gi, row_times(ej, g, p)) != bil[i][j]) ok = false;
        }
      }
      if (ok) out.isometries.insert(g);
      std::size_t k = 0;
      while (k < coef.size() && ++coef[k] == p) coef[k++] = 0;
      if (k == coef.size()) break;
    }
  }
  return out;
}

IntMat scalar(int n, int a) {
  IntMat m(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = a;
  return m;
}

std::set<IntMat> int_set(const std::vector<Matrix>& ms) {
  std::set<IntMat> s;
  for (const auto& m : ms) s.insert(to_ints(m));
  return s;
}

void check_against_oracle(const WitnessCertificate& c) {
  REQUIRE(c.problem.has_value());
  REQUIRE(c.outcome.has_value());
  auto o = oracle_stabilizer(*c.problem);
  CHECK(o.dimensions == c.outcome->dimensions);
  CHECK(o.isometries == int_set(c.outcome->isometries));
}

void check_round_trip(const WitnessCertificate& c) {
  std::string text = to_json(c);
  auto back = certificate_from_json(text);
  CHECK(to_json(back) == text);
  auto r = replay_certificate(back);
  CHECK(r.reproduced);
  CHECK(r.verdict == c.verdict);
}

// ---------------------------------------------------------------- affine model of the soluble example

using Bits = std::vector<std::uint64_t>;

Bits bits_and(const Bits& a, const Bits& b) {
  Bits r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] & b[i];
  return r;
}

std::size_t popcount(const Bits& a) {
  std::size_t s = 0;
  for (auto w : a) s += static_cast<std::size_t>(std::popcount(w));
  return s;
}

struct GammaModel {
  std::vector<IntMat> x;  // the 32 linear parts
  std::vector<Bits> maximals;
  std::size_t order = 0;
};

IntMat mat_mul3(const IntMat& a, const IntMat& b) {
  IntMat c(a.size(), std::vector<int>(b[0].size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] = (c[i][j] + a[i][k] * b[k][j]) % 3;
  return c;
}

std::vector<IntMat> closure3(const std::vector<IntMat>& gens) {
  std::set<IntMat> seen{scalar(6, 1)};
  std::vector<IntMat> todo{scalar(6, 1)};
  while (!todo.empty()) {
    IntMat m = todo.back();
    todo.pop_back();
    for (const auto& g : gens) {
      IntMat y = mat_mul3(m, g);
      if (seen.insert(y).second) todo.push_back(y);
    }
  }
  return {seen.begin(), seen.end()};
}

// Elements (M, t) of Gamma are indexed by 729 * index(M) + code(t).
GammaModel gamma_model() {
  const IntMat sa{{0, 2}, {1, 0}}, sb{{1, 0}, {0, 2}};
  auto mul2 = [](const IntMat& a, const IntMat& b) {
    IntMat c(2, std::vector<int>(2, 0));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) c[i][j] = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % 3;
    return c;
  };
  const IntMat sab = mul2(sa, sb);
  auto block = [](const std::vector<const IntMat*>& w) {
    // module i uses coordinate j(i) of the word: j = 1, 2, 0
    const int coord[3] = {1, 2, 0};
    IntMat m(6, std::vector<int>(6, 0));
    for (int i = 0; i < 3; ++i)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m[2 * i + r][2 * i + c] = (*w[coord[i]])[r][c];
    return m;
  };
  IntMat x1 = block({&sa, &sb, &sb}), x2 = block({&sb, &sab, &sa});
  GammaModel g;
  g.x = closure3({x1, x2});
  std::map<IntMat, std::size_t> idx;
  for (std::size_t i = 0; i < g.x.size(); ++i) idx[g.x[i]] = i;
  g.order = g.x.size() * 729;
  const std::size_t words = (g.order + 63) / 64;
  auto sq = [&](const IntMat& m) { return mat_mul3(m, m); };
  IntMat y1 = sq(x1), y2 = sq(x2);
  // [x1, x2] through inverses found in the closure
  auto inverse = [&](const IntMat& m) {
    for (const auto& c : g.x)
      if (mat_mul3(m, c) == scalar(6, 1)) return c;
    return m;
  };
  IntMat y3 = mat_mul3(mat_mul3(mat_mul3(inverse(x1), inverse(x2)), x1), x2);
  // B K for the three maximal subgroups K of X
  for (const IntMat& top : {x1, x2, mat_mul3(x1, x2)}) {
    auto k = closure3({top, y1, y2, y3});
    Bits b(words, 0);
    for (const auto& m : k)
      for (std::size_t t = 0; t < 729; ++t) {
        std::size_t e = idx[m] * 729 + t;
        b[e / 64] |= std::uint64_t{1} << (e % 64);
      }
    g.maximals.push_back(b);
  }
  // conjugates of B_i X: the t-component in A_i equals a - a M_i
  auto digit = [](std::size_t code, int k) {
    for (int i = 5; i > k; --i) code /= 3;
    return static_cast<int>(code % 3);
  };
  for (int i = 0; i < 3; ++i)
    for (int a0 = 0; a0 < 3; ++a0)
      for (int a1 = 0; a1 < 3; ++a1) {
        Bits b(words, 0);
        for (std::size_t mi = 0; mi < g.x.size(); ++mi) {
          const IntMat& m = g.x[mi];
          int w0 = md(a0 - (a0 * m[2 * i][2 * i] + a1 * m[2 * i + 1][2 * i]), 3);
          int w1 = md(a1 - (a0 * m[2 * i][2 * i + 1] + a1 * m[2 * i + 1][2 * i + 1]), 3);
          for (std::size_t t = 0; t < 729; ++t)
            if (digit(t, 2 * i) == w0 && digit(t, 2 * i + 1) == w1) {
              std::size_t e = mi * 729 + t;
              b[e / 64] |= std::uint64_t{1} << (e % 64);
            }
        }
        g.maximals.push_back(b);
      }
  return g;
}

bool irredundant_bits(const std::vector<const Bits*>& sets) {
  if (sets.size() <= 1) return true;
  Bits all = *sets[0];
  for (auto* s : sets) all = bits_and(all, *s);
  std::size_t t = popcount(all);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    Bits o;
    for (std::size_t j = 0; j < sets.size(); ++j)
      if (j != i) o = o.empty() ? *sets[j] : bits_and(o, *sets[j]);
    if (popcount(o) == t) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("aset agrees with a naive oracle") {
  std::vector<std::uint64_t> first;
  for (int n = 1; n <= 10000; ++n) {
    bool naive = n % 2 == 0 && naive_prime(n / 2) && n / 2 != 11 && !naive_prime_power(n - 1);
    CHECK(aset_contains(static_cast<std::uint64_t>(n)) == naive);
    if (naive && first.size() < 10) first.push_back(static_cast<std::uint64_t>(n));
  }
  CHECK(first == std::vector<std::uint64_t>{34, 46, 58, 86, 94, 106, 118, 134, 142, 146});
  CHECK(aset_contains(34));
  CHECK_FALSE(aset_contains(22));
  CHECK_FALSE(aset_contains(26));
  CHECK_FALSE(aset_contains(0));
  CHECK_FALSE(aset_contains(4));
}

TEST_CASE("sp4 witness") {
  for (std::uint32_t q : {5u, 7u}) {
    CAPTURE(q);
    auto c = sp4_witness(q);
    for (const auto& k : c.checks) CHECK_MESSAGE(k.passed, k.name);
    CHECK(c.verdict);
    REQUIRE(c.outcome->stabilizer.size() == 2);
    CHECK(int_set(c.outcome->stabilizer) == std::set<IntMat>{scalar(4, 1), scalar(4, static_cast<int>(q) - 1)});
    check_against_oracle(c);
    check_round_trip(c);
  }
  CHECK_THROWS_AS(sp4_witness(3), PreconditionError);
  CHECK_THROWS_AS(sp4_witness(8), PreconditionError);
}

TEST_CASE("ortho odd witness") {
  for (std::uint32_t n : {7u, 9u}) {
    CAPTURE(n);
    auto c = ortho_odd_witness(n, 3);
    for (const auto& k : c.checks) CHECK_MESSAGE(k.passed, k.name);
    CHECK(c.verdict);
    // the isometries are +-I and -I has determinant -1 in odd dimension
    check_against_oracle(c);
    CHECK(int_set(c.outcome->isometries) == std::set<IntMat>{scalar(static_cast<int>(n), 1), scalar(static_cast<int>(n), 2)});
    CHECK(int_set(c.outcome->stabilizer) == std::set<IntMat>{scalar(static_cast<int>(n), 1)});
    check_round_trip(c);
  }
  CHECK(ortho_odd_witness(9, 3).outcome->dimensions == std::vector<std::size_t>{5});
  CHECK_THROWS_AS(ortho_odd_witness(5, 3), PreconditionError);
  CHECK_THROWS_AS(ortho_odd_witness(8, 3), PreconditionError);
  CHECK_THROWS_AS(ortho_odd_witness(7, 4), PreconditionError);
}

TEST_CASE("ortho even witnesses") {
  auto l = lemma66_witness(2, 2);
  for (const auto& k : l.checks) CHECK_MESSAGE(k.passed, k.name);
  CHECK(l.verdict);
  CHECK(int_set(l.outcome->stabilizer) == std::set<IntMat>{scalar(8, 1)});
  check_against_oracle(l);
  check_round_trip(l);

  const Field& F2 = Field::get(2);
  CHECK_THROWS_WITH_AS(lemma66_witness(2, 2, Matrix::identity(F2, 2)), doctest::Contains("I + A"), PreconditionError);
  // A of order 3 with B = A^2 generates a cyclic group only
  Matrix a = *l.element("A");
  CHECK_THROWS_WITH_AS(lemma66_witness(2, 2, a, a * a), doctest::Contains("GL_m(q)"), PreconditionError);
  CHECK_THROWS_AS(lemma66_witness(1, 2), PreconditionError);
  CHECK_THROWS_AS(lemma66_witness(2, 3), PreconditionError);

  auto t = theorem68_witness(10, 2);
  for (const auto& k : t.checks) CHECK_MESSAGE(k.passed, k.name);
  CHECK(t.verdict);
  CHECK(int_set(t.outcome->stabilizer) == std::set<IntMat>{scalar(10, 1)});
  check_against_oracle(t);
  check_round_trip(t);
  CHECK_THROWS_AS(theorem68_witness(8, 2), PreconditionError);
  CHECK_THROWS_AS(theorem68_witness(10, 3), PreconditionError);
}

TEST_CASE("certificate tampering is detected") {
  auto c = sp4_witness(5);
  auto forged = c;
  forged.outcome->stabilizer.pop_back();
  forged.verdict = true;
  auto r = replay_certificate(certificate_from_json(to_json(forged)));
  CHECK_FALSE(r.reproduced);
  CHECK_FALSE(r.verdict);

  // moving a subspace changes the re-solved stabilizer
  auto moved = c;
  moved.problem->subspaces[2].second = moved.problem->subspaces[0].second;
  auto r2 = replay_certificate(moved);
  CHECK_FALSE(r2.reproduced);
  CHECK_FALSE(r2.verdict);
  CHECK_THROWS_AS(certificate_from_json("{\"construction\": 1}"), InputError);
  CHECK_THROWS_AS(certificate_from_json("not json"), InputError);
}

TEST_CASE("g2 witness") {
  auto w = g2_group(4);
  const auto& c = w.certificate;
  for (const auto& k : c.checks) CHECK_MESSAGE(k.passed, k.name);
  CHECK(c.verdict);
  REQUIRE(w.chain);
  CHECK(w.chain->order() == 251596800);
  REQUIRE(w.h.has_value());
  CHECK(w.h->order == 3600);
  CHECK(*c.value("intersection_order") == "1");

  // H cap H^g by plain enumeration of permutations
  std::vector<Perm> hp;
  for (const auto& m : w.h_generators) hp.push_back(matrix_to_perm(m));
  auto h = oracle::closure(w.chain->degree(), hp);
  CHECK(h.size() == 3600);
  std::set<Perm> hs(h.begin(), h.end());
  Perm g = matrix_to_perm(w.g);
  std::size_t meet = 0;
  for (const auto& x : h)
    if (hs.count(g * x * g.inverse())) ++meet;
  CHECK(meet == 1);
  check_round_trip(c);

  auto w2 = g2_group(2);
  CHECK(w2.chain->order() == 12096);
  CHECK(w2.h->order == 36);
  CHECK_THROWS_AS(g2_group(16), PreconditionError);
  CHECK_THROWS_AS(g2_group(3), PreconditionError);
}

TEST_CASE("g2 witness at q = 8") {
  auto w = g2_group(8);
  for (const auto& k : w.certificate.checks) CHECK_MESSAGE(k.passed, k.name);
  CHECK(*w.certificate.value("h_order") == "254016");
  CHECK(*w.certificate.value("intersection_order") == "1");
  CHECK(w.certificate.verdict);
  CHECK_FALSE(w.chain);
}

TEST_CASE("soluble example") {
  auto s = soluble_gamma();
  for (const auto& k : s.checks) CHECK_MESSAGE(k.passed, k.name);
  CHECK(s.x_order == 32);
  CHECK(s.x_frattini_order == 8);
  CHECK(s.group->order() == 23328);
  CHECK(s.maximals.size() == 30);
  CHECK(s.five_set_maximal_irredundant);
  REQUIRE(s.report.alpha.has_value());
  REQUIRE(s.report.mindim.has_value());

  // independent affine model with maximal subgroups as bitsets
  auto g = gamma_model();
  REQUIRE(g.order == 23328);
  REQUIRE(g.maximals.size() == 30);
  for (std::size_t i = 0; i < 30; ++i) CHECK(popcount(g.maximals[i]) == (i < 3 ? 11664u : 2592u));
  const std::size_t m = g.maximals.size();

  // alpha: least number of maximal subgroups meeting in the identity
  std::size_t alpha = 0;
  for (std::size_t size = 1; size <= m && alpha == 0; ++size) {
    std::function<bool(std::size_t, std::size_t, const Bits&)> rec = [&](std::size_t depth, std::size_t start,
                                                                         const Bits& cur) {
      if (depth == size) return popcount(cur) == 1;
      for (std::size_t i = start; i < m; ++i)
        if (rec(depth + 1, i + 1, depth == 0 ? g.maximals[i] : bits_and(cur, g.maximals[i]))) return true;
      return false;
    };
    if (rec(0, 0, {})) alpha = size;
  }
  CHECK(alpha == 6);
  CHECK(s.report.alpha->value == alpha);

  // Mindim: no maximal irredundant set of size at most 4, and the five-set is one
  auto maximal_irredundant = [&](const std::vector<std::size_t>& pick) {
    std::vector<const Bits*> sets;
    for (auto i : pick) sets.push_back(&g.maximals[i]);
    if (!irredundant_bits(sets)) return false;
    for (std::size_t c = 0; c < m; ++c) {
      if (std::find(pick.begin(), pick.end(), c) != pick.end()) continue;
      auto ext = sets;
      ext.push_back(&g.maximals[c]);
      if (irredundant_bits(ext)) return false;
    }
    return true;
  };
  bool small_found = false;
  for (std::size_t size = 1; size <= 4 && !small_found; ++size) {
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
      if (small_found) return;
      if (pick.size() == size) {
        small_found = maximal_irredundant(pick);
        return;
      }
      for (std::size_t i = start; i < m; ++i) {
        pick.push_back(i);
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
  }
  CHECK_FALSE(small_found);
  // B1X, B2X, B3X, B K1, B K2 in the model's numbering
  CHECK(maximal_irredundant({3, 12, 21, 0, 1}));
  CHECK(s.report.mindim->exact());
  CHECK(s.report.mindim->lower == 5);
  CHECK_FALSE(s.report.beta->value.has_value());
}

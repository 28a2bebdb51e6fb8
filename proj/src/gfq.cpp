#include "mindim/gfq.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "mindim/errors.hpp"
#include "mindim/limits.hpp"

namespace mindim {

std::string data_dir() {
  if (const char* env = std::getenv("MINDIM_DATA"); env && *env) return env;
#ifdef MINDIM_DATA_DIR
  return MINDIM_DATA_DIR;
#else
  return "data";
#endif
}

// ---------------------------------------------------------------- Field

namespace {

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

Field::Field(std::uint32_t p, std::uint32_t f, const std::vector<std::uint32_t>& poly)
    : p_(p), f_(f), q_(1) {
  if (!is_prime(p) || f == 0) throw InputError("field: invalid characteristic or degree");
  for (std::uint32_t i = 0; i < f; ++i) {
    if (static_cast<std::uint64_t>(q_) * p > 65536) throw InputError("field: q exceeds 2^16");
    q_ *= p;
  }
  if (poly.size() != f + 1 || poly[f] != 1) throw InputError("field: polynomial must be monic of degree f");
  for (auto c : poly)
    if (c >= p) throw InputError("field: polynomial coefficient out of range");

  // powers of alpha as coefficient vectors, packed base p (coefficient of x^i is digit i)
  const std::uint32_t n = q_ - 1;
  exp_vec_.assign(n, 0);
  vec_log_.assign(q_, 0);
  std::vector<std::uint32_t> cur(f, 0);
  cur[0] = 1;
  std::vector<bool> seen(q_, false);
  auto pack = [&](const std::vector<std::uint32_t>& v) {
    std::uint32_t code = 0;
    for (std::size_t i = f; i-- > 0;) code = code * p + v[i];
    return code;
  };
  for (std::uint32_t k = 0; k < n; ++k) {
    std::uint32_t code = pack(cur);
    if (code == 0 || seen[code]) throw InputError("field: polynomial is not primitive");
    seen[code] = true;
    exp_vec_[k] = code;
    vec_log_[code] = k;
    // multiply by x modulo poly
    std::uint32_t top = cur[f - 1];
    for (std::size_t i = f - 1; i > 0; --i) cur[i] = cur[i - 1];
    cur[0] = 0;
    for (std::size_t i = 0; i < f; ++i) cur[i] = (cur[i] + (p - poly[i]) * top) % p;
  }
  if (pack(cur) != 1) throw InputError("field: polynomial is not primitive");

  auto add_codes = [&](std::uint32_t a, std::uint32_t b) {
    std::uint32_t r = 0, mult = 1;
    for (std::uint32_t i = 0; i < f; ++i) {
      r += ((a % p + b % p) % p) * mult;
      a /= p;
      b /= p;
      mult *= p;
    }
    return r;
  };
  zech_.assign(n, -1);
  for (std::uint32_t k = 0; k < n; ++k) {
    std::uint32_t s = add_codes(1, exp_vec_[k]);
    zech_[k] = s == 0 ? -1 : static_cast<std::int32_t>(vec_log_[s]);
  }
  neg_one_log_ = p == 2 ? 0 : n / 2;
}

const Field& Field::get(std::uint32_t q) {
  static std::mutex mu;
  static std::map<std::uint32_t, std::unique_ptr<Field>> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(q); it != cache.end()) return *it->second;
  if (q < 2 || q > 65536) throw InputError("field: q out of range");
  std::uint32_t p = 2;
  while (q % p != 0) ++p;
  std::uint32_t f = 0, r = q;
  while (r % p == 0) {
    r /= p;
    ++f;
  }
  if (r != 1) throw InputError("field: q is not a prime power");
  std::string path = data_dir() + "/primitive_polynomials.txt";
  std::ifstream in(path);
  if (!in) throw InputError("field: cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::uint32_t lp = 0, lf = 0;
    ls >> lp >> lf;
    if (lp != p || lf != f) continue;
    std::vector<std::uint32_t> poly;
    std::uint32_t c;
    while (ls >> c) poly.push_back(c);
    auto field = std::make_unique<Field>(p, f, poly);
    const Field& ref = *field;
    cache.emplace(q, std::move(field));
    return ref;
  }
  throw InputError("field: no primitive polynomial for q = " + std::to_string(q));
}

Elt Field::inv(Elt a) const {
  if (a == 0) throw InputError("field: inverse of zero");
  std::uint32_t k = a - 1;
  return (k == 0 ? 0 : (q_ - 1) - k) + 1;
}

Elt Field::pow(Elt a, std::int64_t e) const {
  if (a == 0) {
    if (e < 0) throw InputError("field: inverse of zero");
    return e == 0 ? 1 : 0;
  }
  std::int64_t n = q_ - 1;
  std::int64_t k = ((static_cast<std::int64_t>(a - 1) * (e % n)) % n + n) % n;
  return static_cast<Elt>(k) + 1;
}

Elt Field::from_int(std::int64_t n) const {
  std::int64_t r = ((n % p_) + p_) % p_;
  return from_vector_code(static_cast<std::uint32_t>(r));
}

std::uint32_t Field::log(Elt a) const {
  if (a == 0) throw InputError("field: log of zero");
  return a - 1;
}

bool Field::is_square(Elt a) const {
  if (a == 0 || p_ == 2) return true;
  return (a - 1) % 2 == 0;
}

std::uint32_t Field::absolute_trace(Elt a) const {
  Elt t = 0, x = a;
  for (std::uint32_t i = 0; i < f_; ++i) {
    t = add(t, x);
    x = frobenius(x);
  }
  std::uint32_t v = to_vector_code(t);
  if (v >= p_) throw InternalError("field: trace outside the prime field");
  return v;
}

std::string Field::to_string(Elt a) const {
  if (f_ == 1) return std::to_string(to_vector_code(a));
  if (a == 0) return "0";
  if (a == 1) return "1";
  return "z^" + std::to_string(a - 1);
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(const Field& field, std::size_t rows, std::size_t cols)
    : field_(&field), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

Matrix Matrix::identity(const Field& field, std::size_t n) {
  Matrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Matrix Matrix::from_rows(const Field& field, const std::vector<Vec>& rows) {
  std::size_t cols = rows.empty() ? 0 : rows[0].size();
  Matrix m(field, rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw InputError("matrix: ragged rows");
    for (std::size_t j = 0; j < cols; ++j) {
      if (rows[i][j] >= field.q()) throw InputError("matrix: entry outside the field");
      m.at(i, j) = rows[i][j];
    }
  }
  return m;
}

Matrix Matrix::from_ints(const Field& field, const std::vector<std::vector<std::int64_t>>& rows) {
  std::vector<Vec> v;
  for (const auto& r : rows) {
    Vec row;
    for (auto x : r) row.push_back(field.from_int(x));
    v.push_back(row);
  }
  return from_rows(field, v);
}

Vec Matrix::row(std::size_t i) const {
  return Vec(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) throw InputError("matrix: dimension mismatch");
  const Field& F = *field_;
  Matrix r(F, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      Elt x = at(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        Elt y = o.at(k, j);
        if (y != 0) r.at(i, j) = F.add(r.at(i, j), F.mul(x, y));
      }
    }
  return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix: dimension mismatch");
  Matrix r(*field_, rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = field_->add(a_[i], o.a_[i]);
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix: dimension mismatch");
  Matrix r(*field_, rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = field_->sub(a_[i], o.a_[i]);
  return r;
}

Matrix Matrix::scaled(Elt c) const {
  Matrix r(*field_, rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = field_->mul(a_[i], c);
  return r;
}

Matrix Matrix::transpose() const {
  Matrix r(*field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

namespace {

// In-place reduction to reduced row echelon form; returns pivot columns.
// Row operations are mirrored on `aux` when given.
std::vector<std::size_t> reduce(Matrix& m, Matrix* aux = nullptr) {
  const Field& F = m.field();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && m.at(piv, c) == 0) ++piv;
    if (piv == m.rows()) continue;
    auto swap_rows = [&](Matrix& x) {
      if (piv == r) return;
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x.at(piv, j), x.at(r, j));
    };
    swap_rows(m);
    if (aux) swap_rows(*aux);
    Elt s = F.inv(m.at(r, c));
    for (std::size_t j = 0; j < m.cols(); ++j) m.at(r, j) = F.mul(m.at(r, j), s);
    if (aux)
      for (std::size_t j = 0; j < aux->cols(); ++j) aux->at(r, j) = F.mul(aux->at(r, j), s);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      Elt t = F.neg(m.at(i, c));
      for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = F.add(m.at(i, j), F.mul(t, m.at(r, j)));
      if (aux)
        for (std::size_t j = 0; j < aux->cols(); ++j)
          aux->at(i, j) = F.add(aux->at(i, j), F.mul(t, aux->at(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

Matrix take_rows(const Matrix& m, std::size_t count) {
  Matrix r(m.field(), count, m.cols());
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r.at(i, j) = m.at(i, j);
  return r;
}

}  // namespace

Matrix Matrix::inverse() const {
  if (rows_ != cols_) throw InputError("matrix: inverse of a non-square matrix");
  Matrix m = *this;
  Matrix aux = identity(*field_, rows_);
  if (reduce(m, &aux).size() != rows_) throw InputError("matrix: singular");
  return aux;
}

Elt Matrix::det() const {
  if (rows_ != cols_) throw InputError("matrix: determinant of a non-square matrix");
  const Field& F = *field_;
  Matrix m = *this;
  Elt d = 1;
  for (std::size_t c = 0; c < cols_; ++c) {
    std::size_t piv = c;
    while (piv < rows_ && m.at(piv, c) == 0) ++piv;
    if (piv == rows_) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < cols_; ++j) std::swap(m.at(piv, j), m.at(c, j));
      d = F.neg(d);
    }
    d = F.mul(d, m.at(c, c));
    Elt s = F.inv(m.at(c, c));
    for (std::size_t i = c + 1; i < rows_; ++i) {
      if (m.at(i, c) == 0) continue;
      Elt t = F.neg(F.mul(m.at(i, c), s));
      for (std::size_t j = c; j < cols_; ++j) m.at(i, j) = F.add(m.at(i, j), F.mul(t, m.at(c, j)));
    }
  }
  return d;
}

std::size_t Matrix::rank() const {
  Matrix m = *this;
  return reduce(m).size();
}

bool Matrix::is_zero() const {
  for (Elt x : a_)
    if (x != 0) return false;
  return true;
}

bool Matrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != (i == j ? 1u : 0u)) return false;
  return true;
}

Matrix Matrix::rref() const {
  Matrix m = *this;
  std::size_t r = reduce(m).size();
  return take_rows(m, r);
}

Matrix Matrix::right_kernel() const {
  const Field& F = *field_;
  Matrix m = *this;
  auto pivots = reduce(m);
  std::vector<bool> is_pivot(cols_, false);
  for (auto c : pivots) is_pivot[c] = true;
  Matrix k(F, cols_ - pivots.size(), cols_);
  std::size_t out = 0;
  for (std::size_t free = 0; free < cols_; ++free) {
    if (is_pivot[free]) continue;
    k.at(out, free) = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) k.at(out, pivots[i]) = F.neg(m.at(i, free));
    ++out;
  }
  return k;
}

Matrix Matrix::left_kernel() const { return transpose().right_kernel(); }

Vec Matrix::apply(const Vec& v) const {
  if (v.size() != rows_) throw InputError("matrix: vector length mismatch");
  const Field& F = *field_;
  Vec r(cols_, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < cols_; ++j) r[j] = F.add(r[j], F.mul(v[i], at(i, j)));
  }
  return r;
}

std::size_t MatrixHash::operator()(const Matrix& m) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (Elt x : m.data()) {
    h ^= x;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

Elt dot(const Field& F, const Vec& u, const Vec& v) {
  if (u.size() != v.size()) throw InputError("vector length mismatch");
  Elt s = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] && v[i]) s = F.add(s, F.mul(u[i], v[i]));
  return s;
}

// ---------------------------------------------------------------- FormSpace

FormSpace::FormSpace(const Field& field, FormKind kind, Matrix gram, Matrix upper,
                     std::vector<std::string> labels)
    : field_(&field), kind_(kind), gram_(std::move(gram)), upper_(std::move(upper)),
      labels_(std::move(labels)) {
  if (labels_.empty()) {
    for (std::size_t i = 0; i < gram_.rows(); ++i) labels_.push_back("v" + std::to_string(i + 1));
  }
  if (labels_.size() != gram_.rows()) throw InputError("form: label count differs from dimension");
}

std::shared_ptr<const FormSpace> FormSpace::symplectic(const Field& field, const Matrix& gram,
                                                       std::vector<std::string> labels) {
  if (gram.rows() != gram.cols()) throw InputError("form: Gram matrix not square");
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    if (gram.at(i, i) != 0) throw InputError("form: symplectic form not alternating");
    for (std::size_t j = 0; j < gram.cols(); ++j)
      if (gram.at(i, j) != field.neg(gram.at(j, i))) throw InputError("form: not alternating");
  }
  if (gram.det() == 0) throw InputError("form: symplectic form degenerate");
  return std::shared_ptr<const FormSpace>(
      new FormSpace(field, FormKind::Symplectic, gram, Matrix(), std::move(labels)));
}

std::shared_ptr<const FormSpace> FormSpace::symmetric(const Field& field, const Matrix& gram,
                                                      std::vector<std::string> labels) {
  if (field.p() == 2) throw InputError("form: symmetric forms need odd characteristic");
  if (gram.rows() != gram.cols() || !(gram == gram.transpose()))
    throw InputError("form: Gram matrix not symmetric");
  const std::size_t n = gram.rows();
  Matrix upper(field, n, n);
  Elt half = field.inv(field.from_int(2));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) upper.at(i, j) = i == j ? field.mul(gram.at(i, i), half) : gram.at(i, j);
  return std::shared_ptr<const FormSpace>(
      new FormSpace(field, FormKind::Symmetric, gram, upper, std::move(labels)));
}

std::shared_ptr<const FormSpace> FormSpace::quadratic(const Field& field, const Matrix& upper,
                                                      std::vector<std::string> labels) {
  const std::size_t n = upper.rows();
  if (upper.cols() != n) throw InputError("form: coefficient matrix not square");
  Matrix gram(field, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i > j && upper.at(i, j) != 0) throw InputError("form: coefficient matrix not upper triangular");
      if (i == j)
        gram.at(i, i) = field.add(upper.at(i, i), upper.at(i, i));
      else
        gram.at(i, j) = i < j ? upper.at(i, j) : upper.at(j, i);
    }
  return std::shared_ptr<const FormSpace>(
      new FormSpace(field, FormKind::Quadratic, gram, upper, std::move(labels)));
}

Elt FormSpace::bilinear(const Vec& u, const Vec& v) const { return dot(*field_, gram_.apply(u), v); }

Elt FormSpace::quad(const Vec& v) const {
  if (!has_quadratic()) throw PreconditionError("form: no quadratic form on a symplectic space");
  const Field& F = *field_;
  Elt s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = i; j < v.size(); ++j) {
      if (v[j] == 0 || upper_.at(i, j) == 0) continue;
      s = F.add(s, F.mul(upper_.at(i, j), F.mul(v[i], v[j])));
    }
  }
  return s;
}

Vec FormSpace::vector(const std::string& expr) const {
  const Field& F = *field_;
  Vec v(dim(), 0);
  std::size_t i = 0;
  bool any = false;
  while (i < expr.size()) {
    Elt sign = 1;
    while (i < expr.size() && (expr[i] == ' ' || expr[i] == '+' || expr[i] == '-')) {
      if (expr[i] == '-') sign = F.neg(sign);
      ++i;
    }
    std::size_t j = i;
    while (j < expr.size() && expr[j] != '+' && expr[j] != '-' && expr[j] != ' ') ++j;
    if (j == i) break;
    std::string name = expr.substr(i, j - i);
    std::size_t k = 0;
    while (k < labels_.size() && labels_[k] != name) ++k;
    if (k == labels_.size()) throw InputError("form: unknown basis label " + name);
    v[k] = F.add(v[k], sign);
    any = true;
    i = j;
  }
  if (!any) throw InputError("form: empty vector expression");
  return v;
}

bool FormSpace::preserves(const Matrix& g) const {
  const std::size_t n = dim();
  if (g.rows() != n || g.cols() != n) return false;
  std::vector<Vec> img(n);
  for (std::size_t i = 0; i < n; ++i) {
    img[i] = g.row(i);
    if (has_quadratic() && quad(img[i]) != upper_.at(i, i)) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (bilinear(img[j], img[i]) != gram_.at(j, i)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- Subspace

Subspace::Subspace(std::shared_ptr<const FormSpace> ambient, const std::vector<Vec>& spanning)
    : ambient_(std::move(ambient)) {
  if (!ambient_) throw InputError("subspace: missing ambient space");
  if (spanning.empty()) {
    basis_ = Matrix(ambient_->field(), 0, ambient_->dim());
    return;
  }
  for (const auto& v : spanning)
    if (v.size() != ambient_->dim()) throw InputError("subspace: vector length mismatch");
  basis_ = Matrix::from_rows(ambient_->field(), spanning).rref();
}

Subspace Subspace::span(std::shared_ptr<const FormSpace> ambient, const std::vector<std::string>& vectors) {
  std::vector<Vec> vs;
  for (const auto& s : vectors) vs.push_back(ambient->vector(s));
  return Subspace(std::move(ambient), vs);
}

Subspace Subspace::zero(std::shared_ptr<const FormSpace> ambient) { return Subspace(std::move(ambient), {}); }

Subspace Subspace::whole(std::shared_ptr<const FormSpace> ambient) {
  std::vector<Vec> vs;
  for (std::size_t i = 0; i < ambient->dim(); ++i) {
    Vec v(ambient->dim(), 0);
    v[i] = 1;
    vs.push_back(v);
  }
  return Subspace(std::move(ambient), vs);
}

std::vector<Vec> Subspace::basis_vectors() const {
  std::vector<Vec> r;
  for (std::size_t i = 0; i < basis_.rows(); ++i) r.push_back(basis_.row(i));
  return r;
}

bool Subspace::contains(const Vec& v) const {
  auto rows = basis_vectors();
  rows.push_back(v);
  return Matrix::from_rows(ambient_->field(), rows).rank() == dim();
}

Subspace Subspace::image(const Matrix& g) const {
  std::vector<Vec> rows;
  for (const auto& v : basis_vectors()) rows.push_back(g.apply(v));
  return Subspace(ambient_, rows);
}

bool operator==(const Subspace& a, const Subspace& b) {
  if (a.ambient_ != b.ambient_) throw InputError("subspace: mixed ambient spaces");
  return a.basis_ == b.basis_;
}

namespace {

void same_ambient(const Subspace& a, const Subspace& b) {
  if (a.ambient_ptr() != b.ambient_ptr()) throw InputError("subspace: mixed ambient spaces");
}

// Gram matrix of the form restricted to the rows of `basis`.
Matrix restricted_gram(const FormSpace& V, const std::vector<Vec>& basis) {
  Matrix g(V.field(), basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) g.at(i, j) = V.bilinear(basis[i], basis[j]);
  return g;
}

}  // namespace

Subspace sum(const Subspace& a, const Subspace& b) {
  same_ambient(a, b);
  auto rows = a.basis_vectors();
  for (const auto& v : b.basis_vectors()) rows.push_back(v);
  return Subspace(a.ambient_ptr(), rows);
}

Subspace intersection(const Subspace& a, const Subspace& b) {
  same_ambient(a, b);
  const Field& F = a.ambient().field();
  const std::size_t n = a.ambient().dim();
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient_ptr());
  // x A = y B  <=>  (x, y) [A; -B] = 0
  Matrix stacked(F, a.dim() + b.dim(), n);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < n; ++j) stacked.at(i, j) = a.basis().at(i, j);
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = 0; j < n; ++j) stacked.at(a.dim() + i, j) = F.neg(b.basis().at(i, j));
  Matrix ker = stacked.left_kernel();
  std::vector<Vec> rows;
  for (std::size_t k = 0; k < ker.rows(); ++k) {
    Vec x = ker.row(k);
    x.resize(a.dim());
    rows.push_back(a.basis().apply(x));
  }
  return Subspace(a.ambient_ptr(), rows);
}

Subspace perp(const Subspace& u) {
  const FormSpace& V = u.ambient();
  if (u.dim() == 0) return Subspace::whole(u.ambient_ptr());
  // v with B(u_i, v) = 0: rows u_i G, then right kernel
  Matrix m = u.basis() * V.gram();
  Matrix k = m.right_kernel();
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < k.rows(); ++i) rows.push_back(k.row(i));
  return Subspace(u.ambient_ptr(), rows);
}

Subspace radical(const Subspace& u) { return intersection(u, perp(u)); }

bool is_nondegenerate(const Subspace& u) {
  if (u.dim() == 0) return true;
  return restricted_gram(u.ambient(), u.basis_vectors()).det() != 0;
}

int type_sign(const Subspace& u) {
  const FormSpace& V = u.ambient();
  const Field& F = V.field();
  if (!V.has_quadratic()) throw PreconditionError("type_sign: space is not orthogonal");
  if (u.dim() % 2 != 0) throw PreconditionError("type_sign: odd dimension");
  if (!is_nondegenerate(u)) throw PreconditionError("type_sign: degenerate subspace");
  if (u.dim() == 0) return 1;
  if (F.p() != 2) {
    Elt d = restricted_gram(V, u.basis_vectors()).det();
    if ((u.dim() / 2) % 2 == 1) d = F.neg(d);
    return F.is_square(d) ? 1 : -1;
  }
  // Arf invariant from a symplectic basis of the polarization
  std::vector<Vec> pool = u.basis_vectors();
  Elt arf = 0;
  while (!pool.empty()) {
    Vec e = pool.back();
    pool.pop_back();
    std::size_t k = 0;
    while (k < pool.size() && V.bilinear(e, pool[k]) == 0) ++k;
    if (k == pool.size()) throw InternalError("type_sign: degenerate remainder");
    Vec f = pool[k];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    Elt s = F.inv(V.bilinear(e, f));
    for (auto& x : f) x = F.mul(x, s);
    // project the rest onto <e, f>^perp
    for (auto& w : pool) {
      Elt a = V.bilinear(w, f), b = V.bilinear(w, e);
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = F.add(w[i], F.add(F.mul(a, e[i]), F.mul(b, f[i])));
    }
    arf = F.add(arf, F.mul(V.quad(e), V.quad(f)));
  }
  return F.absolute_trace(arf) == 0 ? 1 : -1;
}

// ---------------------------------------------------------------- linear systems

SolutionSpace solve_linear(const Field& F, const LinearSystem& sys) {
  const std::size_t n = sys.unknowns;
  if (sys.rhs.size() != sys.rows.size()) throw InputError("solve_linear: rhs length mismatch");
  for (const auto& r : sys.rows)
    if (r.size() != n) throw InputError("solve_linear: row length mismatch");
  SolutionSpace out;
  Matrix aug(F, sys.rows.size(), n + 1);
  for (std::size_t i = 0; i < sys.rows.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = sys.rows[i][j];
    aug.at(i, n) = sys.rhs[i];
  }
  auto pivots = reduce(aug);
  if (!pivots.empty() && pivots.back() == n) {
    out.consistent = false;
    return out;
  }
  out.particular.assign(n, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) out.particular[pivots[i]] = aug.at(i, n);
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    Vec v(n, 0);
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = F.neg(aug.at(i, free));
    out.basis.push_back(v);
  }
  return out;
}

void MatrixConstraints::maps_into(const Subspace& from, const Subspace& to) {
  const Field& F = *field_;
  if (from.ambient().dim() != n_ || to.ambient().dim() != n_)
    throw InputError("constraints: dimension mismatch");
  system_.unknowns = n_ * n_;
  Matrix ann = to.basis().right_kernel();
  for (std::size_t r = 0; r < from.dim(); ++r) {
    for (std::size_t c = 0; c < ann.rows(); ++c) {
      // sum_{i,k} u_i g_ik c_k = 0
      Vec eq(n_ * n_, 0);
      for (std::size_t i = 0; i < n_; ++i) {
        Elt ui = from.basis().at(r, i);
        if (ui == 0) continue;
        for (std::size_t k = 0; k < n_; ++k) eq[i * n_ + k] = F.mul(ui, ann.at(c, k));
      }
      system_.rows.push_back(eq);
      system_.rhs.push_back(0);
    }
  }
}

SolutionSpace MatrixConstraints::solve() const {
  LinearSystem s = system_;
  s.unknowns = n_ * n_;
  return solve_linear(*field_, s);
}

void enumerate_matrices(const Field& F, std::size_t n, const SolutionSpace& space,
                        const std::function<void(const Matrix&)>& visit) {
  if (!space.consistent) return;
  const std::size_t d = space.dimension();
  double total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= F.q();
  if (total > static_cast<double>(limits().max_enumeration))
    throw ResourceError("budget exceeded: solution space has q^" + std::to_string(d) + " elements");
  const std::size_t N = n * n;
  if (space.particular.size() != N) throw InputError("enumerate: solution length is not n*n");
  // multiples[j][c] = c * basis_j
  std::vector<std::vector<Vec>> multiples(d);
  for (std::size_t j = 0; j < d; ++j)
    for (Elt c = 0; c < F.q(); ++c) {
      Vec v(N);
      for (std::size_t t = 0; t < N; ++t) v[t] = F.mul(c, space.basis[j][t]);
      multiples[j].push_back(v);
    }
  std::vector<Vec> partial(d + 1);
  partial[0] = space.particular;
  Matrix m(F, n, n);
  std::vector<Elt> digit(d, 0);
  Deadline deadline;
  std::uint64_t count = 0;
  // iterative odometer over coefficient digits
  std::size_t level = 0;
  for (std::size_t j = 0; j < d; ++j) {
    partial[j + 1].resize(N);
    for (std::size_t t = 0; t < N; ++t) partial[j + 1][t] = F.add(partial[j][t], multiples[j][0][t]);
  }
  while (true) {
    for (std::size_t t = 0; t < N; ++t) m.at(t / n, t % n) = partial[d][t];
    visit(m);
    if ((++count & 0xffff) == 0) deadline.check("solution enumeration");
    // advance
    std::size_t j = d;
    while (j > 0 && digit[j - 1] + 1 == F.q()) --j;
    if (j == 0) break;
    level = j - 1;
    ++digit[level];
    for (std::size_t k = level + 1; k < d; ++k) digit[k] = 0;
    for (std::size_t k = level; k < d; ++k) {
      const Vec& add = multiples[k][digit[k]];
      for (std::size_t t = 0; t < N; ++t) partial[k + 1][t] = F.add(partial[k][t], add[t]);
    }
  }
}

// ---------------------------------------------------------------- permutation action

std::uint64_t vector_code(const Field& F, const Vec& v) {
  std::uint64_t c = 0;
  for (Elt x : v) c = c * F.q() + x;
  return c;
}

Vec vector_from_code(const Field& F, std::size_t n, std::uint64_t code) {
  Vec v(n);
  for (std::size_t i = n; i-- > 0;) {
    v[i] = static_cast<Elt>(code % F.q());
    code /= F.q();
  }
  return v;
}

namespace {

Perm action_of(const Matrix& m, std::size_t points) {
  const Field& F = m.field();
  const std::size_t n = m.rows();
  std::vector<Point> img(points);
  // images of scaled basis vectors: row i times each field element
  std::vector<std::vector<Vec>> scaled(n, std::vector<Vec>(F.q()));
  for (std::size_t i = 0; i < n; ++i) {
    Vec r = m.row(i);
    for (Elt c = 0; c < F.q(); ++c) {
      Vec s(n);
      for (std::size_t j = 0; j < n; ++j) s[j] = F.mul(c, r[j]);
      scaled[i][c] = s;
    }
  }
  for (std::size_t p = 0; p < points; ++p) {
    Vec v = vector_from_code(F, n, p + 1);
    Vec w(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0) continue;
      const Vec& s = scaled[i][v[i]];
      for (std::size_t j = 0; j < n; ++j) w[j] = F.add(w[j], s[j]);
    }
    img[p] = static_cast<Point>(vector_code(F, w) - 1);
  }
  return Perm(img);
}

std::size_t point_count(const Field& F, std::size_t n) {
  double total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= F.q();
  if (total - 1 > static_cast<double>(limits().max_degree))
    throw ResourceError("budget exceeded: q^n - 1 exceeds the degree limit");
  return static_cast<std::size_t>(total) - 1;
}

}  // namespace

Perm matrix_to_perm(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InputError("matrix_to_perm: matrix not square");
  std::size_t pts = point_count(m.field(), m.rows());
  if (m.det() == 0) throw InputError("matrix_to_perm: singular generator");
  return action_of(m, pts);
}

GeneratedGroup matrix_to_perm(const std::vector<Matrix>& gens, const Field& F) {
  if (gens.empty()) throw InputError("matrix_to_perm: no generators");
  const std::size_t n = gens[0].rows();
  std::vector<Perm> perms;
  for (const auto& g : gens) {
    if (&g.field() != &F || g.rows() != n || g.cols() != n)
      throw InputError("matrix_to_perm: generators of mixed shape or field");
    perms.push_back(matrix_to_perm(g));
  }
  return GeneratedGroup(perms[0].degree(), perms);
}

// ---------------------------------------------------------------- orthogonal invariants

bool spinor_norm_is_square(const FormSpace& V, const Matrix& g) {
  const Field& F = V.field();
  if (F.p() == 2) throw PreconditionError("spinor norm: characteristic 2");
  const std::size_t n = V.dim();
  Matrix h = g - Matrix::identity(F, n);
  // rows u_i (g - 1) that form a basis of the image, with their preimages e_i
  std::vector<Vec> pre, img;
  for (std::size_t i = 0; i < n; ++i) {
    Vec r = h.row(i);
    auto trial = img;
    trial.push_back(r);
    if (Matrix::from_rows(F, trial).rank() == trial.size()) {
      img = trial;
      Vec e(n, 0);
      e[i] = 1;
      pre.push_back(e);
    }
  }
  if (img.empty()) return true;
  // Wall form [u(g-1), v(g-1)] = B(u, v(g-1))
  Matrix w(F, img.size(), img.size());
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t j = 0; j < img.size(); ++j) w.at(i, j) = V.bilinear(pre[i], img[j]);
  Elt d = w.det();
  if (d == 0) throw InternalError("spinor norm: degenerate Wall form");
  return F.is_square(d);
}

int dickson_invariant(const Matrix& g) {
  Matrix s = g + Matrix::identity(g.field(), g.rows());
  return static_cast<int>(s.rank() % 2);
}

bool in_omega(const FormSpace& V, const Matrix& g) {
  if (!V.has_quadratic()) throw PreconditionError("in_omega: space is not orthogonal");
  if (!V.preserves(g)) return false;
  if (V.field().p() == 2) return dickson_invariant(g) == 0;
  return g.det() == 1 && spinor_norm_is_square(V, g);
}

}  // namespace mindim

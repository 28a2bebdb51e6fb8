#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mindim/permcore.hpp"

namespace mindim {

// GF(q) for q = p^f <= 2^16 with discrete-log (Zech) tables.
// An element is stored as its code: 0 for zero and k+1 for alpha^k, where
// alpha is a root of the shipped primitive polynomial. Codes therefore order
// elements by discrete-log index with 0 first.
class Field {
 public:
  using Elt = std::uint32_t;

  // Field for q, using the primitive polynomial table in the data directory.
  // Instances are cached and live for the whole process.
  static const Field& get(std::uint32_t q);
  // coefficients low to high, monic, of degree f
  Field(std::uint32_t p, std::uint32_t f, const std::vector<std::uint32_t>& poly);

  std::uint32_t p() const { return p_; }
  std::uint32_t f() const { return f_; }
  std::uint32_t q() const { return q_; }
  Elt zero() const { return 0; }
  Elt one() const { return 1; }
  // alpha
  Elt primitive() const { return q_ == 2 ? 1 : 2; }

  Elt add(Elt a, Elt b) const {
    if (a == 0) return b;
    if (b == 0) return a;
    std::uint32_t d = b >= a ? b - a : b + (q_ - 1) - a;
    std::int32_t z = zech_[d];
    if (z < 0) return 0;
    std::uint32_t k = (a - 1) + static_cast<std::uint32_t>(z);
    return (k >= q_ - 1 ? k - (q_ - 1) : k) + 1;
  }
  Elt neg(Elt a) const {
    if (a == 0) return 0;
    std::uint32_t k = (a - 1) + neg_one_log_;
    return (k >= q_ - 1 ? k - (q_ - 1) : k) + 1;
  }
  Elt sub(Elt a, Elt b) const { return add(a, neg(b)); }
  Elt mul(Elt a, Elt b) const {
    if (a == 0 || b == 0) return 0;
    std::uint32_t k = (a - 1) + (b - 1);
    return (k >= q_ - 1 ? k - (q_ - 1) : k) + 1;
  }
  Elt inv(Elt a) const;
  Elt div(Elt a, Elt b) const { return mul(a, inv(b)); }
  Elt pow(Elt a, std::int64_t e) const;

  // Image of an integer in the prime subfield.
  Elt from_int(std::int64_t n) const;
  // Coefficient vector of the element in the polynomial basis, read as a base-p number.
  std::uint32_t to_vector_code(Elt a) const { return a == 0 ? 0 : exp_vec_[a - 1]; }
  Elt from_vector_code(std::uint32_t v) const { return v == 0 ? 0 : vec_log_[v] + 1; }
  std::uint32_t log(Elt a) const;
  bool is_square(Elt a) const;
  Elt frobenius(Elt a) const { return pow(a, p_); }
  // Absolute trace to the prime field, as an integer in [0, p).
  std::uint32_t absolute_trace(Elt a) const;
  std::string to_string(Elt a) const;

 private:
  std::uint32_t p_, f_, q_;
  std::uint32_t neg_one_log_;
  std::vector<std::uint32_t> exp_vec_;
  std::vector<std::uint32_t> vec_log_;
  std::vector<std::int32_t> zech_;
};

using Elt = Field::Elt;
using Vec = std::vector<Elt>;

// Dense matrix over a Field. Matrices act on row vectors: v -> v M.
class Matrix {
 public:
  Matrix() = default;
  Matrix(const Field& field, std::size_t rows, std::size_t cols);
  static Matrix identity(const Field& field, std::size_t n);
  static Matrix from_rows(const Field& field, const std::vector<Vec>& rows);
  // Integer entries reduced into the prime subfield.
  static Matrix from_ints(const Field& field, const std::vector<std::vector<std::int64_t>>& rows);

  const Field& field() const { return *field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Elt at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  Elt& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  Vec row(std::size_t i) const;
  const std::vector<Elt>& data() const { return a_; }

  Matrix operator*(const Matrix& other) const;
  Matrix operator+(const Matrix& other) const;
  Matrix operator-(const Matrix& other) const;
  Matrix scaled(Elt c) const;
  Matrix transpose() const;
  // Throws InputError when singular.
  Matrix inverse() const;
  Elt det() const;
  std::size_t rank() const;
  bool is_zero() const;
  bool is_identity() const;
  // Reduced row echelon form with zero rows removed.
  Matrix rref() const;
  // Rows spanning {x : x M = 0}.
  Matrix left_kernel() const;
  // Rows spanning {x : M x^T = 0}, i.e. the vectors orthogonal to every row under the dot product.
  Matrix right_kernel() const;
  Vec apply(const Vec& v) const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

 private:
  const Field* field_ = nullptr;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Elt> a_;
};

struct MatrixHash {
  std::size_t operator()(const Matrix& m) const noexcept;
};

Elt dot(const Field& field, const Vec& u, const Vec& v);

enum class FormKind { Symplectic, Symmetric, Quadratic };

// A vector space with a form and labelled standard basis vectors.
// For Quadratic, Q(v) = sum_{i<=j} c_ij v_i v_j from the upper-triangular
// matrix c, and the bilinear form is its polarization. For Symmetric (odd
// characteristic) Q(v) = B(v, v) / 2.
class FormSpace {
 public:
  static std::shared_ptr<const FormSpace> symplectic(const Field& field, const Matrix& gram,
                                                     std::vector<std::string> labels);
  static std::shared_ptr<const FormSpace> symmetric(const Field& field, const Matrix& gram,
                                                    std::vector<std::string> labels);
  static std::shared_ptr<const FormSpace> quadratic(const Field& field, const Matrix& upper,
                                                    std::vector<std::string> labels);

  const Field& field() const { return *field_; }
  std::size_t dim() const { return gram_.rows(); }
  FormKind kind() const { return kind_; }
  bool has_quadratic() const { return kind_ != FormKind::Symplectic; }
  const Matrix& gram() const { return gram_; }
  const Matrix& quadratic_matrix() const { return upper_; }
  const std::vector<std::string>& labels() const { return labels_; }

  Elt bilinear(const Vec& u, const Vec& v) const;
  Elt quad(const Vec& v) const;
  // Parses a signed sum of basis labels such as "e1+f2" or "f1-x".
  Vec vector(const std::string& expr) const;
  // True iff g preserves the form (and Q when present).
  bool preserves(const Matrix& g) const;

 private:
  FormSpace(const Field& field, FormKind kind, Matrix gram, Matrix upper,
            std::vector<std::string> labels);
  const Field* field_;
  FormKind kind_;
  Matrix gram_;
  Matrix upper_;
  std::vector<std::string> labels_;
};

// A subspace stored by its canonical reduced row echelon basis.
class Subspace {
 public:
  Subspace(std::shared_ptr<const FormSpace> ambient, const std::vector<Vec>& spanning);
  static Subspace span(std::shared_ptr<const FormSpace> ambient,
                       const std::vector<std::string>& vectors);
  static Subspace zero(std::shared_ptr<const FormSpace> ambient);
  static Subspace whole(std::shared_ptr<const FormSpace> ambient);

  const FormSpace& ambient() const { return *ambient_; }
  std::shared_ptr<const FormSpace> ambient_ptr() const { return ambient_; }
  std::size_t dim() const { return basis_.rows(); }
  const Matrix& basis() const { return basis_; }
  std::vector<Vec> basis_vectors() const;
  bool contains(const Vec& v) const;
  Subspace image(const Matrix& g) const;

  friend bool operator==(const Subspace& a, const Subspace& b);

 private:
  std::shared_ptr<const FormSpace> ambient_;
  Matrix basis_;
};

// Subspace calculus; all throw InputError when the ambients differ.
Subspace sum(const Subspace& a, const Subspace& b);
Subspace intersection(const Subspace& a, const Subspace& b);
Subspace perp(const Subspace& u);
Subspace radical(const Subspace& u);
bool is_nondegenerate(const Subspace& u);
// +1 or -1 for a nondegenerate even-dimensional subspace of an orthogonal space.
int type_sign(const Subspace& u);

// Linear equations sum_j rows[i][j] x_j = rhs[i].
struct LinearSystem {
  std::size_t unknowns = 0;
  std::vector<Vec> rows;
  Vec rhs;
};

struct SolutionSpace {
  bool consistent = true;
  Vec particular;
  std::vector<Vec> basis;
  std::size_t dimension() const { return basis.size(); }
};

SolutionSpace solve_linear(const Field& field, const LinearSystem& system);

// Homogeneous constraints on the entries of an unknown n x n matrix g.
class MatrixConstraints {
 public:
  MatrixConstraints(const Field& field, std::size_t n) : field_(&field), n_(n) {}
  // Requires from * g to lie in `to`.
  void maps_into(const Subspace& from, const Subspace& to);
  void stabilizes(const Subspace& u) { maps_into(u, u); }
  const LinearSystem& system() const { return system_; }
  std::size_t n() const { return n_; }
  SolutionSpace solve() const;

 private:
  const Field* field_;
  std::size_t n_;
  LinearSystem system_{0, {}, {}};
  bool initialized_ = false;
};

// Visits every n x n matrix of a solution space. Throws ResourceError if
// q^dimension exceeds limits().max_enumeration.
void enumerate_matrices(const Field& field, std::size_t n, const SolutionSpace& space,
                        const std::function<void(const Matrix&)>& visit);

// Index of a vector in the lexicographic order of F_q^n by element codes.
std::uint64_t vector_code(const Field& field, const Vec& v);
Vec vector_from_code(const Field& field, std::size_t n, std::uint64_t code);

// Permutation action on nonzero row vectors; point = vector_code - 1.
// Throws ResourceError if q^n - 1 exceeds limits().max_degree and InputError on singular generators.
GeneratedGroup matrix_to_perm(const std::vector<Matrix>& generators, const Field& field);
Perm matrix_to_perm(const Matrix& m);

// Spinor norm class of g in SO(V) for odd q: true iff the Wall form on
// V(g - 1) has square discriminant.
bool spinor_norm_is_square(const FormSpace& space, const Matrix& g);
// rank(I + g) mod 2, for q even.
int dickson_invariant(const Matrix& g);
// Membership in Omega for an isometry g of an orthogonal space.
bool in_omega(const FormSpace& space, const Matrix& g);

// Data directory: $MINDIM_DATA if set, else the compiled-in default.
std::string data_dir();

}  // namespace mindim

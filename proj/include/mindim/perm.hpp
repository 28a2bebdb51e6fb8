#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace mindim {

using Point = std::uint32_t;

// A permutation of {0, ..., degree-1} stored as its image array.
// Products act on the right: (p * q)[x] = q[p[x]], i.e. apply p first.
class Perm {
 public:
  Perm() = default;
  explicit Perm(std::size_t degree);
  // Throws InputError unless `images` is a bijection of {0, ..., n-1}.
  explicit Perm(std::vector<Point> images);

  // Builds a permutation from disjoint cycles; unmentioned points are fixed.
  static Perm from_cycles(std::size_t degree,
                          std::initializer_list<std::initializer_list<Point>> cycles);
  // Parses "(0 1 2)(3 4)" style cycle notation; "()" is the identity.
  static Perm parse_cycles(std::size_t degree, const std::string& text);

  std::size_t degree() const { return images_.size(); }
  Point operator[](Point x) const { return images_[x]; }
  const std::vector<Point>& images() const { return images_; }

  Perm operator*(const Perm& other) const;
  Perm inverse() const;
  // this^-1 * x * this
  Perm conjugate_by(const Perm& g) const;
  Perm pow(std::int64_t e) const;

  bool is_identity() const;
  std::uint64_t order() const;
  // Lengths of the nontrivial cycles, sorted ascending.
  std::vector<std::size_t> cycle_type() const;
  std::size_t fixed_points() const;
  std::string to_cycle_string() const;

  friend bool operator==(const Perm&, const Perm&) = default;
  friend auto operator<=>(const Perm& a, const Perm& b) { return a.images_ <=> b.images_; }

 private:
  std::vector<Point> images_;
};

struct PermHash {
  std::size_t operator()(const Perm& p) const noexcept;
};

}  // namespace mindim

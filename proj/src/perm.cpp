#include "mindim/perm.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mindim/errors.hpp"

namespace mindim {

Perm::Perm(std::size_t degree) : images_(degree) {
  std::iota(images_.begin(), images_.end(), Point{0});
}

Perm::Perm(std::vector<Point> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (Point x : images_) {
    if (x >= images_.size() || seen[x])
      throw InputError("permutation image list is not a bijection");
    seen[x] = 1;
  }
}

Perm Perm::from_cycles(std::size_t degree,
                       std::initializer_list<std::initializer_list<Point>> cycles) {
  std::vector<Point> img(degree);
  std::iota(img.begin(), img.end(), Point{0});
  for (const auto& cyc : cycles) {
    std::vector<Point> c(cyc);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] >= degree) throw InputError("cycle point out of range");
      img[c[i]] = c[(i + 1) % c.size()];
    }
  }
  return Perm(std::move(img));
}

Perm Perm::parse_cycles(std::size_t degree, const std::string& text) {
  std::vector<Point> img(degree);
  std::iota(img.begin(), img.end(), Point{0});
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ') {
      ++i;
      continue;
    }
    if (text[i] != '(') throw InputError("bad cycle notation: " + text);
    auto close = text.find(')', i);
    if (close == std::string::npos) throw InputError("unterminated cycle: " + text);
    std::string body = text.substr(i + 1, close - i - 1);
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream in(body);
    std::vector<Point> c;
    long long v;
    while (in >> v) {
      if (v < 0 || static_cast<std::size_t>(v) >= degree)
        throw InputError("cycle point out of range: " + text);
      c.push_back(static_cast<Point>(v));
    }
    for (std::size_t k = 0; k < c.size(); ++k) img[c[k]] = c[(k + 1) % c.size()];
    i = close + 1;
  }
  return Perm(std::move(img));
}

Perm Perm::operator*(const Perm& other) const {
  if (other.degree() != degree()) throw InputError("degree mismatch in product");
  Perm r;
  r.images_.resize(images_.size());
  for (std::size_t x = 0; x < images_.size(); ++x) r.images_[x] = other.images_[images_[x]];
  return r;
}

Perm Perm::inverse() const {
  Perm r;
  r.images_.resize(images_.size());
  for (std::size_t x = 0; x < images_.size(); ++x) r.images_[images_[x]] = static_cast<Point>(x);
  return r;
}

Perm Perm::conjugate_by(const Perm& g) const {
  // g^-1 x g maps g[a] to g[x[a]]
  Perm r;
  r.images_.resize(images_.size());
  for (std::size_t a = 0; a < images_.size(); ++a) r.images_[g.images_[a]] = g.images_[images_[a]];
  return r;
}

Perm Perm::pow(std::int64_t e) const {
  Perm base = e < 0 ? inverse() : *this;
  std::uint64_t n = e < 0 ? static_cast<std::uint64_t>(-e) : static_cast<std::uint64_t>(e);
  Perm result(degree());
  while (n) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

bool Perm::is_identity() const {
  for (std::size_t x = 0; x < images_.size(); ++x)
    if (images_[x] != x) return false;
  return true;
}

std::vector<std::size_t> Perm::cycle_type() const {
  std::vector<std::size_t> lengths;
  std::vector<char> seen(images_.size(), 0);
  for (std::size_t x = 0; x < images_.size(); ++x) {
    if (seen[x]) continue;
    std::size_t len = 0;
    for (Point y = static_cast<Point>(x); !seen[y]; y = images_[y]) {
      seen[y] = 1;
      ++len;
    }
    if (len > 1) lengths.push_back(len);
  }
  std::sort(lengths.begin(), lengths.end());
  return lengths;
}

std::uint64_t Perm::order() const {
  std::uint64_t ord = 1;
  for (std::size_t len : cycle_type()) {
    std::uint64_t g = std::gcd(ord, static_cast<std::uint64_t>(len));
    std::uint64_t next = ord / g * len;
    if (next / len != ord / g) throw ResourceError("element order overflows 64 bits");
    ord = next;
  }
  return ord;
}

std::size_t Perm::fixed_points() const {
  std::size_t n = 0;
  for (std::size_t x = 0; x < images_.size(); ++x) n += images_[x] == x;
  return n;
}

std::string Perm::to_cycle_string() const {
  std::ostringstream out;
  std::vector<char> seen(images_.size(), 0);
  for (std::size_t x = 0; x < images_.size(); ++x) {
    if (seen[x] || images_[x] == x) continue;
    out << '(';
    bool first = true;
    for (Point y = static_cast<Point>(x); !seen[y]; y = images_[y]) {
      seen[y] = 1;
      if (!first) out << ' ';
      out << y;
      first = false;
    }
    out << ')';
  }
  std::string s = out.str();
  return s.empty() ? "()" : s;
}

std::size_t PermHash::operator()(const Perm& p) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (Point x : p.images()) {
    h ^= x;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace mindim

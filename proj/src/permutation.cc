#include "atlas/permutation.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "atlas/errors.hpp"

namespace atlas {

Permutation::Permutation(std::size_t degree) : images_(degree) {
  std::iota(images_.begin(), images_.end(), Point{0});
}

Permutation Permutation::from_images(std::vector<Point> images) {
  std::vector<bool> seen(images.size(), false);
  for (Point x : images) {
    if (x >= images.size() || seen[x])
      throw ParseError("image list is not a bijection");
    seen[x] = true;
  }
  Permutation p;
  p.images_ = std::move(images);
  return p;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i) return false;
  return true;
}

Permutation Permutation::inverse() const {
  Permutation r(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) r.images_[images_[i]] = static_cast<Point>(i);
  return r;
}

Permutation Permutation::pow(std::int64_t exponent) const {
  Permutation base = exponent < 0 ? inverse() : *this;
  std::uint64_t e = exponent < 0 ? static_cast<std::uint64_t>(-exponent) : static_cast<std::uint64_t>(exponent);
  Permutation result(images_.size());
  while (e) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

std::uint64_t Permutation::order() const {
  std::vector<bool> seen(images_.size(), false);
  std::uint64_t result = 1;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (seen[i]) continue;
    std::uint64_t len = 0;
    for (Point j = static_cast<Point>(i); !seen[j]; j = images_[j]) {
      seen[j] = true;
      ++len;
    }
    result = std::lcm(result, len);
  }
  return result;
}

Permutation Permutation::conjugate_by(const Permutation& g) const {
  // g^-1 * p * g maps g[x] -> g[p[x]].
  Permutation r(images_.size());
  for (std::size_t x = 0; x < images_.size(); ++x) r.images_[g.images_[x]] = g.images_[images_[x]];
  return r;
}

Point Permutation::first_moved_point() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i) return static_cast<Point>(i);
  return static_cast<Point>(images_.size());
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.degree() != b.degree()) throw Error("degree mismatch in permutation product");
  Permutation r;
  r.images_.resize(a.images_.size());
  for (std::size_t i = 0; i < a.images_.size(); ++i) r.images_[i] = b.images_[a.images_[i]];
  return r;
}

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
                                   text_[pos_] == '\n'))
      ++pos_;
  }
  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  Point number() {
    skip_space();
    Point value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail("expected a point index");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("malformed permutation '" + std::string(text_) + "' at offset " + std::to_string(pos_) +
                     ": " + what);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Permutation parse_permutation(std::string_view text, std::size_t degree) {
  if (degree == 0) throw ParseError("permutation degree must be positive");
  Scanner in(text);
  if (in.done()) in.fail("empty text");

  if (in.consume('[')) {
    std::vector<Point> images;
    if (!in.consume(']')) {
      do {
        images.push_back(in.number());
      } while (in.consume(','));
      in.expect(']');
    }
    if (!in.done()) in.fail("trailing characters");
    if (images.size() != degree)
      throw ParseError("image list has " + std::to_string(images.size()) + " entries, expected " +
                       std::to_string(degree));
    return Permutation::from_images(std::move(images));
  }

  std::vector<Point> images(degree);
  std::iota(images.begin(), images.end(), Point{0});
  std::vector<bool> used(degree, false);
  while (!in.done()) {
    in.expect('(');
    std::vector<Point> cycle;
    if (!in.consume(')')) {
      do {
        Point p = in.number();
        if (p >= degree)
          throw ParseError("point " + std::to_string(p) + " out of range for degree " + std::to_string(degree));
        if (used[p]) throw ParseError("point " + std::to_string(p) + " repeated in cycle notation");
        used[p] = true;
        cycle.push_back(p);
      } while (in.consume(','));
      in.expect(')');
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) images[cycle[i]] = cycle[(i + 1) % cycle.size()];
  }
  return Permutation::from_images(std::move(images));
}

std::string to_cycle_string(const Permutation& p) {
  std::string out;
  std::vector<bool> seen(p.degree(), false);
  for (Point i = 0; i < p.degree(); ++i) {
    if (seen[i] || p[i] == i) continue;
    out += '(';
    for (Point j = i; !seen[j]; j = p[j]) {
      if (j != i) out += ',';
      out += std::to_string(j);
      seen[j] = true;
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

std::ostream& operator<<(std::ostream& os, const Permutation& p) { return os << to_cycle_string(p); }

std::vector<Permutation> parse_generator_file(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t degree = 0;
  std::vector<Permutation> gens;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (degree == 0) {
      std::istringstream header(line);
      std::string word;
      if (!(header >> word >> degree) || word != "degree" || degree == 0)
        throw ParseError("group file must start with 'degree <n>'");
      continue;
    }
    gens.push_back(parse_permutation(line, degree));
  }
  if (degree == 0) throw ParseError("group file must start with 'degree <n>'");
  if (gens.empty()) gens.emplace_back(degree);
  return gens;
}

std::string format_generator_file(std::span<const Permutation> gens) {
  std::string out = "degree " + std::to_string(gens.empty() ? 0 : gens.front().degree()) + "\n";
  for (const auto& g : gens) out += to_cycle_string(g) + "\n";
  return out;
}

}  // namespace atlas

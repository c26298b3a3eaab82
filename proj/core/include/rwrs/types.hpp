#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace rwrs {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A point of the lattice Z^2.
struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend constexpr auto operator<=>(const Point&, const Point&) = default;

  constexpr Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  constexpr Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  constexpr Point operator-() const { return {-x, -y}; }
  constexpr Point& operator+=(Point o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

/// Sup-norm, the norm used for every |p| <= R window in this library.
constexpr std::int64_t sup_norm(Point p) {
  const std::int64_t ax = p.x < 0 ? -p.x : p.x;
  const std::int64_t ay = p.y < 0 ? -p.y : p.y;
  return ax > ay ? ax : ay;
}

/// Half-open index range [begin, begin + length).
struct Interval {
  std::size_t begin = 0;
  std::size_t length = 0;

  constexpr std::size_t end() const { return begin + length; }
  constexpr bool empty() const { return length == 0; }
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

/// Raised when an input violates a documented precondition. `code` is a stable
/// short identifier (e.g. "degenerate", "not_commuting") used by the CLI.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string code, const std::string& message)
      : std::invalid_argument(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace rwrs

template <>
struct std::hash<rwrs::Point> {
  std::size_t operator()(const rwrs::Point& p) const noexcept {
    const auto h = static_cast<std::uint64_t>(p.x) * 0x9e3779b97f4a7c15ull ^
                   (static_cast<std::uint64_t>(p.y) + 0x632be59bd9b4e019ull);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

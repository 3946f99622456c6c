// Exact rational arithmetic and the small pieces of exact linear algebra
// used by the structural analysis (rank, left nullspace, positive
// conservation vectors). Matrix entries in this domain are tiny integers,
// so 64-bit numerators and denominators are ample.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crn {

struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d);

  bool is_zero() const { return num == 0; }
  bool positive() const { return num > 0; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return Rational(-a.num, a.den); }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }
};

using RationalMatrix = std::vector<std::vector<Rational>>;

// Rank by Gaussian elimination over exact rationals.
int rational_rank(RationalMatrix m);

// Basis of the solution space of m x = 0, as columns over the x-index.
std::vector<std::vector<Rational>> rational_nullspace(RationalMatrix m);

// Finds a strictly positive rational d with d^T gamma = 0, if one exists.
// gamma is a dense integer matrix (rows = species, cols = reactions).
// Implemented as an exact phase-1 simplex on {gamma^T d = 0, d >= 1}.
std::optional<std::vector<Rational>> positive_left_nullvector(
    const std::vector<std::vector<long long>>& gamma);

}  // namespace crn

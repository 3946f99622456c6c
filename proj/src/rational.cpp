#include "crnosc/rational.hpp"

#include <numeric>

namespace crn {

Rational::Rational(long long n, long long d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num = n;
  den = d;
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}
Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
}
Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num * b.num, a.den * b.den);
}
Rational operator/(const Rational& a, const Rational& b) {
  if (b.num == 0) throw std::domain_error("rational division by zero");
  return Rational(a.num * b.den, a.den * b.num);
}
bool operator<(const Rational& a, const Rational& b) {
  return a.num * b.den < b.num * a.den;
}

int rational_rank(RationalMatrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  int rank = 0;
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < cols && pivot_row < rows; ++col) {
    std::size_t sel = pivot_row;
    while (sel < rows && m[sel][col].is_zero()) ++sel;
    if (sel == rows) continue;
    std::swap(m[sel], m[pivot_row]);
    for (std::size_t r = pivot_row + 1; r < rows; ++r) {
      if (m[r][col].is_zero()) continue;
      Rational f = m[r][col] / m[pivot_row][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] = m[r][c] - f * m[pivot_row][c];
    }
    ++pivot_row;
    ++rank;
  }
  return rank;
}

std::vector<std::vector<Rational>> rational_nullspace(RationalMatrix m) {
  if (m.empty()) return {};
  const std::size_t rows = m.size(), cols = m[0].size();
  std::vector<int> pivot_col_of_row;
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < cols && pivot_row < rows; ++col) {
    std::size_t sel = pivot_row;
    while (sel < rows && m[sel][col].is_zero()) ++sel;
    if (sel == rows) continue;
    std::swap(m[sel], m[pivot_row]);
    Rational p = m[pivot_row][col];
    for (std::size_t c = 0; c < cols; ++c) m[pivot_row][c] = m[pivot_row][c] / p;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pivot_row || m[r][col].is_zero()) continue;
      Rational f = m[r][col];
      for (std::size_t c = 0; c < cols; ++c) m[r][c] = m[r][c] - f * m[pivot_row][c];
    }
    pivot_col_of_row.push_back(static_cast<int>(col));
    ++pivot_row;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col_of_row) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free_col] = Rational(1);
    for (std::size_t r = 0; r < pivot_col_of_row.size(); ++r)
      v[pivot_col_of_row[r]] = -m[r][free_col];
    basis.push_back(std::move(v));
  }
  return basis;
}

namespace {

// Exact phase-1 simplex with Bland's rule on: A u = b, u >= 0 feasibility.
std::optional<std::vector<Rational>> simplex_feasible(RationalMatrix a,
                                                      std::vector<Rational> b) {
  const std::size_t m = a.size();
  const std::size_t n = m ? a[0].size() : 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (b[r] < Rational(0)) {
      b[r] = -b[r];
      for (auto& e : a[r]) e = -e;
    }
  }
  // Tableau columns: n structural + m artificial + rhs.
  const std::size_t total = n + m;
  RationalMatrix t(m, std::vector<Rational>(total + 1, Rational(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) t[r][c] = a[r][c];
    t[r][n + r] = Rational(1);
    t[r][total] = b[r];
    basis[r] = n + r;
  }
  // Objective: minimize sum of artificials; reduced costs for z - c.
  std::vector<Rational> obj(total + 1, Rational(0));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c <= total; ++c) obj[c] = obj[c] + t[r][c];
  for (std::size_t c = n; c < total; ++c) obj[c] = obj[c] - Rational(1);

  while (true) {
    std::size_t enter = total;
    for (std::size_t c = 0; c < total; ++c) {
      if (obj[c] > Rational(0)) {
        enter = c;
        break;  // Bland: smallest index
      }
    }
    if (enter == total) break;
    std::size_t leave = m;
    Rational best_ratio;
    for (std::size_t r = 0; r < m; ++r) {
      if (!(t[r][enter] > Rational(0))) continue;
      Rational ratio = t[r][total] / t[r][enter];
      if (leave == m || ratio < best_ratio ||
          (ratio == best_ratio && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave == m) return std::nullopt;  // unbounded: cannot happen in phase 1
    Rational p = t[leave][enter];
    for (std::size_t c = 0; c <= total; ++c) t[leave][c] = t[leave][c] / p;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == leave || t[r][enter].is_zero()) continue;
      Rational f = t[r][enter];
      for (std::size_t c = 0; c <= total; ++c) t[r][c] = t[r][c] - f * t[leave][c];
    }
    Rational fo = obj[enter];
    for (std::size_t c = 0; c <= total; ++c) obj[c] = obj[c] - fo * t[leave][c];
    basis[leave] = enter;
  }
  if (!obj[total].is_zero()) return std::nullopt;  // infeasible
  std::vector<Rational> u(n, Rational(0));
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) u[basis[r]] = t[r][total];
  return u;
}

}  // namespace

std::optional<std::vector<Rational>> positive_left_nullvector(
    const std::vector<std::vector<long long>>& gamma) {
  if (gamma.empty()) return std::nullopt;
  const std::size_t n = gamma.size();
  const std::size_t e = gamma[0].size();
  // d = 1 + u with u >= 0:  gamma^T u = -gamma^T 1.
  RationalMatrix a(e, std::vector<Rational>(n));
  std::vector<Rational> b(e, Rational(0));
  for (std::size_t j = 0; j < e; ++j) {
    long long s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[j][i] = Rational(gamma[i][j]);
      s += gamma[i][j];
    }
    b[j] = Rational(-s);
  }
  auto u = simplex_feasible(std::move(a), std::move(b));
  if (!u) return std::nullopt;
  std::vector<Rational> d(n);
  Rational smallest;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = Rational(1) + (*u)[i];
    if (i == 0 || d[i] < smallest) smallest = d[i];
  }
  for (auto& x : d) x = x / smallest;  // smallest entry becomes 1
  return d;
}

}  // namespace crn

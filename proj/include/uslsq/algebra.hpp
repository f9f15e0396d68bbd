#pragma once

// Finite fields GF(q) and the Bose construction of q-1 mutually orthogonal
// Latin squares of order q.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uslsq/error.hpp"

namespace uslsq {

// Returns (p, m) with q = p^m, or nullopt when q is not a prime power.
inline std::optional<std::pair<int, int>> prime_power(int q) {
  if (q < 2) return std::nullopt;
  int p = 0;
  for (int d = 2; d * d <= q; ++d) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return std::make_pair(q, 1);
  int m = 0;
  while (q % p == 0) {
    q /= p;
    ++m;
  }
  if (q != 1) return std::nullopt;
  return std::make_pair(p, m);
}

/// GF(q) with elements encoded as 0..q-1. An element is the polynomial
/// sum c_i x^i over GF(p) with code sum c_i p^i; multiplication reduces by a
/// fixed monic irreducible polynomial of degree m.
class FiniteField {
 public:
  explicit FiniteField(int q) : q_(q) {
    auto pm = prime_power(q);
    if (!pm) throw Error("finite field order " + std::to_string(q) + " is not a prime power");
    p_ = pm->first;
    m_ = pm->second;
    modulus_ = least_irreducible(p_, m_);
    add_.resize(static_cast<std::size_t>(q) * q);
    mul_.resize(static_cast<std::size_t>(q) * q);
    for (int a = 0; a < q; ++a) {
      for (int b = 0; b < q; ++b) {
        add_[idx(a, b)] = static_cast<std::uint16_t>(encode(poly_add(decode(a), decode(b))));
        mul_[idx(a, b)] = static_cast<std::uint16_t>(encode(poly_mulmod(decode(a), decode(b))));
      }
    }
  }

  int order() const { return q_; }
  int characteristic() const { return p_; }
  int degree() const { return m_; }
  // Coefficients c_0..c_m of the reduction polynomial (c_m == 1).
  const std::vector<int>& modulus() const { return modulus_; }

  int add(int a, int b) const { return add_[idx(a, b)]; }
  int mul(int a, int b) const { return mul_[idx(a, b)]; }
  int neg(int a) const {
    for (int b = 0; b < q_; ++b)
      if (add(a, b) == 0) return b;
    return 0;  // unreachable for a field
  }
  int inv(int a) const {
    if (a == 0) throw Error("zero has no multiplicative inverse");
    for (int b = 1; b < q_; ++b)
      if (mul(a, b) == 1) return b;
    return 0;
  }

  bool operator==(const FiniteField& o) const {
    return q_ == o.q_ && add_ == o.add_ && mul_ == o.mul_;
  }

 private:
  using Poly = std::vector<int>;  // low degree first, fixed length m

  std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a) * q_ + b; }

  Poly decode(int code) const {
    Poly c(m_, 0);
    for (int i = 0; i < m_; ++i) {
      c[i] = code % p_;
      code /= p_;
    }
    return c;
  }
  int encode(const Poly& c) const {
    int code = 0;
    for (int i = m_ - 1; i >= 0; --i) code = code * p_ + c[i];
    return code;
  }
  Poly poly_add(const Poly& a, const Poly& b) const {
    Poly c(m_);
    for (int i = 0; i < m_; ++i) c[i] = (a[i] + b[i]) % p_;
    return c;
  }
  Poly poly_mulmod(const Poly& a, const Poly& b) const {
    std::vector<int> prod(2 * m_ - 1 > 0 ? 2 * m_ - 1 : 1, 0);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p_;
    // modulus is monic: x^m = -(c_0 + ... + c_{m-1} x^{m-1})
    for (int d = static_cast<int>(prod.size()) - 1; d >= m_; --d) {
      int lead = prod[d];
      if (lead == 0) continue;
      for (int i = 0; i <= m_; ++i) {
        int& t = prod[d - m_ + i];
        t = ((t - lead * modulus_[i]) % p_ + p_) % p_;
      }
    }
    Poly c(m_);
    for (int i = 0; i < m_; ++i) c[i] = prod[i];
    return c;
  }

  // Remainder of a modulo b over GF(p); b monic. Both low degree first.
  static std::vector<int> poly_rem(std::vector<int> a, const std::vector<int>& b, int p) {
    int db = static_cast<int>(b.size()) - 1;
    for (int d = static_cast<int>(a.size()) - 1; d >= db; --d) {
      int lead = a[d] % p;
      if (lead == 0) continue;
      for (int i = 0; i <= db; ++i) {
        int& t = a[d - db + i];
        t = ((t - lead * b[i]) % p + p) % p;
      }
    }
    a.resize(db > 0 ? db : 0);
    return a;
  }

  // Monic polynomial of degree deg whose lower coefficients have code `code`
  // (c_{deg-1} most significant).
  static std::vector<int> monic(int p, int deg, long code) {
    std::vector<int> c(deg + 1, 0);
    for (int i = 0; i < deg; ++i) {
      c[i] = static_cast<int>(code % p);
      code /= p;
    }
    c[deg] = 1;
    return c;
  }

  static bool irreducible(const std::vector<int>& f, int p) {
    int m = static_cast<int>(f.size()) - 1;
    for (int d = 1; 2 * d <= m; ++d) {
      long count = 1;
      for (int i = 0; i < d; ++i) count *= p;
      for (long code = 0; code < count; ++code) {
        auto g = monic(p, d, code);
        auto r = poly_rem(f, g, p);
        bool zero = true;
        for (int x : r) zero = zero && x == 0;
        if (zero) return false;
      }
    }
    return true;
  }

  // Least monic irreducible polynomial of degree m, polynomials ordered by
  // coefficient sequence from x^{m-1} down to x^0.
  static std::vector<int> least_irreducible(int p, int m) {
    if (m == 1) return {0, 1};
    long count = 1;
    for (int i = 0; i < m; ++i) count *= p;
    for (long code = 0; code < count; ++code) {
      auto f = monic(p, m, code);
      if (irreducible(f, p)) return f;
    }
    throw Error("no irreducible polynomial found");  // unreachable
  }

  int q_ = 0, p_ = 0, m_ = 0;
  std::vector<int> modulus_;
  std::vector<std::uint16_t> add_, mul_;
};

inline FiniteField finite_field(int q) {
  if (q < 2) throw Error("finite field order " + std::to_string(q) + " must be at least 2");
  return FiniteField(q);
}

/// Latin square of order n over symbols 0..n-1.
class LatinSquare {
 public:
  static LatinSquare from_grid(std::vector<std::vector<int>> grid) {
    int n = static_cast<int>(grid.size());
    if (n < 1) throw ValidationError("Latin square must have order at least 1");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(grid[i].size()) != n)
        throw ValidationError("Latin square row " + std::to_string(i + 1) + " has wrong length");
    }
    for (int i = 0; i < n; ++i) {
      std::vector<bool> row(n, false), col(n, false);
      for (int j = 0; j < n; ++j) {
        int a = grid[i][j], b = grid[j][i];
        if (a < 0 || a >= n || b < 0 || b >= n)
          throw ValidationError("Latin square symbol out of range 0.." + std::to_string(n - 1));
        if (row[a]) throw ValidationError("symbol " + std::to_string(a) + " repeated in row " + std::to_string(i + 1));
        if (col[b]) throw ValidationError("symbol " + std::to_string(b) + " repeated in column " + std::to_string(i + 1));
        row[a] = col[b] = true;
      }
    }
    return LatinSquare(std::move(grid));
  }

  int order() const { return static_cast<int>(grid_.size()); }
  int at(int i, int j) const { return grid_[i][j]; }
  const std::vector<std::vector<int>>& grid() const { return grid_; }

  bool operator==(const LatinSquare&) const = default;

 private:
  explicit LatinSquare(std::vector<std::vector<int>> g) : grid_(std::move(g)) {}
  std::vector<std::vector<int>> grid_;
};

inline bool are_orthogonal(const LatinSquare& a, const LatinSquare& b) {
  if (a.order() != b.order())
    throw Error("orthogonality test needs equal orders, got " + std::to_string(a.order()) + " and " +
                std::to_string(b.order()));
  int n = a.order();
  std::vector<bool> seen(static_cast<std::size_t>(n) * n, false);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto key = static_cast<std::size_t>(a.at(i, j)) * n + b.at(i, j);
      if (seen[key]) return false;
      seen[key] = true;
    }
  }
  return true;
}

/// The q-1 squares L_a(i, j) = a*i + j over GF(q), a = 1..q-1.
inline std::vector<LatinSquare> bose_mols(int q) {
  if (q < 3) throw Error("Bose construction needs q >= 3, got " + std::to_string(q));
  FiniteField f = finite_field(q);
  std::vector<LatinSquare> out;
  out.reserve(q - 1);
  for (int a = 1; a < q; ++a) {
    std::vector<std::vector<int>> g(q, std::vector<int>(q));
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) g[i][j] = f.add(f.mul(a, i), j);
    out.push_back(LatinSquare::from_grid(std::move(g)));
  }
  return out;
}

}  // namespace uslsq

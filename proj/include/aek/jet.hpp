#pragma once

// Truncated multivariate Taylor polynomials ("jets").
//
// A Jet<S, Vars> of order k stores every coefficient of total degree <= k in a
// dense table ordered by total degree, and within one degree by descending
// exponent of the first variable. For two variables the degree-d block is
// x^d, x^(d-1) y, ..., y^d, so block entry i is the coefficient f_{d-i,i}.
// All arithmetic truncates at the common order; operands of different orders
// are rejected.

#include "aek/scalar.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace aek {

template <int Vars>
struct MonomialTable {
  using Exponents = std::array<int, Vars>;

  int order = 0;
  std::vector<Exponents> exponents;
  std::vector<int> degree;
  /// First index of each total degree; size order + 2.
  std::vector<std::size_t> degree_start;
  /// Dense lookup over [0, order]^Vars, -1 above the order.
  std::vector<int> lookup;

  std::size_t dense_key(const Exponents& e) const;
  int index_of(const Exponents& e) const;  // -1 when degree exceeds order
};

template <int Vars>
const MonomialTable<Vars>& monomial_table(int order);

template <int Vars>
constexpr int max_jet_order() {
  return Vars == 1 ? 64 : Vars == 2 ? 40 : 10;
}

template <ScalarType S, int Vars>
class Jet {
 public:
  using Scalar = S;
  using Exponents = std::array<int, Vars>;
  using Point = Eigen::Matrix<S, Vars, 1>;
  static constexpr int kVars = Vars;

  explicit Jet(int order = Vars == 4 ? 4 : 5);

  static Jet constant(const S& value, int order);
  static Jet variable(int var, int order);
  static Jet monomial(const Exponents& e, const S& value, int order);

  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const S> coefficients() const noexcept { return coeffs_; }

  const S& operator[](std::size_t index) const { return coeffs_[index]; }
  S& operator[](std::size_t index) { return coeffs_[index]; }

  const Exponents& exponents(std::size_t index) const { return table().exponents[index]; }
  int degree(std::size_t index) const { return table().degree[index]; }

  /// Coefficient of x^e; zero for monomials above the order.
  S coeff(const Exponents& e) const;
  /// Throws std::out_of_range above the order.
  void set_coeff(const Exponents& e, const S& value);

  S constant_term() const { return coeffs_.front(); }

  /// Re-truncates (or zero-extends) to another order.
  Jet with_order(int new_order) const;
  Jet homogeneous_part(int degree) const;
  /// Keeps degrees <= d at the same order.
  Jet up_to_degree(int d) const;

  bool is_zero() const;
  S max_abs_coeff() const;

  template <ScalarType T>
  Jet<T, Vars> cast() const {
    Jet<T, Vars> out(order_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] = scalar_cast<T>(coeffs_[i]);
    return out;
  }

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const S& factor);

  friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
  friend Jet operator*(Jet lhs, const S& factor) { return lhs *= factor; }
  friend Jet operator*(const S& factor, Jet rhs) { return rhs *= factor; }
  friend Jet operator-(Jet p) { return p *= S(-1); }
  friend Jet operator*(const Jet& lhs, const Jet& rhs) { return multiply(lhs, rhs); }

  friend bool operator==(const Jet& lhs, const Jet& rhs) {
    return lhs.order_ == rhs.order_ && lhs.coeffs_ == rhs.coeffs_;
  }

  const MonomialTable<Vars>& table() const { return monomial_table<Vars>(order_); }

 private:
  static Jet multiply(const Jet& lhs, const Jet& rhs);
  void require_same_order(const Jet& rhs, const char* op) const;

  int order_;
  std::vector<S> coeffs_;
};

template <ScalarType S>
using Jet1 = Jet<S, 1>;
template <ScalarType S>
using Jet2 = Jet<S, 2>;
template <ScalarType S>
using Jet4 = Jet<S, 4>;

/// Formal partial derivative; the order is kept so the result composes with
/// its source.
template <ScalarType S, int Vars>
Jet<S, Vars> partial(const Jet<S, Vars>& p, int var);

/// p(subs[0], ..., subs[N-1]) truncated at the substitutions' order. Each
/// substitution must have zero constant term.
template <ScalarType S, int N, int M>
Jet<S, M> compose(const Jet<S, N>& p, const std::array<Jet<S, M>, N>& subs);

/// Re-expands p around `center`: result(h) = p(center + h), truncated.
template <ScalarType S, int Vars>
Jet<S, Vars> taylor_shift(const Jet<S, Vars>& p, const typename Jet<S, Vars>::Point& center);

template <ScalarType S, int Vars>
S evaluate(const Jet<S, Vars>& p, const typename Jet<S, Vars>::Point& point);

/// sum_k coeffs[k] * h^k for h with zero constant term.
template <ScalarType S, int Vars>
Jet<S, Vars> series_compose(std::span<const S> coeffs, const Jet<S, Vars>& h);

/// Jets that are affine-linear in X = (x, y, z): cx*x + cy*y + cz*z + c1.
template <ScalarType S>
struct LinearFormJet {
  Jet4<S> cx, cy, cz, c1;

  explicit LinearFormJet(int order = 4) : cx(order), cy(order), cz(order), c1(order) {}
  LinearFormJet(Jet4<S> x, Jet4<S> y, Jet4<S> z, Jet4<S> one)
      : cx(std::move(x)), cy(std::move(y)), cz(std::move(z)), c1(std::move(one)) {}

  int order() const { return cx.order(); }

  template <class F>
  LinearFormJet map(F&& f) const {
    return {f(cx), f(cy), f(cz), f(c1)};
  }

  LinearFormJet homogeneous_part(int degree) const {
    return map([degree](const Jet4<S>& j) { return j.homogeneous_part(degree); });
  }
  LinearFormJet up_to_degree(int degree) const {
    return map([degree](const Jet4<S>& j) { return j.up_to_degree(degree); });
  }

  bool is_zero() const { return cx.is_zero() && cy.is_zero() && cz.is_zero() && c1.is_zero(); }

  S max_abs_coeff() const {
    S m = cx.max_abs_coeff();
    for (const auto* j : {&cy, &cz, &c1}) {
      const S v = j->max_abs_coeff();
      if (v > m) m = v;
    }
    return m;
  }

  friend LinearFormJet operator+(const LinearFormJet& a, const LinearFormJet& b) {
    return {a.cx + b.cx, a.cy + b.cy, a.cz + b.cz, a.c1 + b.c1};
  }
  friend LinearFormJet operator-(const LinearFormJet& a, const LinearFormJet& b) {
    return {a.cx - b.cx, a.cy - b.cy, a.cz - b.cz, a.c1 - b.c1};
  }
  friend LinearFormJet operator*(const S& s, const LinearFormJet& a) {
    return a.map([&s](const Jet4<S>& j) { return s * j; });
  }
  friend LinearFormJet operator*(const Jet4<S>& s, const LinearFormJet& a) {
    return a.map([&s](const Jet4<S>& j) { return s * j; });
  }
  friend bool operator==(const LinearFormJet&, const LinearFormJet&) = default;
};

#define AEK_JET_EXTERN(S, V) extern template class Jet<S, V>;
AEK_JET_EXTERN(double, 1)
AEK_JET_EXTERN(double, 2)
AEK_JET_EXTERN(double, 4)
AEK_JET_EXTERN(Rational, 1)
AEK_JET_EXTERN(Rational, 2)
AEK_JET_EXTERN(Rational, 4)
#undef AEK_JET_EXTERN

}  // namespace aek

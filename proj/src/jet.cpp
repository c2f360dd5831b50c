#include "aek/jet.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace aek {

namespace {

template <int Vars>
void append_degree(int remaining, int var, std::array<int, Vars>& current,
                   std::vector<std::array<int, Vars>>& out) {
  if (var == Vars - 1) {
    current[var] = remaining;
    out.push_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[var] = e;
    append_degree<Vars>(remaining - e, var + 1, current, out);
  }
}

template <int Vars>
MonomialTable<Vars> build_table(int order) {
  MonomialTable<Vars> t;
  t.order = order;
  std::size_t dense = 1;
  for (int v = 0; v < Vars; ++v) dense *= static_cast<std::size_t>(order + 1);
  t.lookup.assign(dense, -1);
  for (int d = 0; d <= order; ++d) {
    t.degree_start.push_back(t.exponents.size());
    std::array<int, Vars> current{};
    append_degree<Vars>(d, 0, current, t.exponents);
  }
  t.degree_start.push_back(t.exponents.size());
  for (std::size_t i = 0; i < t.exponents.size(); ++i) {
    int deg = 0;
    for (int e : t.exponents[i]) deg += e;
    t.degree.push_back(deg);
    t.lookup[t.dense_key(t.exponents[i])] = static_cast<int>(i);
  }
  return t;
}

template <int Vars>
struct TableCache {
  std::vector<MonomialTable<Vars>> tables;
  TableCache() {
    for (int k = 0; k <= max_jet_order<Vars>(); ++k) tables.push_back(build_table<Vars>(k));
  }
};

template <ScalarType S>
S binomial(int n, int k) {
  S r(1);
  for (int i = 1; i <= k; ++i) r = r * S(n - k + i) / S(i);
  return r;
}

template <ScalarType S>
S power(const S& base, int e) {
  S r(1);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

template <int Vars>
std::size_t MonomialTable<Vars>::dense_key(const Exponents& e) const {
  std::size_t key = 0;
  std::size_t stride = 1;
  for (int v = 0; v < Vars; ++v) {
    key += static_cast<std::size_t>(e[v]) * stride;
    stride *= static_cast<std::size_t>(order + 1);
  }
  return key;
}

template <int Vars>
int MonomialTable<Vars>::index_of(const Exponents& e) const {
  int deg = 0;
  for (int x : e) {
    if (x < 0) throw std::out_of_range("negative exponent");
    deg += x;
  }
  if (deg > order) return -1;
  return lookup[dense_key(e)];
}

template <int Vars>
const MonomialTable<Vars>& monomial_table(int order) {
  static const TableCache<Vars> cache;
  if (order < 0 || order > max_jet_order<Vars>())
    throw std::out_of_range("jet order " + std::to_string(order) + " not supported for " +
                            std::to_string(Vars) + " variables");
  return cache.tables[static_cast<std::size_t>(order)];
}

template const MonomialTable<1>& monomial_table<1>(int);
template const MonomialTable<2>& monomial_table<2>(int);
template const MonomialTable<4>& monomial_table<4>(int);

// ---------------------------------------------------------------------------
// Jet members

template <ScalarType S, int Vars>
Jet<S, Vars>::Jet(int order) : order_(order), coeffs_(monomial_table<Vars>(order).exponents.size(), S(0)) {}

template <ScalarType S, int Vars>
Jet<S, Vars> Jet<S, Vars>::constant(const S& value, int order) {
  Jet j(order);
  j.coeffs_[0] = value;
  return j;
}

template <ScalarType S, int Vars>
Jet<S, Vars> Jet<S, Vars>::variable(int var, int order) {
  if (var < 0 || var >= Vars) throw std::out_of_range("unknown jet variable " + std::to_string(var));
  Exponents e{};
  e[var] = 1;
  return monomial(e, S(1), order);
}

template <ScalarType S, int Vars>
Jet<S, Vars> Jet<S, Vars>::monomial(const Exponents& e, const S& value, int order) {
  Jet j(order);
  j.set_coeff(e, value);
  return j;
}

template <ScalarType S, int Vars>
S Jet<S, Vars>::coeff(const Exponents& e) const {
  const int idx = table().index_of(e);
  return idx < 0 ? S(0) : coeffs_[static_cast<std::size_t>(idx)];
}

template <ScalarType S, int Vars>
void Jet<S, Vars>::set_coeff(const Exponents& e, const S& value) {
  const int idx = table().index_of(e);
  if (idx < 0) throw std::out_of_range("monomial exceeds jet order");
  coeffs_[static_cast<std::size_t>(idx)] = value;
}

template <ScalarType S, int Vars>
Jet<S, Vars> Jet<S, Vars>::with_order(int new_order) const {
  Jet out(new_order);
  const auto& src = table();
  const std::size_t n = std::min(src.degree_start.back(), out.table().degree_start.back());
  // Both tables share the same prefix ordering.
  for (std::size_t i = 0; i < n; ++i) out.coeffs_[i] = coeffs_[i];
  return out;
}

template <ScalarType S, int Vars>
Jet<S, Vars> Jet<S, Vars>::homogeneous_part(int degree) const {
  Jet out(order_);
  if (degree < 0 || degree > order_) return out;
  const auto& t = table();
  for (std::size_t i = t.degree_start[degree]; i < t.degree_start[degree + 1]; ++i) out.coeffs_[i] = coeffs_[i];
  return out;
}

template <ScalarType S, int Vars>
Jet<S, Vars> Jet<S, Vars>::up_to_degree(int d) const {
  Jet out(order_);
  if (d < 0) return out;
  const auto& t = table();
  const std::size_t end = t.degree_start[std::min(d, order_) + 1];
  for (std::size_t i = 0; i < end; ++i) out.coeffs_[i] = coeffs_[i];
  return out;
}

template <ScalarType S, int Vars>
bool Jet<S, Vars>::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const S& c) { return aek::is_zero(c); });
}

template <ScalarType S, int Vars>
S Jet<S, Vars>::max_abs_coeff() const {
  S m(0);
  for (const auto& c : coeffs_) {
    const S a = abs_value(c);
    if (a > m) m = a;
  }
  return m;
}

template <ScalarType S, int Vars>
void Jet<S, Vars>::require_same_order(const Jet& rhs, const char* op) const {
  if (order_ != rhs.order_)
    throw std::invalid_argument(std::string("jet ") + op + ": order mismatch (" + std::to_string(order_) +
                                " vs " + std::to_string(rhs.order_) + ")");
}

template <ScalarType S, int Vars>
Jet<S, Vars>& Jet<S, Vars>::operator+=(const Jet& rhs) {
  require_same_order(rhs, "add");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

template <ScalarType S, int Vars>
Jet<S, Vars>& Jet<S, Vars>::operator-=(const Jet& rhs) {
  require_same_order(rhs, "sub");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

template <ScalarType S, int Vars>
Jet<S, Vars>& Jet<S, Vars>::operator*=(const S& factor) {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

template <ScalarType S, int Vars>
Jet<S, Vars> Jet<S, Vars>::multiply(const Jet& lhs, const Jet& rhs) {
  lhs.require_same_order(rhs, "mul");
  const auto& t = lhs.table();
  const int order = lhs.order_;
  std::vector<std::size_t> keys(t.exponents.size());
  for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = t.dense_key(t.exponents[i]);

  Jet out(order);
  for (std::size_t i = 0; i < lhs.coeffs_.size(); ++i) {
    if (aek::is_zero(lhs.coeffs_[i])) continue;
    const std::size_t end = t.degree_start[order - t.degree[i] + 1];
    for (std::size_t j = 0; j < end; ++j) {
      if (aek::is_zero(rhs.coeffs_[j])) continue;
      const int idx = t.lookup[keys[i] + keys[j]];
      out.coeffs_[static_cast<std::size_t>(idx)] += lhs.coeffs_[i] * rhs.coeffs_[j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

template <ScalarType S, int Vars>
Jet<S, Vars> partial(const Jet<S, Vars>& p, int var) {
  if (var < 0 || var >= Vars) throw std::out_of_range("unknown jet variable " + std::to_string(var));
  Jet<S, Vars> out(p.order());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto e = p.exponents(i);
    if (e[var] == 0 || aek::is_zero(p[i])) continue;
    const int k = e[var];
    e[var] -= 1;
    out.set_coeff(e, out.coeff(e) + S(k) * p[i]);
  }
  return out;
}

template <ScalarType S, int N, int M>
Jet<S, M> compose(const Jet<S, N>& p, const std::array<Jet<S, M>, N>& subs) {
  const int order = subs[0].order();
  for (const auto& s : subs) {
    if (s.order() != order) throw std::invalid_argument("compose: substitutions differ in order");
    if (!aek::is_zero(s.constant_term()))
      throw std::invalid_argument("compose: substitution has nonzero constant term");
  }
  const int max_power = std::min(order, p.order());
  std::array<std::vector<Jet<S, M>>, N> powers;
  for (int v = 0; v < N; ++v) {
    powers[v].push_back(Jet<S, M>::constant(S(1), order));
    for (int e = 1; e <= max_power; ++e) powers[v].push_back(powers[v].back() * subs[v]);
  }
  Jet<S, M> out(order);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (aek::is_zero(p[i]) || p.degree(i) > order) continue;
    const auto& e = p.exponents(i);
    Jet<S, M> term = Jet<S, M>::constant(p[i], order);
    for (int v = 0; v < N; ++v)
      if (e[v] > 0) term = term * powers[v][e[v]];
    out += term;
  }
  return out;
}

template <ScalarType S, int Vars>
Jet<S, Vars> taylor_shift(const Jet<S, Vars>& p, const typename Jet<S, Vars>::Point& center) {
  Jet<S, Vars> out(p.order());
  const int order = p.order();
  std::array<std::vector<S>, Vars> center_powers;
  for (int v = 0; v < Vars; ++v) {
    center_powers[v].push_back(S(1));
    for (int e = 1; e <= order; ++e) center_powers[v].push_back(center_powers[v].back() * center(v));
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (aek::is_zero(p[i])) continue;
    const auto& e = p.exponents(i);
    // Odometer over all k <= e componentwise.
    std::array<int, Vars> k{};
    while (true) {
      S term = p[i];
      for (int v = 0; v < Vars; ++v) term *= binomial<S>(e[v], k[v]) * center_powers[v][e[v] - k[v]];
      if (!aek::is_zero(term)) out.set_coeff(k, out.coeff(k) + term);
      int v = 0;
      while (v < Vars && k[v] == e[v]) {
        k[v] = 0;
        ++v;
      }
      if (v == Vars) break;
      ++k[v];
    }
  }
  return out;
}

template <ScalarType S, int Vars>
S evaluate(const Jet<S, Vars>& p, const typename Jet<S, Vars>::Point& point) {
  std::array<std::vector<S>, Vars> powers;
  for (int v = 0; v < Vars; ++v) {
    powers[v].push_back(S(1));
    for (int e = 1; e <= p.order(); ++e) powers[v].push_back(powers[v].back() * point(v));
  }
  S sum(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (aek::is_zero(p[i])) continue;
    S term = p[i];
    const auto& e = p.exponents(i);
    for (int v = 0; v < Vars; ++v) term *= powers[v][e[v]];
    sum += term;
  }
  return sum;
}

template <ScalarType S, int Vars>
Jet<S, Vars> series_compose(std::span<const S> coeffs, const Jet<S, Vars>& h) {
  if (!aek::is_zero(h.constant_term()))
    throw std::invalid_argument("series_compose: inner jet has nonzero constant term");
  const int order = h.order();
  Jet<S, Vars> out(order);
  if (coeffs.empty()) return out;
  const std::size_t n = std::min<std::size_t>(coeffs.size() - 1, static_cast<std::size_t>(order));
  out = Jet<S, Vars>::constant(coeffs[n], order);
  for (std::size_t k = n; k-- > 0;) out = out * h + Jet<S, Vars>::constant(coeffs[k], order);
  return out;
}

// ---------------------------------------------------------------------------
// Instantiations

#define AEK_JET_INSTANTIATE(S, V)                                                                   \
  template class Jet<S, V>;                                                                         \
  template Jet<S, V> partial<S, V>(const Jet<S, V>&, int);                                          \
  template Jet<S, V> taylor_shift<S, V>(const Jet<S, V>&, const typename Jet<S, V>::Point&);        \
  template S evaluate<S, V>(const Jet<S, V>&, const typename Jet<S, V>::Point&);                    \
  template Jet<S, V> series_compose<S, V>(std::span<const S>, const Jet<S, V>&);                    \
  template Jet<S, V> compose<S, 1, V>(const Jet<S, 1>&, const std::array<Jet<S, V>, 1>&);           \
  template Jet<S, V> compose<S, 2, V>(const Jet<S, 2>&, const std::array<Jet<S, V>, 2>&);           \
  template Jet<S, V> compose<S, 4, V>(const Jet<S, 4>&, const std::array<Jet<S, V>, 4>&);

AEK_JET_INSTANTIATE(double, 1)
AEK_JET_INSTANTIATE(double, 2)
AEK_JET_INSTANTIATE(double, 4)
AEK_JET_INSTANTIATE(Rational, 1)
AEK_JET_INSTANTIATE(Rational, 2)
AEK_JET_INSTANTIATE(Rational, 4)

#undef AEK_JET_INSTANTIATE

}  // namespace aek

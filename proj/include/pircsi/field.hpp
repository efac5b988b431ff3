#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pircsi {

/// Order of the prime field the messages live over. q is a runtime value so
/// the auditor can sweep fields.
struct PrimeOrder {
  std::uint32_t q = 2;

  PrimeOrder() = default;
  explicit PrimeOrder(std::uint32_t order) : q(order) {
    if (q < 2) throw std::invalid_argument("PrimeOrder: q must be >= 2");
    for (std::uint64_t d = 2; d * d <= q; ++d)
      if (q % d == 0)
        throw std::invalid_argument("PrimeOrder: " + std::to_string(q) + " is not prime");
  }

  friend bool operator==(const PrimeOrder& a, const PrimeOrder& b) { return a.q == b.q; }
};

/// Element of F_q, value reduced mod q. Carries its field so mixed-field
/// arithmetic is caught at the call site.
struct FieldElement {
  std::uint32_t value = 0;
  std::uint32_t q = 2;

  FieldElement() = default;
  FieldElement(std::uint64_t v, PrimeOrder order)
      : value(static_cast<std::uint32_t>(v % order.q)), q(order.q) {}

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.value == b.value && a.q == b.q;
  }
};

namespace detail {
inline void require_same_field(std::uint32_t qa, std::uint32_t qb, const char* op) {
  if (qa != qb)
    throw std::invalid_argument(std::string(op) + ": mismatched field orders " +
                                std::to_string(qa) + " vs " + std::to_string(qb));
}
}  // namespace detail

inline FieldElement fe_add(FieldElement a, FieldElement b) {
  detail::require_same_field(a.q, b.q, "fe_add");
  FieldElement r;
  r.q = a.q;
  r.value = (a.value + b.value) % a.q;
  return r;
}

inline FieldElement fe_sub(FieldElement a, FieldElement b) {
  detail::require_same_field(a.q, b.q, "fe_sub");
  FieldElement r;
  r.q = a.q;
  r.value = (a.value + a.q - b.value) % a.q;
  return r;
}

inline FieldElement fe_neg(FieldElement a) {
  FieldElement r;
  r.q = a.q;
  r.value = (a.q - a.value) % a.q;
  return r;
}

inline FieldElement fe_mul(FieldElement a, FieldElement b) {
  detail::require_same_field(a.q, b.q, "fe_mul");
  FieldElement r;
  r.q = a.q;
  r.value = static_cast<std::uint32_t>(
      (static_cast<std::uint64_t>(a.value) * b.value) % a.q);
  return r;
}

/// Multiplicative inverse by extended Euclid; a must be nonzero.
inline FieldElement fe_inv(FieldElement a) {
  if (a.value == 0) throw std::invalid_argument("fe_inv: no inverse of 0");
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = a.q, new_r = a.value;
  while (new_r != 0) {
    std::int64_t quot = r / new_r;
    std::int64_t tmp = t - quot * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - quot * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += a.q;
  FieldElement out;
  out.q = a.q;
  out.value = static_cast<std::uint32_t>(t);
  return out;
}

/// Fixed-length vector of F_q symbols; one database message, side-information
/// combination or super-message. Symbols stored raw, the field once.
struct SymbolVector {
  std::uint32_t q = 2;
  std::vector<std::uint32_t> symbols;

  SymbolVector() = default;
  SymbolVector(PrimeOrder order, std::size_t len) : q(order.q), symbols(len, 0) {}
  SymbolVector(PrimeOrder order, std::vector<std::uint32_t> syms)
      : q(order.q), symbols(std::move(syms)) {
    for (auto& s : symbols)
      if (s >= q) throw std::invalid_argument("SymbolVector: symbol not reduced mod q");
  }

  std::size_t size() const { return symbols.size(); }

  FieldElement at(std::size_t i) const {
    FieldElement e;
    e.q = q;
    e.value = symbols.at(i);
    return e;
  }

  friend bool operator==(const SymbolVector& a, const SymbolVector& b) {
    return a.q == b.q && a.symbols == b.symbols;
  }
};

namespace detail {
inline void require_compatible(const SymbolVector& x, const SymbolVector& y, const char* op) {
  require_same_field(x.q, y.q, op);
  if (x.symbols.size() != y.symbols.size())
    throw std::invalid_argument(std::string(op) + ": length mismatch");
}
}  // namespace detail

/// c*x + y componentwise. c == 0 is legal here (it just returns y); the
/// side-information constructors reject zero coefficients upstream.
inline SymbolVector vec_axpy(FieldElement c, const SymbolVector& x, const SymbolVector& y) {
  detail::require_same_field(c.q, x.q, "vec_axpy");
  detail::require_compatible(x, y, "vec_axpy");
  SymbolVector out = y;
  for (std::size_t i = 0; i < x.symbols.size(); ++i) {
    std::uint64_t v = static_cast<std::uint64_t>(c.value) * x.symbols[i] + y.symbols[i];
    out.symbols[i] = static_cast<std::uint32_t>(v % x.q);
  }
  return out;
}

inline SymbolVector vec_add(const SymbolVector& x, const SymbolVector& y) {
  detail::require_compatible(x, y, "vec_add");
  SymbolVector out = x;
  for (std::size_t i = 0; i < x.symbols.size(); ++i)
    out.symbols[i] = (x.symbols[i] + y.symbols[i]) % x.q;
  return out;
}

inline SymbolVector vec_sub(const SymbolVector& x, const SymbolVector& y) {
  detail::require_compatible(x, y, "vec_sub");
  SymbolVector out = x;
  for (std::size_t i = 0; i < x.symbols.size(); ++i)
    out.symbols[i] = (x.symbols[i] + x.q - y.symbols[i]) % x.q;
  return out;
}

inline SymbolVector vec_scale(FieldElement c, const SymbolVector& x) {
  detail::require_same_field(c.q, x.q, "vec_scale");
  SymbolVector out = x;
  for (std::size_t i = 0; i < x.symbols.size(); ++i)
    out.symbols[i] = static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(c.value) * x.symbols[i]) % x.q);
  return out;
}

}  // namespace pircsi

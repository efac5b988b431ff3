#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pircsi/rational.hpp"

namespace pircsi {

inline BigInt binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// n! / (parts[0]! * parts[1]! * ...) with sum(parts) == n.
inline BigInt multinomial(const std::vector<int>& parts) {
  int n = 0;
  for (int p : parts) {
    if (p < 0) return 0;
    n += p;
  }
  BigInt r = factorial(n);
  for (int p : parts) r /= factorial(p);
  return r;
}

/// Visits every k-subset of `pool` (ascending order within a subset),
/// in lexicographic order.
template <typename T>
void for_each_subset(const std::vector<T>& pool, int k,
                     const std::function<void(const std::vector<T>&)>& fn) {
  if (k < 0 || static_cast<std::size_t>(k) > pool.size()) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  std::vector<T> subset(k);
  const int n = static_cast<int>(pool.size());
  for (;;) {
    for (int i = 0; i < k; ++i) subset[i] = pool[idx[i]];
    fn(subset);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Visits every length-`len` tuple with entries from [1, q-1]: the coefficient
/// sequences of the side-information model. Odometer order.
inline void for_each_coeff_seq(std::uint32_t q, int len,
                               const std::function<void(const std::vector<std::uint32_t>&)>& fn) {
  if (q < 2) throw std::invalid_argument("for_each_coeff_seq: q < 2");
  std::vector<std::uint32_t> seq(len, 1);
  for (;;) {
    fn(seq);
    int i = len - 1;
    while (i >= 0 && seq[i] == q - 1) {
      seq[i] = 1;
      --i;
    }
    if (i < 0) break;
    ++seq[i];
  }
}

}  // namespace pircsi

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pircsi::testing {

/// Fisher-Yates choice values that shuffle [0..n) into `perm`
/// (i.e. out[k] == perm[k] after the canonical descending-index shuffle).
inline std::vector<std::uint64_t> fy_script_for_perm(const std::vector<int>& perm) {
  const std::size_t n = perm.size();
  std::vector<int> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<int>(i);
  std::vector<std::uint64_t> script;
  for (std::size_t i = n; i > 1; --i) {
    auto it = std::find(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i), perm[i - 1]);
    if (it == a.begin() + static_cast<std::ptrdiff_t>(i))
      throw std::logic_error("fy_script_for_perm: not a permutation");
    std::size_t j = static_cast<std::size_t>(it - a.begin());
    script.push_back(j);
    std::swap(a[i - 1], a[j]);
  }
  return script;
}

/// Choice values that shuffle the identity slot order so a group listed as
/// `pre` is emitted as `sent`.
inline std::vector<std::uint64_t> fy_script_for_order(const std::vector<int>& pre,
                                                      const std::vector<int>& sent) {
  std::vector<int> perm(sent.size());
  for (std::size_t k = 0; k < sent.size(); ++k) {
    auto it = std::find(pre.begin(), pre.end(), sent[k]);
    if (it == pre.end()) throw std::logic_error("fy_script_for_order: element missing");
    perm[k] = static_cast<int>(it - pre.begin());
  }
  return fy_script_for_perm(perm);
}

inline void append(std::vector<std::uint64_t>& script, const std::vector<std::uint64_t>& tail) {
  script.insert(script.end(), tail.begin(), tail.end());
}

}  // namespace pircsi::testing

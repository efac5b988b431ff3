#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pircsi/rational.hpp"

namespace pircsi {

/// One linear equation sum_j coeffs[j] * x_j = rhs.
struct LinearEquation {
  std::vector<Rational> coeffs;
  Rational rhs;
};

struct LinearSystemError : std::runtime_error {
  explicit LinearSystemError(const std::string& what) : std::runtime_error(what) {}
};

/// Exact Gauss-Jordan elimination over the rationals. Requires the system to
/// pin a unique solution; throws LinearSystemError (with the offending system
/// rendered into the message) on inconsistency or rank deficiency.
inline std::vector<Rational> solve_unique(std::vector<LinearEquation> eqs,
                                          std::size_t n_vars,
                                          const std::string& context) {
  auto render = [&]() {
    std::string s = context + " [";
    for (const auto& e : eqs) {
      s += "(";
      for (std::size_t j = 0; j < e.coeffs.size(); ++j) {
        if (j) s += ",";
        s += e.coeffs[j].str();
      }
      s += "|" + e.rhs.str() + ") ";
    }
    s += "]";
    return s;
  };

  for (auto& e : eqs)
    if (e.coeffs.size() != n_vars)
      throw LinearSystemError("linear system: ragged equation in " + render());

  std::size_t row = 0;
  std::vector<std::size_t> pivot_of_col(n_vars, SIZE_MAX);
  for (std::size_t col = 0; col < n_vars && row < eqs.size(); ++col) {
    std::size_t pivot = SIZE_MAX;
    for (std::size_t r = row; r < eqs.size(); ++r) {
      if (!eqs[r].coeffs[col].is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot == SIZE_MAX) continue;
    std::swap(eqs[row], eqs[pivot]);
    Rational inv = eqs[row].coeffs[col].inverse();
    for (auto& c : eqs[row].coeffs) c *= inv;
    eqs[row].rhs *= inv;
    for (std::size_t r = 0; r < eqs.size(); ++r) {
      if (r == row || eqs[r].coeffs[col].is_zero()) continue;
      Rational f = eqs[r].coeffs[col];
      for (std::size_t j = 0; j < n_vars; ++j)
        eqs[r].coeffs[j] -= f * eqs[row].coeffs[j];
      eqs[r].rhs -= f * eqs[row].rhs;
    }
    pivot_of_col[col] = row;
    ++row;
  }

  // Inconsistent: a zero row with nonzero rhs.
  for (std::size_t r = row; r < eqs.size(); ++r)
    if (!eqs[r].rhs.is_zero())
      throw LinearSystemError("linear system infeasible: " + render());

  if (row < n_vars)
    throw LinearSystemError("linear system underdetermined (rank " +
                            std::to_string(row) + " of " + std::to_string(n_vars) +
                            "): " + render());

  std::vector<Rational> x(n_vars);
  for (std::size_t col = 0; col < n_vars; ++col) x[col] = eqs[pivot_of_col[col]].rhs;
  return x;
}

}  // namespace pircsi

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sdspec/grid.hpp"

namespace sdspec {

using cplx = std::complex<double>;

/// Samples of a function on a Grid, row-major.
template <typename T>
struct Field {
  Grid grid;
  std::vector<T> values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(g.size(), T{}) {}
  Field(const Grid& g, std::vector<T> v) : grid(g), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }

  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](const T& z) {
      if constexpr (std::is_same_v<T, double>) {
        return std::isfinite(z);
      } else {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
      }
    });
  }

  Field& operator*=(T c) {
    for (auto& z : values) z *= c;
    return *this;
  }
};

using ComplexField = Field<cplx>;
using RealField = Field<double>;

template <typename T>
Field<T> operator*(T c, Field<T> f) {
  f *= c;
  return f;
}

inline ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid);
  std::copy(f.values.begin(), f.values.end(), out.values.begin());
  return out;
}

}  // namespace sdspec

#include "sdspec/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sdspec/error.hpp"

namespace sdspec {

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

Grid make_grid(int dim, int points_per_axis, double extent) {
  if (dim < 1 || dim > 3) {
    throw Error(Errc::invalid_dimension, "grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (points_per_axis < 8 || !is_power_of_two(points_per_axis)) {
    throw Error(Errc::invalid_points,
                "points per axis must be a power of two >= 8, got " + std::to_string(points_per_axis));
  }
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw Error(Errc::invalid_extent, "grid extent must be positive and finite");
  }

  Grid g;
  g.dim_ = dim;
  g.points_ = points_per_axis;
  g.extent_ = extent;
  g.spacing_ = extent / points_per_axis;
  g.cell_volume_ = std::pow(g.spacing_, dim);
  g.size_ = 1;
  for (int d = 0; d < dim; ++d) g.size_ *= static_cast<std::size_t>(points_per_axis);

  const double dk = 2.0 * std::numbers::pi / extent;
  std::vector<double> k(points_per_axis), x(points_per_axis);
  for (int i = 0; i < points_per_axis; ++i) {
    k[i] = dk * g.signed_index(i);
    x[i] = g.spacing_ * i;
  }
  std::vector<double> ksq(g.size_);
  for (std::size_t flat = 0; flat < g.size_; ++flat) {
    const auto idx = g.unflatten(flat);
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += k[idx[d]] * k[idx[d]];
    ksq[flat] = s;
  }
  g.axis_k_ = std::make_shared<const std::vector<double>>(std::move(k));
  g.axis_x_ = std::make_shared<const std::vector<double>>(std::move(x));
  g.k_sq_ = std::make_shared<const std::vector<double>>(std::move(ksq));
  return g;
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % points_);
    flat /= points_;
  }
  return idx;
}

std::size_t Grid::flatten(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int d = 0; d < dim_; ++d) flat = flat * points_ + static_cast<std::size_t>(idx[d]);
  return flat;
}

std::array<double, 3> Grid::wavevector(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) xi[d] = (*axis_k_)[idx[d]];
  return xi;
}

std::array<double, 3> Grid::position(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) x[d] = (*axis_x_)[idx[d]];
  return x;
}

}  // namespace sdspec

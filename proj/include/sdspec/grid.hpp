#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace sdspec {

/// Periodic box [0, extent)^dim sampled with `points` nodes per axis.
///
/// Samples are stored row-major: the last axis varies fastest. Axis
/// wavenumbers follow the usual DFT ordering 0, 1, ..., n/2-1, -n/2, ..., -1
/// scaled by 2*pi/extent.
class Grid {
 public:
  Grid() = default;

  int dim() const { return dim_; }
  int points() const { return points_; }
  double extent() const { return extent_; }
  double spacing() const { return spacing_; }
  double cell_volume() const { return cell_volume_; }
  std::size_t size() const { return size_; }

  const std::vector<double>& wavenumbers() const { return *axis_k_; }
  const std::vector<double>& coordinates() const { return *axis_x_; }

  /// |xi|^2 at every flat spectral index.
  const std::vector<double>& wavenumber_sq() const { return *k_sq_; }

  /// Multi-index of a flat index; unused trailing entries are zero.
  std::array<int, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<int, 3>& idx) const;

  /// Wavevector at a flat spectral index; unused trailing entries are zero.
  std::array<double, 3> wavevector(std::size_t flat) const;
  /// Physical position of a flat sample index.
  std::array<double, 3> position(std::size_t flat) const;

  /// Symmetric integer wave index (k in xi_k = 2*pi*k/L) along one axis.
  int signed_index(int i) const { return i < points_ / 2 ? i : i - points_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.points_ == b.points_ && a.extent_ == b.extent_;
  }

 private:
  friend Grid make_grid(int dim, int points_per_axis, double extent);

  int dim_ = 0;
  int points_ = 0;
  double extent_ = 0.0;
  double spacing_ = 0.0;
  double cell_volume_ = 0.0;
  std::size_t size_ = 0;
  std::shared_ptr<const std::vector<double>> axis_k_;
  std::shared_ptr<const std::vector<double>> axis_x_;
  std::shared_ptr<const std::vector<double>> k_sq_;
};

/// Throws Error{invalid_dimension | invalid_points | invalid_extent}.
Grid make_grid(int dim, int points_per_axis, double extent);

bool is_power_of_two(long n);

}  // namespace sdspec

#include "sdspec/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "sdspec/error.hpp"

namespace sdspec {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::span<const int> shape, int sign) {
    std::vector<int> key(shape.begin(), shape.end());
    key.push_back(sign);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::size_t total = 1;
    for (int n : shape) total *= static_cast<std::size_t>(n);
    auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    fftw_plan plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), scratch, scratch,
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(std::move(key), plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::vector<int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

std::vector<int> shape_of(const Grid& g) { return std::vector<int>(g.dim(), g.points()); }

template <typename T>
double lp_norm_impl(const Field<T>& f, double p) {
  if (!(p >= 1.0)) throw Error(Errc::invalid_norm_order, "lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& z : f.values) m = std::max(m, std::abs(z));
    return m;
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& z : f.values) sum += std::norm(z);
    return std::sqrt(sum * f.grid.cell_volume());
  }
  for (const auto& z : f.values) sum += std::pow(std::abs(z), p);
  return std::pow(sum * f.grid.cell_volume(), 1.0 / p);
}

}  // namespace

void dft_inplace(std::span<cplx> data, std::span<const int> shape, int sign) {
  fftw_plan plan = plan_cache().get(shape, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

ComplexField forward_transform(const ComplexField& f) {
  ComplexField out = f;
  const auto shape = shape_of(f.grid);
  dft_inplace(out.values, shape, -1);
  return out;
}

ComplexField inverse_transform(const ComplexField& spectrum) {
  ComplexField out = spectrum;
  const auto shape = shape_of(spectrum.grid);
  dft_inplace(out.values, shape, +1);
  const double scale = 1.0 / static_cast<double>(spectrum.grid.size());
  for (auto& z : out.values) z *= scale;
  return out;
}

double spectral_l2(const ComplexField& spectrum) {
  double sum = 0.0;
  for (const auto& z : spectrum.values) sum += std::norm(z);
  // h^dim / n^dim converts the unnormalized DFT back to the physical L2 norm.
  return std::sqrt(sum * spectrum.grid.cell_volume() / static_cast<double>(spectrum.grid.size()));
}

ComplexField apply_multiplier(const ComplexField& f, const Multiplier& m) {
  ComplexField spec = forward_transform(f);
  const int dim = f.grid.dim();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto xi = f.grid.wavevector(i);
    const cplx w = m(std::span<const double>(xi.data(), dim));
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
      throw Error(Errc::non_finite_multiplier, "multiplier is not finite at a grid wavevector");
    }
    spec[i] *= w;
  }
  return inverse_transform(spec);
}

double lp_norm(const ComplexField& f, double p) { return lp_norm_impl(f, p); }
double lp_norm(const RealField& f, double p) { return lp_norm_impl(f, p); }

double sobolev_norm(const ComplexField& f, double s) {
  const ComplexField spec = forward_transform(f);
  const auto& ksq = f.grid.wavenumber_sq();
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double w = std::pow(bracket(std::sqrt(ksq[i])), 2.0 * s);
    sum += w * std::norm(spec[i]);
  }
  return std::sqrt(sum * f.grid.cell_volume() / static_cast<double>(f.grid.size()));
}

double gradient_l2(const ComplexField& f) {
  const ComplexField spec = forward_transform(f);
  const auto& ksq = f.grid.wavenumber_sq();
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) sum += ksq[i] * std::norm(spec[i]);
  return std::sqrt(sum * f.grid.cell_volume() / static_cast<double>(f.grid.size()));
}

double gradient_l2(const RealField& f) { return gradient_l2(to_complex(f)); }

void dealias_two_thirds(ComplexField& spectrum) {
  const Grid& g = spectrum.grid;
  const int cutoff = g.points() / 3;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto idx = g.unflatten(i);
    for (int d = 0; d < g.dim(); ++d) {
      if (std::abs(g.signed_index(idx[d])) > cutoff) {
        spectrum[i] = 0.0;
        break;
      }
    }
  }
}

}  // namespace sdspec

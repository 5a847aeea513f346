#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sdspec/field.hpp"

namespace sdspec {

/// In-place multi-dimensional complex DFT over a row-major block with the
/// given shape. sign = -1 is the forward (unnormalized) transform, +1 the
/// backward one (also unnormalized). Plans are cached per shape and sign
/// behind a mutex, so concurrent callers are safe.
void dft_inplace(std::span<cplx> data, std::span<const int> shape, int sign);

/// Forward DFT, unnormalized: F_k = sum_j f_j exp(-i xi_k . x_j).
ComplexField forward_transform(const ComplexField& f);
/// Inverse DFT carrying the 1/n^dim factor; exact inverse of forward_transform.
ComplexField inverse_transform(const ComplexField& spectrum);

/// Discrete L2 norm of a spectrum produced by forward_transform, normalized so
/// that it equals lp_norm(f, 2) of the physical field (Parseval).
double spectral_l2(const ComplexField& spectrum);

using Multiplier = std::function<cplx(std::span<const double> xi)>;

/// Multiplies the spectrum of f by m(xi). Throws non_finite_multiplier if m is
/// not finite at some grid wavevector.
ComplexField apply_multiplier(const ComplexField& f, const Multiplier& m);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (sum |f|^p h^dim)^(1/p), or max |f| for p = infinity. Throws for p < 1.
double lp_norm(const ComplexField& f, double p);
double lp_norm(const RealField& f, double p);

/// Bracket weight 1 + |xi|.
inline double bracket(double r) { return 1.0 + std::abs(r); }

/// ||(1+|xi|)^s f^||, normalized so s = 0 reproduces the L2 norm.
double sobolev_norm(const ComplexField& f, double s);

/// ||grad f||_2 computed spectrally.
double gradient_l2(const ComplexField& f);
double gradient_l2(const RealField& f);

/// Zeroes every mode with |k_d| > n/3 on some axis (two-thirds rule).
void dealias_two_thirds(ComplexField& spectrum);

}  // namespace sdspec

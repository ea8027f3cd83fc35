#pragma once

// Cat / squeezed-cat codewords, hybrid (polarization x squeezed-cat)
// codewords, the hybrid entangled ancilla and the single-loss decomposition.

#include <cmath>
#include <complex>
#include <cstdint>

#include <boost/math/tools/roots.hpp>

#include "hsc/state.hpp"

namespace hsc {

enum class Family { Cat, SqueezedCat, HybridCat, HybridSqueezedCat };

struct CodeParams {
  cplx alpha = 0.0;
  cplx xi = 0.0;
  int parity = +1;
  Family family = Family::HybridSqueezedCat;
};

namespace detail {

inline void check_parity(int parity) {
  if (parity != 1 && parity != -1) throw invalid_argument("parity must be +1 or -1");
}

// (1 + parity * (-1)^n) v : |alpha,xi> +- |-alpha,xi> for v = D(alpha)S(xi)|0>,
// since S(xi)|0> is even and D(-alpha) = P D(alpha) P.
inline Vec parity_part(const Vec& v, int parity) {
  Vec out = v;
  for (int n = 0; n < v.size(); ++n) out(n) = (n % 2 == 0) ? (1.0 + parity) * v(n) : (1.0 - parity) * v(n);
  return out;
}

// unnormalized |alpha,xi> +- |-alpha,xi> on the padded space 0..big
inline Vec sc_raw(cplx alpha, cplx xi, int parity, int big) {
  check_parity(parity);
  if (alpha == 0.0 && parity == -1) throw degenerate_state("odd cat at alpha = 0 is the zero vector");
  return parity_part(displaced_squeezed_raw(alpha, xi, big), parity);
}

inline FockVector crop_normalized(const Vec& v, int cutoff, const TruncationPolicy& p, const char* what) {
  double n2 = v.squaredNorm();
  if (!(n2 > 1e-300)) throw degenerate_state(std::string(what) + ": state vanishes numerically");
  double tail = tail_beyond(v, cutoff) / n2;
  check_tail(tail, p, what);
  Vec h = v.head(cutoff + 1);
  return FockVector(h / h.norm(), tail);
}

}  // namespace detail

// (|alpha,xi> + parity |-alpha,xi>) / N, normalized numerically
inline FockVector squeezed_cat_state(cplx alpha, cplx xi, int parity, int cutoff, const TruncationPolicy& p = {}) {
  if (cutoff < 1) throw invalid_argument("squeezed_cat_state: cutoff must be >= 1");
  int big = detail::padded(cutoff, p);
  return detail::crop_normalized(detail::sc_raw(alpha, xi, parity, big), cutoff, p, "squeezed_cat_state");
}

inline FockVector cat_state(cplx alpha, int parity, int cutoff, const TruncationPolicy& p = {}) {
  return squeezed_cat_state(alpha, 0.0, parity, cutoff, p);
}

// N^{+-}_{alpha,xi} = || |alpha,xi> +- |-alpha,xi> ||
inline double sc_normalization(cplx alpha, cplx xi, int parity, int cutoff, const TruncationPolicy& p = {}) {
  detail::check_parity(parity);
  int big = detail::padded(cutoff, p);
  Vec v = detail::parity_part(detail::displaced_squeezed_raw(alpha, xi, big), parity);
  return v.norm();
}

// C+ and C- at one (alpha, xi)
struct CodeBasis {
  cplx alpha, xi;
  FockVector plus, minus;
  const FockVector& operator[](int bit) const { return bit == 0 ? plus : minus; }
  int cutoff() const { return plus.cutoff(); }
};

inline CodeBasis code_basis(cplx alpha, cplx xi, int cutoff, const TruncationPolicy& p = {}) {
  return {alpha, xi, squeezed_cat_state(alpha, xi, +1, cutoff, p), squeezed_cat_state(alpha, xi, -1, cutoff, p)};
}

struct HybridQubit {
  CodeParams params;
  StateVector state;  // modes {polarization (H,V), bosonic}
};

// |0_L> = |+>|C+>, |1_L> = |->|C->
inline HybridQubit hybrid_codeword(int bit, cplx alpha, cplx xi, int cutoff, const TruncationPolicy& p = {}) {
  if (bit != 0 && bit != 1) throw invalid_argument("hybrid_codeword: bit must be 0 or 1");
  int parity = bit == 0 ? +1 : -1;
  FockVector c = squeezed_cat_state(alpha, xi, parity, cutoff, p);
  Vec pol = bit == 0 ? pol_plus() : pol_minus();
  Family fam = xi == 0.0 ? Family::HybridCat : Family::HybridSqueezedCat;
  return {{alpha, xi, parity, fam}, StateVector({2, c.dim()}, Eigen::kroneckerProduct(pol, c.amps).eval(), {"pol", "sc"})};
}

// logical a|0_L> + b|1_L>
inline StateVector hybrid_logical(cplx a, cplx b, const CodeBasis& cb) {
  Vec v = a * Eigen::kroneckerProduct(pol_plus(), cb.plus.amps).eval() +
          b * Eigen::kroneckerProduct(pol_minus(), cb.minus.amps).eval();
  return StateVector({2, cb.plus.dim()}, v, {"pol", "sc"});
}

// (|H>|alpha_f,xi> + |V>|-alpha_f,xi>) normalized
inline StateVector hybrid_entangled_state(cplx alphaF, cplx xi, int cutoff, const TruncationPolicy& p = {}) {
  int big = detail::padded(cutoff, p);
  Vec plus = detail::displaced_squeezed_raw(alphaF, xi, big);
  Vec minus = detail::displaced_squeezed_raw(-alphaF, xi, big);
  double tail = std::max(detail::tail_beyond(plus, cutoff), detail::tail_beyond(minus, cutoff));
  detail::check_tail(tail, p, "hybrid_entangled_state");
  Vec v = Eigen::kroneckerProduct(pol_h(), Vec(plus.head(cutoff + 1))).eval() +
          Eigen::kroneckerProduct(pol_v(), Vec(minus.head(cutoff + 1))).eval();
  return StateVector({2, cutoff + 1}, v / v.norm(), {"pol", "sc"});
}

struct LossDecomposition {
  cplx c;
  cplx d;  // real, >= 0
  FockVector errorComponent;
};

// a|C^{+-}> = c|C^{-+}> + d|C~^{+-}>. The annihilation is applied on the
// padded space before cropping, so the cutoff edge does not leak into d.
inline LossDecomposition loss_decomposition(cplx alpha, cplx xi, int parity, int cutoff, const TruncationPolicy& p = {}) {
  if (cutoff < 1) throw invalid_argument("loss_decomposition: cutoff must be >= 1");
  int big = detail::padded(cutoff, p);
  Vec src = detail::sc_raw(alpha, xi, parity, big);
  src /= src.norm();
  Vec other = detail::sc_raw(alpha, xi, -parity, big);
  other /= other.norm();
  detail::check_tail(detail::tail_beyond(src, cutoff), p, "loss_decomposition");
  detail::check_tail(detail::tail_beyond(other, cutoff), p, "loss_decomposition");
  Vec asrc = detail::annihilation(big) * src;
  cplx c = other.dot(asrc);
  Vec resid = asrc - c * other - src.dot(asrc) * src;
  // d from the padded residual; the cropped part only fixes the direction
  Vec r = resid.head(cutoff + 1);
  double d = resid.norm();
  LossDecomposition out{c, d, FockVector(Vec::Zero(cutoff + 1))};
  if (r.norm() > 0.0) out.errorComponent = FockVector(r / r.norm());
  return out;
}

// Mean photon number of C^{parity}_{alpha,xi}, computed on a cutoff that is
// large enough for this alpha.
inline double sc_mean_photon(double alpha, double xi, int parity, const TruncationPolicy& p = {}) {
  int n = minimal_cutoff(alpha, xi, p) + 4;
  int big = detail::padded(n, p);
  Vec v = detail::sc_raw(alpha, xi, parity, big);
  double num = 0.0;
  for (int k = 0; k < v.size(); ++k) num += k * std::norm(v(k));
  return num / v.squaredNorm();
}

// alpha >= 0 with <n>(alpha, xi) = nbar for the given parity. The cutoff is
// picked per evaluation; the result is checked to fit inside `cutoff` when
// one is given (> 0).
inline double amplitude_for_mean_photon(double nbar, double xi, int parity, int cutoff = 0,
                                        const TruncationPolicy& p = {}) {
  detail::check_parity(parity);
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw invalid_argument("nbar must be finite and non-negative");
  const double tiny = 1e-6;
  double lo = parity == 1 ? 0.0 : tiny;
  double floor = sc_mean_photon(lo, xi, parity, p);
  if (nbar < floor - 1e-12) throw infeasible_target("nbar below the alpha -> 0 floor of this code");
  double alpha = 0.0;
  if (nbar <= floor) {
    alpha = lo;
  } else {
    auto f = [&](double a) { return sc_mean_photon(a, xi, parity, p) - nbar; };
    double hi = std::sqrt(nbar) + 1.0;
    while (f(hi) < 0.0) hi *= 2.0;
    std::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-13; };
    auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    alpha = 0.5 * (r.first + r.second);
  }
  if (cutoff > 0) {
    // throws if this alpha does not fit
    (void)squeezed_cat_state(alpha, xi, parity, cutoff, p);
  }
  return alpha;
}

}  // namespace hsc

#pragma once

// Pure photon loss in Kraus form and teleportation-based loss compensation.
//
// The master equation d rho/dt = gamma (a rho a^dag - {n, rho}/2) integrates
// to the channel with transmissivity eta = exp(-gamma t):
//   E_k = sqrt((1-eta)^k / k!) eta^{n/2} a^k,
//   <n-k| E_k |n> = sqrt(C(n,k)) (1-eta)^{k/2} eta^{(n-k)/2}.
// With kMax >= cutoff the set is complete on the truncated space exactly.

#include <cmath>
#include <string>
#include <vector>

#include "hsc/bell.hpp"
#include "hsc/gates.hpp"

namespace hsc {

struct LossChannelParams {
  double eta = 1.0;
  std::vector<int> modes;  // bosonic modes the channel acts on
};

struct KrausSet {
  std::vector<DenseOperator> operators;
  double residual = 0.0;  // || sum E^dag E - I ||_max
};

inline KrausSet loss_kraus(double eta, int cutoff, int kMax = -1) {
  if (!(eta > 0.0 && eta <= 1.0)) throw invalid_argument("loss: eta must lie in (0, 1]");
  if (cutoff < 0) throw invalid_argument("loss: cutoff must be non-negative");
  if (kMax < 0) kMax = cutoff;
  const int d = cutoff + 1;
  KrausSet ks;
  int top = eta == 1.0 ? 0 : std::min(kMax, cutoff);
  for (int k = 0; k <= top; ++k) {
    Mat e = Mat::Zero(d, d);
    for (int n = k; n <= cutoff; ++n) {
      double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      double v = 0.5 * logc + 0.5 * (n - k) * std::log(eta);
      if (k > 0) v += 0.5 * k * std::log1p(-eta);
      e(n - k, n) = std::exp(v);
    }
    ks.operators.emplace_back(std::vector<int>{d}, e);
  }
  Mat sum = Mat::Zero(d, d);
  for (auto& e : ks.operators) sum += e.matrix.adjoint() * e.matrix;
  ks.residual = (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  return ks;
}

namespace detail {

// (I (x) E (x) I) rho (I (x) E (x) I)^dag for E on one mode
inline Mat conjugate_local(const Mat& rho, const std::vector<int>& dims, int mode, const Mat& e) {
  auto L = local_layout(dims, {mode});
  Mat left(rho.rows(), rho.cols());
  const long dm = dims[mode];
  Vec x(dm);
  for (long c = 0; c < rho.cols(); ++c)
    for (long b : L.bases) {
      for (long k = 0; k < dm; ++k) x(k) = rho(b + L.offs[k], c);
      Vec y = e * x;
      for (long k = 0; k < dm; ++k) left(b + L.offs[k], c) = y(k);
    }
  Mat out(rho.rows(), rho.cols());
  Mat ec = e.conjugate();
  for (long r = 0; r < rho.rows(); ++r)
    for (long b : L.bases) {
      for (long k = 0; k < dm; ++k) x(k) = left(r, b + L.offs[k]);
      Vec y = ec * x;
      for (long k = 0; k < dm; ++k) out(r, b + L.offs[k]) = y(k);
    }
  return out;
}

}  // namespace detail

inline DensityMatrix apply_loss(const DensityMatrix& rho, const LossChannelParams& p) {
  DensityMatrix cur = rho;
  for (int m : p.modes) {
    if (m < 0 || m >= static_cast<int>(rho.dims.size())) throw invalid_argument("apply_loss: mode out of range");
    KrausSet ks = loss_kraus(p.eta, rho.dims[m] - 1);
    Mat acc = Mat::Zero(cur.rho.rows(), cur.rho.cols());
    for (auto& e : ks.operators) acc += detail::conjugate_local(cur.rho, cur.dims, m, e.matrix);
    cur = DensityMatrix(cur.dims, acc, cur.labels);
  }
  return cur;
}

inline DensityMatrix apply_loss(const FockVector& v, double eta) {
  return apply_loss(DensityMatrix(v), LossChannelParams{eta, {0}});
}

// ---- compensation ---------------------------------------------------------

enum class CodeKind { HybridSqueezedCat, SqueezedCat };

inline const char* code_name(CodeKind c) { return c == CodeKind::HybridSqueezedCat ? "hsc" : "sc"; }

struct CompensationResult {
  double successProbability = 0.0;   // identified mass, averaged over the six cardinal inputs
  double conditionalFidelity = 0.0;  // to the pre-loss logical state, on identified branches
  int cutoff = 0;
};

// The six eigenstates of X, Y, Z; averaging over them equals averaging
// over the whole Bloch sphere for quadratic quantities.
inline std::vector<Eigen::Vector2cd> cardinal_states() {
  const double s = M_SQRT1_2;
  const cplx i(0, 1);
  return {Eigen::Vector2cd(1, 0),  Eigen::Vector2cd(0, 1),  Eigen::Vector2cd(s, s),
          Eigen::Vector2cd(s, -s), Eigen::Vector2cd(s, i * s), Eigen::Vector2cd(s, -i * s)};
}

// Loss on the input hybrid qubit (polarization photon and bosonic mode, or
// the bosonic mode alone for the cat code), then a Bell measurement against
// one half of a lossless logical |Phi+> and the Pauli correction on the
// other half.
inline CompensationResult run_compensation(CodeKind code, double alpha, double xi, double eta, int cutoff = 0,
                                           const TruncationPolicy& p = {}) {
  if (!(eta > 0.0 && eta <= 1.0)) throw invalid_argument("compensation: eta must lie in (0, 1]");
  if (cutoff <= 0) cutoff = code_cutoff(alpha, xi, p);
  CodeBasis cb = code_basis(alpha, xi, cutoff, p);
  BcMeasurement bc(cutoff);
  KrausSet ks = loss_kraus(eta, cutoff);
  const BsmKind kind = code == CodeKind::HybridSqueezedCat ? BsmKind::Hybrid : BsmKind::SqueezedCatOnly;
  // polarization photon survives with probability eta; a lost photon leaves
  // one click in B_D, which never decodes
  const double polKeep = code == CodeKind::HybridSqueezedCat ? std::sqrt(eta) : 1.0;

  std::array<Vec, 2> anc{cb.plus.amps, cb.minus.amps};
  auto inputs = cardinal_states();
  std::vector<double> mass(inputs.size(), 0.0), overlap(inputs.size(), 0.0);
  for (auto& e : ks.operators) {
    std::array<Vec, 2> lossy{e.matrix * cb.plus.amps, e.matrix * cb.minus.amps};
    if (lossy[0].squaredNorm() + lossy[1].squaredNorm() < 1e-30) continue;
    for (auto& r : logical_rows(lossy, anc, kind, bc)) {
      if (!r.decoded) continue;
      Eigen::Matrix2cd K;
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) K(k, j) = polKeep * r.m(2 * j + k) * M_SQRT1_2;
      Eigen::Matrix2cd C = pauli_matrix(bell_frame(*r.decoded));
      for (std::size_t s = 0; s < inputs.size(); ++s) {
        Eigen::Vector2cd out = C * K * inputs[s];
        mass[s] += out.squaredNorm();
        overlap[s] += std::norm(inputs[s].dot(out));
      }
    }
  }
  CompensationResult res;
  res.cutoff = cutoff;
  double m = 0.0, o = 0.0;
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    m += mass[s];
    o += overlap[s];
  }
  res.successProbability = m / inputs.size();
  res.conditionalFidelity = m > 0.0 ? o / m : 0.0;
  return res;
}

struct CompensationRow {
  double nbar = 0.0;
  CodeKind code = CodeKind::HybridSqueezedCat;
  double eta = 1.0;
  double xiStar = 0.0;
  double alpha = 0.0;
  double pSuccess = 0.0;
  double fidelity = 0.0;
  bool flagged = false;
  std::string note;
};

// Best xi on the grid for one (nbar, code, eta); alpha follows from nbar
// through the even squeezed cat.
inline CompensationRow compensation_point(double nbar, CodeKind code, double eta, const std::vector<double>& xiGrid,
                                          const TruncationPolicy& p = {}) {
  CompensationRow row;
  row.nbar = nbar;
  row.code = code;
  row.eta = eta;
  try {
    auto opt = maximize_on_grid(xiGrid, [&](double xi) {
      double a = amplitude_for_mean_photon(nbar, xi, +1, 0, p);
      return run_compensation(code, a, xi, eta, 0, p).successProbability;
    });
    row.xiStar = opt.xiStar;
    row.pSuccess = opt.pStar;
    row.alpha = amplitude_for_mean_photon(nbar, opt.xiStar, +1, 0, p);
    row.fidelity = run_compensation(code, row.alpha, row.xiStar, eta, 0, p).conditionalFidelity;
  } catch (const infeasible_target& e) {
    row.flagged = true;
    row.note = e.what();
  } catch (const truncation_error& e) {
    row.flagged = true;
    row.note = e.what();
  }
  return row;
}

}  // namespace hsc

#pragma once

// Dense multi-mode states. Index order is row-major: the first mode is the
// most significant digit.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hsc/fock.hpp"

namespace hsc {

namespace detail {

inline long product(const std::vector<int>& dims) {
  long p = 1;
  for (int d : dims) p *= d;
  return p;
}

inline std::vector<long> strides(const std::vector<int>& dims) {
  std::vector<long> s(dims.size(), 1);
  for (int m = static_cast<int>(dims.size()) - 2; m >= 0; --m) s[m] = s[m + 1] * dims[m + 1];
  return s;
}

inline std::vector<std::string> default_labels(std::size_t n, std::size_t offset = 0) {
  std::vector<std::string> l;
  for (std::size_t i = 0; i < n; ++i) l.push_back("m" + std::to_string(i + offset));
  return l;
}

inline std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

template <class T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace detail

// Polarization qubit basis used throughout: H = (1,0), V = (0,1).
inline Vec pol_h() { return (Vec(2) << 1.0, 0.0).finished(); }
inline Vec pol_v() { return (Vec(2) << 0.0, 1.0).finished(); }
inline Vec pol_plus() { return (Vec(2) << M_SQRT1_2, M_SQRT1_2).finished(); }
inline Vec pol_minus() { return (Vec(2) << M_SQRT1_2, -M_SQRT1_2).finished(); }

struct StateVector {
  std::vector<int> dims;
  std::vector<std::string> labels;
  Vec amps;

  StateVector() = default;
  StateVector(std::vector<int> d, Vec a, std::vector<std::string> l = {})
      : dims(std::move(d)), labels(std::move(l)), amps(std::move(a)) {
    if (labels.empty()) labels = detail::default_labels(dims.size());
    if (labels.size() != dims.size()) throw invalid_argument("StateVector: label count != mode count");
    if (detail::product(dims) != amps.size()) throw invalid_argument("StateVector: dims do not match amplitudes");
  }
  explicit StateVector(const FockVector& f, std::string label = "m0")
      : StateVector({f.dim()}, f.amps, {std::move(label)}) {}

  std::size_t modes() const { return dims.size(); }
  double norm2() const { return amps.squaredNorm(); }
  StateVector normalized() const {
    double n = amps.norm();
    if (n == 0.0) throw degenerate_state("cannot normalize the zero state");
    return StateVector(dims, amps / n, labels);
  }
};

inline cplx inner(const StateVector& a, const StateVector& b) {
  if (a.dims != b.dims) throw invalid_argument("inner: dims mismatch");
  return a.amps.dot(b.amps);
}

struct DensityMatrix {
  std::vector<int> dims;
  std::vector<std::string> labels;
  Mat rho;

  DensityMatrix() = default;
  DensityMatrix(std::vector<int> d, Mat r, std::vector<std::string> l = {})
      : dims(std::move(d)), labels(std::move(l)), rho(std::move(r)) {
    if (labels.empty()) labels = detail::default_labels(dims.size());
    if (labels.size() != dims.size()) throw invalid_argument("DensityMatrix: label count != mode count");
    if (rho.rows() != rho.cols() || detail::product(dims) != rho.rows())
      throw invalid_argument("DensityMatrix: dims do not match matrix");
  }
  explicit DensityMatrix(const StateVector& s) : DensityMatrix(s.dims, s.amps * s.amps.adjoint(), s.labels) {}
  explicit DensityMatrix(const FockVector& f) : DensityMatrix({f.dim()}, f.amps * f.amps.adjoint()) {}

  std::size_t modes() const { return dims.size(); }
  double trace() const { return rho.trace().real(); }
  DensityMatrix normalized() const {
    double t = trace();
    if (t <= 0.0) throw degenerate_state("cannot normalize a zero-trace density matrix");
    return DensityMatrix(dims, rho / t, labels);
  }
};

// ---- tensor products ----------------------------------------------------

inline StateVector tensor_product(const StateVector& a, const StateVector& b) {
  return StateVector(detail::concat(a.dims, b.dims), Eigen::kroneckerProduct(a.amps, b.amps).eval(),
                     detail::concat(a.labels, b.labels));
}

inline StateVector tensor_product(const FockVector& a, const FockVector& b) {
  return tensor_product(StateVector(a, "m0"), StateVector(b, "m1"));
}

inline DenseOperator tensor_product(const DenseOperator& a, const DenseOperator& b) {
  return DenseOperator(detail::concat(a.dims, b.dims), Eigen::kroneckerProduct(a.matrix, b.matrix).eval());
}

inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(detail::concat(a.dims, b.dims), Eigen::kroneckerProduct(a.rho, b.rho).eval(),
                       detail::concat(a.labels, b.labels));
}

inline StateVector apply(const DenseOperator& op, const StateVector& s) {
  if (op.dims != s.dims) throw invalid_argument("apply: operator dims do not match state");
  return StateVector(s.dims, op.matrix * s.amps, s.labels);
}

// ---- local operations on a subset of modes ------------------------------

namespace detail {

// Calls fn(baseIndex) for every assignment of the modes not in `sub`.
// Sub-block element k (row-major over `sub`) lives at baseIndex + offs[k].
struct LocalLayout {
  std::vector<long> offs;
  std::vector<long> bases;
};

inline LocalLayout local_layout(const std::vector<int>& dims, const std::vector<int>& sub) {
  auto st = strides(dims);
  std::vector<bool> in(dims.size(), false);
  for (int m : sub) {
    if (m < 0 || m >= static_cast<int>(dims.size()) || in[m]) throw invalid_argument("bad mode list");
    in[m] = true;
  }
  LocalLayout L;
  L.offs = {0};
  for (int m : sub) {
    std::vector<long> next;
    for (long o : L.offs)
      for (int k = 0; k < dims[m]; ++k) next.push_back(o + k * st[m]);
    L.offs = std::move(next);
  }
  L.bases = {0};
  for (std::size_t m = 0; m < dims.size(); ++m) {
    if (in[m]) continue;
    std::vector<long> next;
    for (long b : L.bases)
      for (int k = 0; k < dims[m]; ++k) next.push_back(b + k * st[m]);
    L.bases = std::move(next);
  }
  return L;
}

}  // namespace detail

// Apply a linear map on the joint space of `sub` (given as a function on the
// sub-block vector) to every slice of the state.
inline StateVector apply_local(const StateVector& s, const std::vector<int>& sub,
                               const std::function<Vec(const Vec&)>& fn) {
  auto L = detail::local_layout(s.dims, sub);
  Vec out = s.amps;
  Vec x(L.offs.size());
  for (long b : L.bases) {
    for (std::size_t k = 0; k < L.offs.size(); ++k) x(k) = s.amps(b + L.offs[k]);
    Vec y = fn(x);
    if (y.size() != x.size()) throw invalid_argument("apply_local: map changes dimension");
    for (std::size_t k = 0; k < L.offs.size(); ++k) out(b + L.offs[k]) = y(k);
  }
  return StateVector(s.dims, out, s.labels);
}

inline StateVector apply_local(const StateVector& s, const std::vector<int>& sub, const DenseOperator& op) {
  std::vector<int> subdims;
  for (int m : sub) subdims.push_back(s.dims.at(m));
  if (subdims != op.dims) throw invalid_argument("apply_local: operator dims do not match modes");
  return apply_local(s, sub, [&](const Vec& x) -> Vec { return op.matrix * x; });
}

inline StateVector apply_local(const StateVector& s, int modeA, int modeB, const BeamSplitter& bs) {
  if (s.dims.at(modeA) != bs.cutoffA() + 1 || s.dims.at(modeB) != bs.cutoffB() + 1)
    throw invalid_argument("apply_local: beam splitter cutoffs do not match modes");
  return apply_local(s, {modeA, modeB}, [&](const Vec& x) { return bs.apply(x); });
}

// ---- partial trace --------------------------------------------------------

inline DensityMatrix partial_trace(const DensityMatrix& r, std::vector<int> keep) {
  if (keep.empty()) throw invalid_argument("partial_trace: empty keep set");
  std::sort(keep.begin(), keep.end());
  auto L = detail::local_layout(r.dims, keep);
  std::vector<int> kd;
  std::vector<std::string> kl;
  for (int m : keep) {
    kd.push_back(r.dims[m]);
    kl.push_back(r.labels[m]);
  }
  const long n = static_cast<long>(L.offs.size());
  Mat out = Mat::Zero(n, n);
  for (long b : L.bases)
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) out(i, j) += r.rho(b + L.offs[i], b + L.offs[j]);
  return DensityMatrix(kd, out, kl);
}

inline DensityMatrix partial_trace(const StateVector& s, std::vector<int> keep) {
  if (keep.empty()) throw invalid_argument("partial_trace: empty keep set");
  std::sort(keep.begin(), keep.end());
  auto L = detail::local_layout(s.dims, keep);
  std::vector<int> kd;
  std::vector<std::string> kl;
  for (int m : keep) {
    kd.push_back(s.dims[m]);
    kl.push_back(s.labels[m]);
  }
  const long n = static_cast<long>(L.offs.size());
  Mat out = Mat::Zero(n, n);
  Vec x(n);
  for (long b : L.bases) {
    for (long i = 0; i < n; ++i) x(i) = s.amps(b + L.offs[i]);
    out.noalias() += x * x.adjoint();
  }
  return DensityMatrix(kd, out, kl);
}

// ---- projective measurement --------------------------------------------

struct ModeOutcome {
  int mode;
  int level;  // Fock number, or polarization index (0 = H, 1 = V)
};
using Pattern = std::vector<ModeOutcome>;

template <class S>
struct Projection {
  double probability = 0.0;
  bool null = true;  // probability 0: state is empty
  S state;
};

namespace detail {

inline void check_pattern(const std::vector<int>& dims, const Pattern& p) {
  std::vector<bool> seen(dims.size(), false);
  for (auto& o : p) {
    if (o.mode < 0 || o.mode >= static_cast<int>(dims.size())) throw invalid_argument("pattern: mode out of range");
    if (seen[o.mode]) throw invalid_argument("pattern: mode listed twice");
    seen[o.mode] = true;
    if (o.level < 0 || o.level >= dims[o.mode]) throw invalid_argument("pattern: level outside mode dimension");
  }
}

inline std::vector<int> unmeasured(std::size_t n, const Pattern& p) {
  std::vector<bool> m(n, false);
  for (auto& o : p) m[o.mode] = true;
  std::vector<int> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (!m[i]) rest.push_back(static_cast<int>(i));
  return rest;
}

}  // namespace detail

// Unnormalized conditional amplitudes <pattern|psi> over the unmeasured modes.
inline StateVector project_unnormalized(const StateVector& s, const Pattern& p) {
  detail::check_pattern(s.dims, p);
  auto st = detail::strides(s.dims);
  long fixed = 0;
  for (auto& o : p) fixed += o.level * st[o.mode];
  auto rest = detail::unmeasured(s.dims.size(), p);
  std::vector<int> rd;
  std::vector<std::string> rl;
  for (int m : rest) {
    rd.push_back(s.dims[m]);
    rl.push_back(s.labels[m]);
  }
  if (rest.empty()) {
    Vec v(1);
    v(0) = s.amps(fixed);
    return StateVector({}, v, {});
  }
  auto L = detail::local_layout(s.dims, rest);
  Vec out(L.offs.size());
  for (std::size_t k = 0; k < L.offs.size(); ++k) out(k) = s.amps(fixed + L.offs[k]);
  return StateVector(rd, out, rl);
}

inline Projection<StateVector> project(const StateVector& s, const Pattern& p) {
  StateVector u = project_unnormalized(s, p);
  Projection<StateVector> r;
  r.probability = u.norm2() / s.norm2();
  r.null = r.probability == 0.0;
  r.state = r.null ? u : u.normalized();
  return r;
}

inline Projection<DensityMatrix> project(const DensityMatrix& d, const Pattern& p) {
  detail::check_pattern(d.dims, p);
  auto st = detail::strides(d.dims);
  long fixed = 0;
  for (auto& o : p) fixed += o.level * st[o.mode];
  auto rest = detail::unmeasured(d.dims.size(), p);
  std::vector<int> rd;
  std::vector<std::string> rl;
  for (int m : rest) {
    rd.push_back(d.dims[m]);
    rl.push_back(d.labels[m]);
  }
  std::vector<long> offs{0};
  if (!rest.empty()) offs = detail::local_layout(d.dims, rest).offs;
  const long n = static_cast<long>(offs.size());
  Mat out(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) out(i, j) = d.rho(fixed + offs[i], fixed + offs[j]);
  Projection<DensityMatrix> r;
  double tr = d.trace();
  r.probability = tr > 0.0 ? out.trace().real() / tr : 0.0;
  r.null = r.probability <= 0.0;
  r.state = DensityMatrix(rd, r.null ? out : Mat(out / out.trace().real()), rl);
  return r;
}

// ---- fidelity -----------------------------------------------------------

inline double fidelity(const FockVector& a, const FockVector& b) {
  double na = a.norm2(), nb = b.norm2();
  if (na == 0.0 || nb == 0.0) throw degenerate_state("fidelity with zero vector");
  return std::norm(inner(a, b)) / (na * nb);
}

inline double fidelity(const StateVector& a, const StateVector& b) {
  double na = a.norm2(), nb = b.norm2();
  if (na == 0.0 || nb == 0.0) throw degenerate_state("fidelity with zero vector");
  return std::norm(inner(a, b)) / (na * nb);
}

inline double fidelity(const DensityMatrix& r, const StateVector& s) {
  if (r.dims != s.dims) throw invalid_argument("fidelity: dims mismatch");
  return (s.amps.dot(r.rho * s.amps)).real() / (r.trace() * s.norm2());
}

inline double fidelity(const StateVector& s, const DensityMatrix& r) { return fidelity(r, s); }

namespace detail {
inline Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace detail

// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2 of the normalized inputs.
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dims != b.dims) throw invalid_argument("fidelity: dims mismatch");
  Mat ra = a.rho / a.trace(), rb = b.rho / b.trace();
  Mat s = detail::psd_sqrt(ra);
  Mat inner = s * rb * s;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  double t = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(1.0, t * t);
}

inline double min_eigenvalue(const DensityMatrix& d) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (d.rho + d.rho.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace hsc

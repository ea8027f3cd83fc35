#pragma once

// Single-mode truncated Fock space: states, ladder operators, D(alpha),
// S(xi), and the two-mode beam splitter / two-mode squeezer.

#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "hsc/errors.hpp"

namespace hsc {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Operators are exponentiated at cutoff + 2*guard and then cropped.
struct TruncationPolicy {
  int guard = 10;
  double tailTolerance = 1e-10;
};

struct FockVector {
  Vec amps;
  double tail = 0.0;  // mass discarded when the state was built

  FockVector() = default;
  explicit FockVector(Vec a, double t = 0.0) : amps(std::move(a)), tail(t) {}

  int cutoff() const { return static_cast<int>(amps.size()) - 1; }
  int dim() const { return static_cast<int>(amps.size()); }
  cplx operator[](int n) const { return amps(n); }
  double norm2() const { return amps.squaredNorm(); }

  FockVector normalized() const {
    double n = amps.norm();
    if (n == 0.0) throw degenerate_state("cannot normalize the zero vector");
    return FockVector(amps / n, tail);
  }
};

inline FockVector fock_state(int n, int cutoff) {
  if (cutoff < 0 || n < 0 || n > cutoff) throw invalid_argument("fock_state: n outside 0..cutoff");
  Vec v = Vec::Zero(cutoff + 1);
  v(n) = 1.0;
  return FockVector(v);
}

inline FockVector vacuum(int cutoff) { return fock_state(0, cutoff); }

inline cplx inner(const FockVector& a, const FockVector& b) {
  if (a.dim() != b.dim()) throw invalid_argument("inner: cutoff mismatch");
  return a.amps.dot(b.amps);  // conjugates the left argument
}

inline double mean_photon_number(const FockVector& v) {
  double num = 0.0, den = 0.0;
  for (int n = 0; n < v.dim(); ++n) {
    double p = std::norm(v.amps(n));
    num += n * p;
    den += p;
  }
  if (den == 0.0) throw degenerate_state("mean_photon_number of zero vector");
  return num / den;
}

struct DenseOperator {
  std::vector<int> dims;
  Mat matrix;

  DenseOperator() = default;
  DenseOperator(std::vector<int> d, Mat m) : dims(std::move(d)), matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols()) throw invalid_argument("DenseOperator: matrix not square");
    long total = std::accumulate(dims.begin(), dims.end(), 1L, std::multiplies<long>());
    if (total != matrix.rows()) throw invalid_argument("DenseOperator: dims do not match matrix size");
  }

  int dim() const { return static_cast<int>(matrix.rows()); }
  DenseOperator adjoint() const { return DenseOperator(dims, matrix.adjoint()); }

  FockVector operator()(const FockVector& v) const {
    if (dims.size() != 1 || v.dim() != dim()) throw invalid_argument("operator/vector dimension mismatch");
    return FockVector(matrix * v.amps, v.tail);
  }
};

inline DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
  if (a.dims != b.dims) throw invalid_argument("operator product: dims mismatch");
  return DenseOperator(a.dims, a.matrix * b.matrix);
}

inline DenseOperator identity_operator(int cutoff) {
  return DenseOperator({cutoff + 1}, Mat::Identity(cutoff + 1, cutoff + 1));
}

struct Ladder {
  DenseOperator annihilate;
  DenseOperator create;
  DenseOperator number;
};

namespace detail {

inline Mat annihilation(int cutoff) {
  Mat a = Mat::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline double tail_beyond(const Vec& v, int cutoff) {
  double t = 0.0;
  for (int n = cutoff + 1; n < v.size(); ++n) t += std::norm(v(n));
  return t;
}

inline void check_tail(double tail, const TruncationPolicy& p, const std::string& what) {
  if (!(tail < p.tailTolerance)) throw truncation_error(what + ": cutoff too small", tail);
}

inline int padded(int cutoff, const TruncationPolicy& p) {
  if (p.guard < 0) throw invalid_argument("guard band must be non-negative");
  return cutoff + 2 * p.guard;
}

// exp(alpha a^dag - alpha^* a) on the space 0..cutoff, no cropping
inline Mat displacement_raw(cplx alpha, int cutoff) {
  if (alpha == 0.0) return Mat::Identity(cutoff + 1, cutoff + 1);
  Mat a = annihilation(cutoff);
  Mat g = alpha * a.adjoint() - std::conj(alpha) * a;
  return g.exp();
}

// exp(1/2 (xi^* a^2 - xi a^dag^2)), no cropping
inline Mat squeeze_raw(cplx xi, int cutoff) {
  if (xi == 0.0) return Mat::Identity(cutoff + 1, cutoff + 1);
  Mat a = annihilation(cutoff);
  Mat a2 = a * a;
  Mat g = 0.5 * (std::conj(xi) * a2 - xi * a2.adjoint());
  return g.exp();
}

// D(alpha) S(xi)|0> on the padded space
inline Vec displaced_squeezed_raw(cplx alpha, cplx xi, int big) {
  Vec v = Vec::Zero(big + 1);
  v(0) = 1.0;
  if (xi != 0.0) v = squeeze_raw(xi, big) * v;
  if (alpha != 0.0) v = displacement_raw(alpha, big) * v;
  return v;
}

}  // namespace detail

inline Ladder ladder_operators(int cutoff) {
  if (cutoff < 1) throw invalid_argument("ladder_operators: cutoff must be >= 1");
  Mat a = detail::annihilation(cutoff);
  Mat n = a.adjoint() * a;
  return {DenseOperator({cutoff + 1}, a), DenseOperator({cutoff + 1}, a.adjoint()),
          DenseOperator({cutoff + 1}, n)};
}

// |alpha, xi> = D(alpha) S(xi)|0>. Amplitudes are not renormalized after
// cropping; the discarded mass is stored in .tail.
inline FockVector displaced_squeezed_state(cplx alpha, cplx xi, int cutoff,
                                           const TruncationPolicy& p = {}) {
  if (cutoff < 0) throw invalid_argument("cutoff must be non-negative");
  int big = detail::padded(cutoff, p);
  Vec v = detail::displaced_squeezed_raw(alpha, xi, big);
  double tail = detail::tail_beyond(v, cutoff);
  detail::check_tail(tail, p, "displaced_squeezed_state");
  return FockVector(v.head(cutoff + 1), tail);
}

inline FockVector coherent_state(cplx alpha, int cutoff, const TruncationPolicy& p = {}) {
  return displaced_squeezed_state(alpha, 0.0, cutoff, p);
}

inline FockVector squeezed_vacuum(cplx xi, int cutoff, const TruncationPolicy& p = {}) {
  return displaced_squeezed_state(0.0, xi, cutoff, p);
}

inline DenseOperator displacement_operator(cplx alpha, int cutoff, const TruncationPolicy& p = {}) {
  if (cutoff < 1) throw invalid_argument("displacement_operator: cutoff must be >= 1");
  int big = detail::padded(cutoff, p);
  Mat d = detail::displacement_raw(alpha, big);
  detail::check_tail(detail::tail_beyond(d.col(0), cutoff), p, "displacement_operator");
  return DenseOperator({cutoff + 1}, d.topLeftCorner(cutoff + 1, cutoff + 1));
}

inline DenseOperator squeeze_operator(cplx xi, int cutoff, const TruncationPolicy& p = {}) {
  if (cutoff < 1) throw invalid_argument("squeeze_operator: cutoff must be >= 1");
  int big = detail::padded(cutoff, p);
  Mat s = detail::squeeze_raw(xi, big);
  detail::check_tail(detail::tail_beyond(s.col(0), cutoff), p, "squeeze_operator");
  return DenseOperator({cutoff + 1}, s.topLeftCorner(cutoff + 1, cutoff + 1));
}

// Smallest cutoff whose tail for |alpha, xi> is below the tolerance.
inline int minimal_cutoff(cplx alpha, cplx xi, const TruncationPolicy& p = {}, int maxCutoff = 600) {
  int trial = 16;
  for (;;) {
    int big = trial + 2 * std::max(p.guard, 10);
    Vec v = detail::displaced_squeezed_raw(alpha, xi, big);
    if (detail::tail_beyond(v, trial) < p.tailTolerance) {
      double tail = detail::tail_beyond(v, trial);
      int n = trial;
      while (n > 0) {
        double t = tail + std::norm(v(n));
        if (!(t < p.tailTolerance)) break;
        tail = t;
        --n;
      }
      return n;
    }
    if (trial >= maxCutoff) throw truncation_error("minimal_cutoff: exceeds maxCutoff", detail::tail_beyond(v, trial));
    trial = std::min(2 * trial, maxCutoff);
  }
}

// Two-mode beam splitter with mode map
//   U a1^dag U^dag = sqrt(t) a1^dag + sqrt(r) a2^dag
//   U a2^dag U^dag = -sqrt(r) a1^dag + sqrt(t) a2^dag
// so |alpha>|0> -> |sqrt(t) alpha>|sqrt(r) alpha>. Built block by block in
// total photon number, which keeps sum n exactly conserved at any cutoff.
// Two-mode vectors are indexed nA*(cutoffB+1) + nB.
class BeamSplitter {
 public:
  BeamSplitter(double t, int cutoffA, int cutoffB) : t_(t), na_(cutoffA), nb_(cutoffB) {
    if (!(t >= 0.0 && t <= 1.0)) throw invalid_argument("beam splitter transmittance outside [0,1]");
    if (cutoffA < 0 || cutoffB < 0) throw invalid_argument("beam splitter cutoff must be non-negative");
    double theta = std::acos(std::sqrt(t));
    blocks_.reserve(na_ + nb_ + 1);
    for (int k = 0; k <= na_ + nb_; ++k) {
      // basis j = photons in mode 1, k - j in mode 2
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k + 1, k + 1);
      for (int j = 0; j < k; ++j) {
        double c = theta * std::sqrt(static_cast<double>((j + 1) * (k - j)));
        g(j, j + 1) = c;
        g(j + 1, j) = -c;
      }
      blocks_.push_back(theta == 0.0 ? Eigen::MatrixXd::Identity(k + 1, k + 1) : Eigen::MatrixXd(g.exp()));
    }
  }

  double transmittance() const { return t_; }
  int cutoffA() const { return na_; }
  int cutoffB() const { return nb_; }

  Vec apply(const Vec& psi) const {
    const int db = nb_ + 1;
    if (psi.size() != static_cast<long>(na_ + 1) * db) throw invalid_argument("BeamSplitter::apply: dimension mismatch");
    Vec out = Vec::Zero(psi.size());
    for (int k = 0; k <= na_ + nb_; ++k) {
      int lo = std::max(0, k - nb_), hi = std::min(k, na_);
      const auto& u = blocks_[k];
      for (int i = lo; i <= hi; ++i) {
        cplx acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += u(i, j) * psi(j * db + (k - j));
        out(i * db + (k - i)) = acc;
      }
    }
    return out;
  }

  // amplitude <nA, nB| U |psi> for a single output pattern
  cplx amplitude(const Vec& psi, int nA, int nB) const {
    const int db = nb_ + 1;
    int k = nA + nB;
    int lo = std::max(0, k - nb_), hi = std::min(k, na_);
    cplx acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += blocks_[k](nA, j) * psi(j * db + (k - j));
    return acc;
  }

  const Eigen::MatrixXd& block(int k) const { return blocks_.at(k); }

  DenseOperator unitary() const {
    const int db = nb_ + 1, dim = (na_ + 1) * db;
    Mat u = Mat::Zero(dim, dim);
    for (int k = 0; k <= na_ + nb_; ++k) {
      int lo = std::max(0, k - nb_), hi = std::min(k, na_);
      for (int i = lo; i <= hi; ++i)
        for (int j = lo; j <= hi; ++j) u(i * db + (k - i), j * db + (k - j)) = blocks_[k](i, j);
    }
    return DenseOperator({na_ + 1, nb_ + 1}, u);
  }

 private:
  double t_;
  int na_, nb_;
  std::vector<Eigen::MatrixXd> blocks_;
};

inline DenseOperator beam_splitter_unitary(double t, int cutoffA, int cutoffB) {
  return BeamSplitter(t, cutoffA, cutoffB).unitary();
}

namespace detail {

// indices of the (cutoffA+1)(cutoffB+1) block inside a padded two-mode space
inline std::vector<int> crop_index(int cutoffA, int cutoffB, int bigB) {
  std::vector<int> idx;
  for (int i = 0; i <= cutoffA; ++i)
    for (int j = 0; j <= cutoffB; ++j) idx.push_back(i * (bigB + 1) + j);
  return idx;
}

inline Mat crop(const Mat& m, const std::vector<int>& idx) {
  Mat out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = m(idx[r], idx[c]);
  return out;
}

}  // namespace detail

// exp(1/2 (xi^* a1 a2 - xi a1^dag a2^dag)), exponentiated on the padded
// space and cropped.
inline DenseOperator two_mode_squeeze_unitary(cplx xi, int cutoffA, int cutoffB, const TruncationPolicy& p = {}) {
  if (cutoffA < 1 || cutoffB < 1) throw invalid_argument("two_mode_squeeze_unitary: cutoff must be >= 1");
  int ba = detail::padded(cutoffA, p), bb = detail::padded(cutoffB, p);
  Mat a1 = Eigen::kroneckerProduct(detail::annihilation(ba), Mat::Identity(bb + 1, bb + 1));
  Mat a2 = Eigen::kroneckerProduct(Mat::Identity(ba + 1, ba + 1), detail::annihilation(bb));
  Mat pair = a1 * a2;
  Mat g = 0.5 * (std::conj(xi) * pair - xi * pair.adjoint());
  Mat u = (xi == 0.0) ? Mat::Identity(g.rows(), g.cols()) : Mat(g.exp());
  // tail check on the vacuum column
  double tail = 0.0;
  for (int i = 0; i <= ba; ++i)
    for (int j = 0; j <= bb; ++j)
      if (i > cutoffA || j > cutoffB) tail += std::norm(u(i * (bb + 1) + j, 0));
  detail::check_tail(tail, p, "two_mode_squeeze_unitary");
  return DenseOperator({cutoffA + 1, cutoffB + 1}, detail::crop(u, detail::crop_index(cutoffA, cutoffB, bb)));
}

}  // namespace hsc

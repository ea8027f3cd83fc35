#pragma once

// Multi-mode pure state kept as a weighted sum of product states. Never
// densified except on request, so circuits with many hybrid qubits stay
// cheap as long as the number of terms is small.

#include <functional>
#include <string>
#include <vector>

#include "hsc/state.hpp"

namespace hsc {

class ProductTermState {
 public:
  struct Term {
    cplx weight;
    std::vector<Vec> factors;
  };

  ProductTermState() = default;
  ProductTermState(std::vector<int> dims, std::vector<std::string> labels = {})
      : dims_(std::move(dims)), labels_(std::move(labels)) {
    if (labels_.empty()) labels_ = detail::default_labels(dims_.size());
    if (labels_.size() != dims_.size()) throw invalid_argument("ProductTermState: label count != mode count");
  }

  // single product term built from the given factors
  static ProductTermState product(const std::vector<Vec>& factors, std::vector<std::string> labels = {}) {
    std::vector<int> d;
    for (auto& f : factors) d.push_back(static_cast<int>(f.size()));
    ProductTermState s(d, std::move(labels));
    s.add_term(1.0, factors);
    return s;
  }

  void add_term(cplx w, std::vector<Vec> factors) {
    if (factors.size() != dims_.size()) throw invalid_argument("add_term: wrong number of factors");
    for (std::size_t m = 0; m < dims_.size(); ++m)
      if (factors[m].size() != dims_[m]) throw invalid_argument("add_term: factor dimension mismatch");
    terms_.push_back({w, std::move(factors)});
  }

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t modes() const { return dims_.size(); }

  ProductTermState scaled(cplx c) const {
    ProductTermState s = *this;
    for (auto& t : s.terms_) t.weight *= c;
    return s;
  }

  ProductTermState& operator+=(const ProductTermState& o) {
    if (o.dims_ != dims_) throw invalid_argument("ProductTermState +=: dims mismatch");
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }

  double norm2() const;
  ProductTermState normalized() const {
    double n = norm2();
    if (n <= 0.0) throw degenerate_state("cannot normalize the zero state");
    return scaled(1.0 / std::sqrt(n));
  }

  // op acts on a single mode
  ProductTermState apply(int mode, const Mat& op) const {
    check_mode(mode);
    if (op.rows() != dims_[mode] || op.cols() != dims_[mode]) throw invalid_argument("apply: operator dimension mismatch");
    ProductTermState s = *this;
    for (auto& t : s.terms_) t.factors[mode] = op * t.factors[mode];
    return s;
  }

  // Removes `modeA` and `modeB`, multiplying each weight by amp(fA, fB).
  // This is any two-mode measurement outcome whose amplitude is a linear
  // functional of the joint input, e.g. a beam splitter followed by
  // photon counting.
  ProductTermState contract_pair(int modeA, int modeB,
                                 const std::function<cplx(const Vec&, const Vec&)>& amp) const {
    check_mode(modeA);
    check_mode(modeB);
    if (modeA == modeB) throw invalid_argument("contract_pair: modes must differ");
    ProductTermState s(erase2(dims_, modeA, modeB), erase2(labels_, modeA, modeB));
    for (auto& t : terms_) {
      cplx a = amp(t.factors[modeA], t.factors[modeB]);
      if (a == 0.0) continue;
      s.terms_.push_back({t.weight * a, erase2(t.factors, modeA, modeB)});
    }
    return s;
  }

  StateVector to_dense() const {
    long n = detail::product(dims_);
    Vec amps = Vec::Zero(n);
    for (auto& t : terms_) {
      Vec v = Vec::Constant(1, t.weight);
      for (auto& f : t.factors) v = Eigen::kroneckerProduct(v, f).eval();
      amps += v;
    }
    return StateVector(dims_, amps, labels_);
  }

 private:
  void check_mode(int m) const {
    if (m < 0 || m >= static_cast<int>(dims_.size())) throw invalid_argument("ProductTermState: mode out of range");
  }
  template <class T>
  static std::vector<T> erase2(const std::vector<T>& v, int a, int b) {
    std::vector<T> out;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
      if (i != a && i != b) out.push_back(v[i]);
    return out;
  }

  std::vector<int> dims_;
  std::vector<std::string> labels_;
  std::vector<Term> terms_;
};

inline cplx inner(const ProductTermState& a, const ProductTermState& b) {
  if (a.dims() != b.dims()) throw invalid_argument("inner: dims mismatch");
  cplx acc = 0.0;
  for (auto& ta : a.terms()) {
    for (auto& tb : b.terms()) {
      cplx p = std::conj(ta.weight) * tb.weight;
      for (std::size_t m = 0; m < ta.factors.size() && p != 0.0; ++m) p *= ta.factors[m].dot(tb.factors[m]);
      acc += p;
    }
  }
  return acc;
}

inline double ProductTermState::norm2() const { return inner(*this, *this).real(); }

inline ProductTermState tensor_product(const ProductTermState& a, const ProductTermState& b) {
  ProductTermState s(detail::concat(a.dims(), b.dims()), detail::concat(a.labels(), b.labels()));
  for (auto& ta : a.terms())
    for (auto& tb : b.terms()) s.add_term(ta.weight * tb.weight, detail::concat(ta.factors, tb.factors));
  return s;
}

inline ProductTermState project_unnormalized(const ProductTermState& s, const Pattern& p) {
  detail::check_pattern(s.dims(), p);
  auto rest = detail::unmeasured(s.modes(), p);
  std::vector<int> rd;
  std::vector<std::string> rl;
  for (int m : rest) {
    rd.push_back(s.dims()[m]);
    rl.push_back(s.labels()[m]);
  }
  ProductTermState out(rd, rl);
  for (auto& t : s.terms()) {
    cplx w = t.weight;
    for (auto& o : p) w *= t.factors[o.mode](o.level);
    if (w == 0.0) continue;
    std::vector<Vec> f;
    for (int m : rest) f.push_back(t.factors[m]);
    out.add_term(w, std::move(f));
  }
  return out;
}

inline Projection<ProductTermState> project(const ProductTermState& s, const Pattern& p) {
  Projection<ProductTermState> r;
  ProductTermState u = project_unnormalized(s, p);
  double n0 = s.norm2();
  double n1 = u.norm2();
  r.probability = n0 > 0.0 ? n1 / n0 : 0.0;
  r.null = r.probability <= 0.0;
  r.state = r.null ? u : u.scaled(1.0 / std::sqrt(n1));
  return r;
}

}  // namespace hsc

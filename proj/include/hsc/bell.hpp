#pragma once

// Bell measurements: B_D on two polarization photons (half beam splitter,
// polarizing beam splitters, four detectors), B_C on two bosonic modes
// (half beam splitter, photon-number-resolving detectors), and the hybrid
// combination on pairs of hybrid qubits.
//
// Logical Bell states are indexed 0..3 = Phi+, Phi-, Psi+, Psi- over the
// two-qubit basis |00>, |01>, |10>, |11>.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsc/codes.hpp"

namespace hsc {

enum BellIndex : int { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline const char* bell_name(int b) {
  static const char* names[] = {"Phi+", "Phi-", "Psi+", "Psi-"};
  if (b < 0 || b > 3) throw invalid_argument("bell index outside 0..3");
  return names[b];
}

using Vec4 = Eigen::Vector4cd;

inline Vec4 bell_vector(int b) {
  const double s = M_SQRT1_2;
  switch (b) {
    case PhiPlus: return Vec4(s, 0, 0, s);
    case PhiMinus: return Vec4(s, 0, 0, -s);
    case PsiPlus: return Vec4(0, s, s, 0);
    case PsiMinus: return Vec4(0, s, -s, 0);
  }
  throw invalid_argument("bell index outside 0..3");
}

enum class VerdictKind { Identified, Partial, Failure };

struct BellOutcome {
  VerdictKind kind = VerdictKind::Failure;
  int bellIndex = -1;       // when identified
  std::string partialInfo;  // when partial
  std::vector<int> rawPattern;
};

struct OutcomeEntry {
  BellOutcome outcome;
  double probability = 0.0;
};

struct OutcomeDistribution {
  std::vector<OutcomeEntry> entries;

  double total() const {
    double s = 0.0;
    for (auto& e : entries) s += e.probability;
    return s;
  }
  double mass(VerdictKind k) const {
    double s = 0.0;
    for (auto& e : entries)
      if (e.outcome.kind == k) s += e.probability;
    return s;
  }
  double identified(int bell) const {
    double s = 0.0;
    for (auto& e : entries)
      if (e.outcome.kind == VerdictKind::Identified && e.outcome.bellIndex == bell) s += e.probability;
    return s;
  }
};

// ---- B_D ----------------------------------------------------------------

// Verdicts refer to the polarization Bell states in the H/V basis.
enum class BdVerdict { PhiPartial, PsiPlus, PsiMinus, Failure };

inline const char* bd_name(BdVerdict v) {
  switch (v) {
    case BdVerdict::PhiPartial: return "Phi";
    case BdVerdict::PsiPlus: return "Psi+";
    case BdVerdict::PsiMinus: return "Psi-";
    case BdVerdict::Failure: return "fail";
  }
  return "?";
}

// Rails after the polarizing beam splitters: 0 = 5H, 1 = 5V, 2 = 6H, 3 = 6V.
struct BdPattern {
  std::array<int, 4> counts;
  BdVerdict verdict;
  Vec4 w;  // amplitude of this pattern is w . (f (x) g), f, g in the (H, V) basis
};

inline BdVerdict bd_classify(const std::array<int, 4>& c) {
  int total = c[0] + c[1] + c[2] + c[3];
  if (total != 2) return BdVerdict::Failure;
  int h = c[0] + c[2], v = c[1] + c[3];
  if (h != 1 || v != 1) return BdVerdict::PhiPartial;  // both photons share a polarization
  bool samePort = (c[0] + c[1] == 2) || (c[2] + c[3] == 2);
  return samePort ? BdVerdict::PsiPlus : BdVerdict::PsiMinus;
}

// All ten two-photon patterns, built from the beam-splitter mode map.
inline const std::vector<BdPattern>& bd_patterns() {
  static const std::vector<BdPattern> table = [] {
    BeamSplitter hbs(0.5, 1, 1);
    // input a -> (5, 6) coefficients, and input b
    Vec fromA = hbs.apply((Vec(4) << 0, 0, 1, 0).finished());
    Vec fromB = hbs.apply((Vec(4) << 0, 1, 0, 0).finished());
    std::array<double, 2> ua{fromA(2).real(), fromA(1).real()}, ub{fromB(2).real(), fromB(1).real()};
    std::vector<BdPattern> out;
    for (int r = 0; r < 4; ++r)
      for (int s = r; s < 4; ++s) {
        std::array<int, 4> c{0, 0, 0, 0};
        c[r]++;
        c[s]++;
        Vec4 w = Vec4::Zero();
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) {
            // photon a with polarization p sits on rails (5p, 6p) = (p, 2 + p)
            std::array<double, 4> u{0, 0, 0, 0}, v{0, 0, 0, 0};
            u[p] = ua[0];
            u[2 + p] = ua[1];
            v[q] = ub[0];
            v[2 + q] = ub[1];
            double amp = r == s ? M_SQRT2 * u[r] * v[r] : u[r] * v[s] + u[s] * v[r];
            w(2 * p + q) = amp;
          }
        out.push_back({c, bd_classify(c), w});
      }
    return out;
  }();
  return table;
}

// Measures two polarization qubits given as a 4-vector over HH, HV, VH, VV.
inline OutcomeDistribution bd_measure(const Vec& pair) {
  if (pair.size() != 4) throw invalid_argument("bd_measure: expects two single-photon polarization qubits");
  double n2 = pair.squaredNorm();
  if (n2 == 0.0) throw degenerate_state("bd_measure: zero input");
  OutcomeDistribution dist;
  for (auto& p : bd_patterns()) {
    double pr = std::norm((p.w.transpose() * pair).value()) / n2;
    BellOutcome o;
    o.rawPattern.assign(p.counts.begin(), p.counts.end());
    switch (p.verdict) {
      case BdVerdict::PsiPlus: o.kind = VerdictKind::Identified; o.bellIndex = PsiPlus; break;
      case BdVerdict::PsiMinus: o.kind = VerdictKind::Identified; o.bellIndex = PsiMinus; break;
      case BdVerdict::PhiPartial: o.kind = VerdictKind::Partial; o.partialInfo = "Phi (sign unknown)"; break;
      case BdVerdict::Failure: o.kind = VerdictKind::Failure; break;
    }
    dist.entries.push_back({o, pr});
  }
  return dist;
}

// ---- B_C ----------------------------------------------------------------

// Exactly one output mode dark: the lit mode (5 or 6) and the parity of its
// count. Anything else is a failure.
struct BcKey {
  int mode;    // 5 or 6
  int parity;  // 0 even, 1 odd
  bool operator<(const BcKey& o) const { return mode != o.mode ? mode < o.mode : parity < o.parity; }
  bool operator==(const BcKey& o) const { return mode == o.mode && parity == o.parity; }
};

inline std::optional<BcKey> bc_classify(int n5, int n6) {
  if (n5 > 0 && n6 == 0) return BcKey{5, n5 % 2};
  if (n6 > 0 && n5 == 0) return BcKey{6, n6 % 2};
  return std::nullopt;
}

// Frozen decoding for a pair of squeezed-cat qubits. Derived by projector
// simulation (see derive_sc_table) and checked by the test suite.
inline std::optional<int> sc_decode(const std::optional<BcKey>& k) {
  if (!k) return std::nullopt;
  if (k->mode == 6) return k->parity == 0 ? PhiPlus : PsiPlus;
  return k->parity == 0 ? PhiMinus : PsiMinus;
}

// Half beam splitter on two modes of cutoff N, evaluated on outputs of
// cutoff 2N so no photon is lost to the output truncation.
class BcMeasurement {
 public:
  explicit BcMeasurement(int cutoff) : n_(cutoff), hbs_(0.5, 2 * cutoff, 2 * cutoff) {
    if (cutoff < 1) throw invalid_argument("BcMeasurement: cutoff must be >= 1");
  }
  int cutoff() const { return n_; }
  int outputCutoff() const { return 2 * n_; }

  // output amplitudes, indexed n5 * (2N+1) + n6
  Vec output(const Vec& f, const Vec& g) const {
    if (f.size() != n_ + 1 || g.size() != n_ + 1) throw invalid_argument("BcMeasurement: input cutoff mismatch");
    const int D = 2 * n_ + 1;
    Vec in = Vec::Zero(static_cast<long>(D) * D);
    for (int i = 0; i <= n_; ++i)
      for (int j = 0; j <= n_; ++j) in(i * D + j) = f(i) * g(j);
    return hbs_.apply(in);
  }

  cplx amplitude(const Vec& f, const Vec& g, int n5, int n6) const {
    const int D = 2 * n_ + 1;
    Vec in = Vec::Zero(static_cast<long>(D) * D);
    for (int i = 0; i <= n_; ++i)
      for (int j = 0; j <= n_; ++j) in(i * D + j) = f(i) * g(j);
    return hbs_.amplitude(in, n5, n6);
  }

 private:
  int n_;
  BeamSplitter hbs_;
};

// B_C on an arbitrary two-mode state {N+1, N+1}.
inline OutcomeDistribution bc_measure(const StateVector& pair) {
  if (pair.dims.size() != 2 || pair.dims[0] != pair.dims[1]) throw invalid_argument("bc_measure: expects two modes of equal cutoff");
  const int n = pair.dims[0] - 1, D = 2 * n + 1;
  BeamSplitter hbs(0.5, 2 * n, 2 * n);
  Vec in = Vec::Zero(static_cast<long>(D) * D);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) in(i * D + j) = pair.amps(i * (n + 1) + j);
  Vec out = hbs.apply(in);
  double n2 = pair.norm2();
  OutcomeDistribution dist;
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) {
      double pr = std::norm(out(a * D + b)) / n2;
      if (pr == 0.0) continue;
      BellOutcome o;
      o.rawPattern = {a, b};
      auto k = bc_classify(a, b);
      if (k) {
        o.kind = VerdictKind::Identified;
        o.bellIndex = *sc_decode(k);
      }
      dist.entries.push_back({o, pr});
    }
  return dist;
}

// ---- hybrid combination ---------------------------------------------------

struct HybridKey {
  BdVerdict bd;
  BcKey bc;
  bool operator<(const HybridKey& o) const { return bd != o.bd ? bd < o.bd : bc < o.bc; }
};

// Frozen decoding for a pair of hybrid qubits, keyed on the B_D verdict and
// the B_C key. Derived by projector simulation (derive_hybrid_table).
inline std::optional<int> hybrid_decode(BdVerdict bd, const std::optional<BcKey>& k) {
  if (!k || bd == BdVerdict::Failure) return std::nullopt;
  const int m = k->mode, p = k->parity;
  switch (bd) {
    case BdVerdict::PhiPartial:
      if (m == 6) return p == 0 ? PhiPlus : PsiPlus;
      return p == 0 ? PhiMinus : PsiMinus;
    case BdVerdict::PsiPlus:
      if (p == 0) return m == 5 ? PhiPlus : PhiMinus;
      return std::nullopt;
    case BdVerdict::PsiMinus:
      if (p == 1) return m == 5 ? PsiPlus : PsiMinus;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

enum class BsmKind { Hybrid, SqueezedCatOnly };

// One measurement outcome expressed on the logical inputs of the two
// measured qubits: amplitude = m . (logical 4-vector).
struct LogicalRow {
  int bd = -1;  // index into bd_patterns(), -1 for the cat-only measurement
  int n5 = 0, n6 = 0;
  std::optional<int> decoded;
  Vec4 m;
};

// Rows of the Bell measurement on two qubits whose bosonic parts for logical
// j are fa[j], gb[j] (not necessarily normalized, e.g. after a loss Kraus
// operator). Polarization parts are |+>, |-> for the hybrid measurement.
// Rows with zero amplitude everywhere are dropped.
inline std::vector<LogicalRow> logical_rows(const std::array<Vec, 2>& fa, const std::array<Vec, 2>& gb,
                                            BsmKind kind, const BcMeasurement& bc) {
  const int D = bc.outputCutoff() + 1;
  std::array<Vec, 4> out;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) out[2 * j + k] = bc.output(fa[j], gb[k]);
  std::vector<LogicalRow> rows;
  if (kind == BsmKind::SqueezedCatOnly) {
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) {
        LogicalRow r;
        r.n5 = a;
        r.n6 = b;
        for (int jk = 0; jk < 4; ++jk) r.m(jk) = out[jk](a * D + b);
        if (r.m.squaredNorm() == 0.0) continue;
        r.decoded = sc_decode(bc_classify(a, b));
        rows.push_back(r);
      }
    return rows;
  }
  const auto& pats = bd_patterns();
  std::array<Vec, 2> pol{pol_plus(), pol_minus()};
  for (std::size_t pi = 0; pi < pats.size(); ++pi) {
    Vec4 bdw;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        bdw(2 * j + k) = (pats[pi].w.transpose() * Eigen::kroneckerProduct(pol[j], pol[k]).eval()).value();
    if (bdw.squaredNorm() < 1e-30) continue;
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) {
        LogicalRow r;
        r.bd = static_cast<int>(pi);
        r.n5 = a;
        r.n6 = b;
        for (int jk = 0; jk < 4; ++jk) r.m(jk) = bdw(jk) * out[jk](a * D + b);
        if (r.m.squaredNorm() == 0.0) continue;
        r.decoded = hybrid_decode(pats[pi].verdict, bc_classify(a, b));
        rows.push_back(r);
      }
  }
  return rows;
}

struct BellStats {
  std::array<double, 4> correct{};     // P(decoded == b | b)
  std::array<double, 4> identified{};  // P(decoded at all | b)
  double averageCorrect = 0.0;
  double averageIdentified = 0.0;
  // failure channels, averaged over the four Bell states
  double vacuumFailure = 0.0;      // (n5, n6) = (0, 0)
  double bothLitFailure = 0.0;     // both outputs non-zero
  double otherFailure = 0.0;       // B_C fine but the combination is not in the table
  std::map<std::string, double> cellMass;  // averaged over Bell states
  int cutoff = 0;
};

namespace detail {

inline std::string cell_name(const LogicalRow& r) {
  std::string bc;
  auto k = bc_classify(r.n5, r.n6);
  if (!k) bc = (r.n5 == 0 && r.n6 == 0) ? "vac" : "both";
  else bc = "id" + std::to_string(k->mode) + std::to_string(k->parity);
  if (r.bd < 0) return bc;
  return std::string(bd_name(bd_patterns()[r.bd].verdict)) + "/" + bc;
}

}  // namespace detail

// Cutoff that fits both codewords at (alpha, xi).
inline int code_cutoff(double alpha, double xi, const TruncationPolicy& p = {}) {
  return minimal_cutoff(alpha, xi, p) + 2;
}

inline BellStats bell_stats(const CodeBasis& cb, BsmKind kind) {
  BcMeasurement bc(cb.cutoff());
  std::array<Vec, 2> f{cb.plus.amps, cb.minus.amps};
  auto rows = logical_rows(f, f, kind, bc);
  BellStats s;
  s.cutoff = cb.cutoff();
  for (int b = 0; b < 4; ++b) {
    Vec4 beta = bell_vector(b);
    for (auto& r : rows) {
      double pr = std::norm((r.m.transpose() * beta).value());
      if (pr == 0.0) continue;
      s.cellMass[detail::cell_name(r)] += pr / 4.0;
      if (r.decoded) {
        s.identified[b] += pr;
        if (*r.decoded == b) s.correct[b] += pr;
      } else if (r.n5 == 0 && r.n6 == 0) {
        s.vacuumFailure += pr / 4.0;
      } else if (r.n5 > 0 && r.n6 > 0) {
        s.bothLitFailure += pr / 4.0;
      } else {
        s.otherFailure += pr / 4.0;
      }
    }
  }
  for (int b = 0; b < 4; ++b) {
    s.averageCorrect += s.correct[b] / 4.0;
    s.averageIdentified += s.identified[b] / 4.0;
  }
  return s;
}

inline BellStats bell_stats(double alpha, double xi, BsmKind kind, int cutoff = 0, const TruncationPolicy& p = {}) {
  if (cutoff <= 0) cutoff = code_cutoff(alpha, xi, p);
  return bell_stats(code_basis(alpha, xi, cutoff, p), kind);
}

// Average over the four logical Bell states of the probability that the
// hybrid measurement names the right one.
inline double hybrid_bell_success(double alpha, double xi, int cutoff = 0, const TruncationPolicy& p = {}) {
  return bell_stats(alpha, xi, BsmKind::Hybrid, cutoff, p).averageCorrect;
}

// ---- decoding-table derivation ------------------------------------------

// Cells with mass above `minMass` whose content is at least `purity` one
// Bell state, at a reference point where the codewords are well separated.
template <class Key>
std::map<Key, int> derive_table(const std::vector<LogicalRow>& rows, const std::function<std::optional<Key>(const LogicalRow&)>& key,
                                double minMass, double purity) {
  std::map<Key, std::array<double, 4>> mass;
  for (auto& r : rows) {
    auto k = key(r);
    if (!k) continue;
    auto& m = mass[*k];
    for (int b = 0; b < 4; ++b) m[b] += std::norm((r.m.transpose() * bell_vector(b)).value());
  }
  std::map<Key, int> table;
  for (auto& [k, m] : mass) {
    double tot = m[0] + m[1] + m[2] + m[3];
    int best = static_cast<int>(std::max_element(m.begin(), m.end()) - m.begin());
    if (tot > minMass && m[best] / tot > purity) table[k] = best;
  }
  return table;
}

inline std::map<BcKey, int> derive_sc_table(double alphaRef = 3.0, double minMass = 1e-8, double purity = 0.999999) {
  int n = code_cutoff(alphaRef, 0.0);
  auto cb = code_basis(alphaRef, 0.0, n);
  BcMeasurement bc(n);
  std::array<Vec, 2> f{cb.plus.amps, cb.minus.amps};
  auto rows = logical_rows(f, f, BsmKind::SqueezedCatOnly, bc);
  return derive_table<BcKey>(rows, [](const LogicalRow& r) { return bc_classify(r.n5, r.n6); }, minMass, purity);
}

inline std::map<HybridKey, int> derive_hybrid_table(double alphaRef = 3.0, double minMass = 1e-8, double purity = 0.999999) {
  int n = code_cutoff(alphaRef, 0.0);
  auto cb = code_basis(alphaRef, 0.0, n);
  BcMeasurement bc(n);
  std::array<Vec, 2> f{cb.plus.amps, cb.minus.amps};
  auto rows = logical_rows(f, f, BsmKind::Hybrid, bc);
  return derive_table<HybridKey>(
      rows,
      [](const LogicalRow& r) -> std::optional<HybridKey> {
        auto k = bc_classify(r.n5, r.n6);
        BdVerdict v = bd_patterns()[r.bd].verdict;
        if (!k || v == BdVerdict::Failure) return std::nullopt;
        return HybridKey{v, *k};
      },
      minMass, purity);
}

// ---- optimal squeezing --------------------------------------------------

struct GridOptimum {
  double xiStar = 0.0;
  double pStar = 0.0;
  bool refined = false;
  std::vector<std::pair<double, double>> samples;  // (xi, objective) on the grid
  std::vector<double> skipped;                     // infeasible grid points
};

// Grid argmax (ties toward the smaller xi) followed by a parabola through
// the best point and its neighbours; the vertex replaces the grid optimum
// only if it actually scores higher.
inline GridOptimum maximize_on_grid(const std::vector<double>& grid, const std::function<double(double)>& f) {
  if (grid.empty()) throw invalid_argument("maximize_on_grid: empty grid");
  GridOptimum g;
  for (double x : grid) {
    try {
      g.samples.emplace_back(x, f(x));
    } catch (const infeasible_target&) {
      g.skipped.push_back(x);
    }
  }
  if (g.samples.empty()) throw infeasible_target("no feasible grid point");
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.samples.size(); ++i)
    if (g.samples[i].second > g.samples[best].second) best = i;
  g.xiStar = g.samples[best].first;
  g.pStar = g.samples[best].second;
  if (best > 0 && best + 1 < g.samples.size()) {
    auto [x0, y0] = g.samples[best - 1];
    auto [x1, y1] = g.samples[best];
    auto [x2, y2] = g.samples[best + 1];
    double den = (x0 - x1) * (y1 - y2) - (x1 - x2) * (y0 - y1);
    if (den != 0.0) {
      double num = (x0 - x1) * (x0 - x1) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y0 - y1);
      double xv = x1 - 0.5 * num / den;
      if (xv > x0 && xv < x2) {
        try {
          double yv = f(xv);
          if (yv > g.pStar) {
            g.xiStar = xv;
            g.pStar = yv;
            g.refined = true;
          }
        } catch (const infeasible_target&) {
        }
      }
    }
  }
  return g;
}

inline std::vector<double> default_xi_grid(double stop = 0.6, double step = 0.02) {
  std::vector<double> g;
  for (int i = 0; i * step <= stop + 1e-12; ++i) g.push_back(i * step);
  return g;
}

// xi maximizing the hybrid Bell success at fixed nbar (mean photon number of
// the even squeezed cat).
inline GridOptimum optimal_squeezing(double nbar, const std::vector<double>& xiGrid, int cutoff = 0,
                                     const TruncationPolicy& p = {}) {
  return maximize_on_grid(xiGrid, [&](double xi) {
    double a = amplitude_for_mean_photon(nbar, xi, +1, 0, p);
    return hybrid_bell_success(a, xi, cutoff, p);
  });
}

}  // namespace hsc

#pragma once

// Logical gates on hybrid qubits: X and Z(theta) directly, H / CZ / CNOT by
// gate teleportation through a hybrid resource state, with Pauli-frame
// corrections chosen from the decoded Bell outcomes.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "hsc/bell.hpp"
#include "hsc/product_state.hpp"

namespace hsc {

// ---- abstract qubit algebra ---------------------------------------------

// X^x Z^z
struct PauliBits {
  int x = 0, z = 0;
  bool operator==(const PauliBits& o) const { return x == o.x && z == o.z; }
};

inline Mat pauli_matrix(PauliBits p) {
  Mat x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  Mat m = Mat::Identity(2, 2);
  if (p.x) m = m * x;
  if (p.z) m = m * z;
  return m;
}

inline Mat pauli_string(const std::vector<PauliBits>& ps) {
  Mat m = Mat::Identity(1, 1);
  for (auto& p : ps) m = Eigen::kroneckerProduct(m, pauli_matrix(p)).eval();
  return m;
}

enum class GateKind { Identity, H, CZ, CNOT };

inline const char* gate_name(GateKind g) {
  switch (g) {
    case GateKind::Identity: return "identity";
    case GateKind::H: return "H";
    case GateKind::CZ: return "CZ";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

inline int gate_qubits(GateKind g) { return (g == GateKind::CZ || g == GateKind::CNOT) ? 2 : 1; }

inline Mat ideal_gate(GateKind g) {
  Mat m;
  switch (g) {
    case GateKind::Identity: return Mat::Identity(2, 2);
    case GateKind::H:
      m.resize(2, 2);
      m << 1, 1, 1, -1;
      return m / std::sqrt(2.0);
    case GateKind::CZ:
      m = Mat::Identity(4, 4);
      m(3, 3) = -1;
      return m;
    case GateKind::CNOT:
      m = Mat::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;  // first qubit controls
      return m;
  }
  throw invalid_argument("unknown gate");
}

// Resource on qubits (a1, a2) or (a1, a2, b1, b2): the gate applied to the
// outputs (a2 / b2) of one or two |Phi+> pairs.
inline Vec logical_resource(GateKind g) {
  Vec phi = bell_vector(PhiPlus);
  if (gate_qubits(g) == 1) {
    Mat op = Eigen::kroneckerProduct(Mat::Identity(2, 2), ideal_gate(g)).eval();
    return op * phi;
  }
  Vec two = Eigen::kroneckerProduct(phi, phi).eval();  // a1 a2 b1 b2
  // gate on (a2, b2): permute to (a1, b1, a2, b2), apply I(x)G, permute back
  Vec out = Vec::Zero(16);
  Mat G = ideal_gate(g);
  for (int i = 0; i < 16; ++i) {
    int a1 = (i >> 3) & 1, a2 = (i >> 2) & 1, b1 = (i >> 1) & 1, b2 = i & 1;
    int col = a2 * 2 + b2;
    for (int row = 0; row < 4; ++row) {
      int na2 = row >> 1, nb2 = row & 1;
      int j = (a1 << 3) | (na2 << 2) | (b1 << 1) | nb2;
      out(j) += G(row, col) * two(i);
    }
  }
  return out;
}

inline PauliBits bell_frame(int b) {
  switch (b) {
    case PhiPlus: return {0, 0};
    case PhiMinus: return {0, 1};
    case PsiPlus: return {1, 0};
    case PsiMinus: return {1, 1};
  }
  throw invalid_argument("bell index outside 0..3");
}

// Frozen correction tables: the Pauli frame (one entry per output qubit)
// that undoes the by-product left by Bell outcomes `bells` when teleporting
// through the resource of `g`. Re-derived by search in the test suite.
inline std::vector<PauliBits> teleport_correction(GateKind g, const std::vector<int>& bells) {
  if (static_cast<int>(bells.size()) != gate_qubits(g)) throw invalid_argument("teleport_correction: wrong outcome count");
  auto s = bell_frame(bells[0]);
  switch (g) {
    case GateKind::Identity: return {s};
    case GateKind::H: return {{s.z, s.x}};
    case GateKind::CZ: {
      auto t = bell_frame(bells[1]);
      return {{s.x, s.z ^ t.x}, {t.x, t.z ^ s.x}};
    }
    case GateKind::CNOT: {
      auto t = bell_frame(bells[1]);
      return {{s.x, s.z ^ t.z}, {s.x ^ t.x, t.z}};
    }
  }
  throw invalid_argument("unknown gate");
}

// Output map K for ideal Bell outcomes on abstract qubits, used to derive
// (and check) the correction tables.
inline Mat abstract_teleport_map(GateKind g, const std::vector<int>& bells) {
  int q = gate_qubits(g);
  Vec res = logical_resource(g);
  int dimIn = 1 << q;
  Mat K = Mat::Zero(dimIn, dimIn);
  for (int in = 0; in < dimIn; ++in) {
    for (int r = 0; r < (1 << (2 * q)); ++r) {
      if (res(r) == 0.0) continue;
      cplx amp = res(r);
      int out = 0;
      for (int k = 0; k < q; ++k) {
        int inBit = (in >> (q - 1 - k)) & 1;
        int head = (r >> (2 * q - 1 - 2 * k)) & 1;       // a1 or b1
        int tailBit = (r >> (2 * q - 2 - 2 * k)) & 1;    // a2 or b2
        amp *= std::conj(bell_vector(bells[k])(2 * inBit + head));
        out = (out << 1) | tailBit;
      }
      K(out, in) += amp;
    }
  }
  return K;
}

inline std::vector<PauliBits> search_correction(GateKind g, const std::vector<int>& bells) {
  int q = gate_qubits(g);
  Mat K = abstract_teleport_map(g, bells);
  Mat G = ideal_gate(g);
  double best = -1.0;
  std::vector<PauliBits> arg;
  for (int code = 0; code < (1 << (2 * q)); ++code) {
    std::vector<PauliBits> ps;
    for (int k = 0; k < q; ++k) ps.push_back({(code >> (2 * k + 1)) & 1, (code >> (2 * k)) & 1});
    double score = std::abs((G.adjoint() * pauli_string(ps) * K).trace());
    if (score > best + 1e-12) {
      best = score;
      arg = ps;
    }
  }
  return arg;
}

// ---- hybrid single-qubit gates ------------------------------------------

// |+><+| + e^{i theta}|-><-| on the polarization mode
inline StateVector apply_z_gate(const StateVector& q, double theta) {
  if (q.dims.size() != 2 || q.dims[0] != 2) throw invalid_argument("apply_z_gate: expects a hybrid qubit {2, N+1}");
  Mat z = pol_plus() * pol_plus().adjoint() + std::exp(cplx(0, theta)) * pol_minus() * pol_minus().adjoint();
  return apply_local(q, {0}, DenseOperator({2}, z));
}

struct XGateResult {
  StateVector state;
  double magnitude = 0.0;
};

inline double default_x_magnitude(double xi) {
  if (xi == 0.0) throw invalid_argument("X gate: default magnitude pi/(4 xi) undefined at xi = 0; pass a magnitude");
  return M_PI / (4.0 * xi);
}

// |+> <-> |-> on the polarization (diag(1,-1) in H/V) and i D(i m) on the
// bosonic mode.
inline XGateResult apply_x_gate(const StateVector& q, double xi, std::optional<double> magnitude = std::nullopt,
                                const TruncationPolicy& p = {}) {
  if (q.dims.size() != 2 || q.dims[0] != 2) throw invalid_argument("apply_x_gate: expects a hybrid qubit {2, N+1}");
  double m = magnitude ? *magnitude : default_x_magnitude(xi);
  Mat zpol(2, 2);
  zpol << 1, 0, 0, -1;
  int n = q.dims[1] - 1;
  DenseOperator d = displacement_operator(cplx(0, m), n, p);
  StateVector s = apply_local(q, {0}, DenseOperator({2}, zpol));
  s = apply_local(s, {1}, DenseOperator({n + 1}, cplx(0, 1) * d.matrix));
  return {s, m};
}

// |<1_L| X |0_L>|^2, on a cutoff that fits the displaced codeword.
inline double x_gate_fidelity(double alpha, double xi, std::optional<double> magnitude = std::nullopt, int cutoff = 0,
                              const TruncationPolicy& p = {}) {
  double m = magnitude ? *magnitude : default_x_magnitude(xi);
  if (cutoff <= 0) cutoff = minimal_cutoff(cplx(alpha, m), xi, p) + 4;
  auto zero = hybrid_codeword(0, alpha, xi, cutoff, p).state;
  auto one = hybrid_codeword(1, alpha, xi, cutoff, p).state;
  auto out = apply_x_gate(zero, xi, m, p).state;
  return std::norm(inner(one, out));
}

struct XMagnitudeScan {
  double bestMagnitude = 0.0;
  double bestFidelity = 0.0;
};

// Magnitude in (0, maxMagnitude] that maximizes the logical-X fidelity:
// coarse scan, then Brent on the best bracket.
inline XMagnitudeScan best_x_magnitude(double alpha, double xi, double maxMagnitude = 4.0, int coarse = 80,
                                       const TruncationPolicy& p = {}) {
  int cutoff = minimal_cutoff(cplx(alpha, maxMagnitude), xi, p) + 4;
  auto f = [&](double m) { return x_gate_fidelity(alpha, xi, m, cutoff, p); };
  double h = maxMagnitude / coarse;
  int best = 1;
  double bv = f(h);
  for (int i = 2; i <= coarse; ++i) {
    double v = f(i * h);
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  double lo = std::max(1e-9, (best - 1) * h), hi = std::min(maxMagnitude, (best + 1) * h);
  auto r = boost::math::tools::brent_find_minima([&](double m) { return -f(m); }, lo, hi, 40);
  XMagnitudeScan s{best * h, bv};
  if (-r.second > bv) s = {r.first, -r.second};
  return s;
}

// ---- gate teleportation -------------------------------------------------

struct AncillaResource {
  GateKind kind = GateKind::Identity;
  CodeBasis code;
  ProductTermState state;  // modes r<k>.pol, r<k>.sc for each resource qubit
};

// hybrid codeword product sum_{bits} c[bits] |bits_L>
inline ProductTermState hybrid_logical_product(const Vec& coeffs, int qubits, const CodeBasis& cb,
                                               const std::string& prefix) {
  std::vector<int> dims;
  std::vector<std::string> labels;
  for (int k = 0; k < qubits; ++k) {
    dims.push_back(2);
    dims.push_back(cb.plus.dim());
    labels.push_back(prefix + std::to_string(k) + ".pol");
    labels.push_back(prefix + std::to_string(k) + ".sc");
  }
  ProductTermState s(dims, labels);
  for (int i = 0; i < coeffs.size(); ++i) {
    if (coeffs(i) == 0.0) continue;
    std::vector<Vec> f;
    for (int k = 0; k < qubits; ++k) {
      int bit = (i >> (qubits - 1 - k)) & 1;
      f.push_back(bit == 0 ? pol_plus() : pol_minus());
      f.push_back(cb[bit].amps);
    }
    s.add_term(coeffs(i), std::move(f));
  }
  return s;
}

inline AncillaResource make_resource(GateKind g, const CodeBasis& cb) {
  return {g, cb, hybrid_logical_product(logical_resource(g), 2 * gate_qubits(g), cb, "r")};
}

struct TeleportResult {
  double successProbability = 0.0;  // identified (heralded) mass
  double failureProbability = 0.0;  // partial and failed outcomes
  double conditionalFidelity = 0.0;
  Mat conditionalOutput;  // logical density matrix on identified branches, normalized
  double codeSpaceLeak = 0.0;  // mass of the output outside the logical span (should be ~0)
};

namespace detail {

inline int mode_of(const ProductTermState& s, const std::string& label) {
  for (std::size_t i = 0; i < s.labels().size(); ++i)
    if (s.labels()[i] == label) return static_cast<int>(i);
  throw invalid_argument("no mode labelled " + label);
}

}  // namespace detail

// Teleports the logical input `in` (2^q amplitudes over the code basis of
// `res`) through the resource. Every Bell measurement outcome that decodes
// gets its Pauli correction; the rest counts as failure.
inline TeleportResult teleport_gate(GateKind kind, const Vec& in, const AncillaResource& res) {
  const int q = gate_qubits(kind);
  if (res.kind != kind) throw invalid_argument("teleport_gate: resource does not match the gate");
  if (in.size() != (1 << q)) throw invalid_argument("teleport_gate: input size does not match the gate");
  Vec psi = in / in.norm();
  const CodeBasis& cb = res.code;
  ProductTermState full = tensor_product(hybrid_logical_product(psi, q, cb, "in"), res.state);
  BcMeasurement bc(cb.cutoff());
  const int D = bc.outputCutoff() + 1;
  const auto& pats = bd_patterns();

  // logical basis of the outputs (resource qubits 1 and 3)
  std::vector<ProductTermState> basis;
  for (int i = 0; i < (1 << q); ++i) {
    Vec e = Vec::Zero(1 << q);
    e(i) = 1.0;
    ProductTermState b = hybrid_logical_product(e, q, cb, "o");
    basis.push_back(b);
  }

  Mat rho = Mat::Zero(1 << q, 1 << q);
  double identified = 0.0, leak = 0.0;
  Vec ideal = ideal_gate(kind) * psi;

  std::vector<int> bells(q, -1);
  std::function<void(const ProductTermState&, int)> step = [&](const ProductTermState& s, int k) {
    if (k == q) {
      // remaining modes: r1 / r3 in order
      Vec c(1 << q);
      for (int i = 0; i < (1 << q); ++i) {
        cplx acc = 0.0;
        for (auto& tb : basis[i].terms())
          for (auto& ts : s.terms()) {
            cplx p = std::conj(tb.weight) * ts.weight;
            for (std::size_t m = 0; m < ts.factors.size(); ++m) p *= tb.factors[m].dot(ts.factors[m]);
            acc += p;
          }
        c(i) = acc;
      }
      double mass = s.norm2();
      leak += mass - c.squaredNorm();
      Vec corrected = pauli_string(teleport_correction(kind, bells)) * c;
      rho += corrected * corrected.adjoint();
      identified += mass;
      return;
    }
    const std::string in = "in" + std::to_string(k), head = "r" + std::to_string(2 * k);
    auto bdLoop = [&](int pi, const ProductTermState& afterBd) {
      const int sa = detail::mode_of(afterBd, in + ".sc"), sb = detail::mode_of(afterBd, head + ".sc");
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
          auto key = bc_classify(a, b);
          if (!key) continue;
          std::optional<int> dec = hybrid_decode(pats[pi].verdict, key);
          if (!dec) continue;
          ProductTermState t = afterBd.contract_pair(
              sa, sb, [&](const Vec& f, const Vec& g) { return bc.amplitude(f, g, a, b); });
          if (t.terms().empty()) continue;
          bells[k] = *dec;
          step(t, k + 1);
        }
    };
    const int pa = detail::mode_of(s, in + ".pol"), pb = detail::mode_of(s, head + ".pol");
    for (std::size_t pi = 0; pi < pats.size(); ++pi) {
      if (pats[pi].verdict == BdVerdict::Failure) continue;
      const Vec4& w = pats[pi].w;
      ProductTermState t = s.contract_pair(pa, pb, [&](const Vec& f, const Vec& g) {
        return cplx(w(0) * f(0) * g(0) + w(1) * f(0) * g(1) + w(2) * f(1) * g(0) + w(3) * f(1) * g(1));
      });
      if (t.terms().empty() || t.norm2() < 1e-300) continue;
      bdLoop(static_cast<int>(pi), t);
    }
  };
  step(full, 0);

  TeleportResult r;
  r.successProbability = identified;
  r.failureProbability = 1.0 - identified;
  r.codeSpaceLeak = leak;
  if (identified > 0.0) {
    r.conditionalOutput = rho / rho.trace().real();
    r.conditionalFidelity = (ideal.adjoint() * r.conditionalOutput * ideal)(0, 0).real();
  }
  return r;
}

}  // namespace hsc

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Figures use the default CLI grids.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "hsc/hsc.hpp"
#include "hsc/experiment.hpp"
#include "oracles.hpp"

using namespace hsc;
namespace ex = hsc::experiment;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limitSeconds;  // 0 = no runtime requirement
  std::function<Verdict()> run;
};

double maxdiff(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::string f(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---- 1 ----------------------------------------------------------------------

Verdict operators() {
  double worst = 0, worstMoment = 0;
  for (cplx a : {cplx(0.5, 0), cplx(1.2, -0.7), cplx(2.5, 0)}) {
    int n = minimal_cutoff(a, 0.0);
    worst = std::max(worst, maxdiff(displacement_operator(a, n).matrix.col(0), oracle::coherent(a, n)));
    worstMoment = std::max(worstMoment, std::abs(mean_photon_number(coherent_state(a, n)) - std::norm(a)));
  }
  for (cplx xi : {cplx(0.25, 0), cplx(0.5, 0.3), cplx(0.9, 0)}) {
    int n = minimal_cutoff(0.0, xi);
    worst = std::max(worst, maxdiff(squeeze_operator(xi, n).matrix.col(0), oracle::squeezed_vacuum(xi, n)));
    worstMoment = std::max(worstMoment, std::abs(mean_photon_number(squeezed_vacuum(xi, n)) - std::pow(std::sinh(std::abs(xi)), 2)));
  }
  for (auto [a, xi] : {std::pair<cplx, cplx>{1.0, 0.3}, {cplx(0.7, 0.4), cplx(0.5, -0.2)}}) {
    int n = minimal_cutoff(a, xi);
    worst = std::max(worst, maxdiff(displaced_squeezed_state(a, xi, n).amps, oracle::displaced_squeezed(a, xi, n)));
  }
  for (double t : {0.5, 0.8}) {
    cplx a(1.1, 0.2), b(-0.6, 0.5);
    int n = minimal_cutoff(std::abs(a) + std::abs(b), 0.0);
    BeamSplitter bs(t, n, n);
    Vec in = Eigen::kroneckerProduct(oracle::coherent(a, n), oracle::coherent(b, n)).eval();
    double st = std::sqrt(t), sr = std::sqrt(1 - t);
    Vec ref = Eigen::kroneckerProduct(oracle::coherent(st * a - sr * b, n), oracle::coherent(sr * a + st * b, n)).eval();
    Vec out = bs.apply(in);
    // photon-number blocks that fit entirely inside the cutoff
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) worst = std::max(worst, std::abs(out(i * (n + 1) + j) - ref(i * (n + 1) + j)));
  }
  // Hong-Ou-Mandel
  BeamSplitter hbs(0.5, 2, 2);
  Vec one = Vec::Zero(9);
  one(1 * 3 + 1) = 1;
  Vec hom = hbs.apply(one);
  worst = std::max(worst, std::abs(hom(4)));
  worst = std::max(worst, std::abs(std::abs(hom(2 * 3)) - M_SQRT1_2));
  return {worst < 1e-8 && worstMoment < 1e-8, "max amplitude error " + f(worst) + ", moment error " + f(worstMoment)};
}

// ---- 2 ----------------------------------------------------------------------

Verdict loss_structure() {
  bool flip = true;
  std::ostringstream d;
  for (double a : {0.8, 1.5})
    for (int p : {1, -1}) {
      int n = minimal_cutoff(a, 0.0) + 4;
      auto ld = loss_decomposition(a, 0.0, p, n);
      auto cb = code_basis(a, 0.0, n);
      Vec as = oracle::annihilation(n) * cb[p == 1 ? 0 : 1].amps;
      const Vec& other = cb[p == 1 ? 1 : 0].amps;
      double fid = std::norm(other.dot(as)) / as.squaredNorm();
      flip = flip && std::abs(fid - 1) <= 1e-9 && std::abs(ld.d) < 1e-10;
    }
  double worst = 0, dmin = 1;
  for (double xi : {0.25, 0.5})
    for (int p : {1, -1}) {
      double a = 1.0;
      int n = minimal_cutoff(a, xi) + 4;
      auto ld = loss_decomposition(a, xi, p, n);
      // ||a C||^2 = <n>, from the closed-form amplitudes far past the cutoff
      Vec v = oracle::displaced_squeezed(a, xi, 80) + double(p) * oracle::displaced_squeezed(-a, xi, 80);
      double an2 = 0;
      for (int k = 1; k <= 80; ++k) an2 += k * std::norm(v(k));
      an2 /= v.squaredNorm();
      worst = std::max(worst, std::abs(std::norm(ld.c) + std::norm(ld.d) - an2));
      dmin = std::min(dmin, std::abs(ld.d));
    }
  d << "xi=0 phase flip " << (flip ? "holds" : "broken") << ", min d (xi>0) " << f(dmin) << ", norm error " << f(worst);
  return {flip && dmin > 0 && worst <= 1e-10, d.str()};
}

// ---- 3 ----------------------------------------------------------------------

Verdict generation_exactness() {
  double worstF = 1, worstBalance = 0;
  std::string where;
  for (double t : {0.3, 0.5, 0.8})
    for (double a : {1.0, 1.5, 2.0})
      for (double xi : {0.0, 0.25, 0.5}) {
        GenerationConfig c;
        c.t = t;
        c.alpha_i = a;
        c.xi = xi;
        c.cutoff = 30;
        auto r = run_generation(c);
        worstBalance = std::max(worstBalance, std::abs(r.pPi - r.pPiPrime));
        if (r.targetFidelity < worstF) {
          worstF = r.targetFidelity;
          where = "t=" + f(t) + " alpha_i=" + f(a) + " xi=" + f(xi);
        }
      }
  return {worstF >= 1 - 1e-6 && worstBalance <= 1e-10,
          "min fidelity " + f(worstF) + " at " + where + ", max |P_Pi - P_Pi'| " + f(worstBalance)};
}

// ---- 4 ----------------------------------------------------------------------

Verdict fig2() {
  auto ts = ex::parse_range("0.05:0.95:0.05");
  std::vector<double> xis{0.0, 0.25, 0.5};
  auto rows = ex::ordered_map<GenerationRow>(
      ts.size() * 3, [&](std::size_t i) { return generation_point(ts[i % ts.size()], 2.0, xis[i / ts.size()], 30); }, 0);
  auto p = [&](int x, std::size_t i) { return rows[x * ts.size() + i].pTotal; };
  bool high = true, violation = false;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    bool ordered = p(2, i) > p(1, i) && p(1, i) > p(0, i);
    if (ts[i] >= 0.8 - 1e-12) high = high && ordered;
    if (ts[i] <= 0.4 + 1e-12 && !ordered) violation = true;
  }
  return {high && violation, std::string("ordered for t>=0.8: ") + (high ? "yes" : "no") +
                                 ", violation at t<=0.4: " + (violation ? "yes" : "no")};
}

// ---- 5 ----------------------------------------------------------------------

Verdict fig4() {
  auto nbars = ex::parse_range("0.2:3.0:0.1");
  auto grid = default_xi_grid();
  auto opt = ex::ordered_map<GridOptimum>(nbars.size(), [&](std::size_t i) { return optimal_squeezing(nbars[i], grid); }, 0);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < opt.size(); ++i)
    if (opt[i].xiStar > opt[peak].xiStar) peak = i;
  bool rising = peak > 0 && opt[0].xiStar < opt[peak].xiStar;
  std::string seq;
  for (std::size_t i = 0; i <= peak; ++i) {
    if (i > 0) rising = rising && opt[i].xiStar >= opt[i - 1].xiStar;
    seq += (i ? " " : "") + f(opt[i].xiStar);
  }
  bool peakOk = std::abs(nbars[peak] - 1.3) <= 0.3 + 1e-12;
  bool mono = true;
  for (std::size_t i = 1; i < opt.size(); ++i) mono = mono && opt[i].pStar >= opt[i - 1].pStar - 1e-12;
  return {rising && peakOk && mono, "xi* peaks at nbar=" + f(nbars[peak]) + " (xi*=" + f(opt[peak].xiStar) +
                                        "), rising below: " + (rising ? "yes" : "no") + " (" + seq + ")" +
                                        ", P* non-decreasing: " + (mono ? "yes" : "no")};
}

// ---- 6 ----------------------------------------------------------------------

Verdict teleport_identity() {
  std::ostringstream d;
  bool ok = true;
  for (CodeKind k : {CodeKind::HybridSqueezedCat, CodeKind::SqueezedCat}) {
    auto r = run_compensation(k, 3.0, 0.0, 1.0);
    ok = ok && std::abs(r.conditionalFidelity - 1) <= 1e-8;
    d << code_name(k) << " eta=1 F=" << f(r.conditionalFidelity) << "; ";
  }
  auto cb = code_basis(2.5, 0.0, code_cutoff(2.5, 0.0));
  Vec in1(2);
  in1 << 0.8, cplx(0, 0.6);
  auto h = teleport_gate(GateKind::H, in1, make_resource(GateKind::H, cb));
  ok = ok && h.conditionalFidelity >= 1 - 1e-5;
  d << "H F=" << f(h.conditionalFidelity) << "; ";

  // largest amplitude whose codewords fit cutoff 10 under the default tail check
  double best = 0;
  for (double a = 0.5; a <= 2.0 + 1e-12; a += 0.05) {
    try {
      code_basis(a, 0.0, 10);
      best = a;
    } catch (const truncation_error&) {
      break;
    }
  }
  auto cb10 = code_basis(best, 0.0, 10);
  Vec in2(4);
  in2 << 0.6, cplx(0, 0.3), 0.5, std::sqrt(0.3);
  auto cx = teleport_gate(GateKind::CNOT, in2, make_resource(GateKind::CNOT, cb10));
  ok = ok && cx.conditionalFidelity >= 1 - 1e-5;
  d << "CNOT at cutoff 10 (alpha=" << f(best) << ") F=" << f(cx.conditionalFidelity);
  return {ok, d.str()};
}

// ---- 7 ----------------------------------------------------------------------

Verdict fig6() {
  auto nbars = ex::parse_range("0.5:3.0:0.25");
  auto grid = default_xi_grid();
  std::vector<double> etas{0.99, 0.90};
  std::vector<CodeKind> codes{CodeKind::HybridSqueezedCat, CodeKind::SqueezedCat};
  const std::size_t per = etas.size() * codes.size();
  auto rows = ex::ordered_map<CompensationRow>(
      nbars.size() * per,
      [&](std::size_t i) { return compensation_point(nbars[i / per], codes[i % 2], etas[(i / 2) % etas.size()], grid); }, 0);
  auto at = [&](std::size_t n, std::size_t e, std::size_t c) { return rows[n * per + e * 2 + c].pSuccess; };
  bool low = true, gap = true;
  std::ostringstream d;
  for (std::size_t e = 0; e < etas.size(); ++e) {
    for (std::size_t n = 0; n < nbars.size(); ++n)
      if (nbars[n] <= 1.0 + 1e-12) low = low && at(n, e, 0) > at(n, e, 1);
    double g0 = at(0, e, 0) - at(0, e, 1), g3 = at(nbars.size() - 1, e, 0) - at(nbars.size() - 1, e, 1);
    gap = gap && std::abs(g3) < std::abs(g0);
    d << "eta=" << etas[e] << ": nbar=0.5 hsc " << f(at(0, e, 0)) << " vs sc " << f(at(0, e, 1)) << "; ";
  }
  d << "H-SC ahead for nbar<=1: " << (low ? "yes" : "no") << ", gap shrinks by nbar=3: " << (gap ? "yes" : "no");
  return {low && gap, d.str()};
}

// ---- 8 ----------------------------------------------------------------------

Verdict channel_laws() {
  double resid = 0, comp = 0, moment = 0;
  for (double eta : {0.99, 0.9, 0.5}) resid = std::max(resid, loss_kraus(eta, 30).residual);
  auto s = displaced_squeezed_state(1.0, 0.2, 40);
  for (auto [e1, e2] : {std::pair{0.9, 0.8}, {0.99, 0.5}}) {
    auto two = apply_loss(apply_loss(s, e1), LossChannelParams{e2, {0}});
    comp = std::max(comp, (two.rho - apply_loss(s, e1 * e2).rho).cwiseAbs().maxCoeff());
  }
  for (double eta : {0.9, 0.6}) {
    auto r = apply_loss(s, eta);
    double m = 0;
    for (int k = 0; k < r.rho.rows(); ++k) m += k * r.rho(k, k).real();
    moment = std::max(moment, std::abs(m - eta * mean_photon_number(s)));
  }
  return {resid < 1e-8 && comp <= 1e-8 && moment <= 1e-8,
          "Kraus residual " + f(resid) + ", composition error " + f(comp) + ", <n> error " + f(moment)};
}

// ---- 9 ----------------------------------------------------------------------

Verdict representations() {
  std::mt19937 g(2024);
  std::normal_distribution<double> nd;
  auto rv = [&](int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = cplx(nd(g), nd(g));
    return Vec(v / v.norm());
  };
  auto rpts = [&](const std::vector<int>& dims, int terms) {
    ProductTermState s(dims);
    for (int k = 0; k < terms; ++k) {
      std::vector<Vec> fs;
      for (int d : dims) fs.push_back(rv(d));
      s.add_term(cplx(nd(g), nd(g)), fs);
    }
    return s;
  };
  double worst = 0;
  int instances = 0;
  for (int cutoff : {4, 8, 12}) {
    int d = cutoff + 1;
    for (std::vector<int> dims : {std::vector<int>{d}, {2, d, d}, {d, 2, d, d}}) {
      auto a = rpts(dims, 3), b = rpts(dims, 2);
      auto da = a.to_dense(), db = b.to_dense();
      worst = std::max(worst, std::abs(inner(a, b) - da.amps.dot(db.amps)));
      int m = static_cast<int>(dims.size()) - 1;
      Mat op = oracle::annihilation(cutoff);
      worst = std::max(worst, maxdiff(a.apply(m, op).to_dense().amps, apply_local(da, {m}, DenseOperator({d}, op)).amps));
      Pattern p{{m, 1}};
      worst = std::max(worst, std::abs(project(a, p).probability - project(da, p).probability));
      instances += 3;
    }
  }
  return {worst <= 1e-10, std::to_string(instances) + " comparisons, max deviation " + f(worst)};
}

// ---- 10 ---------------------------------------------------------------------

int run_cli(const std::string& args) {
  std::string cmd = std::string(HSCSIM_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  auto dir = std::filesystem::temp_directory_path() / ("hsc_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "gen.cfg") << "nbar = 2.0\nxi = 0,0.25\nt = 0.2:0.8:0.3\ncutoff = 24\n";
  std::ofstream(dir / "loss.cfg") << "nbar = 0.5,1.5\neta = 0.9\nxi-grid = 0:0.1:0.05\n";
  std::ofstream(dir / "bell.cfg") << "nbar = 0.5,1.3\nxi-grid = 0:0.1:0.05\n";
  bool ok = true;
  int runs = 0;
  for (auto [cmd, cfg] : {std::pair<std::string, std::string>{"gen-sweep", "gen.cfg"},
                          {"loss-comp", "loss.cfg"},
                          {"bell-optimal", "bell.cfg"}}) {
    std::string first;
    for (int k = 0; k < 2; ++k) {
      auto out = dir / (cmd + std::to_string(k) + ".csv");
      int rc = run_cli(cmd + " --config " + (dir / cfg).string() + " --out " + out.string());
      ++runs;
      std::string text = slurp(out);
      ok = ok && rc == 0 && !text.empty();
      if (k == 0) first = text;
      else ok = ok && text == first;
    }
  }
  std::filesystem::remove_all(dir);
  return {ok, std::to_string(runs) + " runs, " + (ok ? "byte-identical" : "outputs differ or failed")};
}

}  // namespace

int main() {
  std::vector<Criterion> all{
      {1, "operator oracle suite", 10, operators},
      {2, "loss structure of the code", 0, loss_structure},
      {3, "generation exactness", 60, generation_exactness},
      {4, "generation probability ordering", 300, fig2},
      {5, "optimal squeezing for the Bell measurement", 600, fig4},
      {6, "teleportation identity", 0, teleport_identity},
      {7, "loss compensation comparison", 900, fig6},
      {8, "channel laws", 0, channel_laws},
      {9, "representation equivalence", 0, representations},
      {10, "CLI determinism", 0, determinism},
  };
  int failed = 0;
  for (auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool timeOk = c.limitSeconds <= 0 || s < c.limitSeconds;
    bool pass = v.pass && timeOk;
    if (!pass) ++failed;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1fs", s);
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << v.detail << "; "
              << secs << (timeOk ? "" : " over limit") << "]" << std::endl;
  }
  std::cout << (all.size() - failed) << "/" << all.size() << " criteria pass" << std::endl;
  return failed ? 1 : 0;
}

// hscsim: sweeps for generation, optimal squeezing of the hybrid Bell
// measurement, and loss compensation. Writes CSV (and optionally SVG).

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsc/hsc.hpp"

namespace ex = hsc::experiment;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options are bound to strings so a config file can fill whatever the
// command line left unset.
struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;
  std::string config;

  CLI::Option* opt(const std::string& name, const std::string& def, const std::string& help) {
    values[name] = def;
    auto* o = app->add_option("--" + name, values[name], help);
    if (!def.empty()) o->default_str(def);
    opts[name] = o;
    return o;
  }
  CLI::Option* flag(const std::string& name, const std::string& help) {
    values[name] = "false";
    auto* o = app->add_flag_function(
        "--" + name, [this, name](std::int64_t) { values[name] = "true"; }, help);
    opts[name] = o;
    return o;
  }

  void merge_config() {
    if (config.empty()) return;
    std::vector<std::string> keys;
    for (auto& [k, v] : values) keys.push_back(k);
    std::map<std::string, std::string> kv;
    try {
      kv = ex::read_config(config, keys);
    } catch (const hsc::invalid_argument& e) {
      throw UsageError(e.what());
    }
    for (auto& [k, v] : kv)
      if (opts[k]->count() == 0) values[k] = v;
  }

  const std::string& str(const std::string& k) const { return values.at(k); }
  double num(const std::string& k) const {
    try {
      return ex::parse_double(str(k));
    } catch (const hsc::invalid_argument& e) {
      throw UsageError("--" + k + ": " + e.what());
    }
  }
  int integer(const std::string& k) const {
    double v = num(k);
    if (v != static_cast<int>(v)) throw UsageError("--" + k + ": expected an integer");
    return static_cast<int>(v);
  }
  bool on(const std::string& k) const {
    const auto& s = str(k);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw UsageError("--" + k + ": expected true or false");
  }
  std::vector<double> range(const std::string& k) const {
    try {
      return ex::parse_range(str(k));
    } catch (const hsc::invalid_argument& e) {
      throw UsageError("--" + k + ": " + e.what());
    }
  }
  hsc::TruncationPolicy policy() const {
    hsc::TruncationPolicy p;
    p.guard = integer("guard");
    p.tailTolerance = num("tail-tol");
    if (p.guard < 0 || !(p.tailTolerance > 0.0)) throw UsageError("guard must be >= 0 and tail-tol > 0");
    return p;
  }
  unsigned threads() const {
    int t = integer("threads");
    if (t < 0) throw UsageError("--threads must be >= 0");
    return static_cast<unsigned>(t);
  }
};

void common(Command& c) {
  c.app->add_option("--config", c.config, "key = value file; command-line flags take precedence")
      ->check(CLI::ExistingFile);
  c.opt("out", "", "CSV output path");
  c.opt("plot", "", "optional SVG output path");
  c.opt("guard", "10", "guard band for operator construction");
  c.opt("tail-tol", "1e-10", "tolerated probability beyond the cutoff");
  c.opt("threads", "0", "worker threads, 0 = all cores");
}

void emit(const Command& c, const ex::CsvTable& t, const ex::PlotSpec* plot) {
  if (c.str("out").empty()) throw UsageError("--out is required");
  ex::write_atomic(c.str("out"), t.text());
  if (plot && !c.str("plot").empty()) ex::write_atomic(c.str("plot"), ex::render_svg(*plot));
}

std::string num_or_nan(double v, bool flagged) { return flagged ? "nan" : ex::fmt(v); }

// ---- gen-sweep --------------------------------------------------------------

int gen_sweep(const Command& c) {
  double nbar = c.num("nbar");
  auto xis = c.range("xi"), ts = c.range("t");
  int cutoff = c.integer("cutoff");
  auto conv = c.str("nbar-convention");
  if (conv != "initial" && conv != "final") throw UsageError("--nbar-convention must be initial or final");
  auto nc = conv == "initial" ? hsc::NbarConvention::InitialState : hsc::NbarConvention::FinalState;
  bool sq = c.on("squeeze-rail");
  auto p = c.policy();
  for (double t : ts)
    if (!(t > 0.0 && t < 1.0)) throw UsageError("--t values must lie in (0, 1)");

  std::size_t n = xis.size() * ts.size();
  auto rows = ex::ordered_map<hsc::GenerationRow>(
      n, [&](std::size_t i) { return hsc::generation_point(ts[i % ts.size()], nbar, xis[i / ts.size()], cutoff, nc, sq, p); },
      c.threads());

  ex::CsvTable tab({"t", "xi", "alpha_i", "p_pi", "p_piprime", "p_total", "fidelity"});
  ex::PlotSpec plot{"heralding probability, nbar = " + ex::fmt(nbar), "t", "P_total", {}};
  for (std::size_t k = 0; k < xis.size(); ++k) plot.series.push_back({"xi = " + ex::fmt(xis[k]), {}, {}});
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = rows[i];
    if (r.flagged) std::cerr << "warning: t=" << ex::fmt(r.t) << " xi=" << ex::fmt(r.xi) << ": " << r.note << "\n";
    tab.add({ex::fmt(r.t), ex::fmt(r.xi), ex::fmt(r.alpha_i), num_or_nan(r.pPi, r.flagged),
             num_or_nan(r.pPiPrime, r.flagged), num_or_nan(r.pTotal, r.flagged), num_or_nan(r.fidelity, r.flagged)});
    auto& s = plot.series[i / ts.size()];
    s.x.push_back(r.t);
    s.y.push_back(r.flagged ? std::nan("") : r.pTotal);
  }
  emit(c, tab, &plot);
  return 0;
}

// ---- bell-optimal -------------------------------------------------------------

struct BellRow {
  double nbar = 0, xiStar = 0, pStar = 0, alpha = 0;
  bool flagged = false;
  std::string note;
  std::vector<std::pair<double, hsc::BellStats>> breakdown;
};

int bell_optimal(const Command& c) {
  auto nbars = c.range("nbar");
  auto grid = c.range("xi-grid");
  int cutoff = c.integer("cutoff");
  auto p = c.policy();
  bool wantBreakdown = !c.str("breakdown").empty();

  auto rows = ex::ordered_map<BellRow>(
      nbars.size(),
      [&](std::size_t i) {
        BellRow r;
        r.nbar = nbars[i];
        try {
          std::vector<std::pair<double, hsc::BellStats>> bd;
          auto opt = hsc::maximize_on_grid(grid, [&](double xi) {
            double a = hsc::amplitude_for_mean_photon(r.nbar, xi, +1, 0, p);
            auto s = hsc::bell_stats(a, xi, hsc::BsmKind::Hybrid, cutoff, p);
            if (wantBreakdown) bd.emplace_back(xi, s);
            return s.averageCorrect;
          });
          r.xiStar = opt.xiStar;
          r.pStar = opt.pStar;
          r.alpha = hsc::amplitude_for_mean_photon(r.nbar, r.xiStar, +1, 0, p);
          r.breakdown = std::move(bd);
          if (!opt.skipped.empty()) r.note = std::to_string(opt.skipped.size()) + " infeasible xi grid points skipped";
        } catch (const hsc::infeasible_target& e) {
          r.flagged = true;
          r.note = e.what();
        }
        return r;
      },
      c.threads());

  ex::CsvTable tab({"nbar", "xi_star", "p_star", "alpha"});
  ex::PlotSpec plot{"optimal squeezing", "nbar", "value", {{"xi*", {}, {}}, {"P*", {}, {}}}};
  ex::CsvTable bdt({"nbar", "xi", "alpha", "p_correct", "p_identified", "fail_vacuum", "fail_both_lit", "fail_other"});
  for (auto& r : rows) {
    if (!r.note.empty()) std::cerr << "note: nbar=" << ex::fmt(r.nbar) << ": " << r.note << "\n";
    tab.add({ex::fmt(r.nbar), num_or_nan(r.xiStar, r.flagged), num_or_nan(r.pStar, r.flagged),
             num_or_nan(r.alpha, r.flagged)});
    plot.series[0].x.push_back(r.nbar);
    plot.series[0].y.push_back(r.flagged ? std::nan("") : r.xiStar);
    plot.series[1].x.push_back(r.nbar);
    plot.series[1].y.push_back(r.flagged ? std::nan("") : r.pStar);
    for (auto& [xi, s] : r.breakdown) {
      double a = hsc::amplitude_for_mean_photon(r.nbar, xi, +1, 0, p);
      bdt.add({ex::fmt(r.nbar), ex::fmt(xi), ex::fmt(a), ex::fmt(s.averageCorrect), ex::fmt(s.averageIdentified),
               ex::fmt(s.vacuumFailure), ex::fmt(s.bothLitFailure), ex::fmt(s.otherFailure)});
    }
  }
  emit(c, tab, &plot);
  if (wantBreakdown) ex::write_atomic(c.str("breakdown"), bdt.text());
  return 0;
}

// ---- loss-comp ------------------------------------------------------------------

int loss_comp(const Command& c) {
  auto nbars = c.range("nbar");
  auto etas = c.range("eta");
  auto grid = c.range("xi-grid");
  auto p = c.policy();
  std::vector<hsc::CodeKind> codes;
  for (auto& s : ex::split_list(c.str("codes"))) {
    if (s == "hsc") codes.push_back(hsc::CodeKind::HybridSqueezedCat);
    else if (s == "sc") codes.push_back(hsc::CodeKind::SqueezedCat);
    else throw UsageError("--codes: unknown code '" + s + "' (expected hsc or sc)");
  }
  if (codes.empty()) throw UsageError("--codes is empty");
  for (double e : etas)
    if (!(e > 0.0 && e <= 1.0)) throw UsageError("--eta values must lie in (0, 1]");

  struct Job {
    double nbar;
    hsc::CodeKind code;
    double eta;
  };
  std::vector<Job> jobs;
  for (double nb : nbars)
    for (auto code : codes)
      for (double e : etas) jobs.push_back({nb, code, e});
  auto rows = ex::ordered_map<hsc::CompensationRow>(
      jobs.size(), [&](std::size_t i) { return hsc::compensation_point(jobs[i].nbar, jobs[i].code, jobs[i].eta, grid, p); },
      c.threads());

  ex::CsvTable tab({"nbar", "code", "eta", "xi_star", "p_success", "alpha", "fidelity"});
  ex::PlotSpec plot{"loss compensation", "nbar", "P_success", {}};
  std::map<std::pair<int, double>, std::size_t> seriesOf;
  for (auto& r : rows) {
    if (r.flagged) std::cerr << "warning: nbar=" << ex::fmt(r.nbar) << ": " << r.note << "\n";
    tab.add({ex::fmt(r.nbar), hsc::code_name(r.code), ex::fmt(r.eta), num_or_nan(r.xiStar, r.flagged),
             num_or_nan(r.pSuccess, r.flagged), num_or_nan(r.alpha, r.flagged), num_or_nan(r.fidelity, r.flagged)});
    auto key = std::make_pair(static_cast<int>(r.code), r.eta);
    if (!seriesOf.count(key)) {
      seriesOf[key] = plot.series.size();
      plot.series.push_back({std::string(hsc::code_name(r.code)) + ", eta = " + ex::fmt(r.eta), {}, {}});
    }
    auto& s = plot.series[seriesOf[key]];
    s.x.push_back(r.nbar);
    s.y.push_back(r.flagged ? std::nan("") : r.pSuccess);
  }
  emit(c, tab, &plot);
  return 0;
}

// ---- state-info -----------------------------------------------------------------

int state_info(const Command& c) {
  auto p = c.policy();
  double xi = c.num("xi");
  int parity = c.integer("parity");
  if (parity != 1 && parity != -1) throw UsageError("--parity must be 1 or -1");
  bool haveAlpha = !c.str("alpha").empty(), haveNbar = !c.str("nbar").empty();
  if (haveAlpha == haveNbar) throw UsageError("give exactly one of --alpha and --nbar");
  double alpha = haveAlpha ? c.num("alpha") : hsc::amplitude_for_mean_photon(c.num("nbar"), xi, parity, 0, p);
  int cutoff = c.integer("cutoff");
  if (cutoff <= 0) cutoff = hsc::code_cutoff(alpha, xi, p);

  auto st = hsc::squeezed_cat_state(alpha, xi, parity, cutoff, p);
  auto ld = hsc::loss_decomposition(alpha, xi, parity, cutoff, p);
  ex::CsvTable tab({"key", "value"});
  tab.add({"alpha", ex::fmt(alpha)});
  tab.add({"xi", ex::fmt(xi)});
  tab.add({"parity", std::to_string(parity)});
  tab.add({"cutoff", std::to_string(cutoff)});
  tab.add({"tail", ex::fmt(st.tail)});
  tab.add({"nbar", ex::fmt(hsc::mean_photon_number(st))});
  tab.add({"normalization", ex::fmt(hsc::sc_normalization(alpha, xi, parity, cutoff, p))});
  tab.add({"loss_c", ex::fmt(std::abs(ld.c))});
  tab.add({"loss_d", ex::fmt(std::abs(ld.d))});
  tab.add({"hybrid_bell_success", ex::fmt(hsc::hybrid_bell_success(alpha, xi, 0, p))});
  if (xi != 0.0) tab.add({"x_gate_fidelity_default", ex::fmt(hsc::x_gate_fidelity(alpha, xi, std::nullopt, 0, p))});
  auto best = hsc::best_x_magnitude(alpha, xi, 4.0, 80, p);
  tab.add({"x_gate_best_magnitude", ex::fmt(best.bestMagnitude)});
  tab.add({"x_gate_best_fidelity", ex::fmt(best.bestFidelity)});
  if (c.str("out").empty()) std::cout << tab.text();
  else ex::write_atomic(c.str("out"), tab.text());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated-Fock simulator for hybrid squeezed-cat qubits"};
  app.require_subcommand(1);

  Command gen, bell, loss, info;
  gen.app = app.add_subcommand("gen-sweep", "heralded generation probability and fidelity vs t");
  common(gen);
  gen.opt("nbar", "2.0", "mean photon number fixing alpha_i");
  gen.opt("xi", "0,0.25,0.5", "squeezing values");
  gen.opt("t", "0.05:0.95:0.05", "beam-splitter transmissivities");
  gen.opt("cutoff", "30", "Fock cutoff per mode");
  gen.opt("nbar-convention", "initial", "initial: nbar of the input cat; final: of the output (alpha_f)");
  gen.flag("squeeze-rail", "squeeze the displacement rail too");

  bell.app = app.add_subcommand("bell-optimal", "optimal squeezing for the hybrid Bell measurement");
  common(bell);
  bell.opt("nbar", "0.2:3.0:0.1", "mean photon numbers");
  bell.opt("xi-grid", "0:0.6:0.02", "squeezing grid searched at each nbar");
  bell.opt("cutoff", "0", "Fock cutoff, 0 = per-point automatic");
  bell.opt("breakdown", "", "optional CSV with per-grid-point failure channels");

  loss.app = app.add_subcommand("loss-comp", "teleportation-based loss compensation");
  common(loss);
  loss.opt("codes", "hsc,sc", "codes to compare");
  loss.opt("eta", "0.99,0.90", "transmissivities");
  loss.opt("nbar", "0.5:3.0:0.25", "mean photon numbers");
  loss.opt("xi-grid", "0:0.6:0.02", "squeezing grid searched per point");

  info.app = app.add_subcommand("state-info", "codeword diagnostics");
  common(info);
  info.opt("alpha", "", "coherent amplitude");
  info.opt("nbar", "", "or: mean photon number to solve for alpha");
  info.opt("xi", "0", "squeezing");
  info.opt("parity", "1", "1 for C+, -1 for C-");
  info.opt("cutoff", "0", "0 = automatic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (Command* c : {&gen, &bell, &loss, &info}) {
      if (!c->app->parsed()) continue;
      c->merge_config();
      if (c == &gen) return gen_sweep(*c);
      if (c == &bell) return bell_optimal(*c);
      if (c == &loss) return loss_comp(*c);
      return state_info(*c);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const hsc::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const hsc::truncation_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

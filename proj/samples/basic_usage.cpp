// Small tour: codewords, the generation circuit, the hybrid Bell
// measurement and one loss-compensation point.

#include <iostream>

#include "hsc/hsc.hpp"

int main() {
  using namespace hsc;

  // even / odd squeezed cats at nbar = 1
  double xi = 0.2;
  double alpha = amplitude_for_mean_photon(1.0, xi, +1);
  int cutoff = code_cutoff(alpha, xi);
  CodeBasis cb = code_basis(alpha, xi, cutoff);
  std::cout << "alpha = " << alpha << ", cutoff = " << cutoff << ", <C+|C-> = " << std::abs(inner(cb.plus, cb.minus))
            << "\n";

  auto ld = loss_decomposition(alpha, xi, +1, cutoff);
  std::cout << "a|C+> = c|C-> + d|err>: |c| = " << std::abs(ld.c) << ", d = " << std::abs(ld.d) << "\n";

  GenerationConfig g;
  g.t = 0.8;
  g.alpha_i = 1.5;
  g.xi = 0.0;
  auto gr = run_generation(g);
  std::cout << "generation: P = " << gr.successProbability << ", F = " << gr.targetFidelity << "\n";

  auto bs = bell_stats(alpha, xi, BsmKind::Hybrid);
  std::cout << "hybrid Bell success = " << bs.averageCorrect << " (vacuum failures " << bs.vacuumFailure << ")\n";

  auto cr = run_compensation(CodeKind::HybridSqueezedCat, alpha, xi, 0.95);
  std::cout << "compensation at eta = 0.95: P = " << cr.successProbability << ", F = " << cr.conditionalFidelity
            << "\n";
}

#include <gtest/gtest.h>

#include "hsc/loss.hpp"
#include "oracles.hpp"

using namespace hsc;

namespace {

double mean_n(const DensityMatrix& r) {
  double s = 0;
  for (int k = 0; k < r.rho.rows(); ++k) s += k * r.rho(k, k).real();
  return s;
}

// Lindblad loss d rho/dt = a rho a^dag - {n, rho}/2, RK4 up to time -ln(eta)
Mat rk4_loss(const Mat& rho0, double eta, int steps) {
  const int n = static_cast<int>(rho0.rows()) - 1;
  Mat a = oracle::annihilation(n), ad = a.adjoint(), num = ad * a;
  auto f = [&](const Mat& r) -> Mat { return a * r * ad - 0.5 * (num * r + r * num); };
  double h = -std::log(eta) / steps;
  Mat r = rho0;
  for (int i = 0; i < steps; ++i) {
    Mat k1 = f(r), k2 = f(r + 0.5 * h * k1), k3 = f(r + 0.5 * h * k2), k4 = f(r + h * k3);
    r += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return r;
}

}  // namespace

TEST(Kraus, Completeness) {
  auto id = loss_kraus(1.0, 12);
  ASSERT_EQ(id.operators.size(), 1u);
  EXPECT_LT((id.operators[0].matrix - Mat::Identity(13, 13)).cwiseAbs().maxCoeff(), 1e-15);
  for (double eta : {0.99, 0.9, 0.5, 0.1})
    for (int n : {4, 12, 30}) {
      auto ks = loss_kraus(eta, n);
      EXPECT_LT(ks.residual, 1e-8);
      Mat s = Mat::Zero(n + 1, n + 1);
      for (auto& e : ks.operators) s += e.matrix.adjoint() * e.matrix;
      EXPECT_LT((s - Mat::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff(), 1e-8);
    }
  EXPECT_GT(loss_kraus(0.5, 12, 2).residual, 1e-3);
  EXPECT_THROW(loss_kraus(0.0, 5), hsc::invalid_argument);
  EXPECT_THROW(loss_kraus(1.2, 5), hsc::invalid_argument);
}

TEST(Loss, SinglePhoton) {
  auto r = apply_loss(fock_state(1, 3), 0.9);
  EXPECT_NEAR(r.rho(1, 1).real(), 0.9, 1e-14);
  EXPECT_NEAR(r.rho(0, 0).real(), 0.1, 1e-14);
}

TEST(Loss, CoherentStaysCoherent) {
  auto r = apply_loss(coherent_state(1.5, 40), 0.8);
  Vec ref = oracle::coherent(1.5 * std::sqrt(0.8), 40);
  EXPECT_LT((r.rho - ref * ref.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Loss, CatCoherenceDecays) {
  double a = 1.3, eta = 0.7;
  auto r = apply_loss(cat_state(a, +1, 40), eta);
  Vec p = oracle::coherent(a * std::sqrt(eta), 40), m = oracle::coherent(-a * std::sqrt(eta), 40);
  double damp = std::exp(-2 * (1 - eta) * a * a);
  Mat ref = p * p.adjoint() + m * m.adjoint() + damp * (p * m.adjoint() + m * p.adjoint());
  ref /= 2 * (1 + std::exp(-2 * a * a));
  EXPECT_LT((r.rho - ref).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Loss, ChannelLaws) {
  auto sq = displaced_squeezed_state(0.8, 0.3, 40);
  auto r = apply_loss(sq, 0.85);
  EXPECT_NEAR(r.trace(), 1.0, 1e-10);
  EXPECT_GT(min_eigenvalue(r), -1e-10);
  EXPECT_NEAR(mean_n(r), 0.85 * mean_photon_number(sq), 1e-8);
  auto two = apply_loss(apply_loss(sq, 0.9), LossChannelParams{0.8, {0}});
  auto once = apply_loss(sq, 0.72);
  EXPECT_LT((two.rho - once.rho).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Loss, MultiModeActsLocally) {
  StateVector s = tensor_product(fock_state(1, 2), fock_state(2, 2));
  auto r = apply_loss(DensityMatrix(s), LossChannelParams{0.5, {1}});
  auto first = partial_trace(r, {0});
  EXPECT_NEAR(first.rho(1, 1).real(), 1.0, 1e-14);
  auto second = partial_trace(r, {1});
  EXPECT_NEAR(second.rho(0, 0).real(), 0.25, 1e-14);
  EXPECT_NEAR(second.rho(1, 1).real(), 0.5, 1e-14);
  EXPECT_THROW(apply_loss(DensityMatrix(s), LossChannelParams{0.5, {2}}), hsc::invalid_argument);
}

TEST(Loss, MatchesMasterEquation) {
  for (int n : {6, 12}) {
    auto v = squeezed_cat_state(1.0, 0.2, -1, n, TruncationPolicy{10, 1e-2});
    Mat rho0 = v.amps * v.amps.adjoint();
    for (double eta : {0.95, 0.6}) {
      auto r = apply_loss(v, eta);
      EXPECT_LT((r.rho - rk4_loss(rho0, eta, 400)).cwiseAbs().maxCoeff(), 1e-9) << n << " " << eta;
    }
  }
}

TEST(Compensation, CardinalStates) {
  auto c = cardinal_states();
  ASSERT_EQ(c.size(), 6u);
  Eigen::Matrix2cd avg = Eigen::Matrix2cd::Zero();
  for (auto& v : c) {
    EXPECT_NEAR(v.norm(), 1.0, 1e-15);
    avg += v * v.adjoint() / 6.0;
  }
  EXPECT_LT((avg - 0.5 * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Compensation, LosslessIsTeleportation) {
  for (CodeKind k : {CodeKind::HybridSqueezedCat, CodeKind::SqueezedCat}) {
    auto r = run_compensation(k, 3.0, 0.0, 1.0);
    EXPECT_NEAR(r.conditionalFidelity, 1.0, 1e-8) << code_name(k);
  }
  for (double a : {0.8, 1.5}) {
    auto r = run_compensation(CodeKind::HybridSqueezedCat, a, 0.1, 1.0);
    EXPECT_NEAR(r.successProbability, bell_stats(a, 0.1, BsmKind::Hybrid).averageIdentified, 1e-9);
  }
}

TEST(Compensation, MoreLossNeverHelps) {
  for (CodeKind k : {CodeKind::HybridSqueezedCat, CodeKind::SqueezedCat}) {
    double prev = 2;
    for (double eta : {1.0, 0.99, 0.9, 0.7}) {
      auto r = run_compensation(k, 1.2, 0.1, eta);
      EXPECT_LE(r.successProbability, prev + 1e-12) << code_name(k) << " " << eta;
      EXPECT_GE(r.conditionalFidelity, 0.5);
      prev = r.successProbability;
    }
  }
  EXPECT_THROW(run_compensation(CodeKind::SqueezedCat, 1.0, 0.0, 0.0), hsc::invalid_argument);
}

TEST(Compensation, PointReportsGridOptimum) {
  auto row = compensation_point(1.0, CodeKind::SqueezedCat, 0.9, {0.0, 0.1, 0.2});
  EXPECT_FALSE(row.flagged);
  EXPECT_NEAR(row.alpha, amplitude_for_mean_photon(1.0, row.xiStar, +1), 1e-12);
  auto direct = run_compensation(CodeKind::SqueezedCat, row.alpha, row.xiStar, 0.9);
  EXPECT_GE(row.pSuccess, direct.successProbability - 1e-12);
  auto bad = compensation_point(0.05, CodeKind::SqueezedCat, 0.9, {0.5});
  EXPECT_TRUE(bad.flagged);
}

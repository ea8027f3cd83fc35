#include <random>

#include <gtest/gtest.h>

#include "hsc/product_state.hpp"
#include "oracles.hpp"

using namespace hsc;

namespace {

Vec random_vec(std::mt19937& g, int d) {
  std::normal_distribution<double> n;
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = cplx(n(g), n(g));
  return v / v.norm();
}

DensityMatrix random_rho(std::mt19937& g, const std::vector<int>& dims, int rank = 3) {
  long d = 1;
  for (int x : dims) d *= x;
  Mat r = Mat::Zero(d, d);
  for (int k = 0; k < rank; ++k) {
    Vec v = random_vec(g, static_cast<int>(d));
    r += v * v.adjoint();
  }
  return DensityMatrix(dims, r / r.trace().real());
}

ProductTermState random_pts(std::mt19937& g, const std::vector<int>& dims, int terms) {
  ProductTermState s(dims);
  std::normal_distribution<double> n;
  for (int k = 0; k < terms; ++k) {
    std::vector<Vec> f;
    for (int d : dims) f.push_back(random_vec(g, d));
    s.add_term(cplx(n(g), n(g)), f);
  }
  return s;
}

}  // namespace

TEST(TensorProduct, Basics) {
  auto v = tensor_product(vacuum(3), vacuum(4));
  EXPECT_EQ(v.amps.size(), 20);
  EXPECT_NEAR(v.norm2(), 1.0, 1e-15);
  auto op = tensor_product(identity_operator(1), ladder_operators(1).annihilate);
  auto out = apply(op, tensor_product(fock_state(0, 1), fock_state(1, 1)));
  EXPECT_NEAR(std::abs(out.amps(0) - 1.0), 0.0, 1e-15);
  EXPECT_EQ(tensor_product(identity_operator(2), identity_operator(3)).dim(), 12);
  EXPECT_EQ(v.labels, (std::vector<std::string>{"m0", "m1"}));
}

TEST(ApplyLocal, MatchesKronecker) {
  std::mt19937 g(7);
  StateVector s({3, 4, 2}, random_vec(g, 24));
  Mat a = Mat::Random(4, 4);
  auto got = apply_local(s, {1}, DenseOperator({4}, a));
  Mat full = Eigen::kroneckerProduct(Eigen::kroneckerProduct(Mat::Identity(3, 3), a).eval(), Mat::Identity(2, 2)).eval();
  EXPECT_LT((got.amps - full * s.amps).cwiseAbs().maxCoeff(), 1e-13);

  BeamSplitter bs(0.3, 2, 1);
  auto got2 = apply_local(s, 0, 2, bs);
  // reorder (0,1,2) -> (0,2,1), apply BS (x) I, reorder back
  Mat u = bs.unitary().matrix;
  Vec ref = Vec::Zero(24);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 2; ++k)
        for (int i2 = 0; i2 < 3; ++i2)
          for (int k2 = 0; k2 < 2; ++k2) ref(i2 * 8 + j * 2 + k2) += u(i2 * 2 + k2, i * 2 + k) * s.amps(i * 8 + j * 2 + k);
  EXPECT_LT((got2.amps - ref).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(PartialTrace, ProductAndBell) {
  std::mt19937 g(3);
  Vec a = random_vec(g, 3), b = random_vec(g, 4);
  StateVector s({3, 4}, Eigen::kroneckerProduct(a, b).eval());
  auto rb = partial_trace(s, {1});
  EXPECT_LT((rb.rho - b * b.adjoint()).cwiseAbs().maxCoeff(), 1e-14);

  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = M_SQRT1_2;
  auto r = partial_trace(StateVector({2, 2}, bell), {0});
  EXPECT_LT((r.rho - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(partial_trace(StateVector({2, 2}, bell), {}), hsc::invalid_argument);
}

TEST(PartialTrace, PreservesTraceAndPositivity) {
  std::mt19937 g(11);
  auto rho = random_rho(g, {2, 3, 3});
  for (std::vector<int> keep : {std::vector<int>{0}, {1}, {2}, {0, 2}, {1, 2}}) {
    auto r = partial_trace(rho, keep);
    EXPECT_NEAR(r.trace(), rho.trace(), 1e-13);
    EXPECT_GT(min_eigenvalue(r), -1e-12);
    EXPECT_LT((r.rho - r.rho.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Projection, SpecExamples) {
  auto p = project(StateVector(vacuum(3)), {{0, 0}});
  EXPECT_NEAR(p.probability, 1.0, 1e-15);
  auto c = project(StateVector(coherent_state(1.0, 20)), {{0, 0}});
  EXPECT_NEAR(c.probability, std::exp(-1.0), 1e-10);
  auto z = project(StateVector(fock_state(2, 3)), {{0, 1}});
  EXPECT_TRUE(z.null);
  EXPECT_THROW(project(StateVector(vacuum(3)), {{0, 4}}), hsc::invalid_argument);
}

TEST(Projection, CompletePatternSetSumsToOne) {
  std::mt19937 g(5);
  StateVector s({3, 4, 2}, random_vec(g, 24));
  double tot = 0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 2; ++k) tot += project(s, {{0, i}, {2, k}}).probability;
  EXPECT_NEAR(tot, 1.0, 1e-12);
  auto rho = DensityMatrix(s);
  double tr = 0;
  for (int j = 0; j < 4; ++j) tr += project(rho, {{1, j}}).probability;
  EXPECT_NEAR(tr, 1.0, 1e-12);
}

TEST(Fidelity, PureAndMixed) {
  auto a = coherent_state(1.0, 20);
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-14);
  EXPECT_NEAR(fidelity(vacuum(3), fock_state(1, 3)), 0.0, 1e-15);
  EXPECT_NEAR(fidelity(vacuum(20), a), std::exp(-1.0), 1e-10);
  std::mt19937 g(9);
  StateVector x({2, 3}, random_vec(g, 6)), y({2, 3}, random_vec(g, 6));
  double pure = fidelity(x, y);
  EXPECT_NEAR(fidelity(DensityMatrix(x), y), pure, 1e-12);
  EXPECT_NEAR(fidelity(DensityMatrix(x), DensityMatrix(y)), pure, 1e-7);
  auto r1 = random_rho(g, {3}), r2 = random_rho(g, {3});
  EXPECT_NEAR(fidelity(r1, r2), fidelity(r2, r1), 1e-8);
}

// ---- ProductTermState against the dense representation ---------------------

TEST(ProductTermState, InnerAndNormMatchDense) {
  std::mt19937 g(21);
  for (int cutoff : {4, 8, 12}) {
    int d = cutoff + 1;
    for (std::vector<int> dims : {std::vector<int>{d}, {2, d}, {d, d}, {2, d, d}, {d, 2, d, d}}) {
      auto a = random_pts(g, dims, 3), b = random_pts(g, dims, 4);
      auto da = a.to_dense(), db = b.to_dense();
      EXPECT_LT(std::abs(inner(a, b) - da.amps.dot(db.amps)), 1e-10);
      EXPECT_NEAR(a.norm2(), da.norm2(), 1e-10 * std::max(1.0, da.norm2()));
      EXPECT_GE(a.norm2(), 0.0);
    }
  }
}

TEST(ProductTermState, LocalOperatorMatchesDense) {
  std::mt19937 g(4);
  int d = 13;
  auto s = random_pts(g, {2, d, d}, 3);
  Mat op = oracle::annihilation(12);
  auto viaPts = s.apply(2, op).to_dense();
  auto viaDense = apply_local(s.to_dense(), {2}, DenseOperator({d}, op));
  EXPECT_LT((viaPts.amps - viaDense.amps).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProductTermState, ProjectionMatchesDense) {
  std::mt19937 g(8);
  int d = 11;
  auto s = random_pts(g, {d, 2, d, d}, 5);
  Pattern p{{0, 3}, {3, 1}};
  auto a = project(s, p);
  auto b = project(s.to_dense(), p);
  EXPECT_NEAR(a.probability, b.probability, 1e-10);
  EXPECT_LT((a.state.to_dense().amps - b.state.amps).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProductTermState, BeamSplitterContractionMatchesDense) {
  // half beam splitter plus counting on two bosonic modes, both ways
  std::mt19937 g(13);
  int n = 6, d = n + 1;
  auto s = random_pts(g, {d, 2, d}, 3);
  BeamSplitter wide(0.5, 2 * n, 2 * n);
  const int D = 2 * n + 1;
  auto amp = [&](int k5, int k6) {
    return [&, k5, k6](const Vec& f, const Vec& h) {
      Vec in = Vec::Zero(D * D);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) in(i * D + j) = f(i) * h(j);
      return wide.amplitude(in, k5, k6);
    };
  };
  // dense: embed the two bosonic modes into cutoff 2n, apply the BS, project
  Vec big = Vec::Zero(static_cast<long>(D) * 2 * D);
  auto dense = s.to_dense();
  for (int i = 0; i < d; ++i)
    for (int p = 0; p < 2; ++p)
      for (int j = 0; j < d; ++j) big((i * 2 + p) * D + j) = dense.amps((i * 2 + p) * d + j);
  auto moved = apply_local(StateVector({D, 2, D}, big), 0, 2, wide);
  double total = 0;
  for (int k5 = 0; k5 <= 2 * n; ++k5)
    for (int k6 = 0; k5 + k6 <= 2 * n; ++k6) {
      auto viaPts = s.contract_pair(0, 2, amp(k5, k6));
      auto viaDense = project_unnormalized(moved, {{0, k5}, {2, k6}});
      Vec v = viaPts.terms().empty() ? Vec::Zero(2) : viaPts.to_dense().amps;
      EXPECT_LT((v - viaDense.amps).cwiseAbs().maxCoeff(), 1e-10);
      total += viaDense.norm2();
    }
  EXPECT_NEAR(total, dense.norm2(), 1e-10);
}

TEST(ProductTermState, TensorProductMatchesDense) {
  std::mt19937 g(17);
  auto a = random_pts(g, {2, 9}, 2), b = random_pts(g, {9}, 3);
  auto t = tensor_product(a, b);
  auto ref = tensor_product(a.to_dense(), b.to_dense());
  EXPECT_LT((t.to_dense().amps - ref.amps).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(t.labels().size(), 3u);
}

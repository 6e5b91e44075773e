#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fairod/errors.hpp"
#include "fairod/numcore/gradcheck.hpp"
#include "fairod/numcore/linear_layer.hpp"
#include "fairod/numcore/matrix.hpp"
#include "fairod/numcore/mlp.hpp"
#include "fairod/numcore/optimizer.hpp"
#include "fairod/numcore/random.hpp"

using namespace fairod;
using namespace fairod::numcore;

namespace {

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -1.0, 1.0);
  return m;
}

Matrix triple_loop(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      for (Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

}  // namespace

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  Matrix a(2, 2);
  a << 1.5, -2, 3, 4;
  EXPECT_EQ(matmul(Matrix::Identity(2, 2), a), a);
}

TEST(Matmul, HandArithmetic) {
  Matrix a(2, 2), b(2, 1), expected(2, 1);
  a << 1, 2, 3, 4;
  b << 1, 1;
  expected << 3, 7;
  EXPECT_EQ(matmul(a, b), expected);
}

TEST(Matmul, MatchesTripleLoop) {
  auto rng = make_stream(3, 0);
  const Matrix a = random_matrix(5, 7, rng), b = random_matrix(7, 3, rng);
  const Matrix c = matmul(a, b);
  ASSERT_EQ(c.rows(), 5);
  ASSERT_EQ(c.cols(), 3);
  EXPECT_LT((c - triple_loop(a, b)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Matmul, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), DimensionError);
}

TEST(PairwiseDistances, MatchesDirectEvaluation) {
  auto rng = make_stream(4, 0);
  const Matrix p = random_matrix(6, 3, rng), c = random_matrix(4, 3, rng);
  const Matrix d = pairwise_sq_distances(p, c);
  for (Index i = 0; i < 6; ++i)
    for (Index k = 0; k < 4; ++k) EXPECT_NEAR(d(i, k), (p.row(i) - c.row(k)).squaredNorm(), 1e-14);
}

TEST(Random, StreamsAreReproducibleAndDistinct) {
  auto a = make_stream(9, 1), b = make_stream(9, 1), c = make_stream(9, 2);
  const auto x = a(), y = b(), z = c();
  EXPECT_EQ(x, y);
  EXPECT_NE(x, z);
}

TEST(Random, UniformIndexStaysInRange) {
  auto rng = make_stream(1, 1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_index(rng, 7), 7u);
}

TEST(Random, ShuffleIsPermutation) {
  auto rng = make_stream(2, 2);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[static_cast<std::size_t>(i)] = i;
  shuffle(v, rng);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

TEST(LinearLayer, XavierBound) {
  LinearLayer<double> layer(30, 20);
  auto rng = make_stream(5, 0);
  layer.xavier_init(rng);
  const double a = std::sqrt(6.0 / 50.0);
  EXPECT_DOUBLE_EQ(layer.xavier_bound(), a);
  EXPECT_LE(layer.weight().cwiseAbs().maxCoeff(), a);
  EXPECT_TRUE(layer.bias().isZero());
  // The draws should actually use the range, not collapse near zero.
  EXPECT_GT(layer.weight().cwiseAbs().maxCoeff(), 0.9 * a);
}

TEST(LinearLayer, ForwardIsAffineMap) {
  LinearLayer<double> layer(3, 2);
  auto rng = make_stream(6, 0);
  layer.weight() = random_matrix(2, 3, rng);
  layer.bias() << 0.5, -1.0;
  const Matrix x = random_matrix(4, 3, rng);
  const Matrix y = layer.forward(x);
  for (Index i = 0; i < 4; ++i) {
    for (Index o = 0; o < 2; ++o) {
      EXPECT_NEAR(y(i, o), x.row(i).dot(layer.weight().row(o)) + layer.bias()(o), 1e-14);
    }
  }
}

TEST(LinearLayer, BackwardBeforeForwardThrows) {
  LinearLayer<double> layer(3, 2);
  EXPECT_THROW(layer.backward(Matrix::Ones(1, 2), nullptr), StateError);
}

TEST(LinearLayer, SumLossGivesUnitBiasGradient) {
  LinearLayer<double> layer(3, 4);
  auto rng = make_stream(7, 0);
  layer.xavier_init(rng);
  layer.forward(random_matrix(1, 3, rng));
  const auto g = layer.backward(Matrix::Ones(1, 4), nullptr);
  EXPECT_TRUE(g.bias.isOnes());
}

TEST(Mlp, ZeroNetworkGivesZeroOutput) {
  Mlp<double> net(MlpSpec{{4, 6, 3}, 0.0, Activation::kRelu});
  auto rng = make_stream(8, 0);
  const Matrix y = net.predict(random_matrix(5, 4, rng));
  EXPECT_TRUE(y.isZero());
}

TEST(Mlp, EvalModeDropoutIsIdentity) {
  Mlp<double> with(MlpSpec{{4, 8, 3}, 0.1, Activation::kRelu});
  Mlp<double> without(MlpSpec{{4, 8, 3}, 0.0, Activation::kRelu});
  auto r1 = make_stream(10, 0), r2 = make_stream(10, 0);
  with.xavier_init(r1);
  without.xavier_init(r2);
  auto rng = make_stream(11, 0);
  const Matrix x = random_matrix(6, 4, rng);
  EXPECT_EQ(with.forward(x, false), without.forward(x, false));
  EXPECT_EQ(with.predict(x), without.predict(x));
}

TEST(Mlp, TrainingDropoutIsInvertedAndSeeded) {
  Mlp<double> net(MlpSpec{{1, 1}, 0.5, Activation::kIdentity});
  net.layers()[0].weight()(0, 0) = 1.0;
  const Matrix x = Matrix::Ones(200, 1);
  auto a = make_stream(12, 4), b = make_stream(12, 4);
  const Matrix ya = net.forward(x, true, &a);
  const Matrix yb = net.forward(x, true, &b);
  EXPECT_EQ(ya, yb);
  for (Index i = 0; i < ya.rows(); ++i) EXPECT_TRUE(ya(i, 0) == 0.0 || ya(i, 0) == 2.0);
  EXPECT_THROW(net.forward(x, true, nullptr), ArgumentError);
}

TEST(Mlp, BackwardBeforeForwardThrows) {
  Mlp<double> net(MlpSpec{{2, 3, 1}});
  EXPECT_THROW(net.backward(Matrix::Ones(1, 1)), StateError);
}

TEST(Mlp, ZeroUpstreamGivesZeroGradients) {
  Mlp<double> net(MlpSpec{{3, 5, 2}});
  auto rng = make_stream(13, 0);
  net.xavier_init(rng);
  net.forward(random_matrix(4, 3, rng), false);
  const auto g = net.backward(Matrix::Zero(4, 2));
  for (const auto& l : g.layers) {
    EXPECT_TRUE(l.weight.isZero());
    EXPECT_TRUE(l.bias.isZero());
  }
  EXPECT_TRUE(g.input.isZero());
}

TEST(Mlp, ShapeMismatchThrows) {
  Mlp<double> net(MlpSpec{{3, 2}});
  EXPECT_THROW(net.predict(Matrix::Zero(1, 4)), DimensionError);
  EXPECT_THROW(MlpSpec{{3}}.validate(), ArgumentError);
  EXPECT_THROW((MlpSpec{{3, 0}}.validate()), ArgumentError);
}

class MlpGradient : public ::testing::TestWithParam<Activation> {};

TEST_P(MlpGradient, MatchesFiniteDifferences) {
  Mlp<double> net(MlpSpec{{3, 4, 4, 2}, 0.0, GetParam()});
  auto rng = make_stream(14, 0);
  net.xavier_init(rng);
  for (auto& layer : net.layers())
    for (Index i = 0; i < layer.bias().size(); ++i) layer.bias()(i) = uniform(rng, -0.3, 0.3);
  const Matrix x = random_matrix(5, 3, rng);
  const Matrix target = random_matrix(5, 2, rng);

  auto loss = [&] { return 0.5 * (net.predict(x) - target).squaredNorm(); };
  const Matrix out = net.forward(x, false);
  const auto grads = net.backward(out - target);

  std::vector<GradientBlock> blocks;
  auto params = net.parameter_blocks();
  auto analytic = Mlp<double>::gradient_blocks(grads);
  for (std::size_t i = 0; i < params.size(); ++i) blocks.push_back({"block" + std::to_string(i), params[i], analytic[i]});
  const auto report = check_gradients(blocks, loss, 1e-4, 1e-5);
  EXPECT_TRUE(report.passed) << "max relative error " << report.max_relative_error;

  // Input gradient against its own finite differences.
  Matrix xv = x;
  const Matrix gin = grads.input;
  auto input_loss = [&] { return 0.5 * (net.predict(xv) - target).squaredNorm(); };
  const auto input_report = check_gradients(
      {{"input", {xv.data(), static_cast<std::size_t>(xv.size())}, {gin.data(), static_cast<std::size_t>(gin.size())}}},
      input_loss, 1e-4, 1e-5);
  EXPECT_TRUE(input_report.passed) << "max relative error " << input_report.max_relative_error;
}

INSTANTIATE_TEST_SUITE_P(Activations, MlpGradient,
                         ::testing::Values(Activation::kRelu, Activation::kTanh, Activation::kIdentity));

TEST(Sgd, ZeroLearningRateLeavesParameters) {
  std::vector<double> p{1.0, -2.0}, g{3.0, 4.0};
  sgd_step<double>(p, g, 0.0);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0}));
}

TEST(Sgd, HandArithmetic) {
  std::vector<double> p{1.0}, g{2.0};
  sgd_step<double>(p, g, 0.5);
  EXPECT_EQ(p[0], 0.0);
}

TEST(Sgd, QuadraticShrinksGeometrically) {
  double theta = 1.0;
  for (int step = 1; step <= 20; ++step) {
    std::vector<double> p{theta}, g{theta};  // d/dθ ½θ² = θ
    sgd_step<double>(p, g, 0.1);
    theta = p[0];
    EXPECT_NEAR(theta, std::pow(0.9, step), 1e-15);
  }
}

TEST(Sgd, ShapeMismatchThrows) {
  std::vector<double> p{1.0, 2.0}, g{1.0};
  EXPECT_THROW(sgd_step<double>(p, g, 0.1), DimensionError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  BlockOptimizer opt(OptimizerKind::kAdam);
  std::vector<double> p{1.0, 1.0};
  const std::vector<double> g{0.5, -2.0};
  opt.step({std::span<double>(p)}, {std::span<const double>(g)}, 0.01);
  EXPECT_NEAR(p[0], 0.99, 1e-9);
  EXPECT_NEAR(p[1], 1.01, 1e-9);
}

TEST(Adam, MatchesTextbookUpdateInBothPrecisions) {
  const std::vector<std::vector<double>> gs{{0.5, -2.0, 0.0}, {-0.1, 3.0, 1e-3}, {0.2, 0.2, -0.2}};
  std::vector<double> ref{1.0, -1.0, 0.5};
  std::vector<double> m(3, 0.0), v(3, 0.0);
  std::vector<double> pd = ref;
  std::vector<float> pf(ref.begin(), ref.end());
  BlockOptimizer od(OptimizerKind::kAdam);
  BasicBlockOptimizer<float> of(OptimizerKind::kAdam);
  for (std::size_t t = 0; t < gs.size(); ++t) {
    for (std::size_t i = 0; i < 3; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * gs[t][i];
      v[i] = 0.999 * v[i] + 0.001 * gs[t][i] * gs[t][i];
      const double mh = m[i] / (1.0 - std::pow(0.9, t + 1.0));
      const double vh = v[i] / (1.0 - std::pow(0.999, t + 1.0));
      ref[i] -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
    }
    const std::vector<float> gf(gs[t].begin(), gs[t].end());
    od.step({std::span<double>(pd)}, {std::span<const double>(gs[t])}, 0.05);
    of.step({std::span<float>(pf)}, {std::span<const float>(gf)}, 0.05);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(pd[i], ref[i], 1e-12);
    EXPECT_NEAR(pf[i], ref[i], 1e-6);
  }
}

TEST(GradCheck, RelativeErrorFloor) {
  EXPECT_DOUBLE_EQ(relative_error(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(relative_error(0.0, 1e-9), 1e-3);
}

TEST(GradCheck, DetectsWrongGradient) {
  std::vector<double> theta{0.3, -0.7};
  std::vector<double> wrong{2 * 0.3, 0.0};
  auto loss = [&] { return theta[0] * theta[0] + theta[1] * theta[1]; };
  const auto report = check_gradients({{"theta", theta, wrong}}, loss, 1e-4);
  EXPECT_FALSE(report.passed);
}

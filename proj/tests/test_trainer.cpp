#include <gtest/gtest.h>

#include <cmath>

#include "hemobnn/errors.hpp"
#include "hemobnn/model_io.hpp"
#include "hemobnn/trainer.hpp"
#include "support.hpp"

using namespace hemobnn;

namespace {

Architecture small_arch(std::size_t in) {
  Architecture a;
  a.layer_sizes = {in, 4, 4, 1};
  return a;
}

TrainConfig quick(std::size_t iterations, std::uint64_t seed) {
  TrainConfig c;
  c.iterations = iterations;
  c.seed = seed;
  return c;
}

// Likelihood that turns NaN once any weight leaves a small box.
class Exploding final : public LikelihoodModel {
 public:
  std::size_t n_weights() const override { return 1; }
  double log_likelihood(std::span<const double> w) const override {
    return std::abs(w[0]) > 0.5 ? std::nan("") : -w[0] * w[0];
  }
  double log_likelihood_with_gradient(std::span<const double> w, std::span<double> g) const override {
    g[0] = 50.0;  // pushes mu out of the box
    return log_likelihood(w);
  }
};

}  // namespace

TEST(Train, DeterministicForSeed) {
  const auto data = test::blobs(30, 5, 2.0, 1);
  const auto a = train(data, small_arch(5), Prior{}, quick(300, 7));
  const auto b = train(data, small_arch(5), Prior{}, quick(300, 7));
  EXPECT_EQ(a.model.params.mu, b.model.params.mu);
  EXPECT_EQ(a.trace.elbo, b.trace.elbo);
  EXPECT_EQ(serialize_model(a.model), serialize_model(b.model));
  const auto c = train(data, small_arch(5), Prior{}, quick(300, 8));
  EXPECT_NE(a.model.params.mu, c.model.params.mu);
}

TEST(Train, TraceLengthAndImprovement) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = test::blobs(40, 6, 2.0, 10 + seed);
    const auto r = train(data, small_arch(6), Prior{}, quick(2000, seed));
    EXPECT_EQ(r.trace.elbo.size(), 2000u);
    EXPECT_GT(r.model.summary.last_window_mean, r.model.summary.first_window_mean) << seed;
  }
}

TEST(Train, ZeroLearningRateFreezesParameters) {
  const auto data = test::blobs(10, 3, 1.0, 2);
  TrainConfig c = quick(50, 3);
  c.learning_rate = 0.0;
  const auto r = train(data, small_arch(3), Prior{}, c);
  Rng init_again(0);  // unused: compare against a second run instead
  const auto r2 = train(data, small_arch(3), Prior{}, quick(1, 3));
  // One step of Adam moves every coordinate; lr 0 keeps the initial point.
  EXPECT_NE(r.model.params.mu, r2.model.params.mu);
  TrainConfig c0 = c;
  c0.iterations = 1;
  EXPECT_EQ(train(data, small_arch(3), Prior{}, c0).model.params.mu, r.model.params.mu);
}

TEST(Train, ResumeIsBitIdentical) {
  const auto data = test::blobs(24, 4, 1.5, 3);
  const auto full = train(data, small_arch(4), Prior{}, quick(400, 11));
  const auto half = train(data, small_arch(4), Prior{}, quick(150, 11));
  // Through the file format, as a checkpoint would be.
  const auto restored = deserialize_model(serialize_model(half.model));
  const auto resumed = resume(restored, data, quick(400, 11));
  EXPECT_EQ(resumed.model.params.mu, full.model.params.mu);
  EXPECT_EQ(resumed.model.params.rho, full.model.params.rho);
  EXPECT_EQ(resumed.trace.elbo, full.trace.elbo);
}

TEST(Train, MinibatchRunsAndIsDeterministic) {
  const auto data = test::blobs(40, 4, 2.0, 4);
  TrainConfig c = quick(300, 5);
  c.batch_size = 8;
  const auto a = train(data, small_arch(4), Prior{}, c);
  const auto b = train(data, small_arch(4), Prior{}, c);
  EXPECT_EQ(a.model.params.mu, b.model.params.mu);
  EXPECT_NE(a.model.params.mu, train(data, small_arch(4), Prior{}, quick(300, 5)).model.params.mu);
}

TEST(Train, RestartsPickBestWindow) {
  const auto data = test::blobs(20, 3, 1.0, 6);
  TrainConfig c = quick(200, 9);
  c.restarts = 3;
  const auto r = train(data, small_arch(3), Prior{}, c);
  ASSERT_TRUE(r.model.optimizer);
  EXPECT_LT(r.model.optimizer->restart, 3u);
}

TEST(Train, EarlyStopFlagsConvergence) {
  const auto data = test::blobs(20, 3, 3.0, 12);
  TrainConfig c = quick(20000, 1);
  c.early_stop = true;
  c.convergence_tol = 1e-2;
  c.mode = ElboMode::kAnalyticKl;
  c.n_samples = 4;
  const auto r = train(data, small_arch(3), Prior{}, c);
  ASSERT_TRUE(r.model.summary.converged_at);
  EXPECT_LT(r.trace.elbo.size(), 20000u);
  EXPECT_EQ(r.trace.elbo.size(), *r.model.summary.converged_at + 1);
}

TEST(Train, SingleClassWarns) {
  auto data = test::blobs(10, 3, 1.0, 2);
  for (auto& v : data.vectors) v.label = 1;
  const auto r = train(data, small_arch(3), Prior{}, quick(20, 1));
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Train, Errors) {
  const auto data = test::blobs(10, 3, 1.0, 2);
  EXPECT_THROW(train(data, small_arch(4), Prior{}, quick(10, 1)), Error);
  EXPECT_THROW(train(FeatureSet{}, small_arch(3), Prior{}, quick(10, 1)), Error);
  TrainConfig bad = quick(10, 1);
  bad.learning_rate = -1;
  EXPECT_THROW(train(data, small_arch(3), Prior{}, bad), Error);
}

TEST(Optimize, NonFiniteNamesIteration) {
  Exploding model;
  VariationalParams q;
  q.mu = {0.0};
  q.rho = {softplus_inverse(1e-3)};
  TrainConfig c = quick(100, 1);
  c.learning_rate = 0.1;
  try {
    optimize_elbo(model, Prior{}, q, c, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumeric);
    EXPECT_NE(std::string(e.what()).find("iteration"), std::string::npos);
  }
}

TEST(Optimize, ConjugateModelReachesPosterior) {
  const test::ConjugateGaussian model({0.8, 1.3, 0.2, 1.1, 0.9}, 0.5);
  VariationalParams q;
  q.mu = {0.0};
  q.rho = {softplus_inverse(1.0)};
  TrainConfig c = quick(0, 2);
  c.mode = ElboMode::kAnalyticKl;
  c.n_samples = 8;
  const auto r = test::anneal(model, Prior{0.0, 1.0}, q, c, 2000, {0.02, 0.002, 0.0002});
  const auto [m, s] = model.posterior(0.0, 1.0);
  EXPECT_NEAR(r.params.mu[0], m, 5e-3);
  EXPECT_NEAR(r.params.sigma()[0], s, 5e-3);
}

TEST(Trace, SummaryWindows) {
  std::vector<double> t(100);
  for (int i = 0; i < 100; ++i) t[i] = i;
  const auto s = summarize_trace(t, std::nullopt);
  EXPECT_DOUBLE_EQ(s.first_window_mean, 4.5);
  EXPECT_DOUBLE_EQ(s.last_window_mean, 94.5);
  EXPECT_DOUBLE_EQ(s.final_elbo, 99.0);
}

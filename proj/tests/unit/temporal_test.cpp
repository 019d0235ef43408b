#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "tkga/temporal.hpp"

namespace tkga {
namespace {

using std::numbers::pi;
using testing::ent;
using testing::kg_from;

Time2VecParams identity_params(std::vector<double> omega, std::vector<double> phi) {
  Time2VecParams p;
  p.omega = std::move(omega);
  p.phi = std::move(phi);
  p.projection = Matrix(p.omega.size(), p.omega.size());
  for (std::size_t i = 0; i < p.omega.size(); ++i) p.projection(i, i) = 1.0;
  return p;
}

TEST(Time2Vec, LinearAndPeriodicComponents) {
  const auto v = time2vec(2.0, identity_params({1.0, pi}, {0.0, 0.0}));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_DOUBLE_EQ(v[0], 2.0);
  EXPECT_NEAR(v[1], 1.0, 1e-12);
}

TEST(Time2Vec, ZeroTimeZeroPhase) {
  const auto v = time2vec(0.0, identity_params({0.3, 1.0, 2.0, 5.0}, {0, 0, 0, 0}));
  EXPECT_EQ(v, (std::vector<double>{0.0, 1.0, 1.0, 1.0}));
}

TEST(Time2Vec, PhaseShift) {
  const auto v = time2vec(2.0, identity_params({1.0, pi / 2}, {0.0, pi / 2}));
  EXPECT_NEAR(v[1], 0.0, 1e-12);  // cos(3 pi / 2)
}

TEST(EncodeEntityTime, SingleIndexIsProjectedTime2Vec) {
  Rng rng(3);
  const auto p = Time2VecParams::init(4, 6, 30, rng);
  const std::vector<std::size_t> active{7};
  const auto h = encode_entity_time(active, p);
  const auto t2v = time2vec(7.0, p);
  for (std::size_t r = 0; r < 6; ++r) EXPECT_NEAR(h[r], dot(p.projection.row(r), t2v), 1e-12);
}

TEST(EncodeEntityTime, EmptySignatureIsZero) {
  Rng rng(3);
  const auto p = Time2VecParams::init(4, 6, 30, rng);
  const std::vector<std::uint8_t> signature(30, 0);
  EXPECT_EQ(encode_entity_time(signature, p), std::vector<double>(6, 0.0));
}

TEST(EncodeEntityTime, LinearComponentOfMean) {
  const auto p = identity_params({0.5, 1.0}, {0.25, 0.0});
  const std::vector<std::size_t> active{3, 9};
  EXPECT_NEAR(encode_entity_time(active, p)[0], 0.5 * (3 + 9) / 2.0 + 0.25, 1e-12);
}

TEST(EncodeAll, YearOnlyEntityHasZeroFinerViews) {
  const auto kg = kg_from("a\tr\tb\t2019\t2020\nc\tr\td\t2019-04-02\t2019-05-01\n");
  TemporalEncoderConfig cfg;
  cfg.output_dim = 8;
  cfg.k = 3;
  const auto enc = TemporalEncoder::init(cfg, kg.span());
  const auto views = encode_all_granularities(kg, kg.span(), enc);
  const auto a = ent(kg, "a").index();
  EXPECT_GT(norm(views.at(Granularity::Year).row(a)), 0.0);
  EXPECT_EQ(norm(views.at(Granularity::Month).row(a)), 0.0);
  EXPECT_EQ(norm(views.at(Granularity::Date).row(a)), 0.0);
  for (const auto g : kGranularities) {
    EXPECT_EQ(views.at(g).rows(), kg.num_entities());
    EXPECT_EQ(views.at(g).cols(), 8u);
    for (double x : views.at(g).data()) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(EncodeAll, IdenticalSignaturesGiveIdenticalVectors) {
  const auto kg = kg_from("a\tr\tx\t2019-03\t2020\nb\ts\ty\t2019-03\t2020\n");
  const auto enc = TemporalEncoder::init({}, kg.span());
  const auto views = encode_all_granularities(kg, kg.span(), enc);
  for (const auto g : kGranularities) {
    const auto& m = views.at(g);
    EXPECT_TRUE(std::equal(m.row(ent(kg, "a").index()).begin(), m.row(ent(kg, "a").index()).end(),
                           m.row(ent(kg, "b").index()).begin()));
  }
}

// Scalar objective c . encode(active) and its derivative w.r.t. every
// parameter, checked against central differences.
TEST(TimeGradient, MatchesCentralDifferences) {
  Rng rng(17);
  for (int point = 0; point < 10; ++point) {
    auto p = Time2VecParams::init(5, 4, 40, rng);
    std::vector<std::size_t> active;
    for (int i = 0; i < 1 + static_cast<int>(rng.index(4)); ++i) active.push_back(rng.index(40));
    std::vector<double> c(4);
    for (double& x : c) x = rng.uniform(-1, 1);
    auto objective = [&](const Time2VecParams& q) { return dot(c, encode_entity_time(active, q)); };

    auto grad = p.zeros_like();
    accumulate_time_gradient(active, p, c, grad);

    const double h = 1e-6;
    auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + h;
      const double up = objective(p);
      param = saved - h;
      const double down = objective(p);
      param = saved;
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-3});
      EXPECT_LT(std::abs(numeric - analytic) / scale, 1e-4);
    };
    for (std::size_t i = 0; i < p.components(); ++i) {
      check(p.omega[i], grad.omega[i]);
      check(p.phi[i], grad.phi[i]);
    }
    for (std::size_t i = 0; i < p.projection.data().size(); ++i) {
      check(p.projection.data()[i], grad.projection.data()[i]);
    }
  }
}

}  // namespace
}  // namespace tkga

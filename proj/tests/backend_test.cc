// Copyright (c) 2026 The ttsspk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_support.h"
#include "ttsspk/backend/embeddings.h"
#include "ttsspk/backend/lda.h"
#include "ttsspk/backend/pipeline.h"
#include "ttsspk/backend/plda.h"
#include "ttsspk/common/error.h"

namespace ttsspk::backend {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::TempDir;

struct Sampled {
  std::vector<VectorXd> x;
  std::vector<int> labels;
};

MatrixXd Cholesky(const MatrixXd& s) { return Eigen::LLT<MatrixXd>(s).matrixL(); }

Sampled SampleTwoCovariance(const VectorXd& mu, const MatrixXd& sb, const MatrixXd& sw,
                            int speakers, int per_speaker, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  const auto d = mu.size();
  auto draw = [&] {
    VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = n01(rng);
    return z;
  };
  const MatrixXd lb = sb.isZero() ? MatrixXd::Zero(d, d) : Cholesky(sb);
  const MatrixXd lw = Cholesky(sw);
  Sampled s;
  for (int k = 0; k < speakers; ++k) {
    const VectorXd y = mu + lb * draw();
    for (int i = 0; i < per_speaker; ++i) {
      s.x.push_back(y + lw * draw());
      s.labels.push_back(k);
    }
  }
  return s;
}

double GaussianLogPdf(const VectorXd& x, const VectorXd& mean, const MatrixXd& cov) {
  Eigen::LLT<MatrixXd> llt(cov);
  const VectorXd r = x - mean;
  const double logdet = 2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  return -0.5 * (x.size() * std::log(2.0 * std::numbers::pi) + logdet + r.dot(llt.solve(r)));
}

MatrixXd RandomSpd(int d, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  MatrixXd a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = n01(rng);
  }
  return scale * (a * a.transpose() / d + 0.5 * MatrixXd::Identity(d, d));
}

PldaModel RandomModel(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  PldaModel m;
  m.mu = VectorXd::NullaryExpr(d, [&] { return n01(rng); });
  m.sigma_b = RandomSpd(d, 1.0, rng);
  m.sigma_w = RandomSpd(d, 0.5, rng);
  return m;
}

EmbeddingSet MakeSet(const Sampled& s) {
  EmbeddingSet set;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    set.records.push_back({"u" + std::to_string(i), "s" + std::to_string(s.labels[i]),
                           s.labels[i] % 2 ? "f" : "m", s.x[i]});
  }
  return set;
}

TEST(Embeddings, FileRoundTrip) {
  TempDir dir("emb");
  EmbeddingSet set;
  set.records.push_back({"a", "spk1", "m", VectorXd::LinSpaced(3, 0.1, 0.3)});
  set.records.push_back({"b", std::nullopt, "f", VectorXd::LinSpaced(3, -1, 1.0 / 3.0)});
  WriteEmbeddings(dir.path() / "e.jsonl", set);
  EmbeddingSet back = ReadEmbeddings(dir.path() / "e.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.records[0].speaker_id, "spk1");
  EXPECT_FALSE(back.records[1].speaker_id.has_value());
  EXPECT_EQ(back.records[1].vector, set.records[1].vector);
  EXPECT_THROW(back.SpeakerLabels(), InputError);
  EXPECT_THROW(back.Find("zzz"), InputError);
}

TEST(Embeddings, ValidationErrors) {
  EmbeddingSet dup;
  dup.records.push_back({"a", "s", "m", VectorXd::Ones(2)});
  dup.records.push_back({"a", "s", "m", VectorXd::Ones(2)});
  EXPECT_THROW(dup.Validate(), InputError);
  EmbeddingSet ragged;
  ragged.records.push_back({"a", "s", "m", VectorXd::Ones(2)});
  ragged.records.push_back({"b", "s", "m", VectorXd::Ones(3)});
  EXPECT_THROW(ragged.Validate(), DimensionError);
}

TEST(Preprocess, UnitNormAndIdempotent) {
  std::mt19937_64 rng(1);
  Sampled s = SampleTwoCovariance(VectorXd::Constant(5, 3.0), MatrixXd::Identity(5, 5),
                                  MatrixXd::Identity(5, 5), 6, 4, 2);
  EmbeddingSet set = MakeSet(s);
  const VectorXd mean = MeanVector(set);
  EmbeddingSet once = CenterAndNormalize(set, mean);
  for (const auto& r : once.records) EXPECT_NEAR(r.vector.norm(), 1.0, 1e-12);
  EmbeddingSet twice = CenterAndNormalize(once, VectorXd::Zero(5));
  for (std::size_t i = 0; i < once.size(); ++i) {
    EXPECT_LT((twice.records[i].vector - once.records[i].vector).norm(), 1e-15);
  }
  // Centering alone leaves a zero-mean training set.
  VectorXd centered = VectorXd::Zero(5);
  for (const auto& r : set.records) centered += r.vector - mean;
  EXPECT_LT(centered.norm(), 1e-10);
}

TEST(Preprocess, ZeroNormNamesUtterance) {
  EmbeddingSet set;
  set.records.push_back({"utt-zero", "s", "m", VectorXd::Ones(3)});
  try {
    CenterAndNormalize(set, VectorXd::Ones(3));
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("utt-zero"), std::string::npos);
  }
}

TEST(Lda, RecoversFisherDirection) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  std::vector<VectorXd> x;
  std::vector<int> labels;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 200; ++i) {
      VectorXd v = VectorXd::NullaryExpr(4, [&] { return 0.5 * n01(rng); });
      v(0) += c == 0 ? 1.0 : -1.0;
      x.push_back(v);
      labels.push_back(c);
    }
  }
  LdaModel m = FitLda(x, labels, 1);
  const VectorXd dir = m.projection.col(0).normalized();
  EXPECT_GT(std::abs(dir(0)), 0.99);
}

TEST(Lda, ProjectedWithinClassCovarianceIsIdentity) {
  std::mt19937_64 rng(6);
  PldaModel g = RandomModel(6, 3);
  Sampled s = SampleTwoCovariance(g.mu, g.sigma_b, g.sigma_w, 8, 10, 4);
  LdaModel m = FitLda(s.x, s.labels, 5);
  const Scatter sc = ComputeScatter(s.x, s.labels);
  const MatrixXd proj = m.projection.transpose() * Ridge(sc.within) * m.projection;
  EXPECT_LT((proj - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-9);
  // Same check on the projected samples; the ridge is the only difference.
  std::vector<VectorXd> y;
  for (const auto& v : s.x) y.push_back(m.Project(v));
  const Scatter py = ComputeScatter(y, s.labels);
  EXPECT_LT((py.within - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Lda, ContractErrors) {
  Sampled s = SampleTwoCovariance(VectorXd::Zero(4), MatrixXd::Identity(4, 4),
                                  MatrixXd::Identity(4, 4), 3, 3, 1);
  EXPECT_THROW(FitLda(s.x, s.labels, 3), ConfigError);
  EXPECT_THROW(FitLda(s.x, s.labels, 0), ConfigError);
  EXPECT_NO_THROW(FitLda(s.x, s.labels, 2));
  std::vector<int> one(s.labels.size(), 0);
  EXPECT_THROW(FitLda(s.x, one, 1), InputError);
  std::vector<int> singleton = s.labels;
  singleton.back() = 7;
  EXPECT_THROW(FitLda(s.x, singleton, 1), InputError);
}

TEST(Plda, LogLikelihoodMatchesJointGaussian) {
  PldaModel m = RandomModel(3, 9);
  Sampled s = SampleTwoCovariance(m.mu, m.sigma_b, m.sigma_w, 3, 4, 1);
  s.labels.back() = 3;  // a singleton class is fine here
  double oracle = 0.0;
  for (int k = 0; k <= 3; ++k) {
    std::vector<VectorXd> xs;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.labels[i] == k) xs.push_back(s.x[i]);
    }
    const int n = static_cast<int>(xs.size());
    VectorXd stacked(3 * n), mean(3 * n);
    MatrixXd cov(3 * n, 3 * n);
    for (int i = 0; i < n; ++i) {
      stacked.segment(3 * i, 3) = xs[i];
      mean.segment(3 * i, 3) = m.mu;
      for (int j = 0; j < n; ++j) {
        cov.block(3 * i, 3 * j, 3, 3) = m.sigma_b + (i == j ? m.sigma_w : MatrixXd::Zero(3, 3));
      }
    }
    oracle += GaussianLogPdf(stacked, mean, cov);
  }
  EXPECT_NEAR(PldaLogLikelihood(m, s.x, s.labels), oracle, 1e-9 * std::abs(oracle));
}

TEST(Plda, EmIsMonotoneAndSymmetric) {
  PldaModel g = RandomModel(4, 1);
  Sampled s = SampleTwoCovariance(g.mu, g.sigma_b, g.sigma_w, 30, 5, 2);
  for (bool ridge : {false, true}) {
    PldaFitResult r = FitPlda(s.x, s.labels, 30, ridge);
    ASSERT_EQ(r.log_likelihood.size(), 31u);
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i) {
      EXPECT_GE(r.log_likelihood[i], r.log_likelihood[i - 1] - 1e-9) << "iteration " << i;
    }
    EXPECT_LT((r.model.sigma_b - r.model.sigma_b.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((r.model.sigma_w - r.model.sigma_w.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// With 100 speakers the between-speaker covariance is only identified up to
// the sampling spread of the speaker means, so sigma_b is compared with the
// covariance of the realized latent means and sigma_w with the truth.
TEST(Plda, RecoversGeneratingModel) {
  VectorXd mu = VectorXd::LinSpaced(4, -1, 2);
  MatrixXd sb(4, 4);
  sb << 3.0, 0.8, 0.2, 0.0,  //
      0.8, 1.5, 0.3, 0.1,    //
      0.2, 0.3, 0.6, 0.1,    //
      0.0, 0.1, 0.1, 0.3;
  MatrixXd sw = 0.5 * MatrixXd::Identity(4, 4);
  sw(0, 1) = sw(1, 0) = 0.1;
  Sampled s = SampleTwoCovariance(mu, sb, sw, 100, 20, 2024);
  std::vector<VectorXd> means(100, VectorXd::Zero(4));
  for (std::size_t i = 0; i < s.x.size(); ++i) means[s.labels[i]] += s.x[i] / 20.0;
  // Class means carry sigma_w / 20 of noise on top of the latent spread.
  MatrixXd latent = MatrixXd::Zero(4, 4);
  VectorXd centre = VectorXd::Zero(4);
  for (const auto& m : means) centre += m / 100.0;
  for (const auto& m : means) latent += (m - centre) * (m - centre).transpose() / 100.0;
  latent -= sw / 20.0;

  PldaFitResult r = FitPlda(s.x, s.labels, 20);
  EXPECT_LT((r.model.sigma_b - latent).norm() / latent.norm(), 0.05);
  EXPECT_LT((r.model.sigma_w - sw).norm() / sw.norm(), 0.15);
  EXPECT_LT((r.model.mu - centre).norm(), 1e-6);
}

TEST(Plda, NoSpeakerVariabilityGivesSmallBetweenCovariance) {
  Sampled s = SampleTwoCovariance(VectorXd::Ones(3), MatrixXd::Zero(3, 3),
                                  MatrixXd::Identity(3, 3), 50, 10, 8);
  PldaFitResult r = FitPlda(s.x, s.labels, 20);
  EXPECT_LT(r.model.sigma_b.norm(), 0.05 * r.model.sigma_w.norm());
}

TEST(PldaScore, OneDimensionalClosedForm) {
  PldaModel m{VectorXd::Zero(1), MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, 0.5)};
  const double same = -std::log(2 * std::numbers::pi) - 0.5 * std::log(1.25) - 0.5 * (1.0 / 1.25);
  const double diff = 2.0 * (-0.5 * std::log(2 * std::numbers::pi * 1.5) - 0.5 / 1.5);
  EXPECT_NEAR(PldaScorer(m).Score(VectorXd::Ones(1), VectorXd::Ones(1)), same - diff, 1e-12);
}

TEST(PldaScore, MatchesJointGaussianRatio) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PldaModel m = RandomModel(3, seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    const VectorXd a = VectorXd::NullaryExpr(3, [&] { return n01(rng); });
    const VectorXd b = VectorXd::NullaryExpr(3, [&] { return n01(rng); });
    const MatrixXd t = m.sigma_b + m.sigma_w;
    MatrixXd joint(6, 6);
    joint << t, m.sigma_b, m.sigma_b, t;
    VectorXd ab(6), mm(6);
    ab << a, b;
    mm << m.mu, m.mu;
    const double oracle =
        GaussianLogPdf(ab, mm, joint) - GaussianLogPdf(a, m.mu, t) - GaussianLogPdf(b, m.mu, t);
    PldaScorer sc(m);
    EXPECT_NEAR(sc.Score(a, b), oracle, 1e-10);
    EXPECT_NEAR(sc.Score(a, b), sc.Score(b, a), 1e-12);
  }
}

TEST(PldaScore, VanishingSpeakerCovarianceGivesZero) {
  PldaModel m = RandomModel(3, 2);
  m.sigma_b.setZero();
  PldaScorer sc(m);
  EXPECT_NEAR(sc.Score(VectorXd::Ones(3), VectorXd::LinSpaced(3, -2, 5)), 0.0, 1e-12);
}

TEST(PldaScore, QuadraticInTestVector) {
  PldaModel m = RandomModel(3, 4);
  PldaScorer sc(m);
  const VectorXd enroll = VectorXd::LinSpaced(3, 0.3, -0.7);
  const VectorXd dir = VectorXd::LinSpaced(3, 1, 2).normalized();
  const double h = 0.25;
  std::vector<double> second;
  for (int k = 0; k < 6; ++k) {
    auto f = [&](int i) { return sc.Score(enroll, (k + i) * h * dir); };
    second.push_back(f(2) - 2 * f(1) + f(0));
  }
  for (double s : second) EXPECT_NEAR(s, second[0], 1e-9);
  EXPECT_THROW(sc.Score(VectorXd::Ones(2), VectorXd::Ones(3)), DimensionError);
}

TEST(Pipeline, ConstantShiftLeavesScoresUnchanged) {
  PldaModel g = RandomModel(6, 11);
  Sampled s = SampleTwoCovariance(g.mu, g.sigma_b, g.sigma_w, 8, 6, 3);
  EmbeddingSet train = MakeSet(s);
  EmbeddingSet shifted = train;
  const VectorXd c = VectorXd::LinSpaced(6, 5, -3);
  for (auto& r : shifted.records) r.vector += c;
  BackendConfig cfg;
  BackendFit a = FitBackend(train, cfg);
  BackendFit b = FitBackend(shifted, cfg);
  EXPECT_EQ(a.lda_dim, 5);
  for (std::size_t i = 0; i + 1 < train.size(); i += 5) {
    const auto& x = train.records[i].vector;
    const auto& y = train.records[i + 1].vector;
    EXPECT_NEAR(a.model.Score(x, y), b.model.Score(x + c, y + c), 1e-8);
  }
}

TEST(Pipeline, FileRoundTripAndConfig) {
  TempDir dir("backend");
  PldaModel g = RandomModel(4, 12);
  Sampled s = SampleTwoCovariance(g.mu, g.sigma_b, g.sigma_w, 5, 6, 3);
  BackendConfig cfg;
  cfg.lda_dim = 3;
  cfg.preprocess = false;
  BackendFit fit = FitBackend(MakeSet(s), cfg);
  WriteBackend(dir.path() / "b.json", fit.model);
  BackendModel back = ReadBackend(dir.path() / "b.json");
  EXPECT_EQ(back.Score(s.x[0], s.x[7]), fit.model.Score(s.x[0], s.x[7]));
  EXPECT_FALSE(back.preprocess());

  EXPECT_EQ(BackendConfigToJson(BackendConfigFromJson(BackendConfigToJson(cfg))),
            BackendConfigToJson(cfg));
  EXPECT_THROW(BackendConfigFromJson({{"lda", 3}}), ConfigError);
  EXPECT_THROW(BackendConfigFromJson({{"em_iters", -1}}), ConfigError);
  cfg.lda_dim = 5;
  EXPECT_THROW(FitBackend(MakeSet(s), cfg), ConfigError);
  EXPECT_EQ(DefaultLdaDim(1000, 512), 150);
  EXPECT_EQ(DefaultLdaDim(8, 32), 7);
  EXPECT_EQ(DefaultLdaDim(40, 16), 15);
}

}  // namespace
}  // namespace ttsspk::backend

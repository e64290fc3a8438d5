/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <gtest/gtest.h>

#include "support.hpp"

namespace cedkit {
namespace {

std::vector<CeLabel> random_labels(Rng& rng, std::size_t n, int max_class) {
    std::vector<CeLabel> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(CeLabel(rng.bernoulli(0.6) ? 0 : static_cast<int>(rng.uniform_int(0, max_class))));
    return out;
}

LabeledTrace with_labels(std::vector<CeLabel> labels) {
    LabeledTrace lt;
    lt.trace.id = "x";
    lt.trace.events.assign(labels.size(), AtomicEvent::walk);
    lt.labels = std::move(labels);
    return lt;
}

// ---------------------------------------------------------------------------
// F1
// ---------------------------------------------------------------------------

TEST(F1, MatchesBruteForceOracle) {
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        const std::size_t traces = rng.uniform_int(1, 4);
        const int max_class = static_cast<int>(rng.uniform_int(1, 10));
        std::vector<LabeledTrace> truth;
        std::vector<std::vector<CeLabel>> pred, truth_labels;
        for (std::size_t k = 0; k < traces; ++k) {
            const std::size_t n = rng.uniform_int(1, 30);
            truth.push_back(with_labels(random_labels(rng, n, max_class)));
            truth_labels.push_back(truth.back().labels);
            pred.push_back(random_labels(rng, n, max_class));
        }
        const EvalReport r = f1_report(pred, truth);
        const testing::BruteF1 b = testing::brute_f1(truth_labels, pred);
        for (std::size_t c = 0; c < kCeClassCount; ++c) {
            ASSERT_EQ(static_cast<long>(r.confusion[c][c]), b.tp[c]);
            ASSERT_EQ(static_cast<long>(r.predicted[c] - r.confusion[c][c]), b.fp[c]);
            ASSERT_EQ(static_cast<long>(r.support[c] - r.confusion[c][c]), b.fn[c]);
            ASSERT_EQ(r.per_class_f1[c].has_value(), b.defined[c]);
            if (b.defined[c]) {
                ASSERT_DOUBLE_EQ(*r.per_class_f1[c], b.f1[c]);
            }
        }
        if (std::isnan(b.pos)) {
            ASSERT_TRUE(std::isnan(r.f1_pos));
        } else {
            ASSERT_DOUBLE_EQ(r.f1_pos, b.pos);
        }
        ASSERT_DOUBLE_EQ(r.f1_all, b.all);
    }
}

TEST(F1, PerfectPredictor) {
    Rng rng(22);
    std::vector<LabeledTrace> truth;
    std::vector<std::vector<CeLabel>> pred;
    for (int i = 0; i < 50; ++i) {
        truth.push_back(testing::random_labeled(rng, 120));
        pred.push_back(truth.back().labels);
    }
    const EvalReport r = f1_report(pred, truth);
    EXPECT_EQ(r.f1_all, 1.0);
    EXPECT_EQ(r.f1_pos, 1.0);
    EXPECT_EQ(r.windows, 50u * 120u);
}

TEST(F1, AllNegativePredictor) {
    const std::vector<LabeledTrace> truth{with_labels({CeLabel(0), CeLabel(3), CeLabel(0), CeLabel(7)})};
    const std::vector<std::vector<CeLabel>> pred{std::vector<CeLabel>(4, kNoEvent)};
    const EvalReport r = f1_report(pred, truth);
    EXPECT_EQ(r.f1_pos, 0.0);
    EXPECT_DOUBLE_EQ(*r.per_class_f1[0], 2.0 * 2 / (2 * 2 + 2));
    EXPECT_DOUBLE_EQ(r.f1_all, (2.0 / 3.0) / 3.0);
    EXPECT_EQ(r.confusion[3][0], 1u);
    EXPECT_EQ(r.support[7], 1u);
    EXPECT_EQ(r.predicted[0], 4u);
}

TEST(F1, AbsentClassPolicies) {
    const std::vector<LabeledTrace> truth{with_labels({CeLabel(0), CeLabel(2)})};
    const std::vector<std::vector<CeLabel>> pred{{CeLabel(0), CeLabel(2)}};
    const EvalReport ex = f1_report(pred, truth);
    EXPECT_FALSE(ex.per_class_f1[5].has_value());
    EXPECT_EQ(ex.f1_pos, 1.0);
    const EvalReport zero = f1_report(pred, truth, AbsentClassPolicy::zero);
    EXPECT_DOUBLE_EQ(zero.f1_pos, 0.1);
    EXPECT_DOUBLE_EQ(zero.f1_all, 2.0 / 11.0);
    const EvalReport one = f1_report(pred, truth, AbsentClassPolicy::one);
    EXPECT_EQ(one.f1_pos, 1.0);
    // nothing positive at all: undefined under exclusion
    const std::vector<LabeledTrace> neg{with_labels({CeLabel(0)})};
    EXPECT_TRUE(std::isnan(f1_report(std::vector<std::vector<CeLabel>>{{CeLabel(0)}}, neg).f1_pos));
}

TEST(F1, ShardsMerge) {
    Rng rng(23);
    ConfusionAccumulator whole, a, b;
    for (int i = 0; i < 40; ++i) {
        const auto t = random_labels(rng, 25, 10), p = random_labels(rng, 25, 10);
        whole.add(t, p);
        (i % 2 ? a : b).add(t, p);
    }
    a.merge(b);
    EXPECT_EQ(a.counts(), whole.counts());
}

TEST(F1, LengthMismatch) {
    const std::vector<LabeledTrace> truth{with_labels({CeLabel(0), CeLabel(2)})};
    EXPECT_THROW(f1_report(std::vector<std::vector<CeLabel>>{{CeLabel(0)}}, truth), LengthMismatch);
    EXPECT_THROW(f1_report(std::vector<std::vector<CeLabel>>{}, truth), LengthMismatch);
}

// ---------------------------------------------------------------------------
// Focal loss
// ---------------------------------------------------------------------------

CeDistribution random_ce_dist(Rng& rng) {
    CeDistribution d{};
    double s = 0.0;
    for (auto& v : d) s += v = 0.01 + rng.uniform01();
    for (auto& v : d) v /= s;
    return d;
}

TEST(Focal, MatchesScalarOracle) {
    Rng rng(31);
    const FocalParams params;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = rng.uniform_int(1, 20);
        std::vector<CeDistribution> probs;
        std::vector<CeLabel> labels;
        double oracle = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            probs.push_back(random_ce_dist(rng));
            labels.push_back(CeLabel(static_cast<int>(rng.uniform_int(0, 10))));
            oracle += testing::scalar_focal(probs.back()[labels.back().index()], params.alpha[labels.back().index()], 2.0);
        }
        const double v = focal_loss(probs, labels).value;
        ASSERT_LE(std::abs(v - oracle), 1e-12 * std::abs(oracle));
    }
}

TEST(Focal, ReducesToCrossEntropy) {
    Rng rng(32);
    for (int i = 0; i < 100; ++i) {
        const CeDistribution d = random_ce_dist(rng);
        const CeLabel y(static_cast<int>(rng.uniform_int(0, 10)));
        const double v = focal_loss(std::vector<CeDistribution>{d}, std::vector<CeLabel>{y}, FocalParams::cross_entropy()).value;
        EXPECT_NEAR(v, -std::log(d[y.index()]), 1e-15);
    }
}

TEST(Focal, SingleWindowExample) {
    CeDistribution d{};
    d[0] = 0.9;
    d[1] = 0.1;
    const double v = focal_loss(std::vector<CeDistribution>{d}, std::vector<CeLabel>{kNoEvent}).value;
    const double expected = 0.005 * 0.01 * -std::log(0.9);
    EXPECT_NEAR(v, expected, 1e-12 * expected);
    EXPECT_NEAR(v, 5.268025782891314e-06, 1e-17);
}

TEST(Focal, EdgeCases) {
    CeDistribution sure{};
    sure[4] = 1.0;
    EXPECT_EQ(focal_loss(std::vector<CeDistribution>{sure}, std::vector<CeLabel>{CeLabel(4)}).value, 0.0);
    const FocalLoss z = focal_loss(std::vector<CeDistribution>{sure}, std::vector<CeLabel>{CeLabel(3)});
    EXPECT_TRUE(z.probability_zero);
    EXPECT_TRUE(std::isinf(z.value));
    CeDistribution bad{};
    bad[0] = 0.5;
    EXPECT_THROW(focal_loss(std::vector<CeDistribution>{bad}, std::vector<CeLabel>{kNoEvent}), NotNormalized);
    EXPECT_THROW(focal_loss(std::vector<CeDistribution>{sure}, std::vector<CeLabel>{}), LengthMismatch);
    FocalParams p;
    p.gamma = -1.0;
    EXPECT_THROW(FocalLossAccumulator{p}, std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Degradation under classifier noise
// ---------------------------------------------------------------------------

TEST(Degradation, MonotoneAndExactAtZero) {
    DatasetManifest m;
    m.name = "deg";
    m.count = 200;
    m.config_id = "default";
    m.seed_base = 5;
    const BuildResult r = build(m, testing::default_suite(), 1, 1.0);
    const std::vector<double> levels{0.0, 0.05, 0.1, 0.2};
    DegradationOptions opt;
    opt.seed = 9;
    const auto rows = degradation_curve(r.traces, levels, opt);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].argmax.f1_pos, 1.0);
    EXPECT_EQ(rows[0].probabilistic.f1_pos, 1.0);
    EXPECT_LT(rows[1].argmax.f1_pos, 1.0);
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_LE(rows[k].argmax.f1_pos, rows[k - 1].argmax.f1_pos);
    opt.jobs = 3;
    const auto again = degradation_curve(r.traces, levels, opt);
    for (std::size_t k = 0; k < rows.size(); ++k) EXPECT_EQ(again[k].argmax.confusion, rows[k].argmax.confusion);
    EXPECT_THROW(degradation_curve(r.traces, std::vector<double>{1.5}, opt), std::invalid_argument);
}

}  // namespace
}  // namespace cedkit

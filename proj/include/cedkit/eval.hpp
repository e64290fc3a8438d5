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

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cedkit/core.hpp"
#include "cedkit/fsm.hpp"
#include "cedkit/parallel.hpp"
#include "cedkit/probfsm.hpp"
#include "cedkit/rng.hpp"
#include "cedkit/simulator.hpp"

namespace cedkit {

// ---------------------------------------------------------------------------
// F1
// ---------------------------------------------------------------------------

/// What F1 a class gets when it has neither support nor predictions.
enum class AbsentClassPolicy {
    exclude,  // left out of the macro averages (default)
    zero,
    one,
};

using ConfusionCounts = std::array<std::array<std::uint64_t, kCeClassCount>, kCeClassCount>;

struct EvalReport {
    /// nullopt for classes excluded by the absent-class policy.
    std::array<std::optional<double>, kCeClassCount> per_class_f1{};
    /// Macro over e0..e10 and over e1..e10; NaN when no class is defined.
    double f1_all = 0.0;
    double f1_pos = 0.0;
    /// confusion[truth][prediction], window counts.
    ConfusionCounts confusion{};
    std::array<std::uint64_t, kCeClassCount> support{};
    std::array<std::uint64_t, kCeClassCount> predicted{};
    std::uint64_t windows = 0;
};

/// Window-level confusion counts pooled over traces. Accumulators over
/// disjoint shards merge by addition.
class ConfusionAccumulator {
public:
    void add(std::span<const CeLabel> truth, std::span<const CeLabel> pred) {
        if (truth.size() != pred.size())
            throw LengthMismatch("prediction has " + std::to_string(pred.size()) + " windows, truth has " +
                                 std::to_string(truth.size()));
        for (std::size_t t = 0; t < truth.size(); ++t) ++counts_[truth[t].index()][pred[t].index()];
    }

    void merge(const ConfusionAccumulator& other) {
        for (std::size_t i = 0; i < kCeClassCount; ++i)
            for (std::size_t j = 0; j < kCeClassCount; ++j) counts_[i][j] += other.counts_[i][j];
    }

    const ConfusionCounts& counts() const noexcept { return counts_; }

    EvalReport report(AbsentClassPolicy policy = AbsentClassPolicy::exclude) const {
        EvalReport r;
        r.confusion = counts_;
        for (std::size_t i = 0; i < kCeClassCount; ++i)
            for (std::size_t j = 0; j < kCeClassCount; ++j) {
                r.support[i] += counts_[i][j];
                r.predicted[j] += counts_[i][j];
                r.windows += counts_[i][j];
            }
        double sum_all = 0.0, sum_pos = 0.0;
        std::size_t n_all = 0, n_pos = 0;
        for (std::size_t c = 0; c < kCeClassCount; ++c) {
            const std::uint64_t tp = counts_[c][c];
            const std::uint64_t fp = r.predicted[c] - tp;
            const std::uint64_t fn = r.support[c] - tp;
            std::optional<double> f1;
            if (tp + fp + fn > 0) {
                // 2PR / (P + R) written in counts; 0 when tp == 0.
                f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
            } else if (policy == AbsentClassPolicy::zero) {
                f1 = 0.0;
            } else if (policy == AbsentClassPolicy::one) {
                f1 = 1.0;
            }
            r.per_class_f1[c] = f1;
            if (f1) {
                sum_all += *f1;
                ++n_all;
                if (c > 0) {
                    sum_pos += *f1;
                    ++n_pos;
                }
            }
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        r.f1_all = n_all ? sum_all / static_cast<double>(n_all) : nan;
        r.f1_pos = n_pos ? sum_pos / static_cast<double>(n_pos) : nan;
        return r;
    }

private:
    ConfusionCounts counts_{};
};

/// Per-class and macro F1 of `pred[i]` against `truth[i].labels`.
inline EvalReport f1_report(std::span<const std::vector<CeLabel>> pred, std::span<const LabeledTrace> truth,
                            AbsentClassPolicy policy = AbsentClassPolicy::exclude) {
    if (pred.size() != truth.size())
        throw LengthMismatch(std::to_string(pred.size()) + " predicted traces for " + std::to_string(truth.size()) +
                             " labeled traces");
    ConfusionAccumulator acc;
    for (std::size_t i = 0; i < pred.size(); ++i) acc.add(truth[i].labels, pred[i]);
    return acc.report(policy);
}

// ---------------------------------------------------------------------------
// Focal loss
// ---------------------------------------------------------------------------

using CeDistribution = std::array<double, kCeClassCount>;

struct FocalParams {
    double gamma = 2.0;
    std::array<double, kCeClassCount> alpha = {0.005, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25};

    static FocalParams cross_entropy() {
        FocalParams p;
        p.gamma = 0.0;
        p.alpha.fill(1.0);
        return p;
    }
};

struct FocalLoss {
    double value = 0.0;  // +infinity when some true-class probability is zero
    bool probability_zero = false;
};

/// Multi-class focal loss summed over windows:
///   sum_t alpha[y_t] * (1 - p_t[y_t])^gamma * -ln p_t[y_t]
class FocalLossAccumulator {
public:
    explicit FocalLossAccumulator(FocalParams params = {}) : params_(params) {
        if (!(params_.gamma >= 0.0)) throw std::invalid_argument("focal gamma must be nonnegative");
        for (double a : params_.alpha)
            if (!(a > 0.0)) throw std::invalid_argument("focal alpha weights must be positive");
    }

    void add(std::span<const CeDistribution> probs, std::span<const CeLabel> truth) {
        if (probs.size() != truth.size()) throw LengthMismatch("probability and label sequences differ in length");
        for (std::size_t t = 0; t < probs.size(); ++t) {
            double sum = 0.0;
            for (double p : probs[t]) {
                if (!(p >= 0.0)) throw NotNormalized("negative class probability at window " + std::to_string(t));
                sum += p;
            }
            if (std::abs(sum - 1.0) > kNormalizationTolerance)
                throw NotNormalized("class probabilities at window " + std::to_string(t) + " do not sum to 1");
            const double p = probs[t][truth[t].index()];
            if (p == 0.0) {
                loss_.probability_zero = true;
                continue;
            }
            const double modulating = params_.gamma == 0.0 ? 1.0 : std::pow(1.0 - p, params_.gamma);
            loss_.value += params_.alpha[truth[t].index()] * modulating * -std::log(p);
        }
    }

    FocalLoss result() const {
        FocalLoss r = loss_;
        if (r.probability_zero) r.value = std::numeric_limits<double>::infinity();
        return r;
    }

private:
    FocalParams params_;
    FocalLoss loss_;
};

inline FocalLoss focal_loss(std::span<const CeDistribution> probs, std::span<const CeLabel> truth,
                            const FocalParams& params = {}) {
    FocalLossAccumulator acc(params);
    acc.add(probs, truth);
    return acc.result();
}

/// Dataset form: probs[i] holds the per-window distributions for truth[i].
inline FocalLoss focal_loss(std::span<const std::vector<CeDistribution>> probs, std::span<const LabeledTrace> truth,
                            const FocalParams& params = {}) {
    if (probs.size() != truth.size()) throw LengthMismatch("probability and label sets differ in trace count");
    FocalLossAccumulator acc(params);
    for (std::size_t i = 0; i < probs.size(); ++i) acc.add(probs[i], truth[i].labels);
    return acc.result();
}

// ---------------------------------------------------------------------------
// Detection under classifier noise
// ---------------------------------------------------------------------------

struct DegradationRow {
    double noise = 0.0;
    EvalReport argmax;         // deterministic monitors on the emitted symbols
    EvalReport probabilistic;  // belief machines on the distributions
};

struct DegradationOptions {
    double threshold = kDefaultThreshold;
    std::uint64_t seed = 0;
    std::optional<ConfusionMatrix> confusion;
    std::size_t jobs = 1;
    AbsentClassPolicy policy = AbsentClassPolicy::exclude;
};

/// Corrupts every trace at each noise level (accuracy = 1 - noise) and scores
/// both detectors against the stored labels. Trace i uses the channel seed
/// derive_seed(seed, i) at every level.
inline std::vector<DegradationRow> degradation_curve(std::span<const LabeledTrace> dataset,
                                                     std::span<const double> noise_levels,
                                                     const DegradationOptions& opt = {}) {
    std::vector<DegradationRow> rows;
    if (dataset.empty()) return rows;
    const ProbabilisticDetector detector(dataset.front().trace.window);
    for (double noise : noise_levels) {
        if (!(noise >= 0.0 && noise <= 1.0)) throw std::invalid_argument("noise level must lie in [0, 1]");
        std::vector<std::vector<CeLabel>> argmax(dataset.size()), prob(dataset.size());
        parallel_for(dataset.size(), opt.jobs, [&](std::size_t i) {
            const Corruption c = corrupt(dataset[i].trace, 1.0 - noise, opt.confusion, derive_seed(opt.seed, i));
            argmax[i] = detect_symbols(c.symbols);
            prob[i] = detector.detect(c.probs, opt.threshold);
        });
        rows.push_back({noise, f1_report(argmax, dataset, opt.policy), f1_report(prob, dataset, opt.policy)});
    }
    return rows;
}

}  // namespace cedkit

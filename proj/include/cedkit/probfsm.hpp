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
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cedkit/core.hpp"
#include "cedkit/fsm.hpp"

/**
 * Monitors over distribution-valued inputs.
 *
 * A monitor is first flattened into an explicit Moore automaton whose states
 * are (behavioral monitor state, fired-on-entry) pairs reachable from the
 * initial state. A belief over those states is then pushed forward linearly
 * by each input distribution; the mass entering accepting states is the
 * probability that the complex event completes at this window.
 */
namespace cedkit {

class StateExplosion : public Error {
public:
    using Error::Error;
};

struct ExplicitAutomaton {
    using StateId = std::uint32_t;

    CeLabel ce;
    WindowSpec window;
    StateId initial = 0;
    /// Representative monitor state of every explicit state (bookkeeping
    /// fields cleared).
    std::vector<MonitorState> states;
    /// Nonzero where the state is entered exactly when the monitor fires.
    std::vector<std::uint8_t> accepting;
    /// Dense table: transition[s][code(ae)].
    std::vector<std::array<StateId, kAtomicEventCount>> transition;
    /// Where a report moves the mass of an accepting state: the non-accepting
    /// state with the same monitor state. Identity for non-accepting states.
    std::vector<StateId> reset_target;

    std::size_t size() const noexcept { return states.size(); }
    StateId next(StateId s, AtomicEvent ae) const { return transition[s][code(ae)]; }
};

inline constexpr std::size_t kDefaultStateCap = 1'000'000;

/// Breadth-first enumeration of every reachable explicit state of the
/// monitor for `ce`. State 0 is the initial state; ids follow discovery
/// order, so the result is deterministic.
inline ExplicitAutomaton finitize(CeLabel ce, WindowSpec window = {}, std::size_t cap = kDefaultStateCap) {
    const Monitor monitor(ce, window);
    ExplicitAutomaton a;
    a.ce = ce;
    a.window = window;

    std::unordered_map<std::uint64_t, ExplicitAutomaton::StateId> ids;
    std::deque<ExplicitAutomaton::StateId> queue;
    auto intern = [&](const MonitorState& s, bool fired) {
        const std::uint64_t k = (s.key() << 1) | (fired ? 1U : 0U);
        auto [it, inserted] = ids.try_emplace(k, static_cast<ExplicitAutomaton::StateId>(a.states.size()));
        if (inserted) {
            if (a.states.size() >= cap)
                throw StateExplosion("monitor " + to_string(ce) + " exceeds " + std::to_string(cap) + " states");
            MonitorState rep = s;
            rep.anchor.reset();
            rep.previous.reset();
            a.states.push_back(rep);
            a.accepting.push_back(fired ? 1 : 0);
            a.transition.emplace_back();
            a.reset_target.push_back(it->second);
            queue.push_back(it->second);
        }
        return it->second;
    };

    a.initial = intern(monitor.initial(), false);
    while (!queue.empty()) {
        const auto id = queue.front();
        queue.pop_front();
        for (AtomicEvent x : kAllAtomicEvents) {
            MonitorState s = a.states[id];
            const MonitorOutput out = monitor.step(s, x, 0);
            const auto to = intern(s, out.fired);
            a.transition[id][code(x)] = to;
        }
        if (a.accepting[id]) {
            const MonitorState twin = a.states[id];
            const auto target = intern(twin, false);
            a.reset_target[id] = target;
        }
    }
    return a;
}

inline std::array<ExplicitAutomaton, kCeEventCount> finitize_all(WindowSpec window = {}) {
    std::array<ExplicitAutomaton, kCeEventCount> out;
    for (std::size_t i = 0; i < kCeEventCount; ++i) out[i] = finitize(CeLabel(static_cast<int>(i + 1)), window);
    return out;
}

struct BeliefState {
    CeLabel ce;
    std::vector<double> weights;
};

inline BeliefState initial_belief(const ExplicitAutomaton& a) {
    BeliefState b{a.ce, std::vector<double>(a.size(), 0.0)};
    b.weights[a.initial] = 1.0;
    return b;
}

struct BeliefStep {
    bool fired = false;
    double p_accept = 0.0;
};

namespace detail {

inline void check_threshold(double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must lie in (0, 1]");
}

/// Pushes `from` through the automaton into `to` (which is overwritten).
/// Returns the mass that entered accepting states.
inline double propagate(const ExplicitAutomaton& a, const std::vector<double>& from, const AeDistribution& dist,
                        std::vector<double>& to) {
    to.assign(a.size(), 0.0);
    for (std::size_t s = 0; s < from.size(); ++s) {
        const double w = from[s];
        if (w == 0.0) continue;
        const auto& row = a.transition[s];
        for (std::size_t x = 0; x < kAtomicEventCount; ++x)
            if (dist[x] != 0.0) to[row[x]] += w * dist[x];
    }
    double p_accept = 0.0;
    for (std::size_t s = 0; s < to.size(); ++s)
        if (a.accepting[s]) p_accept += to[s];
    return p_accept;
}

/// Conditions on the report: the accepting mass, renormalized, moves to the
/// post-report states. For every monitor whose report returns it to its
/// initial state this is a point mass on the initial state.
inline void reset_after_report(const ExplicitAutomaton& a, std::vector<double>& w, double p_accept,
                               std::vector<double>& scratch) {
    scratch.assign(a.size(), 0.0);
    for (std::size_t s = 0; s < w.size(); ++s)
        if (a.accepting[s] && w[s] != 0.0) scratch[a.reset_target[s]] += w[s] / p_accept;
    w.swap(scratch);
}

}  // namespace detail

/// Belief machine for one complex event: owns its belief and scratch space.
class BeliefMachine {
public:
    explicit BeliefMachine(const ExplicitAutomaton& automaton) : a_(&automaton), belief_(initial_belief(automaton)) {}

    BeliefStep step(const AeDistribution& dist, double threshold) {
        detail::check_threshold(threshold);
        if (!is_normalized(dist)) throw NotNormalized("input distribution is not normalized");
        BeliefStep r;
        r.p_accept = detail::propagate(*a_, belief_.weights, dist, scratch_);
        belief_.weights.swap(scratch_);
        if (r.p_accept >= threshold) {
            r.fired = true;
            detail::reset_after_report(*a_, belief_.weights, r.p_accept, scratch_);
        }
        return r;
    }

    void reset() { belief_ = initial_belief(*a_); }
    const BeliefState& belief() const noexcept { return belief_; }
    const ExplicitAutomaton& automaton() const noexcept { return *a_; }

private:
    const ExplicitAutomaton* a_;
    BeliefState belief_;
    std::vector<double> scratch_;
};

struct BeliefUpdate {
    BeliefState belief;
    bool fired = false;
    double p_accept = 0.0;
};

/// Pure form: one belief step for `belief` under `dist`.
inline BeliefUpdate belief_step(const ExplicitAutomaton& a, const BeliefState& belief, const AeDistribution& dist,
                                double threshold) {
    detail::check_threshold(threshold);
    if (!is_normalized(dist)) throw NotNormalized("input distribution is not normalized");
    if (belief.weights.size() != a.size()) throw std::invalid_argument("belief does not match automaton");
    BeliefUpdate u{{belief.ce, {}}, false, 0.0};
    u.p_accept = detail::propagate(a, belief.weights, dist, u.belief.weights);
    if (u.p_accept >= threshold) {
        u.fired = true;
        std::vector<double> scratch;
        detail::reset_after_report(a, u.belief.weights, u.p_accept, scratch);
    }
    return u;
}

/// Ten belief machines in lockstep over one stream of distributions.
class ProbabilisticDetector {
public:
    explicit ProbabilisticDetector(WindowSpec window = {}) : automata_(finitize_all(window)) {}

    const std::array<ExplicitAutomaton, kCeEventCount>& automata() const noexcept { return automata_; }

    class Stream {
    public:
        Stream(const ProbabilisticDetector& d, double threshold) : threshold_(threshold) {
            detail::check_threshold(threshold);
            machines_.reserve(kCeEventCount);
            for (const auto& a : d.automata_) machines_.emplace_back(a);
        }

        /// Feeds one window. Several machines may cross the threshold at once;
        /// each of them resets, and the emitted label is the one with the
        /// highest accepting mass (lowest id on ties).
        CeLabel step(const AeDistribution& dist) {
            if (!is_normalized(dist)) throw NotNormalized("input distribution is not normalized");
            CeLabel best = kNoEvent;
            double best_p = -1.0;
            for (std::size_t i = 0; i < machines_.size(); ++i) {
                last_[i] = machines_[i].step(dist, threshold_);
                if (last_[i].fired && last_[i].p_accept > best_p) {
                    best = CeLabel(static_cast<int>(i + 1));
                    best_p = last_[i].p_accept;
                }
            }
            return best;
        }

        const std::vector<BeliefMachine>& machines() const noexcept { return machines_; }
        const std::array<BeliefStep, kCeEventCount>& last() const noexcept { return last_; }

    private:
        double threshold_;
        std::vector<BeliefMachine> machines_;
        std::array<BeliefStep, kCeEventCount> last_{};
    };

    Stream stream(double threshold) const { return Stream(*this, threshold); }

    std::vector<CeLabel> detect(const ProbTrace& ptrace, double threshold) const {
        if (ptrace.window != automata_.front().window)
            throw std::invalid_argument("window length of trace and detector differ");
        validate(ptrace);
        Stream s = stream(threshold);
        std::vector<CeLabel> out;
        out.reserve(ptrace.size());
        for (const auto& d : ptrace.dists) out.push_back(s.step(d));
        return out;
    }

private:
    std::array<ExplicitAutomaton, kCeEventCount> automata_;
};

inline constexpr double kDefaultThreshold = 0.5;

/// Convenience wrapper building the automata for the trace's window length.
inline std::vector<CeLabel> detect_prob(const ProbTrace& ptrace, double threshold = kDefaultThreshold) {
    return ProbabilisticDetector(ptrace.window).detect(ptrace, threshold);
}

}  // namespace cedkit

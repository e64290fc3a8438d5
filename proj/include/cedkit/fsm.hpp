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

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cedkit/core.hpp"

/**
 * Rule-based complex event monitors.
 *
 * Each of the ten complex events is recognized by an extended finite state
 * machine: a small control location plus up to three bounded tick counters.
 * Durations in the rules are written in seconds and converted to windows with
 * WindowSpec::ticks (ceiling), so "at least 20 s" stays an "at least" bound at
 * any window length.
 *
 * Besides the behavioral state (location and counters) a MonitorState carries
 * two bookkeeping fields, the anchor of the candidate instance and the
 * previous input. They never influence whether a monitor fires; they only
 * locate the instance in time. Finitization ignores them.
 */
namespace cedkit {

class SimultaneousCompletion : public Error {
public:
    SimultaneousCompletion(std::size_t window, std::vector<CeLabel> fired)
        : Error(describe(window, fired)), window_(window), fired_(std::move(fired)) {}

    std::size_t window() const noexcept { return window_; }
    const std::vector<CeLabel>& fired() const noexcept { return fired_; }

private:
    static std::string describe(std::size_t window, const std::vector<CeLabel>& fired) {
        std::string s = "simultaneous completion at window " + std::to_string(window) + ":";
        for (CeLabel ce : fired) s += " " + to_string(ce);
        return s;
    }
    std::size_t window_;
    std::vector<CeLabel> fired_;
};

struct MonitorState {
    CeLabel ce;
    std::uint8_t location = 0;
    std::array<std::uint16_t, 3> counters{};
    std::optional<std::size_t> anchor;
    std::optional<AtomicEvent> previous;

    /// Packs location and counters; equal keys mean equal future behavior.
    std::uint64_t key() const noexcept {
        return (std::uint64_t{location} << 48) | (std::uint64_t{counters[0]} << 32) |
               (std::uint64_t{counters[1]} << 16) | std::uint64_t{counters[2]};
    }

    friend bool operator==(const MonitorState&, const MonitorState&) = default;
};

struct MonitorOutput {
    bool fired = false;
    CeLabel ce;
    std::optional<std::size_t> anchor;
};

struct CounterSpec {
    std::string name;
    std::uint16_t clamp = 0;
};

struct ThresholdSpec {
    std::string name;
    std::string unit;  // "seconds" or "count"
    std::int64_t value = 0;
    std::size_t ticks = 0;  // equals value for counts
};

/// Machine-readable description of one monitor.
struct MonitorDescription {
    CeLabel ce;
    std::string name;
    std::string category;
    std::vector<std::string> locations;
    std::vector<CounterSpec> counters;
    std::vector<ThresholdSpec> thresholds;
};

namespace detail {

inline bool is_work(AtomicEvent x) { return x == AtomicEvent::click_mouse || x == AtomicEvent::type; }
inline bool is_meal(AtomicEvent x) { return x == AtomicEvent::eat || x == AtomicEvent::drink; }
// Activities after which clean hands count as dirty again.
inline bool touches_things(AtomicEvent x) {
    return x == AtomicEvent::brush_teeth || x == AtomicEvent::click_mouse || x == AtomicEvent::flush_toilet ||
           x == AtomicEvent::type;
}

inline std::uint16_t bump(std::uint16_t v, std::uint16_t clamp) {
    return v < clamp ? static_cast<std::uint16_t>(v + 1) : clamp;
}

inline std::uint16_t as_u16(std::size_t v) {
    return static_cast<std::uint16_t>(std::min<std::size_t>(v, 0xfff0));
}

}  // namespace detail

/// One complex event monitor. Immutable and cheap to copy; all per-stream
/// state lives in MonitorState.
class Monitor {
public:
    explicit Monitor(CeLabel ce, WindowSpec window = {}) : ce_(ce), window_(window) {
        if (!ce.is_event()) throw InvalidLabel("e0 has no monitor");
        describe();
    }

    CeLabel ce() const noexcept { return ce_; }
    WindowSpec window() const noexcept { return window_; }
    const MonitorDescription& description() const noexcept { return desc_; }

    MonitorState initial() const {
        MonitorState s;
        s.ce = ce_;
        if (ce_.id() == 2) s.counters[1] = desc_.counters[1].clamp;  // time since wash starts at infinity
        return s;
    }

    /// Advances `state` by one window holding `x`; `t` is the window index.
    MonitorOutput step(MonitorState& state, AtomicEvent x, std::size_t t) const {
        MonitorOutput out{false, ce_, std::nullopt};
        switch (ce_.id()) {
            case 1: step_e1(state, x, t, out); break;
            case 2: step_e2(state, x, t, out); break;
            case 3: step_e3(state, x, t, out); break;
            case 4: step_e4(state, x, t, out); break;
            case 5: step_e5(state, x, t, out); break;
            case 6: step_e6(state, x, t, out); break;
            case 7: step_e7(state, x, t, out); break;
            case 8: step_e8(state, x, t, out); break;
            case 9: step_e9(state, x, t, out); break;
            case 10: step_e10(state, x, t, out); break;
            default: break;
        }
        state.previous = x;
        return out;
    }

    std::size_t threshold(std::size_t i) const { return desc_.thresholds.at(i).ticks; }

private:
    ThresholdSpec seconds(std::string name, std::int64_t s) const { return {std::move(name), "seconds", s, window_.ticks(s)}; }
    static ThresholdSpec count(std::string name, std::int64_t n) { return {std::move(name), "count", n, static_cast<std::size_t>(n)}; }

    void describe() {
        using detail::as_u16;
        desc_.ce = ce_;
        switch (ce_.id()) {
            case 1:
                desc_.name = "workspace_sanitary_protocol_violation";
                desc_.category = "sequential+temporal";
                desc_.locations = {"idle", "after_restroom"};
                desc_.thresholds = {seconds("min_wash", 20)};
                desc_.counters = {{"wash_counter", as_u16(threshold(0))}};
                break;
            case 2:
                desc_.name = "sanitary_eating_habit_violation";
                desc_.category = "sequential+temporal";
                desc_.locations = {"idle", "washing", "clean_hands", "meal"};
                desc_.thresholds = {seconds("min_wash", 20), seconds("clean_for", 120)};
                desc_.counters = {{"wash_count", as_u16(threshold(0))},
                                  {"time_since_wash", as_u16(threshold(1) + 1)}};
                break;
            case 3:
                desc_.name = "inadequate_brushing_time";
                desc_.category = "temporal";
                desc_.locations = {"idle", "brushing", "waiting"};
                desc_.thresholds = {seconds("grace", 10), seconds("min_brushing", 120)};
                desc_.counters = {{"brush_counter", as_u16(threshold(1))},
                                  {"time_since_brush", as_u16(threshold(0) + 1)}};
                break;
            case 4:
                desc_.name = "routine_sequence";
                desc_.category = "sequential-relaxed";
                desc_.locations = {"idle", "brushed", "brushed_ate", "brushed_drank"};
                break;
            case 5:
                desc_.name = "start_working_then_break";
                desc_.category = "sequential-relaxed";
                desc_.locations = {"idle", "seated", "working"};
                break;
            case 6:
                desc_.name = "sufficient_washing_reminder";
                desc_.category = "temporal-duration";
                desc_.locations = {"counting"};
                desc_.thresholds = {seconds("wash_duration", 30)};
                desc_.counters = {{"wash_run", as_u16(threshold(0))}};
                break;
            case 7:
                desc_.name = "adequate_brushing_time";
                desc_.category = "temporal";
                desc_.locations = {"counting"};
                desc_.thresholds = {seconds("total_brushing", 120)};
                desc_.counters = {{"brush_total", as_u16(threshold(0))}};
                break;
            case 8:
                desc_.name = "post_meal_rest";
                desc_.category = "temporal-relative";
                desc_.locations = {"idle", "resting"};
                desc_.thresholds = {seconds("min_rest", 180)};
                desc_.counters = {{"time_since_eat", as_u16(threshold(0))}};
                break;
            case 9:
                desc_.name = "active_typing_session";
                desc_.category = "repetition-frequency";
                desc_.locations = {"idle", "blocked", "typing", "gap"};
                desc_.thresholds = {seconds("window", 60), count("sessions", 3)};
                desc_.counters = {{"sessions", as_u16(threshold(1) - 1)}, {"elapsed", as_u16(threshold(0))}};
                break;
            case 10:
                desc_.name = "focused_work_start";
                desc_.category = "repetition-contextual";
                desc_.locations = {"unarmed", "armed"};
                desc_.thresholds = {count("clicks", 5)};
                desc_.counters = {{"clicks", as_u16(threshold(0) - 1)}};
                break;
            default: break;
        }
    }

    std::uint16_t clamp(std::size_t i) const { return desc_.counters[i].clamp; }

    // e1: flush_toilet, then work without min_wash consecutive wash windows.
    void step_e1(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        const std::size_t wash_needed = threshold(0);
        auto& wash_counter = s.counters[0];
        if (s.location == 0) {
            if (x == AtomicEvent::flush_toilet) {
                s.location = 1;
                wash_counter = 0;
                s.anchor = t;
            }
        } else {
            if (x == AtomicEvent::wash) {
                wash_counter = detail::bump(wash_counter, clamp(0));
                if (wash_counter >= wash_needed) s.location = 0;
            } else if (detail::is_work(x)) {
                if (wash_counter < wash_needed) {
                    out.fired = true;
                    out.anchor = s.anchor;
                }
                s.location = 0;
            } else {
                wash_counter = 0;
            }
        }
        if (s.location == 0) {
            wash_counter = 0;
            s.anchor.reset();
        }
    }

    // e2: a meal starts without a sufficient wash in the preceding clean_for.
    void step_e2(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        const std::size_t wash_needed = threshold(0);
        const std::size_t stale_after = threshold(1);
        auto& wash_count = s.counters[0];
        auto& time_since_wash = s.counters[1];
        const bool meal = detail::is_meal(x);
        switch (s.location) {
            case 0:
                wash_count = 0;
                if (x == AtomicEvent::wash) {
                    s.location = 1;
                    wash_count = 1;
                    s.anchor = t;
                } else if (meal) {
                    s.location = 3;
                    out.fired = true;
                    out.anchor = t;
                }
                break;
            case 1:
                if (x == AtomicEvent::wash) {
                    wash_count = detail::bump(wash_count, clamp(0));
                    if (wash_count >= wash_needed) {
                        s.location = 2;
                        time_since_wash = 0;
                    }
                } else if (meal) {
                    s.location = 3;
                    wash_count = 0;
                    out.fired = true;
                    out.anchor = s.anchor;
                } else {
                    s.location = 0;
                    wash_count = 0;
                }
                break;
            case 2:
                if (meal) {
                    s.location = 3;
                } else if (detail::touches_things(x)) {
                    s.location = 0;
                } else if (x == AtomicEvent::wash) {
                    time_since_wash = 0;
                } else {
                    time_since_wash = detail::bump(time_since_wash, clamp(1));
                }
                if (time_since_wash > stale_after) s.location = 0;
                break;
            case 3:
                if (meal || x == AtomicEvent::sit) {
                    // meal continues
                } else if (detail::touches_things(x)) {
                    s.location = 0;
                } else if (x == AtomicEvent::wash) {
                    time_since_wash = 0;
                    s.location = wash_count >= wash_needed ? 2 : 1;
                    if (s.location == 1) s.anchor = t;
                } else if (wash_count >= wash_needed) {
                    time_since_wash = detail::bump(time_since_wash, clamp(1));
                    s.location = 2;
                } else {
                    s.location = 0;
                }
                break;
            default: break;
        }
        // Dead variables are pinned so that equal futures share one key.
        if (s.location == 0) wash_count = 0;
        if (s.location == 0 || s.location == 1 || (s.location == 3 && wash_count < wash_needed))
            time_since_wash = clamp(1);
        if (s.location != 1) s.anchor.reset();
    }

    // e3: a brushing session (pauses up to `grace` allowed) ends short of
    // min_brushing.
    void step_e3(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        const std::size_t grace = threshold(0);
        const std::size_t brush_needed = threshold(1);
        auto& brush_counter = s.counters[0];
        auto& time_since_brush = s.counters[1];
        const bool brush = x == AtomicEvent::brush_teeth;
        switch (s.location) {
            case 0:
                if (brush) {
                    s.location = 1;
                    brush_counter = detail::bump(brush_counter, clamp(0));
                    s.anchor = t;
                }
                break;
            case 1:
                if (brush) {
                    brush_counter = detail::bump(brush_counter, clamp(0));
                } else {
                    s.location = 2;
                    time_since_brush = detail::bump(time_since_brush, clamp(1));
                }
                break;
            case 2:
                if (brush) {
                    s.location = 1;
                    brush_counter = detail::bump(brush_counter, clamp(0));
                    time_since_brush = 0;
                } else {
                    time_since_brush = detail::bump(time_since_brush, clamp(1));
                    const std::size_t brushed = brush_counter;
                    if (time_since_brush > grace) {
                        s.location = 0;
                        brush_counter = 0;
                        time_since_brush = 0;
                        if (brushed < brush_needed) {
                            out.fired = true;
                            out.anchor = s.anchor;
                        }
                        s.anchor.reset();
                    }
                }
                break;
            default: break;
        }
    }

    // e4: brush -> u* -> eat -> u* -> drink, or with eat and drink swapped.
    void step_e4(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        const bool brush = x == AtomicEvent::brush_teeth;
        const bool continues_run = s.previous == x;
        if (brush) {
            if (s.location != 1 || !continues_run) s.anchor = t;
            s.location = 1;
            return;
        }
        switch (s.location) {
            case 1:
                if (x == AtomicEvent::eat) s.location = 2;
                else if (x == AtomicEvent::drink) s.location = 3;
                break;
            case 2:
                if (x == AtomicEvent::drink) {
                    out.fired = true;
                    out.anchor = s.anchor;
                    s.location = 0;
                    s.anchor.reset();
                }
                break;
            case 3:
                if (x == AtomicEvent::eat) {
                    out.fired = true;
                    out.anchor = s.anchor;
                    s.location = 0;
                    s.anchor.reset();
                }
                break;
            default: break;
        }
    }

    // e5: sit -> u* -> type/click -> v* -> walk.
    void step_e5(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        switch (s.location) {
            case 0:
                if (x == AtomicEvent::sit) {
                    s.location = 1;
                    s.anchor = t;
                }
                break;
            case 1:
                if (x == AtomicEvent::sit) {
                    if (s.previous != AtomicEvent::sit) s.anchor = t;
                } else if (detail::is_work(x)) {
                    s.location = 2;
                } else if (x == AtomicEvent::walk) {
                    s.location = 0;
                    s.anchor.reset();
                }
                break;
            case 2:
                if (x == AtomicEvent::walk) {
                    out.fired = true;
                    out.anchor = s.anchor;
                    s.location = 0;
                    s.anchor.reset();
                }
                break;
            default: break;
        }
    }

    // e6: every wash_duration of uninterrupted washing. The anchor stays at
    // the start of the wash run across repeated reports.
    void step_e6(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        auto& run = s.counters[0];
        if (x != AtomicEvent::wash) {
            run = 0;
            s.anchor.reset();
            return;
        }
        if (s.previous != AtomicEvent::wash || !s.anchor) s.anchor = t;
        run = detail::bump(run, clamp(0));
        if (run >= threshold(0)) {
            out.fired = true;
            out.anchor = s.anchor;
            run = 0;
        }
    }

    // e7: brushing accumulates (pausing in between) up to total_brushing.
    void step_e7(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        auto& total = s.counters[0];
        if (x != AtomicEvent::brush_teeth) return;
        if (total == 0) s.anchor = t;
        total = detail::bump(total, clamp(0));
        if (total >= threshold(0)) {
            out.fired = true;
            out.anchor = s.anchor;
            total = 0;
            s.anchor.reset();
        }
    }

    // e8: work resumes at least min_rest after the last eat window. Eating
    // again restarts the clock; working earlier abandons the instance.
    void step_e8(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        auto& since_eat = s.counters[0];
        if (x == AtomicEvent::eat) {
            s.location = 1;
            since_eat = 0;
            s.anchor = t;
            return;
        }
        if (s.location == 0) return;
        if (detail::is_work(x)) {
            if (since_eat >= threshold(0)) {
                out.fired = true;
                out.anchor = s.anchor;
            }
            s.location = 0;
            since_eat = 0;
            s.anchor.reset();
        } else {
            since_eat = detail::bump(since_eat, clamp(0));
        }
    }

    // e9: `sessions` completed typing sessions within `window` of the first
    // session's start. A session is a maximal run of type windows that began
    // after a non-type window; it completes at the first non-type window.
    void step_e9(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        enum : std::uint8_t { idle = 0, blocked = 1, typing = 2, gap = 3 };
        const std::size_t window = threshold(0);
        const std::size_t needed = threshold(1);
        auto& sessions = s.counters[0];
        auto& elapsed = s.counters[1];
        const bool typing_now = x == AtomicEvent::type;
        auto clear = [&](std::uint8_t to) {
            s.location = to;
            sessions = 0;
            elapsed = 0;
            s.anchor.reset();
        };
        auto start_session = [&] {
            s.location = typing;
            sessions = 0;
            elapsed = 0;
            s.anchor = t;
        };
        switch (s.location) {
            case idle:
                if (typing_now) start_session();
                break;
            case blocked:
                if (!typing_now) s.location = idle;
                break;
            case typing: {
                const std::size_t e = std::size_t{elapsed} + 1;
                if (typing_now) {
                    if (e > window) clear(blocked);
                    else elapsed = static_cast<std::uint16_t>(e);
                } else {
                    const std::size_t k = std::size_t{sessions} + 1;
                    if (e > window) {
                        clear(idle);
                    } else if (k >= needed) {
                        out.fired = true;
                        out.anchor = s.anchor;
                        clear(idle);
                    } else {
                        s.location = gap;
                        sessions = static_cast<std::uint16_t>(k);
                        elapsed = static_cast<std::uint16_t>(e);
                    }
                }
                break;
            }
            case gap: {
                const std::size_t e = std::size_t{elapsed} + 1;
                if (e > window) {
                    clear(idle);
                    if (typing_now) start_session();
                } else {
                    elapsed = static_cast<std::uint16_t>(e);
                    if (typing_now) s.location = typing;
                }
                break;
            }
            default: break;
        }
    }

    // e10: the n-th click after sitting down, before any walking.
    void step_e10(MonitorState& s, AtomicEvent x, std::size_t t, MonitorOutput& out) const {
        auto& clicks = s.counters[0];
        if (s.location == 0) {
            if (x == AtomicEvent::sit) {
                s.location = 1;
                clicks = 0;
                s.anchor = t;
            }
            return;
        }
        if (x == AtomicEvent::click_mouse) {
            if (std::size_t{clicks} + 1 >= threshold(0)) {
                out.fired = true;
                out.anchor = s.anchor;
                s.location = 0;
                clicks = 0;
                s.anchor.reset();
            } else {
                ++clicks;
            }
        } else if (x == AtomicEvent::walk) {
            s.location = 0;
            clicks = 0;
            s.anchor.reset();
        }
    }

    CeLabel ce_;
    WindowSpec window_;
    MonitorDescription desc_;
};

/// Pure form of Monitor::step.
inline std::pair<MonitorState, MonitorOutput> monitor_step(const Monitor& monitor, MonitorState state, AtomicEvent x,
                                                           std::size_t t) {
    MonitorOutput out = monitor.step(state, x, t);
    return {std::move(state), out};
}

inline std::array<Monitor, kCeEventCount> make_monitors(WindowSpec window = {}) {
    return {Monitor(CeLabel(1), window), Monitor(CeLabel(2), window), Monitor(CeLabel(3), window),
            Monitor(CeLabel(4), window), Monitor(CeLabel(5), window), Monitor(CeLabel(6), window),
            Monitor(CeLabel(7), window), Monitor(CeLabel(8), window), Monitor(CeLabel(9), window),
            Monitor(CeLabel(10), window)};
}

/// All ten monitors advanced in lockstep over one stream.
class Ensemble {
public:
    explicit Ensemble(WindowSpec window = {}) : monitors_(make_monitors(window)) { reset(); }

    void reset() {
        for (std::size_t i = 0; i < kCeEventCount; ++i) states_[i] = monitors_[i].initial();
        t_ = 0;
    }

    /// Feeds the next window and returns the outputs of the monitors that fired.
    std::vector<MonitorOutput> step(AtomicEvent x) {
        std::vector<MonitorOutput> fired;
        for (std::size_t i = 0; i < kCeEventCount; ++i) {
            MonitorOutput out = monitors_[i].step(states_[i], x, t_);
            if (out.fired) fired.push_back(out);
        }
        ++t_;
        return fired;
    }

    std::size_t time() const noexcept { return t_; }
    const std::array<MonitorState, kCeEventCount>& states() const noexcept { return states_; }
    const std::array<Monitor, kCeEventCount>& monitors() const noexcept { return monitors_; }

private:
    std::array<Monitor, kCeEventCount> monitors_;
    std::array<MonitorState, kCeEventCount> states_;
    std::size_t t_ = 0;
};

/// Labels with every fired class kept per window (no conflict handling).
struct MultiLabeledTrace {
    ConceptTrace trace;
    std::vector<std::vector<CeLabel>> labels;
    std::vector<Completion> completions;
};

inline MultiLabeledTrace label_trace_multi(const ConceptTrace& trace) {
    MultiLabeledTrace out{trace, {}, {}};
    out.labels.resize(trace.size());
    Ensemble ensemble(trace.window);
    for (std::size_t t = 0; t < trace.size(); ++t) {
        for (const MonitorOutput& o : ensemble.step(trace.events[t])) {
            out.labels[t].push_back(o.ce);
            out.completions.push_back({t, o.ce, o.anchor.value_or(t)});
        }
    }
    return out;
}

/// Online labels: e0 where nothing completes, the completing class otherwise.
/// Throws SimultaneousCompletion when two or more classes complete together.
inline LabeledTrace label_trace(const ConceptTrace& trace) {
    if (trace.events.empty()) throw Error("cannot label an empty trace");
    LabeledTrace out{trace, std::vector<CeLabel>(trace.size(), kNoEvent), {}};
    Ensemble ensemble(trace.window);
    for (std::size_t t = 0; t < trace.size(); ++t) {
        std::vector<MonitorOutput> fired = ensemble.step(trace.events[t]);
        if (fired.size() > 1) {
            std::vector<CeLabel> set;
            for (const auto& o : fired) set.push_back(o.ce);
            throw SimultaneousCompletion(t, std::move(set));
        }
        if (fired.size() == 1) {
            out.labels[t] = fired.front().ce;
            out.completions.push_back({t, fired.front().ce, fired.front().anchor.value_or(t)});
        }
    }
    return out;
}

/// Labels of the first `t` windows, computed from the truncated trace alone.
inline std::vector<CeLabel> prefix_labels(const ConceptTrace& trace, std::size_t t) {
    if (t < 1 || t > trace.size())
        throw std::out_of_range("prefix length " + std::to_string(t) + " outside [1, " + std::to_string(trace.size()) + "]");
    ConceptTrace prefix = trace;
    prefix.events.resize(t);
    return label_trace(prefix).labels;
}

/// Deterministic detector over (possibly noisy) symbols: like label_trace but
/// never throws; simultaneous completions resolve to the lowest class id.
inline std::vector<CeLabel> detect_symbols(const ConceptTrace& trace) {
    std::vector<CeLabel> labels(trace.size(), kNoEvent);
    Ensemble ensemble(trace.window);
    for (std::size_t t = 0; t < trace.size(); ++t) {
        std::vector<MonitorOutput> fired = ensemble.step(trace.events[t]);
        if (!fired.empty()) labels[t] = fired.front().ce;
    }
    return labels;
}

inline std::vector<MonitorDescription> monitor_catalogue(WindowSpec window = {}) {
    std::vector<MonitorDescription> out;
    for (const Monitor& m : make_monitors(window)) out.push_back(m.description());
    return out;
}

}  // namespace cedkit

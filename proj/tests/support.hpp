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

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cedkit/cedkit.hpp"

namespace cedkit::testing {

using AE = AtomicEvent;

/// Trace from a run-length spec such as "flush_toilet wash*4 type".
inline ConceptTrace trace_of(const std::string& spec, std::string id = "t") {
    ConceptTrace t;
    t.id = std::move(id);
    std::istringstream in(spec);
    std::string tok;
    while (in >> tok) {
        std::size_t n = 1;
        if (auto star = tok.find('*'); star != std::string::npos) {
            n = std::stoul(tok.substr(star + 1));
            tok = tok.substr(0, star);
        }
        t.events.insert(t.events.end(), n, parse_ae(tok));
    }
    return t;
}

/// Windows (0-based) at which `ce` fires when its monitor runs alone.
inline std::vector<std::size_t> fire_windows(int ce, const ConceptTrace& t) {
    const Monitor m{CeLabel(ce), t.window};
    MonitorState s = m.initial();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (m.step(s, t.events[i], i).fired) out.push_back(i);
    return out;
}

inline std::vector<Completion> completions_of(int ce, const ConceptTrace& t) {
    const Monitor m{CeLabel(ce), t.window};
    MonitorState s = m.initial();
    std::vector<Completion> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto o = m.step(s, t.events[i], i);
        if (o.fired) out.push_back({i, CeLabel(ce), o.anchor.value_or(i)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random traces
// ---------------------------------------------------------------------------

/// Uniform symbols.
inline ConceptTrace uniform_trace(Rng& rng, std::size_t length) {
    ConceptTrace t;
    t.id = "uniform";
    for (std::size_t i = 0; i < length; ++i) t.events.push_back(atomic_event_from_code(rng.uniform_int(0, 8)));
    return t;
}

/// Runs of repeated symbols drawn from a random subset of the alphabet, so
/// that long counters (brushing, resting, washing) actually fill up.
inline ConceptTrace sticky_trace(Rng& rng, std::size_t length) {
    std::vector<AE> alphabet;
    while (alphabet.size() < 2) {
        alphabet.clear();
        for (AE a : kAllAtomicEvents)
            if (rng.bernoulli(0.45)) alphabet.push_back(a);
    }
    const std::size_t max_run = rng.uniform_int(1, 30);
    ConceptTrace t;
    t.id = "sticky";
    while (t.events.size() < length) {
        const AE a = alphabet[rng.uniform_int(0, alphabet.size() - 1)];
        const std::size_t run = rng.uniform_int(1, max_run);
        for (std::size_t k = 0; k < run && t.events.size() < length; ++k) t.events.push_back(a);
    }
    return t;
}

inline ConceptTrace random_trace(Rng& rng, std::size_t length) {
    return rng.bernoulli(0.3) ? uniform_trace(rng, length) : sticky_trace(rng, length);
}

/// A random trace that labels without simultaneous completions.
inline LabeledTrace random_labeled(Rng& rng, std::size_t length) {
    for (;;) {
        try {
            return label_trace(random_trace(rng, length));
        } catch (const SimultaneousCompletion&) {
        }
    }
}

// ---------------------------------------------------------------------------
// Literal transcriptions of the restroom, meal, brushing and long-wash state
// machines, with unbounded integer counters and thresholds in window ticks
// (W = 5 s).
// ---------------------------------------------------------------------------

struct LiteralE1 {
    int state = 0;
    long wash_counter = 0;
    static constexpr long kWash = 4;

    bool step(AE x) {
        bool y = false;
        if (state == 0) {
            if (x == AE::flush_toilet) {
                state = 1;
                wash_counter = 0;
            }
        } else if (state == 1) {
            if (x == AE::wash) {
                wash_counter += 1;
                if (wash_counter >= kWash) state = 0;
            } else if (x == AE::click_mouse || x == AE::type) {
                if (wash_counter < kWash) y = true;
                state = 0;
            } else {
                wash_counter = 0;
            }
        }
        return y;
    }
};

struct LiteralE2 {
    int state = 0;
    long wash_count = 0;
    long time_since_wash = std::numeric_limits<long>::max() / 2;
    static constexpr long kWash = 4;
    static constexpr long kStale = 24;

    bool step(AE x) {
        bool y = false;
        const bool is_meal = x == AE::eat || x == AE::drink;
        const bool touches = x == AE::brush_teeth || x == AE::click_mouse || x == AE::flush_toilet || x == AE::type;
        if (state == 0) {
            wash_count = 0;
            if (x == AE::wash) {
                state = 1;
                wash_count = 1;
            } else if (is_meal) {
                state = 3;
                y = true;
            }
        } else if (state == 1) {
            if (x == AE::wash) {
                wash_count += 1;
                if (wash_count >= kWash) {
                    state = 2;
                    time_since_wash = 0;
                }
            } else if (is_meal) {
                state = 3;
                wash_count = 0;
                y = true;
            } else {
                state = 0;
                wash_count = 0;
            }
        } else if (state == 2) {
            if (is_meal) {
                state = 3;
            } else if (touches) {
                state = 0;
            } else if (x == AE::wash) {
                time_since_wash = 0;
            } else {
                time_since_wash += 1;
            }
            if (time_since_wash > kStale) state = 0;
        } else if (state == 3) {
            if (is_meal || x == AE::sit) {
                // continue
            } else if (touches) {
                state = 0;
            } else if (x == AE::wash) {
                time_since_wash = 0;
                state = wash_count >= kWash ? 2 : 1;
            } else {
                if (wash_count >= kWash) {
                    time_since_wash += 1;
                    state = 2;
                } else {
                    state = 0;
                }
            }
        }
        return y;
    }
};

struct LiteralE3 {
    int state = 0;
    long brush_counter = 0;
    long time_since_brush = 0;
    static constexpr long kGrace = 2;
    static constexpr long kBrush = 24;

    bool step(AE x) {
        bool y = false;
        if (state == 0) {
            if (x == AE::brush_teeth) {
                state = 1;
                brush_counter += 1;
            }
        } else if (state == 1) {
            if (x == AE::brush_teeth) {
                brush_counter += 1;
            } else {
                state = 2;
                time_since_brush += 1;
            }
        } else if (state == 2) {
            if (x == AE::brush_teeth) {
                state = 1;
                brush_counter += 1;
                time_since_brush = 0;
            } else {
                time_since_brush += 1;
                const long temp = brush_counter;
                if (time_since_brush > kGrace) {
                    state = 0;
                    brush_counter = 0;
                    time_since_brush = 0;
                    if (temp < kBrush) y = true;
                }
            }
        }
        return y;
    }
};

/// "Washing lasts for 30 seconds consecutively", reported every 6 ticks.
struct LiteralE6 {
    long run = 0;
    bool step(AE x) {
        run = x == AE::wash ? run + 1 : 0;
        if (run == 6) {
            run = 0;
            return true;
        }
        return false;
    }
};

template <typename Oracle>
std::vector<std::size_t> oracle_fires(const ConceptTrace& t) {
    Oracle o;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (o.step(t.events[i])) out.push_back(i);
    return out;
}

// ---------------------------------------------------------------------------
// Moore-machine minimization (partition refinement)
// ---------------------------------------------------------------------------

/// Number of states of the minimal Moore machine equivalent to a complete
/// deterministic machine given by `next[s][a]` and output `out[s]`, counting
/// only states reachable from `initial`.
inline std::size_t minimal_states(const std::vector<std::array<std::size_t, kAtomicEventCount>>& next,
                                  const std::vector<int>& out, std::size_t initial) {
    std::vector<char> reach(next.size(), 0);
    std::vector<std::size_t> stack{initial};
    reach[initial] = 1;
    while (!stack.empty()) {
        const std::size_t s = stack.back();
        stack.pop_back();
        for (std::size_t to : next[s])
            if (!reach[to]) {
                reach[to] = 1;
                stack.push_back(to);
            }
    }
    std::vector<std::size_t> block(next.size(), 0);
    std::size_t blocks = 0;
    {
        std::map<int, std::size_t> by_out;
        for (std::size_t s = 0; s < next.size(); ++s)
            if (reach[s]) block[s] = by_out.try_emplace(out[s], by_out.size()).first->second;
        blocks = by_out.size();
    }
    for (;;) {
        std::map<std::vector<std::size_t>, std::size_t> sig;
        std::vector<std::size_t> nb(next.size(), 0);
        for (std::size_t s = 0; s < next.size(); ++s) {
            if (!reach[s]) continue;
            std::vector<std::size_t> key{block[s]};
            for (std::size_t to : next[s]) key.push_back(block[to]);
            nb[s] = sig.try_emplace(key, sig.size()).first->second;
        }
        const std::size_t n = sig.size();
        block = nb;
        if (n == blocks) return n;
        blocks = n;
    }
}

/// Minimal state count of an explicit automaton with its accepting flags as
/// Moore outputs.
inline std::size_t minimal_states(const ExplicitAutomaton& a) {
    std::vector<std::array<std::size_t, kAtomicEventCount>> next(a.size());
    std::vector<int> out(a.size());
    for (std::size_t s = 0; s < a.size(); ++s) {
        for (std::size_t x = 0; x < kAtomicEventCount; ++x) next[s][x] = a.transition[s][x];
        out[s] = a.accepting[s];
    }
    return minimal_states(next, out, a.initial);
}

/// Reachable states of the literal restroom machine with wash_counter
/// clamped at the threshold (larger values compare identically), paired with
/// the output of the step that entered them, then minimized.
inline std::size_t literal_e1_minimal_states() {
    using Key = std::tuple<int, long, bool>;
    std::map<Key, std::size_t> ids;
    std::vector<Key> states;
    std::vector<std::array<std::size_t, kAtomicEventCount>> next;
    auto intern = [&](const Key& k) {
        auto [it, inserted] = ids.try_emplace(k, states.size());
        if (inserted) {
            states.push_back(k);
            next.emplace_back();
        }
        return it->second;
    };
    intern({0, 0, false});
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (AE x : kAllAtomicEvents) {
            LiteralE1 m;
            m.state = std::get<0>(states[i]);
            m.wash_counter = std::get<1>(states[i]);
            const bool y = m.step(x);
            const std::size_t to = intern({m.state, std::min(m.wash_counter, LiteralE1::kWash), y});
            next[i][code(x)] = to;
        }
    }
    std::vector<int> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) out[i] = std::get<2>(states[i]) ? 1 : 0;
    return minimal_states(next, out, 0);
}

// ---------------------------------------------------------------------------
// Scoring oracles
// ---------------------------------------------------------------------------

/// F1 per class straight from the definition: precision and recall from
/// explicit TP/FP/FN loops, absent classes excluded.
struct BruteF1 {
    std::array<double, kCeClassCount> f1{};
    std::array<bool, kCeClassCount> defined{};
    std::array<long, kCeClassCount> tp{}, fp{}, fn{};
    double all = 0.0;
    double pos = 0.0;
};

inline BruteF1 brute_f1(const std::vector<std::vector<CeLabel>>& truth, const std::vector<std::vector<CeLabel>>& pred) {
    BruteF1 r;
    for (std::size_t c = 0; c < kCeClassCount; ++c) {
        long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i)
            for (std::size_t t = 0; t < truth[i].size(); ++t) {
                const bool is_t = truth[i][t].index() == c;
                const bool is_p = pred[i][t].index() == c;
                tp += is_t && is_p;
                fp += !is_t && is_p;
                fn += is_t && !is_p;
            }
        r.tp[c] = tp;
        r.fp[c] = fp;
        r.fn[c] = fn;
        if (tp + fp + fn == 0) continue;
        r.defined[c] = true;
        const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        r.f1[c] = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    double sa = 0, sp = 0;
    int na = 0, np = 0;
    for (std::size_t c = 0; c < kCeClassCount; ++c) {
        if (!r.defined[c]) continue;
        sa += r.f1[c];
        ++na;
        if (c > 0) {
            sp += r.f1[c];
            ++np;
        }
    }
    r.all = na ? sa / na : std::numeric_limits<double>::quiet_NaN();
    r.pos = np ? sp / np : std::numeric_limits<double>::quiet_NaN();
    return r;
}

/// Focal loss of one window written out term by term.
/// Relative agreement for quantities computed by algebraically equal but
/// differently rounded formulas.
inline bool close(double a, double b, double rel = 1e-15) {
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

inline double scalar_focal(double p_true, double alpha, double gamma) {
    return alpha * std::pow(1.0 - p_true, gamma) * -std::log(p_true);
}

inline GeneratorSuite default_suite() { return load_generator_source(std::string(CEDKIT_SOURCE_DIR) + "/configs/suite.json"); }

inline GeneratorConfig shipped_config(const std::string& name) {
    return load_config(std::string(CEDKIT_SOURCE_DIR) + "/configs/" + name + ".json");
}

}  // namespace cedkit::testing

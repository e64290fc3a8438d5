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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cedkit/core.hpp"
#include "cedkit/rng.hpp"

/**
 * Stochastic activity simulator.
 *
 * A trace is a walk over semantic groups (restroom, work, meal, ...). Each
 * group visit lasts a sampled number of windows and emits activities; an
 * activity is a short pattern of steps, each step one atomic event repeated
 * for a sampled number of windows and optionally skipped with probability
 * 1 - p. Inside a group the next activity follows the weighted successors of
 * the previous one, falling back to the group's start weights. Activities
 * marked once-only get weight zero after their first use in a visit.
 *
 * Everything is driven by a GeneratorConfig loaded from JSON
 * (schema "cedkit.generator/1"), see configs/.
 */
namespace cedkit {

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class InvalidMatrix : public Error {
public:
    using Error::Error;
};

inline constexpr std::string_view kGeneratorSchema = "cedkit.generator/1";

struct DurationRange {
    std::int64_t min_s = 5;
    std::int64_t max_s = 5;
    friend bool operator==(const DurationRange&, const DurationRange&) = default;
};

struct Step {
    AtomicEvent ae = AtomicEvent::walk;
    DurationRange duration;
    double probability = 1.0;
    friend bool operator==(const Step&, const Step&) = default;
};

struct Activity {
    std::string name;
    std::vector<Step> steps;
    double weight = 1.0;  // start weight inside the group
    friend bool operator==(const Activity&, const Activity&) = default;
};

using WeightMap = std::vector<std::pair<std::string, double>>;

struct Group {
    std::string name;
    DurationRange duration;
    std::vector<Activity> activities;
    std::map<std::string, WeightMap> sub_transitions;
    std::set<std::string> once_only;
    WeightMap transitions;
    friend bool operator==(const Group&, const Group&) = default;
};

struct Guarantee {
    std::string group;
    std::size_t max_windows_without = 0;
    double boost = 10.0;
    friend bool operator==(const Guarantee&, const Guarantee&) = default;
};

inline constexpr double kDefaultNoiseRate = 0.02;

struct GeneratorConfig {
    std::string id;
    std::string description;
    WindowSpec window;
    std::vector<Group> groups;
    WeightMap initial;
    std::optional<Guarantee> guarantee;
    double noise_rate = kDefaultNoiseRate;
    /// Symbols whose step durations stretch() leaves unscaled.
    std::vector<AtomicEvent> stretch_exempt{AtomicEvent::wash, AtomicEvent::brush_teeth};

    /// Sorted set of every symbol some step can emit.
    std::vector<AtomicEvent> vocabulary() const {
        std::set<AtomicEvent> v;
        for (const auto& g : groups)
            for (const auto& a : g.activities)
                for (const auto& s : a.steps) v.insert(s.ae);
        return {v.begin(), v.end()};
    }

    const Group* find_group(std::string_view name) const {
        for (const auto& g : groups)
            if (g.name == name) return &g;
        return nullptr;
    }

    friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

namespace detail {

inline std::size_t find_index(const std::vector<Activity>& acts, std::string_view name) {
    for (std::size_t i = 0; i < acts.size(); ++i)
        if (acts[i].name == name) return i;
    return acts.size();
}

inline void check_weights(const WeightMap& w, const std::string& where) {
    double total = 0.0;
    for (const auto& [name, weight] : w) {
        if (!(weight >= 0.0) || !std::isfinite(weight)) throw InvalidConfig(where + ": negative or non-finite weight for '" + name + "'");
        total += weight;
    }
    if (!(total > 0.0)) throw InvalidConfig(where + ": weights cannot be normalized");
}

inline void check_range(const DurationRange& r, const std::string& where) {
    if (r.min_s <= 0 || r.max_s < r.min_s) throw InvalidConfig(where + ": duration range must satisfy 0 < min <= max");
}

}  // namespace detail

/// Throws InvalidConfig describing the first problem found.
inline void validate(const GeneratorConfig& c) {
    if (c.window.window_seconds < 1) throw InvalidConfig("window_s must be positive");
    if (c.groups.empty()) throw InvalidConfig("config has no groups");
    if (!(c.noise_rate >= 0.0 && c.noise_rate <= 1.0)) throw InvalidConfig("noise_rate must lie in [0, 1]");
    std::set<std::string> names;
    for (const auto& g : c.groups)
        if (!names.insert(g.name).second) throw InvalidConfig("duplicate group '" + g.name + "'");
    auto check_group_refs = [&](const WeightMap& w, const std::string& where) {
        detail::check_weights(w, where);
        for (const auto& [name, weight] : w)
            if (!names.count(name)) throw InvalidConfig(where + ": unknown group '" + name + "'");
    };
    check_group_refs(c.initial, "initial");
    for (const auto& g : c.groups) {
        const std::string where = "group '" + g.name + "'";
        if (g.activities.empty()) throw InvalidConfig(where + ": no activities");
        detail::check_range(g.duration, where);
        check_group_refs(g.transitions, where + " transitions");
        double start_total = 0.0;
        for (const auto& a : g.activities) {
            if (a.steps.empty()) throw InvalidConfig(where + ": activity '" + a.name + "' has no steps");
            if (!(a.weight >= 0.0)) throw InvalidConfig(where + ": activity '" + a.name + "' has a negative weight");
            start_total += a.weight;
            for (const auto& s : a.steps) {
                detail::check_range(s.duration, where + " activity '" + a.name + "'");
                if (!(s.probability >= 0.0 && s.probability <= 1.0))
                    throw InvalidConfig(where + " activity '" + a.name + "': step probability outside [0, 1]");
            }
        }
        if (!(start_total > 0.0)) throw InvalidConfig(where + ": start weights cannot be normalized");
        for (const auto& [from, succ] : g.sub_transitions) {
            if (detail::find_index(g.activities, from) == g.activities.size())
                throw InvalidConfig(where + ": transition from unknown activity '" + from + "'");
            if (succ.empty()) continue;
            detail::check_weights(succ, where + " successors of '" + from + "'");
            for (const auto& [to, w] : succ)
                if (detail::find_index(g.activities, to) == g.activities.size())
                    throw InvalidConfig(where + ": transition to unknown activity '" + to + "'");
        }
        for (const auto& name : g.once_only)
            if (detail::find_index(g.activities, name) == g.activities.size())
                throw InvalidConfig(where + ": once_only names unknown activity '" + name + "'");
    }
    if (c.guarantee) {
        if (!names.count(c.guarantee->group)) throw InvalidConfig("guarantee names unknown group '" + c.guarantee->group + "'");
        if (c.guarantee->max_windows_without == 0) throw InvalidConfig("guarantee.max_windows_without must be positive");
        if (!(c.guarantee->boost >= 1.0)) throw InvalidConfig("guarantee.boost must be at least 1");
    }
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

namespace detail {

inline DurationRange range_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw InvalidConfig(where + ": duration must be [min_s, max_s]");
    return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

inline WeightMap weights_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw InvalidConfig(where + ": expected an object of weights");
    WeightMap w;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) throw InvalidConfig(where + ": weight of '" + k + "' is not a number");
        w.emplace_back(k, v.get<double>());
    }
    return w;
}

inline AtomicEvent ae_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_string()) throw InvalidConfig(where + ": atomic event must be a string");
    try {
        return parse_ae(j.get<std::string>());
    } catch (const UnknownSymbol& e) {
        throw InvalidConfig(where + ": " + e.what());
    }
}

inline nlohmann::json weights_to_json(const WeightMap& w) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : w) j[k] = v;
    return j;
}

}  // namespace detail

inline GeneratorConfig config_from_json(const nlohmann::json& j) {
    using nlohmann::json;
    if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
    if (j.value("schema", std::string{}) != kGeneratorSchema)
        throw InvalidConfig("unsupported config schema, expected '" + std::string(kGeneratorSchema) + "'");
    GeneratorConfig c;
    try {
        c.id = j.at("id").get<std::string>();
        c.description = j.value("description", std::string{});
        c.window.window_seconds = j.value("window_s", 5);
        c.noise_rate = j.value("noise_rate", kDefaultNoiseRate);
        c.initial = detail::weights_from_json(j.at("initial"), "initial");
        if (j.contains("stretch_exempt")) {
            c.stretch_exempt.clear();
            for (const auto& s : j["stretch_exempt"]) c.stretch_exempt.push_back(detail::ae_from_json(s, "stretch_exempt"));
        }
        if (j.contains("guarantee")) {
            const json& g = j["guarantee"];
            c.guarantee = Guarantee{g.at("group").get<std::string>(), g.at("max_windows_without").get<std::size_t>(),
                                    g.value("boost", 10.0)};
        }
        for (const auto& [gname, gj] : j.at("groups").items()) {
            const std::string where = "group '" + gname + "'";
            Group g;
            g.name = gname;
            g.duration = detail::range_from_json(gj.at("duration_s"), where);
            g.transitions = detail::weights_from_json(gj.at("transitions"), where + " transitions");
            for (const auto& [aname, aj] : gj.at("activities").items()) {
                Activity a;
                a.name = aname;
                const std::string awhere = where + " activity '" + aname + "'";
                if (aj.is_array()) {
                    a.steps.push_back({detail::ae_from_json(json(aname), awhere), detail::range_from_json(aj, awhere), 1.0});
                } else if (aj.is_object() && aj.contains("steps")) {
                    a.weight = aj.value("weight", 1.0);
                    for (const auto& sj : aj["steps"])
                        a.steps.push_back({detail::ae_from_json(sj.at("ae"), awhere),
                                           detail::range_from_json(sj.at("duration_s"), awhere), sj.value("p", 1.0)});
                } else if (aj.is_object()) {
                    a.weight = aj.value("weight", 1.0);
                    a.steps.push_back({detail::ae_from_json(aj.contains("ae") ? aj["ae"] : json(aname), awhere),
                                       detail::range_from_json(aj.at("duration_s"), awhere), aj.value("p", 1.0)});
                } else {
                    throw InvalidConfig(awhere + ": expected [min_s, max_s] or an object");
                }
                g.activities.push_back(std::move(a));
            }
            if (gj.contains("next"))
                for (const auto& [from, succ] : gj["next"].items())
                    g.sub_transitions[from] = detail::weights_from_json(succ, where + " next." + from);
            if (gj.contains("once_only"))
                for (const auto& n : gj["once_only"]) g.once_only.insert(n.get<std::string>());
            c.groups.push_back(std::move(g));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("malformed config: ") + e.what());
    }
    validate(c);
    return c;
}

inline nlohmann::json config_to_json(const GeneratorConfig& c) {
    using nlohmann::json;
    json j;
    j["schema"] = kGeneratorSchema;
    j["id"] = c.id;
    if (!c.description.empty()) j["description"] = c.description;
    j["window_s"] = c.window.window_seconds;
    j["noise_rate"] = c.noise_rate;
    j["initial"] = detail::weights_to_json(c.initial);
    json exempt = json::array();
    for (AtomicEvent ae : c.stretch_exempt) exempt.push_back(std::string(to_string(ae)));
    j["stretch_exempt"] = exempt;
    if (c.guarantee)
        j["guarantee"] = {{"group", c.guarantee->group},
                          {"max_windows_without", c.guarantee->max_windows_without},
                          {"boost", c.guarantee->boost}};
    json groups = json::object();
    for (const auto& g : c.groups) {
        json gj;
        gj["duration_s"] = {g.duration.min_s, g.duration.max_s};
        gj["transitions"] = detail::weights_to_json(g.transitions);
        json acts = json::object();
        for (const auto& a : g.activities) {
            json steps = json::array();
            for (const auto& s : a.steps)
                steps.push_back({{"ae", std::string(to_string(s.ae))},
                                 {"duration_s", {s.duration.min_s, s.duration.max_s}},
                                 {"p", s.probability}});
            acts[a.name] = {{"weight", a.weight}, {"steps", steps}};
        }
        gj["activities"] = acts;
        if (!g.sub_transitions.empty()) {
            json next = json::object();
            for (const auto& [from, succ] : g.sub_transitions) next[from] = detail::weights_to_json(succ);
            gj["next"] = next;
        }
        if (!g.once_only.empty()) gj["once_only"] = g.once_only;
        groups[g.name] = gj;
    }
    j["groups"] = groups;
    return j;
}

inline GeneratorConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig("'" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

/// One emitted activity step before noise.
struct Segment {
    AtomicEvent ae;
    std::size_t start = 0;
    std::size_t length = 0;
    std::size_t min_ticks = 0;
    std::size_t max_ticks = 0;
    bool truncated = false;  // cut by the end of the trace
};

struct GroupVisit {
    std::string group;
    std::size_t start = 0;
    std::size_t length = 0;
};

struct Generation {
    ConceptTrace trace;
    std::vector<AtomicEvent> clean;  // before noise
    std::vector<Segment> segments;
    std::vector<GroupVisit> visits;
};

namespace detail {

inline std::size_t pick(Rng& rng, const WeightMap& w) {
    std::vector<double> weights;
    weights.reserve(w.size());
    for (const auto& [k, v] : w) weights.push_back(v);
    return rng.weighted_index(weights);
}

inline std::size_t group_index(const GeneratorConfig& c, const std::string& name) {
    for (std::size_t i = 0; i < c.groups.size(); ++i)
        if (c.groups[i].name == name) return i;
    throw InvalidConfig("unknown group '" + name + "'");
}

inline std::size_t sample_ticks(Rng& rng, WindowSpec w, const DurationRange& r) {
    const std::size_t lo = std::max<std::size_t>(1, w.ticks(r.min_s));
    const std::size_t hi = std::max(lo, w.ticks(r.max_s));
    return static_cast<std::size_t>(rng.uniform_int(lo, hi));
}

}  // namespace detail

/// Generates one trace of ticks(duration_s) windows together with the
/// segment and group-visit records behind it.
inline Generation generate_detailed(const GeneratorConfig& config, std::int64_t duration_s, std::uint64_t seed) {
    validate(config);
    const WindowSpec w = config.window;
    if (duration_s < w.window_seconds) throw InvalidConfig("duration_s must be at least one window");
    const std::size_t total = w.ticks(duration_s);

    Generation gen;
    gen.clean.reserve(total);
    Rng rng(derive_seed(seed, 0));
    Rng noise_rng(derive_seed(seed, 1));

    std::size_t group = detail::group_index(config, config.initial[detail::pick(rng, config.initial)].first);
    std::size_t since_target = 0;

    while (gen.clean.size() < total) {
        const Group& g = config.groups[group];
        const std::size_t visit_len = detail::sample_ticks(rng, w, g.duration);
        const std::size_t visit_start = gen.clean.size();
        std::vector<std::uint8_t> used(g.activities.size(), 0);
        std::optional<std::size_t> current;
        std::size_t idle_picks = 0;

        // Activities are not cut at the end of the visit, only at the end of
        // the trace, so every complete step respects its duration range.
        while (gen.clean.size() - visit_start < visit_len && gen.clean.size() < total) {
            std::vector<double> weights(g.activities.size(), 0.0);
            bool from_successors = false;
            if (current) {
                auto it = g.sub_transitions.find(g.activities[*current].name);
                if (it != g.sub_transitions.end()) {
                    for (const auto& [to, wt] : it->second) {
                        const std::size_t k = detail::find_index(g.activities, to);
                        if (!used[k]) weights[k] += wt;
                    }
                    for (double v : weights) from_successors |= v > 0.0;
                }
            }
            if (!from_successors)
                for (std::size_t k = 0; k < g.activities.size(); ++k)
                    weights[k] = used[k] ? 0.0 : g.activities[k].weight;
            const std::size_t k = rng.weighted_index(weights);
            if (k == weights.size()) break;  // every activity used up

            const Activity& act = g.activities[k];
            const std::size_t before = gen.clean.size();
            for (const Step& s : act.steps) {
                if (gen.clean.size() >= total) break;
                if (s.probability < 1.0 && !rng.bernoulli(s.probability)) continue;
                const std::size_t lo = std::max<std::size_t>(1, w.ticks(s.duration.min_s));
                const std::size_t hi = std::max(lo, w.ticks(s.duration.max_s));
                const std::size_t n = static_cast<std::size_t>(rng.uniform_int(lo, hi));
                const std::size_t emit = std::min(n, total - gen.clean.size());
                gen.segments.push_back({s.ae, gen.clean.size(), emit, lo, hi, emit < n});
                gen.clean.insert(gen.clean.end(), emit, s.ae);
            }
            if (g.once_only.count(act.name)) used[k] = 1;
            current = k;
            if (gen.clean.size() == before && ++idle_picks > 64) break;
        }
        gen.visits.push_back({g.name, visit_start, gen.clean.size() - visit_start});

        if (config.guarantee) {
            if (g.name == config.guarantee->group) since_target = 0;
            else since_target += gen.clean.size() - visit_start;
        }

        WeightMap next = g.transitions;
        if (config.guarantee && since_target >= config.guarantee->max_windows_without) {
            double sum = 0.0;
            for (const auto& [k, v] : next) sum += v;
            bool found = false;
            for (auto& [k, v] : next)
                if (k == config.guarantee->group) {
                    v = config.guarantee->boost * std::max(v, sum / static_cast<double>(next.size()));
                    found = true;
                }
            if (!found) next.emplace_back(config.guarantee->group, config.guarantee->boost * sum / static_cast<double>(next.size()));
        }
        group = detail::group_index(config, next[detail::pick(rng, next)].first);
    }

    gen.trace.window = w;
    gen.trace.seed = seed;
    gen.trace.generator_tag = config.id;
    gen.trace.events = gen.clean;
    const std::vector<AtomicEvent> vocab = config.vocabulary();
    if (vocab.size() >= 2 && config.noise_rate > 0.0) {
        for (AtomicEvent& ae : gen.trace.events) {
            if (!noise_rng.bernoulli(config.noise_rate)) continue;
            // uniform over the other symbols of the vocabulary
            const auto pos = static_cast<std::size_t>(std::find(vocab.begin(), vocab.end(), ae) - vocab.begin());
            std::size_t k = static_cast<std::size_t>(noise_rng.uniform_int(0, vocab.size() - 2));
            if (k >= pos) ++k;
            ae = vocab[k];
        }
    }
    return gen;
}

inline ConceptTrace generate(const GeneratorConfig& config, std::int64_t duration_s, std::uint64_t seed) {
    return generate_detailed(config, duration_s, seed).trace;
}

/// Returns a copy whose group durations, guarantee horizon and step durations
/// (except for stretch_exempt symbols) are multiplied by `factor`.
inline GeneratorConfig stretch(const GeneratorConfig& config, double factor) {
    if (!(factor >= 1.0) || !std::isfinite(factor)) throw std::invalid_argument("stretch factor must be >= 1");
    if (factor == 1.0) return config;
    auto scale = [factor](std::int64_t s) { return static_cast<std::int64_t>(std::llround(static_cast<double>(s) * factor)); };
    GeneratorConfig out = config;
    std::ostringstream tag;
    tag << config.id << "-x" << factor;
    out.id = tag.str();
    for (auto& g : out.groups) {
        g.duration = {scale(g.duration.min_s), scale(g.duration.max_s)};
        for (auto& a : g.activities)
            for (auto& s : a.steps)
                if (std::find(out.stretch_exempt.begin(), out.stretch_exempt.end(), s.ae) == out.stretch_exempt.end())
                    s.duration = {scale(s.duration.min_s), scale(s.duration.max_s)};
    }
    if (out.guarantee)
        out.guarantee->max_windows_without =
            static_cast<std::size_t>(std::llround(static_cast<double>(out.guarantee->max_windows_without) * factor));
    return out;
}

// ---------------------------------------------------------------------------
// Noisy classifier channel
// ---------------------------------------------------------------------------

using ConfusionMatrix = std::array<std::array<double, kAtomicEventCount>, kAtomicEventCount>;

/// Uniform confusion over the other eight symbols.
inline ConfusionMatrix uniform_confusion() {
    ConfusionMatrix m{};
    for (std::size_t i = 0; i < kAtomicEventCount; ++i)
        for (std::size_t j = 0; j < kAtomicEventCount; ++j) m[i][j] = i == j ? 0.0 : 1.0 / 8.0;
    return m;
}

inline void validate(const ConfusionMatrix& m) {
    for (std::size_t i = 0; i < kAtomicEventCount; ++i) {
        double sum = 0.0;
        for (double v : m[i]) {
            if (!(v >= 0.0)) throw InvalidMatrix("confusion matrix has a negative or NaN entry in row " + std::to_string(i));
            sum += v;
        }
        if (std::abs(sum - 1.0) > kNormalizationTolerance)
            throw InvalidMatrix("confusion matrix row " + std::to_string(i) + " does not sum to 1");
    }
}

struct Corruption {
    ProbTrace probs;
    ConceptTrace symbols;
};

/// Simulated atomic-event classifier with the given accuracy.
///
/// Each window keeps its symbol with probability `accuracy`; otherwise the
/// emitted symbol is drawn from the confusion row of the true symbol. The
/// probabilistic output for an emitted symbol o is the posterior over the true
/// symbol under a uniform prior, proportional to
/// accuracy * [a == o] + (1 - accuracy) * confusion[a][o]; with the default
/// confusion it is `accuracy` on o and (1 - accuracy) / 8 elsewhere. The
/// symbolic output is the emitted symbol, which is also the argmax of the
/// distribution whenever accuracy >= 1/9.
inline Corruption corrupt(const ConceptTrace& trace, double accuracy, const std::optional<ConfusionMatrix>& confusion,
                          std::uint64_t seed) {
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw std::invalid_argument("accuracy must lie in [0, 1]");
    const ConfusionMatrix m = confusion.value_or(uniform_confusion());
    validate(m);
    Rng rng(seed);
    Corruption out{{trace.id, trace.window, {}, trace.seed, trace.generator_tag}, trace};
    out.probs.dists.reserve(trace.size());
    for (std::size_t t = 0; t < trace.size(); ++t) {
        const std::size_t truth = code(trace.events[t]);
        std::size_t observed = truth;
        if (rng.bernoulli(1.0 - accuracy)) {
            const std::size_t k = rng.weighted_index(m[truth]);
            if (k < kAtomicEventCount) observed = k;
        }
        out.symbols.events[t] = static_cast<AtomicEvent>(observed);
        AeDistribution d{};
        double z = 0.0;
        for (std::size_t a = 0; a < kAtomicEventCount; ++a) {
            d[a] = (a == observed ? accuracy : 0.0) + (1.0 - accuracy) * m[a][observed];
            z += d[a];
        }
        if (z > 0.0)
            for (double& v : d) v /= z;
        else
            d = one_hot(static_cast<AtomicEvent>(observed));
        out.probs.dists.push_back(d);
    }
    return out;
}

}  // namespace cedkit

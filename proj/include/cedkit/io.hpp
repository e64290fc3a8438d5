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

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cedkit/core.hpp"
#include "cedkit/fsm.hpp"
#include "cedkit/probfsm.hpp"

// JSONL trace records, one object per line:
//   {"id": str, "window_s": int, "ae": [str...], "ce": [int...], "seed": int, "gen": str}
// "ce" is optional. Labeled records may also carry "completions" as
// [window, ce, anchor] triples and, in multi-label mode, "ce_multi".
// Probabilistic records carry "p": [[9 floats]...] in place of "ae".
namespace cedkit {

using nlohmann::json;

/// Any trace record as read from a JSONL line.
struct TraceRecord {
    std::string id;
    WindowSpec window;
    std::uint64_t seed = 0;
    std::string generator_tag;
    std::optional<std::vector<AtomicEvent>> events;
    std::optional<std::vector<AeDistribution>> dists;
    std::optional<std::vector<CeLabel>> labels;
    std::optional<std::vector<Completion>> completions;

    ConceptTrace concept_trace() const {
        if (!events) throw FormatError("record '" + id + "' has no \"ae\" field");
        return {id, window, *events, seed, generator_tag};
    }

    ProbTrace prob_trace() const {
        if (dists) return {id, window, *dists, seed, generator_tag};
        return one_hot(concept_trace());
    }

    LabeledTrace labeled_trace() const {
        if (!labels) throw FormatError("record '" + id + "' has no \"ce\" field");
        LabeledTrace lt{concept_trace(), *labels, completions.value_or(std::vector<Completion>{})};
        if (lt.labels.size() != lt.trace.size()) throw LengthMismatch("record '" + id + "': ae and ce lengths differ");
        return lt;
    }
};

namespace detail {

inline json header(const std::string& id, WindowSpec w, std::uint64_t seed, const std::string& gen) {
    return {{"id", id}, {"window_s", w.window_seconds}, {"seed", seed}, {"gen", gen}};
}

inline json ae_array(const std::vector<AtomicEvent>& events) {
    json a = json::array();
    for (AtomicEvent ae : events) a.push_back(std::string(to_string(ae)));
    return a;
}

inline json ce_array(const std::vector<CeLabel>& labels) {
    json a = json::array();
    for (CeLabel ce : labels) a.push_back(ce.id());
    return a;
}

}  // namespace detail

inline json to_json(const ConceptTrace& t) {
    json j = detail::header(t.id, t.window, t.seed, t.generator_tag);
    j["ae"] = detail::ae_array(t.events);
    return j;
}

inline json to_json(const LabeledTrace& lt) {
    json j = to_json(lt.trace);
    j["ce"] = detail::ce_array(lt.labels);
    json c = json::array();
    for (const auto& x : lt.completions) c.push_back({x.window, x.ce.id(), x.anchor});
    j["completions"] = c;
    return j;
}

inline json to_json(const MultiLabeledTrace& mt) {
    json j = to_json(mt.trace);
    json multi = json::array();
    for (const auto& set : mt.labels) multi.push_back(detail::ce_array(set));
    j["ce_multi"] = multi;
    json c = json::array();
    for (const auto& x : mt.completions) c.push_back({x.window, x.ce.id(), x.anchor});
    j["completions"] = c;
    return j;
}

inline json to_json(const ProbTrace& p) {
    json j = detail::header(p.id, p.window, p.seed, p.generator_tag);
    json rows = json::array();
    for (const auto& d : p.dists) rows.push_back(d);
    j["p"] = rows;
    return j;
}

inline TraceRecord record_from_json(const json& j) {
    TraceRecord r;
    try {
        r.id = j.at("id").get<std::string>();
        r.window.window_seconds = j.at("window_s").get<int>();
        if (r.window.window_seconds < 1) throw FormatError("record '" + r.id + "': window_s must be positive");
        r.seed = j.value("seed", std::uint64_t{0});
        r.generator_tag = j.value("gen", std::string{});
        if (j.contains("ae")) {
            std::vector<AtomicEvent> ev;
            for (const auto& s : j["ae"]) ev.push_back(parse_ae(s.get<std::string>()));
            r.events = std::move(ev);
        }
        if (j.contains("p")) {
            std::vector<AeDistribution> ds;
            for (const auto& row : j["p"]) {
                if (!row.is_array() || row.size() != kAtomicEventCount)
                    throw FormatError("record '" + r.id + "': every \"p\" row needs 9 probabilities");
                AeDistribution d{};
                for (std::size_t i = 0; i < kAtomicEventCount; ++i) d[i] = row[i].get<double>();
                ds.push_back(d);
            }
            r.dists = std::move(ds);
        }
        if (!r.events && !r.dists) throw FormatError("record '" + r.id + "' has neither \"ae\" nor \"p\"");
        if (j.contains("ce")) {
            std::vector<CeLabel> ls;
            for (const auto& v : j["ce"]) ls.push_back(CeLabel(v.get<int>()));
            r.labels = std::move(ls);
        }
        if (j.contains("completions")) {
            std::vector<Completion> cs;
            for (const auto& c : j["completions"]) {
                if (!c.is_array() || c.size() != 3) throw FormatError("record '" + r.id + "': completions are [window, ce, anchor]");
                cs.push_back({c[0].get<std::size_t>(), CeLabel(c[1].get<int>()), c[2].get<std::size_t>()});
            }
            r.completions = std::move(cs);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed trace record: ") + e.what());
    }
    return r;
}

inline void write_jsonl(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

/// Line-by-line reader; blank lines are skipped.
class JsonlReader {
public:
    explicit JsonlReader(std::istream& in) : in_(&in) {}

    std::optional<json> next() {
        std::string line;
        while (std::getline(*in_, line)) {
            ++line_no_;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                return json::parse(line);
            } catch (const json::exception& e) {
                throw FormatError("line " + std::to_string(line_no_) + ": " + e.what());
            }
        }
        return std::nullopt;
    }

    std::optional<TraceRecord> next_record() {
        auto j = next();
        if (!j) return std::nullopt;
        try {
            return record_from_json(*j);
        } catch (const Error& e) {
            throw FormatError("line " + std::to_string(line_no_) + ": " + e.what());
        }
    }

    std::size_t line() const noexcept { return line_no_; }

private:
    std::istream* in_;
    std::size_t line_no_ = 0;
};

inline std::vector<TraceRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    JsonlReader reader(in);
    std::vector<TraceRecord> out;
    while (auto r = reader.next_record()) out.push_back(std::move(*r));
    return out;
}

inline std::vector<LabeledTrace> read_labeled(const std::string& path) {
    std::vector<LabeledTrace> out;
    for (const auto& r : read_records(path)) out.push_back(r.labeled_trace());
    return out;
}

// ---------------------------------------------------------------------------
// Monitor catalogue and automaton dumps
// ---------------------------------------------------------------------------

inline json to_json(const MonitorDescription& d) {
    json counters = json::array();
    for (const auto& c : d.counters) counters.push_back({{"name", c.name}, {"clamp", c.clamp}});
    json thresholds = json::array();
    for (const auto& t : d.thresholds)
        thresholds.push_back({{"name", t.name}, {"unit", t.unit}, {"value", t.value}, {"ticks", t.ticks}});
    return {{"ce", d.ce.id()},
            {"name", d.name},
            {"category", d.category},
            {"locations", d.locations},
            {"counters", counters},
            {"thresholds", thresholds}};
}

inline json catalogue_to_json(WindowSpec window = {}) {
    json monitors = json::array();
    for (const auto& d : monitor_catalogue(window)) {
        json m = to_json(d);
        m["explicit_states"] = finitize(d.ce, window).size();
        monitors.push_back(m);
    }
    return {{"schema", "cedkit.catalogue/1"}, {"window_s", window.window_seconds}, {"monitors", monitors}};
}

/// Dense dump: states are 0..n-1, "transitions"[s][code(ae)] is the successor,
/// "symbols" gives the column order.
inline json to_json(const ExplicitAutomaton& a) {
    json states = json::array();
    for (const auto& s : a.states) states.push_back({{"location", s.location}, {"counters", s.counters}});
    json accepting = json::array();
    for (std::size_t s = 0; s < a.size(); ++s)
        if (a.accepting[s]) accepting.push_back(s);
    json symbols = json::array();
    for (auto name : kAtomicEventNames) symbols.push_back(std::string(name));
    return {{"schema", "cedkit.automaton/1"},
            {"ce", a.ce.id()},
            {"window_s", a.window.window_seconds},
            {"symbols", symbols},
            {"num_states", a.size()},
            {"initial", a.initial},
            {"accepting", accepting},
            {"reset_target", a.reset_target},
            {"transitions", a.transition},
            {"states", states}};
}

}  // namespace cedkit

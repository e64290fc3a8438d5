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
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cedkit/core.hpp"
#include "cedkit/fsm.hpp"
#include "cedkit/io.hpp"
#include "cedkit/parallel.hpp"
#include "cedkit/rng.hpp"
#include "cedkit/simulator.hpp"

namespace cedkit {

class DiscardRateExceeded : public Error {
public:
    using Error::Error;
};

enum class Split { train, val, test5, test15, test30 };

inline std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test5: return "test5";
        case Split::test15: return "test15";
        case Split::test30: return "test30";
    }
    return "train";
}

inline Split parse_split(const std::string& s) {
    for (Split v : {Split::train, Split::val, Split::test5, Split::test15, Split::test30})
        if (to_string(v) == s) return v;
    throw FormatError("unknown split '" + s + "'");
}

/// Default trace length and generator stretch for a split: 5-minute traces
/// for train/val/test5, 15 and 30 minutes with stretched configs otherwise.
inline std::int64_t default_duration_s(Split s) {
    return s == Split::test15 ? 900 : s == Split::test30 ? 1800 : 300;
}
inline double default_stretch(Split s) { return s == Split::test15 ? 3.0 : s == Split::test30 ? 6.0 : 1.0; }

inline constexpr double kMaxDiscardRate = 0.05;

struct DatasetManifest {
    std::string name;
    Split split = Split::train;
    std::size_t count = 0;
    std::string config_id;
    std::uint64_t seed_base = 0;
    int window_s = 5;
    std::string created;
    std::optional<std::int64_t> duration_s;
    std::optional<double> stretch;

    std::int64_t trace_duration_s() const { return duration_s.value_or(default_duration_s(split)); }
    double stretch_factor() const { return stretch.value_or(default_stretch(split)); }
};

inline DatasetManifest manifest_from_json(const json& j) {
    DatasetManifest m;
    try {
        m.name = j.at("name").get<std::string>();
        m.split = parse_split(j.at("split").get<std::string>());
        m.count = j.at("count").get<std::size_t>();
        m.config_id = j.at("config_id").get<std::string>();
        m.seed_base = j.at("seed_base").get<std::uint64_t>();
        m.window_s = j.value("window_s", 5);
        m.created = j.value("created", std::string{});
        if (j.contains("duration_s")) m.duration_s = j["duration_s"].get<std::int64_t>();
        if (j.contains("stretch")) m.stretch = j["stretch"].get<double>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed manifest: ") + e.what());
    }
    if (m.count == 0) throw FormatError("manifest count must be positive");
    if (m.window_s < 1) throw FormatError("manifest window_s must be positive");
    return m;
}

inline json to_json(const DatasetManifest& m) {
    json j = {{"name", m.name},         {"split", to_string(m.split)}, {"count", m.count},
              {"config_id", m.config_id}, {"seed_base", m.seed_base}, {"window_s", m.window_s},
              {"created", m.created}};
    if (m.duration_s) j["duration_s"] = *m.duration_s;
    if (m.stretch) j["stretch"] = *m.stretch;
    return j;
}

inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open manifest '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("manifest '" + path + "' is not valid JSON: " + e.what());
    }
    return manifest_from_json(j);
}

// ---------------------------------------------------------------------------
// Generator suites
// ---------------------------------------------------------------------------

inline constexpr std::string_view kSuiteSchema = "cedkit.suite/1";

/// Several generator configs used round-robin: sample i uses member i % n.
struct GeneratorSuite {
    std::string id;
    std::vector<GeneratorConfig> members;
};

/// Loads either a single generator config or a suite file whose "members"
/// are config paths relative to the suite file.
inline GeneratorSuite load_generator_source(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidConfig("'" + path + "' is not valid JSON: " + e.what());
    }
    if (j.value("schema", std::string{}) == kSuiteSchema) {
        GeneratorSuite s;
        s.id = j.at("id").get<std::string>();
        const auto base = std::filesystem::path(path).parent_path();
        for (const auto& m : j.at("members")) s.members.push_back(load_config((base / m.get<std::string>()).string()));
        if (s.members.empty()) throw InvalidConfig("suite '" + s.id + "' has no members");
        return s;
    }
    GeneratorConfig c = config_from_json(j);
    return {c.id, {c}};
}

// ---------------------------------------------------------------------------
// Build
// ---------------------------------------------------------------------------

struct BuildResult {
    std::vector<LabeledTrace> traces;
    std::size_t discarded = 0;

    double discard_rate() const {
        const std::size_t total = traces.size() + discarded;
        return total ? static_cast<double>(discarded) / static_cast<double>(total) : 0.0;
    }
};

inline std::string sample_id(const DatasetManifest& m, std::size_t i) {
    std::ostringstream os;
    os << m.name << '-' << to_string(m.split) << '-' << std::setw(5) << std::setfill('0') << i;
    return os.str();
}

/// Generates and labels manifest.count traces. Sample i starts from seed
/// derive_seed(seed_base, i); a sample with simultaneous completions is
/// discarded and regenerated from derive_seed(that seed, attempt).
inline BuildResult build(const DatasetManifest& m, const GeneratorSuite& suite, std::size_t jobs = 1,
                         double max_discard_rate = kMaxDiscardRate) {
    if (suite.id != m.config_id)
        throw InvalidConfig("manifest references config '" + m.config_id + "' but '" + suite.id + "' was given");
    std::vector<GeneratorConfig> configs;
    for (const auto& c : suite.members) {
        if (c.window.window_seconds != m.window_s)
            throw InvalidConfig("config '" + c.id + "' uses a different window length than the manifest");
        configs.push_back(stretch(c, m.stretch_factor()));
    }
    constexpr std::size_t kMaxAttempts = 1000;
    std::vector<LabeledTrace> traces(m.count);
    std::vector<std::size_t> discards(m.count, 0);
    parallel_for(m.count, jobs, [&](std::size_t i) {
        const GeneratorConfig& cfg = configs[i % configs.size()];
        const std::uint64_t base = derive_seed(m.seed_base, i);
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt == kMaxAttempts) throw DiscardRateExceeded("sample " + std::to_string(i) + " never labels cleanly");
            const std::uint64_t seed = attempt == 0 ? base : derive_seed(base, attempt);
            ConceptTrace t = generate(cfg, m.trace_duration_s(), seed);
            t.id = sample_id(m, i);
            try {
                traces[i] = label_trace(t);
                break;
            } catch (const SimultaneousCompletion&) {
                ++discards[i];
            }
        }
    });
    BuildResult r{std::move(traces), 0};
    for (std::size_t d : discards) r.discarded += d;
    if (r.discard_rate() > max_discard_rate) {
        std::ostringstream os;
        os << "discard rate " << r.discard_rate() << " exceeds " << max_discard_rate;
        throw DiscardRateExceeded(os.str());
    }
    return r;
}

/// Writes traces.jsonl and manifest.json (the manifest plus build facts).
inline void write_dataset(const std::filesystem::path& dir, const DatasetManifest& m, const GeneratorSuite& suite,
                          const BuildResult& r) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "traces.jsonl", std::ios::binary);
        if (!out) throw FormatError("cannot write '" + (dir / "traces.jsonl").string() + "'");
        for (const auto& t : r.traces) write_jsonl(out, to_json(t));
    }
    json j = to_json(m);
    json members = json::array();
    for (const auto& c : suite.members) members.push_back(c.id);
    j["build"] = {{"duration_s", m.trace_duration_s()},
                  {"stretch", m.stretch_factor()},
                  {"members", members},
                  {"discarded", r.discarded},
                  {"discard_rate", r.discard_rate()}};
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct CeOverlapStats {
    double pct_overlap = 0.0;  // fraction of samples with this CE where it overlaps another CE
    std::size_t min_types = 0;
    std::size_t max_types = 0;
    std::size_t max_instances = 0;
};

struct DatasetStats {
    std::size_t samples = 0;
    std::array<double, kCeClassCount> occurrence{};
    double only_e0 = 0.0;
    std::array<std::uint64_t, kCeClassCount> instances{};
    std::array<std::vector<std::size_t>, kCeClassCount> spans;
    /// overlap[i][j]: samples with an instance of e_i and one of e_j whose
    /// [anchor, completion] intervals intersect. The diagonal counts two
    /// distinct instances of the same class.
    std::array<std::array<std::uint64_t, kCeClassCount>, kCeClassCount> overlap{};
    std::array<CeOverlapStats, kCeClassCount> per_ce{};
};

/// Single-pass reduction over samples; shards merge exactly.
class StatsAccumulator {
public:
    void add(std::span<const Completion> completions) {
        ++samples_;
        std::array<bool, kCeClassCount> present{};
        for (const auto& c : completions) {
            present[c.ce.index()] = true;
            ++instances_[c.ce.index()];
            spans_[c.ce.index()].push_back(c.span());
        }
        bool any = false;
        for (std::size_t c = 1; c < kCeClassCount; ++c) {
            if (present[c]) {
                ++containing_[c];
                any = true;
            }
        }
        if (!any) ++only_e0_;

        std::array<std::array<bool, kCeClassCount>, kCeClassCount> pair{};
        std::array<std::set<std::size_t>, kCeClassCount> partners;  // other-class instances overlapping class c
        for (std::size_t a = 0; a < completions.size(); ++a) {
            for (std::size_t b = a + 1; b < completions.size(); ++b) {
                const auto& x = completions[a];
                const auto& y = completions[b];
                if (std::max(x.anchor, y.anchor) > std::min(x.window, y.window)) continue;
                const std::size_t i = x.ce.index(), j = y.ce.index();
                pair[i][j] = pair[j][i] = true;
                if (i != j) {
                    partners[i].insert(b);
                    partners[j].insert(a);
                }
            }
        }
        for (std::size_t i = 0; i < kCeClassCount; ++i)
            for (std::size_t j = 0; j < kCeClassCount; ++j)
                if (pair[i][j]) ++overlap_[i][j];
        for (std::size_t c = 1; c < kCeClassCount; ++c) {
            if (!present[c]) continue;
            std::size_t types = 0;
            for (std::size_t j = 1; j < kCeClassCount; ++j)
                if (j != c && pair[c][j]) ++types;
            if (types > 0) ++overlapping_[c];
            if (containing_[c] == 1) {
                min_types_[c] = types;
            } else {
                min_types_[c] = std::min(min_types_[c], types);
            }
            max_types_[c] = std::max(max_types_[c], types);
            max_instances_[c] = std::max(max_instances_[c], partners[c].size());
        }
    }

    void merge(const StatsAccumulator& o) {
        for (std::size_t c = 0; c < kCeClassCount; ++c) {
            if (o.containing_[c] > 0) {
                min_types_[c] = containing_[c] > 0 ? std::min(min_types_[c], o.min_types_[c]) : o.min_types_[c];
                max_types_[c] = std::max(max_types_[c], o.max_types_[c]);
                max_instances_[c] = std::max(max_instances_[c], o.max_instances_[c]);
            }
            containing_[c] += o.containing_[c];
            overlapping_[c] += o.overlapping_[c];
            instances_[c] += o.instances_[c];
            spans_[c].insert(spans_[c].end(), o.spans_[c].begin(), o.spans_[c].end());
            for (std::size_t j = 0; j < kCeClassCount; ++j) overlap_[c][j] += o.overlap_[c][j];
        }
        samples_ += o.samples_;
        only_e0_ += o.only_e0_;
    }

    DatasetStats result() const {
        DatasetStats s;
        s.samples = samples_;
        if (samples_ == 0) return s;
        const double n = static_cast<double>(samples_);
        s.occurrence[0] = 1.0;
        for (std::size_t c = 1; c < kCeClassCount; ++c) s.occurrence[c] = static_cast<double>(containing_[c]) / n;
        s.only_e0 = static_cast<double>(only_e0_) / n;
        s.instances = instances_;
        s.spans = spans_;
        s.overlap = overlap_;
        for (std::size_t c = 1; c < kCeClassCount; ++c) {
            if (containing_[c] == 0) continue;
            s.per_ce[c] = {static_cast<double>(overlapping_[c]) / static_cast<double>(containing_[c]), min_types_[c],
                           max_types_[c], max_instances_[c]};
        }
        return s;
    }

private:
    std::size_t samples_ = 0;
    std::size_t only_e0_ = 0;
    std::array<std::size_t, kCeClassCount> containing_{};
    std::array<std::size_t, kCeClassCount> overlapping_{};
    std::array<std::size_t, kCeClassCount> min_types_{};
    std::array<std::size_t, kCeClassCount> max_types_{};
    std::array<std::size_t, kCeClassCount> max_instances_{};
    std::array<std::uint64_t, kCeClassCount> instances_{};
    std::array<std::vector<std::size_t>, kCeClassCount> spans_;
    std::array<std::array<std::uint64_t, kCeClassCount>, kCeClassCount> overlap_{};
};

inline DatasetStats stats(std::span<const LabeledTrace> dataset) {
    StatsAccumulator acc;
    for (const auto& lt : dataset) acc.add(lt.completions);
    return acc.result();
}

/// Median of a span list; 0 for an empty list. Even lengths average the two
/// middle values.
inline double median(std::vector<std::size_t> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? static_cast<double>(v[n / 2]) : 0.5 * static_cast<double>(v[n / 2 - 1] + v[n / 2]);
}

inline json to_json(const DatasetStats& s) {
    json occ = json::object(), per_ce = json::object(), spans = json::object(), inst = json::object();
    for (std::size_t c = 0; c < kCeClassCount; ++c) {
        const std::string k = to_string(CeLabel(static_cast<int>(c)));
        occ[k] = s.occurrence[c];
        inst[k] = s.instances[c];
        if (c == 0) continue;
        spans[k] = {{"count", s.spans[c].size()},
                    {"median", median(s.spans[c])},
                    {"min", s.spans[c].empty() ? 0 : *std::min_element(s.spans[c].begin(), s.spans[c].end())},
                    {"max", s.spans[c].empty() ? 0 : *std::max_element(s.spans[c].begin(), s.spans[c].end())},
                    {"values", s.spans[c]}};
        per_ce[k] = {{"pct_overlap", s.per_ce[c].pct_overlap},
                     {"min_types", s.per_ce[c].min_types},
                     {"max_types", s.per_ce[c].max_types},
                     {"max_instances", s.per_ce[c].max_instances}};
    }
    return {{"schema", "cedkit.stats/1"}, {"samples", s.samples}, {"occurrence", occ}, {"only_e0", s.only_e0},
            {"instances", inst},         {"spans", spans},       {"overlap", s.overlap}, {"per_ce_overlap", per_ce}};
}

/// Occurrence table: one row, percentages, columns e0..e10 then Only e0.
inline std::string occurrence_csv(const DatasetStats& s, const std::string& row_name) {
    std::ostringstream os;
    os << "dataset";
    for (std::size_t c = 0; c < kCeClassCount; ++c) os << ",e" << c;
    os << ",only_e0\n" << row_name << std::fixed << std::setprecision(1);
    for (std::size_t c = 0; c < kCeClassCount; ++c) os << ',' << 100.0 * s.occurrence[c];
    os << ',' << 100.0 * s.only_e0 << '\n';
    return os.str();
}

/// Overlap table: one row per positive class.
inline std::string overlap_csv(const DatasetStats& s) {
    std::ostringstream os;
    os << "ce,pct_overlap,min,max,max_inst\n" << std::fixed << std::setprecision(1);
    for (std::size_t c = 1; c < kCeClassCount; ++c)
        os << 'e' << c << ',' << 100.0 * s.per_ce[c].pct_overlap << ',' << s.per_ce[c].min_types << ','
           << s.per_ce[c].max_types << ',' << s.per_ce[c].max_instances << '\n';
    return os.str();
}

}  // namespace cedkit

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

// cedkit command line: generate, corrupt, label, detect, build, stats, eval,
// curve, catalog and automaton. Exit codes: 0 success, 1 usage, 2 data or
// config error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cedkit/cedkit.hpp"

namespace fs = std::filesystem;
using cedkit::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

std::string hash_suite(const cedkit::GeneratorSuite& s) {
    std::uint64_t h = fnv1a(s.id);
    for (const auto& c : s.members) h = fnv1a(cedkit::config_to_json(c).dump(), h);
    return hex(h);
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return hex(fnv1a(os.str()));
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/// Reproducibility metadata written next to every output artifact. The only
/// place where timestamps appear.
struct RunRecord {
    std::string subcommand;
    std::vector<std::string> argv;
    std::optional<std::string> config_hash;
    json seeds = json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::string started_at = utc_now();

    void write(const fs::path& path) const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json j = {{"schema", "cedkit.run/1"},
                  {"subcommand", subcommand},
                  {"argv", argv},
                  {"config_hash", config_hash ? json(*config_hash) : json(nullptr)},
                  {"seeds", seeds},
                  {"version", std::string(cedkit::kVersion)},
                  {"started_at", started_at},
                  {"wall_time_s", wall}};
        std::ofstream out(path, std::ios::binary);
        out << j.dump(2) << '\n';
    }
};

fs::path run_record_path(const std::string& out) { return fs::path(out + ".run.json"); }

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    for (const char* name : {"CEDKIT_SEED", "NAROCE_SEED"}) {
        const char* env = std::getenv(name);
        if (!env) continue;
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(env, &used);
            if (used == std::string_view(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError(std::string(name) + " is not an unsigned integer");
    }
    throw UsageError("no seed given: pass --seed or set CEDKIT_SEED");
}

/// Output stream on a file, or stdout for "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (path == "-") return;
        if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw cedkit::FormatError("cannot write '" + path + "'");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

class Input {
public:
    explicit Input(const std::string& path) {
        if (path == "-") return;
        file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
        if (!*file_) throw cedkit::FormatError("cannot open '" + path + "'");
    }
    std::istream& stream() { return file_ ? *file_ : std::cin; }

private:
    std::unique_ptr<std::ifstream> file_;
};

/// Maps fn over JSONL records in bounded chunks; output order is input order.
template <typename Fn>
std::size_t stream_map(std::istream& in, std::ostream& out, std::size_t jobs, Fn fn) {
    cedkit::JsonlReader reader(in);
    const std::size_t chunk = 256 * std::max<std::size_t>(1, jobs);
    std::size_t total = 0;
    for (;;) {
        std::vector<cedkit::TraceRecord> batch;
        std::vector<std::size_t> lines;
        while (batch.size() < chunk) {
            auto r = reader.next_record();
            if (!r) break;
            batch.push_back(std::move(*r));
            lines.push_back(reader.line());
        }
        if (batch.empty()) break;
        std::vector<json> results(batch.size());
        cedkit::parallel_for(batch.size(), jobs, [&](std::size_t i) {
            try {
                results[i] = fn(batch[i]);
            } catch (const cedkit::Error& e) {
                throw cedkit::FormatError("line " + std::to_string(lines[i]) + ": " + e.what());
            }
        });
        for (const auto& j : results) cedkit::write_jsonl(out, j);
        total += batch.size();
    }
    return total;
}

cedkit::AbsentClassPolicy parse_policy(const std::string& s) {
    if (s == "exclude") return cedkit::AbsentClassPolicy::exclude;
    if (s == "zero") return cedkit::AbsentClassPolicy::zero;
    return cedkit::AbsentClassPolicy::one;
}

json f1_json(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json report_json(const cedkit::EvalReport& r) {
    json per = json::object();
    for (std::size_t c = 0; c < cedkit::kCeClassCount; ++c) {
        const auto& f = r.per_class_f1[c];
        per[cedkit::to_string(cedkit::CeLabel(static_cast<int>(c)))] = f ? json(*f) : json(nullptr);
    }
    return {{"f1_all", f1_json(r.f1_all)}, {"f1_pos", f1_json(r.f1_pos)}, {"per_class_f1", per},
            {"support", r.support},        {"predicted", r.predicted},    {"confusion", r.confusion},
            {"windows", r.windows}};
}

std::string csv_cell(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

std::string report_csv_header() {
    std::string h = "all,pos";
    for (std::size_t c = 0; c < cedkit::kCeClassCount; ++c) h += ",e" + std::to_string(c);
    return h;
}

std::string report_csv_row(const cedkit::EvalReport& r) {
    std::string row = csv_cell(r.f1_all) + "," + csv_cell(r.f1_pos);
    for (const auto& f : r.per_class_f1) row += "," + (f ? csv_cell(*f) : std::string());
    return row;
}

/// Predicted labels from any record with a "ce" array.
std::vector<std::vector<cedkit::CeLabel>> read_predictions(const std::string& path) {
    Input in(path);
    cedkit::JsonlReader reader(in.stream());
    std::vector<std::vector<cedkit::CeLabel>> out;
    while (auto j = reader.next()) {
        if (!j->contains("ce"))
            throw cedkit::FormatError("line " + std::to_string(reader.line()) + ": prediction has no \"ce\" field");
        std::vector<cedkit::CeLabel> labels;
        try {
            for (const auto& v : (*j)["ce"]) labels.push_back(cedkit::CeLabel(v.get<int>()));
        } catch (const json::exception& e) {
            throw cedkit::FormatError("line " + std::to_string(reader.line()) + ": " + e.what());
        }
        out.push_back(std::move(labels));
    }
    return out;
}

std::vector<cedkit::LabeledTrace> read_dataset(const std::string& in) {
    fs::path p(in);
    if (fs::is_directory(p)) p /= "traces.jsonl";
    return cedkit::read_labeled(p.string());
}

std::vector<double> parse_levels(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError("bad noise level '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError("no noise levels given");
    return out;
}

cedkit::ConfusionMatrix load_confusion(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cedkit::FormatError("cannot open confusion matrix '" + path + "'");
    json j;
    try {
        in >> j;
        cedkit::ConfusionMatrix m{};
        const json& rows = j.is_object() ? j.at("matrix") : j;
        if (!rows.is_array() || rows.size() != cedkit::kAtomicEventCount)
            throw cedkit::InvalidMatrix("confusion matrix needs 9 rows");
        for (std::size_t i = 0; i < cedkit::kAtomicEventCount; ++i) {
            if (!rows[i].is_array() || rows[i].size() != cedkit::kAtomicEventCount)
                throw cedkit::InvalidMatrix("confusion matrix rows need 9 entries");
            for (std::size_t k = 0; k < cedkit::kAtomicEventCount; ++k) m[i][k] = rows[i][k].get<double>();
        }
        cedkit::validate(m);
        return m;
    } catch (const json::exception& e) {
        throw cedkit::InvalidMatrix(std::string("malformed confusion matrix: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex event detection toolkit: generate, label, detect and evaluate atomic-event traces"};
    app.set_version_flag("--version", std::string(cedkit::kVersion));
    app.require_subcommand(1);

    RunRecord run;
    for (int i = 0; i < argc; ++i) run.argv.emplace_back(argv[i]);

    std::size_t jobs = 1;
    auto add_jobs = [&](CLI::App* sub) {
        sub->add_option("--jobs,-j", jobs, "Worker threads; output order never depends on it")->check(CLI::PositiveNumber);
    };

    // generate
    struct {
        std::string config, out = "-";
        std::optional<std::uint64_t> seed;
        std::size_t count = 1;
        std::int64_t duration_s = 300;
        std::optional<double> noise;
        double stretch = 1.0;
    } gen;
    auto* generate = app.add_subcommand("generate", "Sample concept traces from a generator config or suite");
    generate->add_option("--config", gen.config, "Generator config or suite (JSON)")->required()->check(CLI::ExistingFile);
    generate->add_option("--seed", gen.seed, "Base seed (falls back to CEDKIT_SEED)");
    generate->add_option("--count", gen.count, "Number of traces")->check(CLI::PositiveNumber);
    generate->add_option("--duration-s", gen.duration_s, "Trace length in seconds")->check(CLI::PositiveNumber);
    generate->add_option("--noise", gen.noise, "Override the config's symbol noise rate")->check(CLI::Range(0.0, 1.0));
    generate->add_option("--stretch", gen.stretch, "Duration stretch factor (>= 1)")->check(CLI::Range(1.0, 1e6));
    generate->add_option("--out,-o", gen.out, "Output JSONL (default stdout)");
    add_jobs(generate);

    // corrupt
    struct {
        std::string in, out = "-", confusion, symbols_out;
        std::optional<std::uint64_t> seed;
        double accuracy = 0.95;
    } cor;
    auto* corrupt = app.add_subcommand("corrupt", "Simulate a noisy atomic-event classifier");
    corrupt->add_option("--in", cor.in, "Input JSONL with \"ae\" records")->required();
    corrupt->add_option("--out,-o", cor.out, "Output JSONL with \"p\" records");
    corrupt->add_option("--symbols-out", cor.symbols_out, "Also write the emitted symbols as \"ae\" records");
    corrupt->add_option("--accuracy", cor.accuracy, "Classifier accuracy")->check(CLI::Range(0.0, 1.0));
    corrupt->add_option("--confusion", cor.confusion, "9x9 row-stochastic confusion matrix (JSON)");
    corrupt->add_option("--seed", cor.seed, "Channel seed (falls back to CEDKIT_SEED)");
    add_jobs(corrupt);

    // label
    struct {
        std::string in, out = "-";
        bool multi = false;
    } lab;
    auto* label = app.add_subcommand("label", "Label traces with the deterministic monitor ensemble");
    label->add_option("--in", lab.in, "Input JSONL")->required();
    label->add_option("--out,-o", lab.out, "Output JSONL");
    label->add_flag("--multi", lab.multi, "Keep every class completing in a window instead of rejecting conflicts");
    add_jobs(label);

    // detect
    struct {
        std::string in, out = "-";
        double threshold = cedkit::kDefaultThreshold;
        bool argmax = false;
    } det;
    auto* detect = app.add_subcommand("detect", "Detect complex events from symbols or distributions");
    detect->add_option("--in", det.in, "Input JSONL (\"ae\" or \"p\" records)")->required();
    detect->add_option("--out,-o", det.out, "Output JSONL");
    detect->add_option("--threshold", det.threshold, "Accepting-mass threshold in (0, 1]")->check(CLI::Range(0.0, 1.0));
    detect->add_flag("--argmax", det.argmax, "Run the deterministic monitors on the argmax symbol instead");
    add_jobs(detect);

    // build
    struct {
        std::string manifest, config, out;
    } bld;
    auto* build = app.add_subcommand("build", "Build a labeled dataset from a manifest");
    build->add_option("--manifest", bld.manifest, "Dataset manifest (JSON)")->required()->check(CLI::ExistingFile);
    build->add_option("--config", bld.config, "Generator config or suite")->required()->check(CLI::ExistingFile);
    build->add_option("--out,-o", bld.out, "Output directory")->required();
    add_jobs(build);

    // stats
    struct {
        std::string in, out = "-", format = "json", overlap_out;
    } sts;
    auto* stats = app.add_subcommand("stats", "Occurrence, span and overlap statistics of a labeled dataset");
    stats->add_option("--in", sts.in, "Dataset directory or labeled JSONL")->required();
    stats->add_option("--out,-o", sts.out, "Output file");
    stats->add_option("--format", sts.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    stats->add_option("--overlap-out", sts.overlap_out, "CSV overlap table (default <out>.overlap.csv)");

    // eval
    struct {
        std::string pred, truth, out = "-", format = "json", absent = "exclude";
    } evl;
    auto* eval = app.add_subcommand("eval", "Window-level F1 of predictions against labels");
    eval->add_option("--pred", evl.pred, "Predictions (JSONL with \"ce\")")->required();
    eval->add_option("--truth", evl.truth, "Labeled JSONL or dataset directory")->required();
    eval->add_option("--out,-o", evl.out, "Report file");
    eval->add_option("--format", evl.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    eval->add_option("--absent", evl.absent, "F1 of classes with no support and no predictions")
        ->check(CLI::IsMember({"exclude", "zero", "one"}));

    // curve
    struct {
        std::string in, out = "-", format = "json", noise = "0,0.05,0.1,0.2", confusion, absent = "exclude";
        std::optional<std::uint64_t> seed;
        double threshold = cedkit::kDefaultThreshold;
    } crv;
    auto* curve = app.add_subcommand("curve", "Detection F1 as the classifier noise grows");
    curve->add_option("--in", crv.in, "Dataset directory or labeled JSONL")->required();
    curve->add_option("--out,-o", crv.out, "Report file");
    curve->add_option("--noise", crv.noise, "Comma-separated noise levels");
    curve->add_option("--threshold", crv.threshold, "Accepting-mass threshold")->check(CLI::Range(0.0, 1.0));
    curve->add_option("--confusion", crv.confusion, "9x9 confusion matrix (JSON)");
    curve->add_option("--seed", crv.seed, "Channel seed (falls back to CEDKIT_SEED)");
    curve->add_option("--format", crv.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    curve->add_option("--absent", crv.absent, "F1 of absent classes")->check(CLI::IsMember({"exclude", "zero", "one"}));
    add_jobs(curve);

    // catalog / automaton
    struct {
        std::string out = "-";
        int window_s = 5;
        int ce = 1;
    } cat;
    auto* catalog = app.add_subcommand("catalog", "Describe every monitor");
    catalog->add_option("--out,-o", cat.out, "Output JSON");
    catalog->add_option("--window-s", cat.window_s, "Window length in seconds")->check(CLI::PositiveNumber);
    auto* automaton = app.add_subcommand("automaton", "Dump one monitor as an explicit automaton");
    automaton->add_option("--ce", cat.ce, "Complex event id (1-10)")->required()->check(CLI::Range(1, 10));
    automaton->add_option("--out,-o", cat.out, "Output JSON");
    automaton->add_option("--window-s", cat.window_s, "Window length in seconds")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    run.subcommand = active->get_name();

    try {
        if (active == generate) {
            const cedkit::GeneratorSuite suite = cedkit::load_generator_source(gen.config);
            const std::uint64_t seed = resolve_seed(gen.seed);
            std::vector<cedkit::GeneratorConfig> configs;
            for (auto c : suite.members) {
                if (gen.noise) c.noise_rate = *gen.noise;
                configs.push_back(cedkit::stretch(c, gen.stretch));
            }
            std::vector<cedkit::ConceptTrace> traces(gen.count);
            cedkit::parallel_for(gen.count, jobs, [&](std::size_t i) {
                const auto& c = configs[i % configs.size()];
                traces[i] = cedkit::generate(c, gen.duration_s, cedkit::derive_seed(seed, i));
                traces[i].id = suite.id + "-" + std::to_string(i);
            });
            Output out(gen.out);
            for (const auto& t : traces) cedkit::write_jsonl(out.stream(), cedkit::to_json(t));
            run.config_hash = hash_suite(suite);
            run.seeds = {{"seed", seed}};
            if (gen.out != "-") run.write(run_record_path(gen.out));
        } else if (active == corrupt) {
            const std::uint64_t seed = resolve_seed(cor.seed);
            std::optional<cedkit::ConfusionMatrix> m;
            if (!cor.confusion.empty()) m = load_confusion(cor.confusion);
            Input in(cor.in);
            Output out(cor.out);
            std::unique_ptr<Output> sym;
            if (!cor.symbols_out.empty()) sym = std::make_unique<Output>(cor.symbols_out);
            // Trace i of the input uses the channel seed derive_seed(seed, i).
            cedkit::JsonlReader reader(in.stream());
            std::size_t index = 0;
            while (auto r = reader.next_record()) {
                const cedkit::Corruption c =
                    cedkit::corrupt(r->concept_trace(), cor.accuracy, m, cedkit::derive_seed(seed, index++));
                cedkit::write_jsonl(out.stream(), cedkit::to_json(c.probs));
                if (sym) cedkit::write_jsonl(sym->stream(), cedkit::to_json(c.symbols));
            }
            run.seeds = {{"seed", seed}};
            if (!cor.confusion.empty()) run.config_hash = hash_file(cor.confusion);
            if (cor.out != "-") run.write(run_record_path(cor.out));
        } else if (active == label) {
            Input in(lab.in);
            Output out(lab.out);
            stream_map(in.stream(), out.stream(), jobs, [&](const cedkit::TraceRecord& r) {
                const cedkit::ConceptTrace t = r.concept_trace();
                if (lab.multi) return cedkit::to_json(cedkit::label_trace_multi(t));
                return cedkit::to_json(cedkit::label_trace(t));
            });
            if (lab.out != "-") run.write(run_record_path(lab.out));
        } else if (active == detect) {
            if (!(det.threshold > 0.0)) throw UsageError("--threshold must lie in (0, 1]");
            Input in(det.in);
            Output out(det.out);
            std::map<int, std::shared_ptr<const cedkit::ProbabilisticDetector>> detectors;
            std::mutex detectors_mutex;
            auto detector_for = [&](cedkit::WindowSpec w) {
                std::lock_guard lock(detectors_mutex);
                auto& d = detectors[w.window_seconds];
                if (!d) d = std::make_shared<cedkit::ProbabilisticDetector>(w);
                return d;
            };
            stream_map(in.stream(), out.stream(), jobs, [&](const cedkit::TraceRecord& r) {
                std::vector<cedkit::CeLabel> labels;
                if (det.argmax) {
                    cedkit::ConceptTrace t{r.id, r.window, {}, r.seed, r.generator_tag};
                    if (r.events) {
                        t.events = *r.events;
                    } else {
                        for (const auto& d : *r.dists)
                            t.events.push_back(cedkit::atomic_event_from_code(static_cast<std::size_t>(
                                std::max_element(d.begin(), d.end()) - d.begin())));
                    }
                    labels = cedkit::detect_symbols(t);
                } else {
                    labels = detector_for(r.window)->detect(r.prob_trace(), det.threshold);
                }
                json j = cedkit::detail::header(r.id, r.window, r.seed, r.generator_tag);
                if (r.events) j["ae"] = cedkit::detail::ae_array(*r.events);
                j["ce"] = cedkit::detail::ce_array(labels);
                return j;
            });
            if (det.out != "-") run.write(run_record_path(det.out));
        } else if (active == build) {
            const cedkit::DatasetManifest m = cedkit::load_manifest(bld.manifest);
            const cedkit::GeneratorSuite suite = cedkit::load_generator_source(bld.config);
            const cedkit::BuildResult r = cedkit::build(m, suite, jobs);
            cedkit::write_dataset(bld.out, m, suite, r);
            fs::copy_file(bld.manifest, fs::path(bld.out) / "manifest.input.json", fs::copy_options::overwrite_existing);
            run.config_hash = hash_suite(suite);
            run.seeds = {{"seed_base", m.seed_base}};
            run.write(fs::path(bld.out) / "run.json");
            std::cerr << "built " << r.traces.size() << " traces, discarded " << r.discarded << " ("
                      << std::setprecision(3) << 100.0 * r.discard_rate() << "%)\n";
        } else if (active == stats) {
            const auto dataset = read_dataset(sts.in);
            cedkit::StatsAccumulator acc;
            for (const auto& lt : dataset) {
                if (!lt.completions.empty() || std::all_of(lt.labels.begin(), lt.labels.end(),
                                                            [](cedkit::CeLabel c) { return !c.is_event(); })) {
                    acc.add(lt.completions);
                } else {
                    acc.add(cedkit::label_trace_multi(lt.trace).completions);
                }
            }
            const cedkit::DatasetStats s = acc.result();
            Output out(sts.out);
            if (sts.format == "json") {
                out.stream() << cedkit::to_json(s).dump(2) << '\n';
            } else {
                out.stream() << cedkit::occurrence_csv(s, fs::path(sts.in).filename().string());
                std::string overlap = sts.overlap_out;
                if (overlap.empty() && sts.out != "-") overlap = sts.out + ".overlap.csv";
                if (!overlap.empty()) Output(overlap).stream() << cedkit::overlap_csv(s);
            }
            if (sts.out != "-") run.write(run_record_path(sts.out));
        } else if (active == eval) {
            const auto pred = read_predictions(evl.pred);
            const auto truth = read_dataset(evl.truth);
            const cedkit::EvalReport r = cedkit::f1_report(pred, truth, parse_policy(evl.absent));
            Output out(evl.out);
            if (evl.format == "json") {
                json j = report_json(r);
                j["schema"] = "cedkit.eval/1";
                j["absent_policy"] = evl.absent;
                out.stream() << j.dump(2) << '\n';
            } else {
                out.stream() << report_csv_header() << '\n' << report_csv_row(r) << '\n';
            }
            if (evl.out != "-") run.write(run_record_path(evl.out));
        } else if (active == curve) {
            const auto dataset = read_dataset(crv.in);
            cedkit::DegradationOptions opt;
            opt.threshold = crv.threshold;
            opt.seed = resolve_seed(crv.seed);
            opt.jobs = jobs;
            opt.policy = parse_policy(crv.absent);
            if (!crv.confusion.empty()) opt.confusion = load_confusion(crv.confusion);
            const auto levels = parse_levels(crv.noise);
            const auto rows = cedkit::degradation_curve(dataset, levels, opt);
            Output out(crv.out);
            if (crv.format == "json") {
                json jr = json::array();
                for (const auto& row : rows)
                    jr.push_back({{"noise", row.noise}, {"argmax", report_json(row.argmax)},
                                  {"probabilistic", report_json(row.probabilistic)}});
                out.stream() << json({{"schema", "cedkit.curve/1"}, {"threshold", crv.threshold}, {"rows", jr}}).dump(2)
                             << '\n';
            } else {
                out.stream() << "noise,detector," << report_csv_header() << '\n';
                for (const auto& row : rows) {
                    out.stream() << row.noise << ",argmax," << report_csv_row(row.argmax) << '\n';
                    out.stream() << row.noise << ",probabilistic," << report_csv_row(row.probabilistic) << '\n';
                }
            }
            run.seeds = {{"seed", opt.seed}};
            if (crv.out != "-") run.write(run_record_path(crv.out));
        } else if (active == catalog) {
            Output out(cat.out);
            out.stream() << cedkit::catalogue_to_json(cedkit::WindowSpec{cat.window_s}).dump(2) << '\n';
        } else if (active == automaton) {
            Output out(cat.out);
            const auto a = cedkit::finitize(cedkit::CeLabel(cat.ce), cedkit::WindowSpec{cat.window_s});
            out.stream() << cedkit::to_json(a).dump() << '\n';
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << active->help();
        return kExitUsage;
    } catch (const cedkit::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}

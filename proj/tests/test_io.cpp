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

#include <sstream>

#include "support.hpp"

namespace cedkit {
namespace {

using testing::trace_of;

TEST(Jsonl, ConceptTraceRoundTrip) {
    ConceptTrace t = trace_of("flush_toilet wash*2 type", "s-1");
    t.seed = 99;
    t.generator_tag = "handwash";
    const json j = to_json(t);
    EXPECT_EQ(j["ae"][0], "flush_toilet");
    EXPECT_EQ(j["window_s"], 5);
    const TraceRecord r = record_from_json(j);
    EXPECT_EQ(r.concept_trace(), t);
    EXPECT_FALSE(r.labels.has_value());
    EXPECT_THROW(r.labeled_trace(), FormatError);
    EXPECT_EQ(r.prob_trace(), one_hot(t));
}

TEST(Jsonl, LabeledTraceRoundTrip) {
    Rng rng(41);
    for (int i = 0; i < 50; ++i) {
        const LabeledTrace lt = testing::random_labeled(rng, 90);
        const LabeledTrace back = record_from_json(json::parse(to_json(lt).dump())).labeled_trace();
        EXPECT_EQ(back.trace, lt.trace);
        EXPECT_EQ(back.labels, lt.labels);
        EXPECT_EQ(back.completions, lt.completions);
    }
}

TEST(Jsonl, ProbTraceRoundTripIsExact) {
    Rng rng(42);
    const Corruption c = corrupt(testing::uniform_trace(rng, 40), 0.93, std::nullopt, 3);
    const TraceRecord r = record_from_json(json::parse(to_json(c.probs).dump()));
    ASSERT_TRUE(r.dists.has_value());
    EXPECT_EQ(r.prob_trace(), c.probs);
    EXPECT_THROW(r.concept_trace(), FormatError);
}

TEST(Jsonl, MultiLabelForm) {
    const MultiLabeledTrace m = label_trace_multi(trace_of("sit click_mouse*4 flush_toilet click_mouse"));
    const json j = to_json(m);
    EXPECT_EQ(j["ce_multi"][6], json::array({1, 10}));
    EXPECT_EQ(j["completions"].size(), 2u);
}

TEST(Jsonl, StreamReaderSkipsBlankLines) {
    std::stringstream ss;
    write_jsonl(ss, to_json(trace_of("walk", "a")));
    ss << "\n   \n";
    write_jsonl(ss, to_json(trace_of("sit sit", "b")));
    JsonlReader reader(ss);
    std::vector<std::string> ids;
    while (auto r = reader.next_record()) ids.push_back(r->id);
    EXPECT_EQ(ids, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(reader.line(), 4u);
}

TEST(Jsonl, MalformedInputReportsLine) {
    std::stringstream ss;
    write_jsonl(ss, to_json(trace_of("walk", "a")));
    ss << "{not json\n";
    JsonlReader reader(ss);
    EXPECT_TRUE(reader.next_record().has_value());
    try {
        reader.next_record();
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Jsonl, InvalidRecordsRejected) {
    const json good = to_json(label_trace(trace_of("eat walk")));
    auto expect_bad = [&](const std::function<void(json&)>& edit, const char* what) {
        json j = good;
        edit(j);
        EXPECT_THROW(record_from_json(j).labeled_trace(), Error) << what;
    };
    expect_bad([](json& j) { j.erase("id"); }, "id");
    expect_bad([](json& j) { j.erase("window_s"); }, "window");
    expect_bad([](json& j) { j["window_s"] = 0; }, "window value");
    expect_bad([](json& j) { j["ae"][0] = "jump"; }, "symbol");
    expect_bad([](json& j) { j["ae"][0] = "Eat"; }, "case");
    expect_bad([](json& j) { j["ce"][0] = 11; }, "label range");
    expect_bad([](json& j) { j["ce"].push_back(0); }, "lengths");
    expect_bad([](json& j) { j["completions"][0] = json::array({0, 2}); }, "completion shape");
    expect_bad([](json& j) {
        j.erase("ae");
        j["p"] = json::array({json::array({1.0, 0.0})});
    }, "p row");
    expect_bad([](json& j) { j.erase("ae"); }, "no payload");
    EXPECT_THROW(read_records("/nonexistent/traces.jsonl"), FormatError);
}

TEST(Catalogue, JsonDump) {
    const json c = catalogue_to_json();
    const std::string s = c.dump();
    EXPECT_NE(s.find("workspace_sanitary_protocol_violation"), std::string::npos);
    EXPECT_NE(s.find("focused_work_start"), std::string::npos);
    const json a = to_json(finitize(CeLabel(6)));
    EXPECT_EQ(a["num_states"], 7);
    EXPECT_EQ(a["transitions"].size(), 7u);
    EXPECT_EQ(a["transitions"][0].size(), kAtomicEventCount);
    EXPECT_EQ(a["symbols"][8], "wash");
}

}  // namespace
}  // namespace cedkit

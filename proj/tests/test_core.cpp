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

// Frozen: these codes appear in every file written by the toolkit.
TEST(AtomicEventTest, CodesAreFrozen) {
    const std::vector<std::pair<std::string, std::size_t>> golden = {
        {"walk", 0}, {"sit", 1},  {"brush_teeth", 2},  {"click_mouse", 3}, {"drink", 4},
        {"eat", 5},  {"type", 6}, {"flush_toilet", 7}, {"wash", 8}};
    ASSERT_EQ(kAtomicEventCount, 9u);
    for (const auto& [name, c] : golden) {
        const AtomicEvent ae = parse_ae(name);
        EXPECT_EQ(code(ae), c) << name;
        EXPECT_EQ(to_string(ae), name);
        EXPECT_EQ(atomic_event_from_code(c), ae);
    }
}

TEST(AtomicEventTest, ParseIsExactAndCaseSensitive) {
    EXPECT_EQ(parse_ae("wash"), AtomicEvent::wash);
    EXPECT_EQ(parse_ae("flush_toilet"), AtomicEvent::flush_toilet);
    EXPECT_THROW(parse_ae("run"), UnknownSymbol);
    EXPECT_THROW(parse_ae("Wash"), UnknownSymbol);
    EXPECT_THROW(parse_ae(" wash"), UnknownSymbol);
    EXPECT_THROW(parse_ae(""), UnknownSymbol);
    EXPECT_THROW(atomic_event_from_code(9), UnknownSymbol);
}

TEST(CeLabelTest, RangeAndNames) {
    EXPECT_FALSE(kNoEvent.is_event());
    EXPECT_EQ(to_string(CeLabel(10)), "e10");
    EXPECT_EQ(CeLabel(3).index(), 3u);
    EXPECT_TRUE(CeLabel(1).is_event());
    EXPECT_THROW(CeLabel(11), InvalidLabel);
    EXPECT_THROW(CeLabel(-1), InvalidLabel);
}

TEST(WindowSpecTest, TicksUseCeiling) {
    const WindowSpec w;
    EXPECT_EQ(w.window_seconds, 5);
    EXPECT_EQ(ticks(w, 20), 4u);
    EXPECT_EQ(ticks(w, 120), 24u);
    EXPECT_EQ(ticks(w, 12), 3u);
    EXPECT_EQ(ticks(w, 0), 0u);
    EXPECT_EQ(ticks(w, 300), 60u);
    std::size_t prev = 0;
    for (std::int64_t s = 0; s <= 400; ++s) {
        const std::size_t k = ticks(w, s);
        EXPECT_GE(k, prev);
        EXPECT_EQ(k, static_cast<std::size_t>((s + 4) / 5));
        prev = k;
    }
    EXPECT_EQ(ticks(WindowSpec{1}, 7), 7u);
    EXPECT_EQ(ticks(WindowSpec{3}, 7), 3u);
}

TEST(ProbTraceTest, OneHotIsNormalized) {
    const ConceptTrace t = testing::trace_of("walk sit wash*3");
    const ProbTrace p = one_hot(t);
    ASSERT_EQ(p.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_TRUE(is_normalized(p.dists[i]));
        EXPECT_EQ(p.dists[i][code(t.events[i])], 1.0);
    }
    EXPECT_NO_THROW(validate(p));
}

TEST(ProbTraceTest, ValidateRejectsBadVectors) {
    ProbTrace p{"p", {}, {one_hot(AtomicEvent::sit)}, 0, ""};
    p.dists[0][0] = 0.5;
    EXPECT_THROW(validate(p), NotNormalized);
    p.dists[0] = one_hot(AtomicEvent::sit);
    p.dists[0][0] = -1e-6;
    p.dists[0][1] = 1.0 + 1e-6;
    EXPECT_THROW(validate(p), NotNormalized);
    AeDistribution near{};
    near[2] = 1.0 + 5e-10;
    EXPECT_TRUE(is_normalized(near));
}

TEST(RngTest, DeriveSeedSeparatesStreams) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(9, 3), derive_seed(9, 3));
}

TEST(RngTest, UniformIntStaysInRangeAndCoversIt) {
    Rng rng(5);
    std::array<int, 7> hist{};
    for (int i = 0; i < 70000; ++i) {
        const auto v = rng.uniform_int(3, 9);
        ASSERT_GE(v, 3u);
        ASSERT_LE(v, 9u);
        ++hist[v - 3];
    }
    for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(RngTest, WeightedIndexFollowsWeights) {
    Rng rng(11);
    const std::vector<double> w = {0.0, 1.0, 3.0, 0.0};
    std::array<int, 4> hist{};
    for (int i = 0; i < 40000; ++i) ++hist[rng.weighted_index(w)];
    EXPECT_EQ(hist[0], 0);
    EXPECT_EQ(hist[3], 0);
    EXPECT_NEAR(hist[2] / 40000.0, 0.75, 0.01);
    EXPECT_EQ(rng.weighted_index(std::vector<double>{0.0, 0.0}), 2u);
}

TEST(RngTest, SequenceIsReproducible) {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
    // First output of mt19937_64 seeded with 5489 is fixed by the standard.
    EXPECT_EQ(Rng(5489).next_u64(), 14514284786278117030ULL);
}

}  // namespace
}  // namespace cedkit

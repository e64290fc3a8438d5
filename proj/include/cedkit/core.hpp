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
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cedkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownSymbol : public Error {
public:
    explicit UnknownSymbol(std::string text)
        : Error("unknown atomic event symbol '" + text + "'"), text_(std::move(text)) {}
    const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
};

class InvalidLabel : public Error {
public:
    using Error::Error;
};

class NotNormalized : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Atomic events
// ---------------------------------------------------------------------------

/// The nine activity symbols. The integer codes are part of every file format
/// and must never be reordered.
enum class AtomicEvent : std::uint8_t {
    walk = 0,
    sit = 1,
    brush_teeth = 2,
    click_mouse = 3,
    drink = 4,
    eat = 5,
    type = 6,
    flush_toilet = 7,
    wash = 8,
};

inline constexpr std::size_t kAtomicEventCount = 9;

inline constexpr std::array<AtomicEvent, kAtomicEventCount> kAllAtomicEvents = {
    AtomicEvent::walk, AtomicEvent::sit,   AtomicEvent::brush_teeth,
    AtomicEvent::click_mouse, AtomicEvent::drink, AtomicEvent::eat,
    AtomicEvent::type, AtomicEvent::flush_toilet, AtomicEvent::wash,
};

inline constexpr std::array<std::string_view, kAtomicEventCount> kAtomicEventNames = {
    "walk", "sit", "brush_teeth", "click_mouse", "drink", "eat", "type", "flush_toilet", "wash",
};

constexpr std::size_t code(AtomicEvent ae) noexcept { return static_cast<std::size_t>(ae); }

constexpr std::string_view to_string(AtomicEvent ae) noexcept { return kAtomicEventNames[code(ae)]; }

inline AtomicEvent atomic_event_from_code(std::size_t c) {
    if (c >= kAtomicEventCount) throw UnknownSymbol(std::to_string(c));
    return static_cast<AtomicEvent>(c);
}

/// Case-sensitive exact match on the canonical names.
inline AtomicEvent parse_ae(std::string_view text) {
    for (std::size_t i = 0; i < kAtomicEventCount; ++i)
        if (kAtomicEventNames[i] == text) return static_cast<AtomicEvent>(i);
    throw UnknownSymbol(std::string(text));
}

// ---------------------------------------------------------------------------
// Complex event labels
// ---------------------------------------------------------------------------

/// Complex event class id. 0 is the default (no event) label; 1..10 are the
/// monitored complex events.
class CeLabel {
public:
    static constexpr std::uint8_t kMax = 10;

    constexpr CeLabel() noexcept = default;
    constexpr explicit CeLabel(int id) : id_(checked(id)) {}

    constexpr int id() const noexcept { return id_; }
    constexpr bool is_event() const noexcept { return id_ != 0; }
    constexpr std::size_t index() const noexcept { return id_; }

    friend constexpr bool operator==(CeLabel, CeLabel) noexcept = default;
    friend constexpr auto operator<=>(CeLabel, CeLabel) noexcept = default;

private:
    static constexpr std::uint8_t checked(int id) {
        if (id < 0 || id > kMax) throw InvalidLabel("complex event id out of range: " + std::to_string(id));
        return static_cast<std::uint8_t>(id);
    }
    std::uint8_t id_ = 0;
};

inline constexpr std::size_t kCeClassCount = 11;
inline constexpr std::size_t kCeEventCount = 10;
inline constexpr CeLabel kNoEvent{};

inline std::string to_string(CeLabel ce) { return "e" + std::to_string(ce.id()); }

// ---------------------------------------------------------------------------
// Time
// ---------------------------------------------------------------------------

/// Fixed, non-overlapping window segmentation of the input stream.
struct WindowSpec {
    int window_seconds = 5;

    /// Number of windows needed to cover `seconds`, rounded up.
    constexpr std::size_t ticks(std::int64_t seconds) const {
        if (window_seconds < 1) throw Error("window_seconds must be positive");
        if (seconds < 0) throw Error("duration must be nonnegative");
        return static_cast<std::size_t>((seconds + window_seconds - 1) / window_seconds);
    }

    friend constexpr bool operator==(WindowSpec, WindowSpec) noexcept = default;
};

constexpr std::size_t ticks(WindowSpec spec, std::int64_t seconds) { return spec.ticks(seconds); }

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

struct ConceptTrace {
    std::string id;
    WindowSpec window;
    std::vector<AtomicEvent> events;
    std::uint64_t seed = 0;
    std::string generator_tag;

    std::size_t size() const noexcept { return events.size(); }
    friend bool operator==(const ConceptTrace&, const ConceptTrace&) = default;
};

/// One completed complex event instance: the CE fired at `window` and its
/// earliest contributing atomic event was at `anchor`.
struct Completion {
    std::size_t window = 0;
    CeLabel ce;
    std::size_t anchor = 0;

    /// Temporal span in windows, inclusive of both ends.
    std::size_t span() const noexcept { return window - anchor + 1; }
    friend bool operator==(const Completion&, const Completion&) = default;
};

struct LabeledTrace {
    ConceptTrace trace;
    std::vector<CeLabel> labels;
    std::vector<Completion> completions;

    friend bool operator==(const LabeledTrace&, const LabeledTrace&) = default;
};

/// Probability distribution over the nine atomic events.
using AeDistribution = std::array<double, kAtomicEventCount>;

inline constexpr double kNormalizationTolerance = 1e-9;

inline bool is_normalized(const AeDistribution& d, double tol = kNormalizationTolerance) {
    double sum = 0.0;
    for (double p : d) {
        if (!(p >= 0.0)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

inline AeDistribution one_hot(AtomicEvent ae) {
    AeDistribution d{};
    d[code(ae)] = 1.0;
    return d;
}

struct ProbTrace {
    std::string id;
    WindowSpec window;
    std::vector<AeDistribution> dists;
    std::uint64_t seed = 0;
    std::string generator_tag;

    std::size_t size() const noexcept { return dists.size(); }
    friend bool operator==(const ProbTrace&, const ProbTrace&) = default;
};

inline ProbTrace one_hot(const ConceptTrace& trace) {
    ProbTrace out{trace.id, trace.window, {}, trace.seed, trace.generator_tag};
    out.dists.reserve(trace.size());
    for (AtomicEvent ae : trace.events) out.dists.push_back(one_hot(ae));
    return out;
}

/// Throws NotNormalized if any vector is negative or does not sum to one.
inline void validate(const ProbTrace& ptrace) {
    for (std::size_t t = 0; t < ptrace.dists.size(); ++t)
        if (!is_normalized(ptrace.dists[t]))
            throw NotNormalized("trace '" + ptrace.id + "' window " + std::to_string(t) +
                                ": distribution is not normalized");
}

}  // namespace cedkit

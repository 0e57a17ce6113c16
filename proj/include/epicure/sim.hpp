#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "epicure/graph.hpp"

namespace epicure {

/// Reproducible random stream identified by (seed, stream id). Replication
/// `i` of an experiment uses stream id `i`.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Exponential holding time with the given rate, by inverse CDF.
    double exponential(double rate);
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

/// Piecewise-constant curing vector: sparse (node, rate) pairs in node order.
struct Allocation {
    std::vector<std::pair<NodeId, double>> rates;

    static Allocation none() { return {}; }
    static Allocation single(NodeId v, double rate) { return {{{v, rate}}}; }

    double total() const;
    double rate_of(NodeId v) const;
};

inline constexpr double kBudgetTolerance = 1e-9;

/// Throws std::invalid_argument if the allocation exceeds the budget by
/// more than kBudgetTolerance, has a negative rate, is not sorted by node,
/// or puts a positive rate on a healthy node.
void validate_allocation(const Allocation& a, const Bag& infected, double budget);

enum class EventKind { Infection, Cure };

struct Event {
    EventKind kind;
    NodeId node;
    double at;
};

const char* to_string(EventKind k);

struct SimState {
    double time = 0.0;
    Bag infected;
    std::size_t event_count = 0;
};

/// Policy phase annotation. `serial` numbers phase entries within a run so
/// that two consecutive phases with the same label stay distinguishable.
struct PhaseTag {
    std::string label;
    int attempt = 0;
    int serial = 0;
    friend bool operator==(const PhaseTag&, const PhaseTag&) = default;
};

/// A phase entered at `time`, after `event_index` events had been applied.
struct PhaseMark {
    double time;
    std::size_t event_index;
    PhaseTag tag;
};

enum class OutcomeKind { Extinct, Censored };

struct Outcome {
    OutcomeKind kind = OutcomeKind::Censored;
    double at = 0.0;
    std::string reason;  // empty for Extinct; "max_events", "max_time" or "stalled"
};

struct Trace {
    Bag initial;
    std::vector<Event> events;
    std::vector<PhaseMark> marks;
    Outcome outcome;

    bool extinct() const { return outcome.kind == OutcomeKind::Extinct; }

    /// Infected set after the first `k` events.
    Bag infected_after(std::size_t k) const;

    /// One line per event: "time kind node phase". Debug format only.
    std::string to_log() const;
};

/// Receives phase marks from a policy during a run.
class PhaseLog {
public:
    PhaseLog(Trace& trace, const SimState& state) : trace_(trace), state_(state) {}
    void mark(PhaseTag tag) { trace_.marks.push_back({state_.time, state_.event_count, std::move(tag)}); }

private:
    Trace& trace_;
    const SimState& state_;
};

/// A curing policy consulted at t = 0 and after every event. The returned
/// allocation holds until the next event.
class Policy {
public:
    virtual ~Policy() = default;
    virtual void begin(const Bag& initial, PhaseLog& log) = 0;
    virtual Allocation allocate(const Bag& infected) const = 0;
    virtual void on_event(const Event& ev, const Bag& infected_after, PhaseLog& log) = 0;
};

struct Caps {
    std::size_t max_events = 10'000'000;
    double max_time = std::numeric_limits<double>::infinity();
};

struct StepResult {
    Event event;
    SimState state;
};

/// One transition of the controlled SIS process. Every boundary edge adds
/// rate `beta` to the infection of its healthy endpoint and each allocated
/// node is cured at its rate. Returns nullopt when the total rate is zero.
std::optional<StepResult> step(const Graph& g, const SimState& s, const Allocation& a, double budget, RngStream& rng,
                               double beta = 1.0);

/// Simulates until extinction or a cap. Cap exhaustion and zero-rate states
/// yield a Censored outcome.
Trace run(const Graph& g, Policy& policy, const Bag& initial, double budget, RngStream& rng, const Caps& caps = {},
          double beta = 1.0);

}  // namespace epicure

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epicure/cure_policy.hpp"
#include "epicure/graph.hpp"
#include "epicure/sim.hpp"

namespace epicure {

enum class PolicyKind { Cure, Uniform, Degree, None };

const char* to_string(PolicyKind k);
PolicyKind parse_policy_kind(const std::string& name);

/// Initial infected set: all nodes, an explicit list, or round(p * n) nodes
/// drawn from the replication's own stream.
struct InitSpec {
    enum class Kind { All, List, Fraction } kind = Kind::All;
    std::vector<NodeId> nodes;
    double fraction = 0.0;

    static InitSpec parse(const std::string& text);
    std::string describe() const;
    Bag resolve(std::size_t n, RngStream& rng) const;
};

/// Everything a replication needs; shared read-only by all workers.
struct ReplicationSetup {
    const Graph* graph = nullptr;
    PolicyKind policy = PolicyKind::Cure;
    double budget = 1.0;
    InitSpec init;
    Caps caps;
    double beta = 1.0;
    std::uint64_t seed = 0;
    const CrusadeProvider* provider = nullptr;  // required for PolicyKind::Cure
    CureConfig cure;
    bool keep_traces = false;
};

/// One maximal stretch of a single policy phase, recovered from trace marks.
struct PhaseEpisode {
    std::string label;
    int attempt = 0;
    double start = 0.0;
    double end = 0.0;
    /// Label of the following phase, or "extinct" / "censored" at the end.
    std::string next;

    double length() const { return end - start; }
};

std::vector<PhaseEpisode> phase_episodes(const Trace& trace);

struct ReplicationRecord {
    std::size_t id = 0;
    std::uint64_t seed = 0;
    OutcomeKind outcome = OutcomeKind::Censored;
    std::string censor_reason;
    double tau = 0.0;  // extinction time, or the censoring time
    std::size_t initial_size = 0;
    std::size_t cures = 0;
    std::size_t infections = 0;

    int attempts = 0;
    int excursions = 0;
    int long_excursions = 0;
    double waiting_time_total = 0.0;
    double path_time_total = 0.0;
    double excursion_time_total = 0.0;

    /// Completed excursions (censored ones dropped) and whether each was long.
    std::vector<double> excursion_lengths;
    std::vector<char> excursion_long;
    /// Completed waiting periods, one per attempt.
    std::vector<double> waiting_lengths;

    CureCounters counters;
    std::optional<Trace> trace;
};

ReplicationRecord run_replication(const ReplicationSetup& setup, std::size_t id);

/// Reference kernel: replications in index order on the calling thread.
std::vector<ReplicationRecord> run_replications_serial(const ReplicationSetup& setup, std::size_t count);

/// OpenMP kernel. Each replication owns its stream and policy, and results
/// land at their index, so the output equals the serial kernel's for any
/// thread count. `threads == 0` uses configured_threads().
std::vector<ReplicationRecord> run_replications_parallel(const ReplicationSetup& setup, std::size_t count,
                                                         int threads = 0);

/// EPIDEMIC_CURE_THREADS when set to a positive integer, else the OpenMP default.
int configured_threads();

}  // namespace epicure

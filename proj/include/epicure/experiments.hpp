#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epicure/cure_policy.hpp"
#include "epicure/graph.hpp"
#include "epicure/replicate.hpp"
#include "epicure/statistics.hpp"

namespace epicure {

/// A graph plus, for generated graphs, a width-optimal ordering of V usable
/// by the restricted crusade mode.
struct GraphBundle {
    std::string spec;
    Graph graph;
    std::optional<std::vector<NodeId>> natural_order;
};

/// "line:N", "grid:RxC", "complete:N", "cycle:N", "star:N", or a path to an
/// edge-list file.
GraphBundle load_graph_spec(const std::string& spec);

enum class CrusadeMode { Auto, Exact, Restricted };

const char* to_string(CrusadeMode m);
CrusadeMode parse_crusade_mode(const std::string& name);

struct ExperimentConfig {
    std::string graph = "line:16";
    PolicyKind policy = PolicyKind::Cure;
    double budget = 1.0;
    InitSpec init;
    std::size_t replications = 1000;
    std::uint64_t seed = 1;
    Caps caps;
    double beta = 1.0;
    CrusadeMode crusade_mode = CrusadeMode::Auto;
    /// Ordering of V for restricted mode; defaults to the generator's.
    std::optional<std::vector<NodeId>> ordering;
    bool instrument = false;
    bool parallel = true;
    int threads = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::size_t n = 0;
    std::size_t max_degree = 0;
    std::optional<std::size_t> cutwidth;
    bool cutwidth_exact = false;
    std::size_t excursion_bound = 0;
    std::vector<std::string> warnings;
    std::vector<ReplicationRecord> records;

    std::size_t censored() const;
    /// Extinction times of the extinct replications, in replication order.
    std::vector<double> extinction_times() const;
};

/// Prepares the graph, crusade provider and policy configuration, then runs
/// every replication.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Summary over extinct runs. Censored runs are counted separately, excluded
/// from the mean, and reported on stderr. Throws if every run is censored.
Summary estimate_extinction_time(const ExperimentResult& result);
Summary estimate_extinction_time(const ExperimentConfig& cfg);

/// K = ceil(r / (8 * max_degree)), the long-excursion threshold of the policy.
std::size_t excursion_bound(double budget, std::size_t max_degree);

/// Long-excursion probability bound 3 / (2^K - 1); 1 when K < 2.
double failure_probability(std::size_t n, double budget, std::size_t max_degree);

/// Probability that a birth-death chain started at `start` reaches `upper`
/// before 0, with the given up and down rates.
double gambler_ruin_oracle(std::size_t upper, std::size_t start, double up_rate, double down_rate);

/// Same quantity estimated by simulating the embedded jump chain.
double gambler_ruin_monte_carlo(std::size_t upper, std::size_t start, double up_rate, double down_rate,
                                std::size_t trials, std::uint64_t seed);

/// Excursions pooled across replications. Fewer than this many observed
/// excursions makes the excursion checks inconclusive.
inline constexpr std::size_t kMinExcursions = 100;

/// [0]: long-excursion frequency <= p.  [1]: mean excursion length <= 4/r.
std::array<BoundReport, 2> verify_lemma2(const ExperimentResult& result);
/// Mean waiting period per attempt <= 8n/r.
BoundReport verify_lemma3(const ExperimentResult& result);
/// Mean extinction time <= 13n / (r (1 - np)). Throws std::invalid_argument
/// unless r >= 4W and np < 1.
BoundReport verify_theorem1(const ExperimentResult& result);
/// Mean extinction time >= n/r from I0 = V, any policy.
BoundReport verify_corollary_lower_bound(const ExperimentResult& result);

/// Checks r >= 4W and np < 1 before any replication runs.
void check_theorem1_hypotheses(const ExperimentConfig& cfg);

struct SweepPoint {
    double budget = 0.0;
    Summary tau;
    /// Mean at this budget <= mean at the previous budget + both half-widths.
    bool monotone_ok = true;
};

std::vector<SweepPoint> sweep(const ExperimentConfig& base, const std::vector<double>& budgets,
                              std::vector<ExperimentResult>* results = nullptr);

/// One row per replication; columns replication_id, seed, outcome, tau,
/// attempts, excursions, long_excursions, waiting_time_total,
/// path_time_total, excursion_time_total. Doubles use 17 significant digits.
std::string replications_csv(const std::vector<ReplicationRecord>& records);

}  // namespace epicure

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "epicure/crusade.hpp"
#include "epicure/graph.hpp"
#include "epicure/sim.hpp"

namespace epicure {

/// Supplies the target path an attempt follows from bag B.
class CrusadeProvider {
public:
    virtual ~CrusadeProvider() = default;
    virtual Crusade target_path(const Bag& b) const = 0;
    /// CutWidth (exact mode) or the width of the supplied ordering.
    virtual std::size_t cutwidth() const = 0;
    virtual bool exact() const = 0;
};

/// Optimal crusades from a fully filled impedance table (n <= 30).
class ExactCrusadeProvider final : public CrusadeProvider {
public:
    explicit ExactCrusadeProvider(const Graph& g);
    Crusade target_path(const Bag& b) const override { return table_.optimal_crusade(b); }
    std::size_t cutwidth() const override { return cutwidth_; }
    bool exact() const override { return true; }
    const ImpedanceTable& table() const { return table_; }

private:
    ImpedanceTable table_;
    std::size_t cutwidth_;
};

/// Restrictions of one fixed ordering of V; any graph size.
class RestrictedCrusadeProvider final : public CrusadeProvider {
public:
    RestrictedCrusadeProvider(const Graph& g, std::vector<NodeId> order_v);
    Crusade target_path(const Bag& b) const override { return restrict_crusade(order_v_, b); }
    std::size_t cutwidth() const override { return width_; }
    bool exact() const override { return false; }
    const std::vector<NodeId>& ordering() const { return order_v_; }

private:
    std::vector<NodeId> order_v_;
    std::size_t width_;
};

struct CureConfig {
    double budget = 0.0;
    /// Waiting ends once cut(I_t) <= budget / 8.
    double waiting_threshold = 0.0;
    /// An excursion is long once |D| reaches this value.
    std::size_t excursion_bound = 1;
    std::optional<std::size_t> cutwidth;
    /// Checks the excursion rate bound and bookkeeping at every event.
    bool instrument = false;
    /// Conditions under which the analytic bounds do not apply.
    std::vector<std::string> warnings;
};

/// excursion_bound = ceil(r / (8 * max_degree)), and n + 1 for edgeless graphs.
CureConfig make_cure_config(const Graph& g, double budget, std::optional<std::size_t> cutwidth, bool instrument = false);

struct Waiting {};
struct PathFollowing {
    std::size_t position = 0;
};
struct Excursion {
    Bag target;   // C: the path bag the excursion tries to reach
    Bag detour;   // D = I_t \ C
    std::size_t resume_position = 0;
};

using CurePhase = std::variant<Waiting, PathFollowing, Excursion>;

struct CureCounters {
    int attempts = 0;
    int segments = 0;
    int excursions = 0;
    int long_excursions = 0;
    // instrumentation
    std::size_t excursion_events = 0;
    std::size_t rate_bound_violations = 0;
    std::size_t detour_mismatches = 0;
    std::size_t path_mismatches = 0;
    std::size_t max_detour = 0;
};

struct CureState {
    CurePhase phase = Waiting{};
    Crusade target;
    CureCounters counters;
    int mark_serial = 0;

    const char* phase_label() const;
};

CureState cure_policy_new(const CureConfig& cfg, const Graph& g, const Bag& initial, const CrusadeProvider& provider,
                          PhaseLog* log = nullptr);

/// Waiting: nothing. Path-following: the whole budget on the next path node.
/// Excursion: the whole budget on the lowest-index node of D.
Allocation allocate(const CureConfig& cfg, const CureState& st, const Bag& infected);

void on_event(const CureConfig& cfg, const Graph& g, CureState& st, const Event& ev, const Bag& infected_after,
              const CrusadeProvider& provider, PhaseLog* log = nullptr);

/// Policy adapter running the CURE state machine inside sim::run.
class CurePolicy final : public Policy {
public:
    CurePolicy(const Graph& g, CureConfig cfg, const CrusadeProvider& provider)
        : graph_(g), cfg_(std::move(cfg)), provider_(provider) {}

    void begin(const Bag& initial, PhaseLog& log) override;
    Allocation allocate(const Bag& infected) const override { return epicure::allocate(cfg_, state_, infected); }
    void on_event(const Event& ev, const Bag& infected_after, PhaseLog& log) override;

    const CureState& state() const { return state_; }
    const CureConfig& config() const { return cfg_; }

private:
    const Graph& graph_;
    CureConfig cfg_;
    const CrusadeProvider& provider_;
    CureState state_;
};

class UniformPolicy final : public Policy {
public:
    explicit UniformPolicy(double budget) : budget_(budget) {}
    void begin(const Bag&, PhaseLog&) override {}
    Allocation allocate(const Bag& infected) const override;
    void on_event(const Event&, const Bag&, PhaseLog&) override {}

private:
    double budget_;
};

class DegreeProportionalPolicy final : public Policy {
public:
    DegreeProportionalPolicy(const Graph& g, double budget) : graph_(g), budget_(budget) {}
    void begin(const Bag&, PhaseLog&) override {}
    Allocation allocate(const Bag& infected) const override;
    void on_event(const Event&, const Bag&, PhaseLog&) override {}

private:
    const Graph& graph_;
    double budget_;
};

class NoCuringPolicy final : public Policy {
public:
    void begin(const Bag&, PhaseLog&) override {}
    Allocation allocate(const Bag&) const override { return Allocation::none(); }
    void on_event(const Event&, const Bag&, PhaseLog&) override {}
};

}  // namespace epicure

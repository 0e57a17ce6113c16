#include "epicure/cure_policy.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace epicure {

ExactCrusadeProvider::ExactCrusadeProvider(const Graph& g) : table_(g), cutwidth_(table_.impedance(g.all_nodes())) {}

RestrictedCrusadeProvider::RestrictedCrusadeProvider(const Graph& g, std::vector<NodeId> order_v)
    : order_v_(std::move(order_v)), width_(ordering_width(g, order_v_)) {}

CureConfig make_cure_config(const Graph& g, double budget, std::optional<std::size_t> cutwidth, bool instrument) {
    if (!(budget > 0.0)) throw std::invalid_argument("curing budget must be positive");
    CureConfig cfg;
    cfg.budget = budget;
    cfg.waiting_threshold = budget / 8.0;
    cfg.cutwidth = cutwidth;
    cfg.instrument = instrument;
    if (g.max_degree() == 0) {
        cfg.excursion_bound = g.node_count() + 1;
    } else {
        const double k = budget / (8.0 * static_cast<double>(g.max_degree()));
        cfg.excursion_bound = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k)));
    }
    if (cutwidth && budget < 4.0 * static_cast<double>(*cutwidth)) {
        cfg.warnings.push_back(fmt::format("budget {} is below 4W = {}; the excursion bounds do not apply", budget,
                                           4 * *cutwidth));
    }
    if (cfg.excursion_bound < 2) {
        cfg.warnings.push_back(fmt::format("excursion bound {} < 2 (r < 16 * max degree): every excursion fails at once",
                                           cfg.excursion_bound));
    }
    return cfg;
}

const char* CureState::phase_label() const {
    if (std::holds_alternative<Waiting>(phase)) return "waiting";
    if (std::holds_alternative<PathFollowing>(phase)) return "path";
    return "excursion";
}

namespace {

void emit(CureState& st, PhaseLog* log) {
    ++st.mark_serial;
    if (log) log->mark(PhaseTag{st.phase_label(), st.counters.attempts, st.mark_serial});
}

void check_path(const CureConfig& cfg, CureState& st, const Bag& infected) {
    if (!cfg.instrument) return;
    const auto& pf = std::get<PathFollowing>(st.phase);
    if (!(st.target.bag_at(pf.position) == infected)) ++st.counters.path_mismatches;
}

void check_excursion(const CureConfig& cfg, const Graph& g, CureState& st, const Bag& infected) {
    if (!cfg.instrument) return;
    const auto& ex = std::get<Excursion>(st.phase);
    ++st.counters.excursion_events;
    if (static_cast<double>(cut(g, infected)) > cfg.budget / 2.0) ++st.counters.rate_bound_violations;
    if (!(infected.set_difference(ex.target) == ex.detour) || !ex.target.is_subset_of(infected)) {
        ++st.counters.detour_mismatches;
    }
}

void start_path(const CureConfig& cfg, CureState& st, const Bag& b, const CrusadeProvider& provider, PhaseLog* log) {
    st.target = provider.target_path(b);
    st.phase = PathFollowing{0};
    ++st.counters.segments;
    emit(st, log);
    check_path(cfg, st, b);
}

void start_attempt(const CureConfig& cfg, const Graph& g, CureState& st, const Bag& infected,
                   const CrusadeProvider& provider, PhaseLog* log) {
    ++st.counters.attempts;
    st.phase = Waiting{};
    st.target = Crusade{};
    emit(st, log);
    if (static_cast<double>(cut(g, infected)) <= cfg.waiting_threshold) start_path(cfg, st, infected, provider, log);
}

void enter_excursion(const CureConfig& cfg, const Graph& g, CureState& st, Bag target, Bag detour,
                     std::size_t resume, const Bag& infected, const CrusadeProvider& provider, PhaseLog* log) {
    ++st.counters.excursions;
    st.counters.max_detour = std::max(st.counters.max_detour, detour.size());
    const bool long_now = detour.size() >= cfg.excursion_bound;
    st.phase = Excursion{std::move(target), std::move(detour), resume};
    emit(st, log);
    if (long_now) {
        ++st.counters.long_excursions;
        start_attempt(cfg, g, st, infected, provider, log);
        return;
    }
    check_excursion(cfg, g, st, infected);
}

[[noreturn]] void inconsistent(const std::string& what) {
    throw std::logic_error("CURE bookkeeping: " + what);
}

}  // namespace

CureState cure_policy_new(const CureConfig& cfg, const Graph& g, const Bag& initial, const CrusadeProvider& provider,
                          PhaseLog* log) {
    CureState st;
    if (initial.empty()) return st;
    start_attempt(cfg, g, st, initial, provider, log);
    return st;
}

Allocation allocate(const CureConfig& cfg, const CureState& st, const Bag& infected) {
    if (std::holds_alternative<Waiting>(st.phase)) return Allocation::none();
    if (const auto* pf = std::get_if<PathFollowing>(&st.phase)) {
        if (pf->position >= st.target.removal_order.size()) inconsistent("target path exhausted with nodes infected");
        const NodeId v = st.target.removal_order[pf->position];
        if (!infected.contains(v)) inconsistent(fmt::format("next path node {} is not infected", v));
        return Allocation::single(v, cfg.budget);
    }
    const auto& ex = std::get<Excursion>(st.phase);
    if (ex.detour.empty()) inconsistent("excursion with empty D");
    return Allocation::single(ex.detour.lowest(), cfg.budget);
}

void on_event(const CureConfig& cfg, const Graph& g, CureState& st, const Event& ev, const Bag& infected_after,
              const CrusadeProvider& provider, PhaseLog* log) {
    if (std::holds_alternative<Waiting>(st.phase)) {
        if (ev.kind == EventKind::Cure) inconsistent("cure during a waiting period");
        if (static_cast<double>(cut(g, infected_after)) <= cfg.waiting_threshold) {
            start_path(cfg, st, infected_after, provider, log);
        }
        return;
    }

    if (auto* pf = std::get_if<PathFollowing>(&st.phase)) {
        const NodeId next = st.target.removal_order.at(pf->position);
        if (ev.kind == EventKind::Cure) {
            if (ev.node != next) inconsistent(fmt::format("cured node {} but path expects {}", ev.node, next));
            ++pf->position;
            return;
        }
        Bag target = infected_after;
        target.erase(ev.node);
        target.erase(next);
        Bag detour(g.node_count(), {next, ev.node});
        enter_excursion(cfg, g, st, std::move(target), std::move(detour), pf->position + 1, infected_after, provider,
                        log);
        return;
    }

    auto& ex = std::get<Excursion>(st.phase);
    if (ev.kind == EventKind::Cure) {
        if (!ex.detour.contains(ev.node)) inconsistent(fmt::format("cured node {} outside D", ev.node));
        ex.detour.erase(ev.node);
        if (ex.detour.empty()) {
            const std::size_t resume = ex.resume_position;
            st.phase = PathFollowing{resume};
            ++st.counters.segments;
            emit(st, log);
            check_path(cfg, st, infected_after);
            return;
        }
        check_excursion(cfg, g, st, infected_after);
        return;
    }

    if (ex.target.contains(ev.node)) inconsistent(fmt::format("infection of node {} already in C", ev.node));
    ex.detour.insert(ev.node);
    st.counters.max_detour = std::max(st.counters.max_detour, ex.detour.size());
    if (ex.detour.size() >= cfg.excursion_bound) {
        ++st.counters.long_excursions;
        start_attempt(cfg, g, st, infected_after, provider, log);
        return;
    }
    check_excursion(cfg, g, st, infected_after);
}

void CurePolicy::begin(const Bag& initial, PhaseLog& log) {
    state_ = cure_policy_new(cfg_, graph_, initial, provider_, &log);
}

void CurePolicy::on_event(const Event& ev, const Bag& infected_after, PhaseLog& log) {
    epicure::on_event(cfg_, graph_, state_, ev, infected_after, provider_, &log);
}

Allocation UniformPolicy::allocate(const Bag& infected) const {
    Allocation a;
    if (infected.empty()) return a;
    const double share = budget_ / static_cast<double>(infected.size());
    a.rates.reserve(infected.size());
    infected.for_each([&](NodeId v) { a.rates.emplace_back(v, share); });
    return a;
}

Allocation DegreeProportionalPolicy::allocate(const Bag& infected) const {
    std::size_t total_degree = 0;
    infected.for_each([&](NodeId v) { total_degree += graph_.degree(v); });
    // all infected nodes isolated: the degree rule allocates nothing
    if (total_degree == 0) return Allocation::none();
    Allocation a;
    a.rates.reserve(infected.size());
    infected.for_each([&](NodeId v) {
        if (graph_.degree(v) > 0)
            a.rates.emplace_back(v, budget_ * static_cast<double>(graph_.degree(v)) / static_cast<double>(total_degree));
    });
    return a;
}

}  // namespace epicure

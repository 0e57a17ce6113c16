#include "epicure/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace epicure {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

std::uint64_t RngStream::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below(0)");
    // rejection keeps the draw unbiased and the stream consumption reproducible
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
}

double Allocation::total() const {
    double s = 0.0;
    for (const auto& [v, rate] : rates) s += rate;
    return s;
}

double Allocation::rate_of(NodeId v) const {
    for (const auto& [u, rate] : rates)
        if (u == v) return rate;
    return 0.0;
}

void validate_allocation(const Allocation& a, const Bag& infected, double budget) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rates.size(); ++i) {
        const auto& [v, rate] = a.rates[i];
        if (!(rate >= 0.0)) throw std::invalid_argument(fmt::format("negative curing rate {} at node {}", rate, v));
        if (i > 0 && a.rates[i - 1].first >= v) throw std::invalid_argument("allocation entries must be in increasing node order");
        if (rate > 0.0 && !infected.contains(v)) {
            throw std::invalid_argument(fmt::format("positive curing rate on healthy node {}", v));
        }
        sum += rate;
    }
    if (sum > budget + kBudgetTolerance) {
        throw std::invalid_argument(fmt::format("allocation total {} exceeds budget {}", sum, budget));
    }
}

const char* to_string(EventKind k) { return k == EventKind::Infection ? "infection" : "cure"; }

std::optional<StepResult> step(const Graph& g, const SimState& s, const Allocation& a, double budget, RngStream& rng,
                               double beta) {
    if (s.infected.empty()) throw std::logic_error("step() called with no infected nodes");
    validate_allocation(a, s.infected, budget);

    const std::vector<Edge> boundary = boundary_edges(g, s.infected);
    const double infection_rate = beta * static_cast<double>(boundary.size());
    const double total = infection_rate + a.total();
    if (!(total > 0.0)) return std::nullopt;

    const double dt = rng.exponential(total);
    const double pick = rng.uniform() * total;

    Event ev{EventKind::Cure, 0, s.time + dt};
    if (pick < infection_rate) {
        const auto idx = std::min(boundary.size() - 1, static_cast<std::size_t>(pick / beta));
        ev.kind = EventKind::Infection;
        ev.node = boundary[idx].v;
    } else {
        double acc = infection_rate;
        bool chosen = false;
        for (const auto& [v, rate] : a.rates) {
            if (rate <= 0.0) continue;
            acc += rate;
            ev.node = v;
            chosen = true;
            if (pick < acc) break;
        }
        if (!chosen) {
            // pick landed on the infection block's upper edge through rounding
            ev.kind = EventKind::Infection;
            ev.node = boundary.back().v;
        }
    }

    StepResult out{ev, s};
    out.state.time = ev.at;
    ++out.state.event_count;
    if (ev.kind == EventKind::Infection)
        out.state.infected.insert(ev.node);
    else
        out.state.infected.erase(ev.node);
    return out;
}

Trace run(const Graph& g, Policy& policy, const Bag& initial, double budget, RngStream& rng, const Caps& caps,
          double beta) {
    if (!(budget > 0.0)) throw std::invalid_argument("curing budget must be positive");
    if (initial.universe() != g.node_count()) throw std::invalid_argument("initial bag and graph sizes differ");

    Trace trace;
    trace.initial = initial;
    SimState state{0.0, initial, 0};
    PhaseLog log(trace, state);

    if (initial.empty()) {
        trace.outcome = {OutcomeKind::Extinct, 0.0, {}};
        return trace;
    }
    policy.begin(initial, log);

    while (true) {
        if (state.event_count >= caps.max_events) {
            trace.outcome = {OutcomeKind::Censored, state.time, "max_events"};
            return trace;
        }
        const Allocation alloc = policy.allocate(state.infected);
        auto next = step(g, state, alloc, budget, rng, beta);
        if (!next) {
            trace.outcome = {OutcomeKind::Censored, state.time, "stalled"};
            return trace;
        }
        if (next->event.at > caps.max_time) {
            trace.outcome = {OutcomeKind::Censored, caps.max_time, "max_time"};
            return trace;
        }
        state = std::move(next->state);
        trace.events.push_back(next->event);
        if (state.infected.empty()) {
            trace.outcome = {OutcomeKind::Extinct, state.time, {}};
            policy.on_event(trace.events.back(), state.infected, log);
            return trace;
        }
        policy.on_event(trace.events.back(), state.infected, log);
    }
}

Bag Trace::infected_after(std::size_t k) const {
    if (k > events.size()) throw std::out_of_range("trace has fewer events");
    Bag b = initial;
    for (std::size_t i = 0; i < k; ++i) {
        if (events[i].kind == EventKind::Infection)
            b.insert(events[i].node);
        else
            b.erase(events[i].node);
    }
    return b;
}

std::string Trace::to_log() const {
    std::string out;
    std::size_t mark = 0;
    std::string phase = "-";
    for (std::size_t i = 0; i < events.size(); ++i) {
        // the phase in force during the interval that this event closes
        while (mark < marks.size() && marks[mark].event_index <= i) {
            phase = fmt::format("{}#{}", marks[mark].tag.label, marks[mark].tag.attempt);
            ++mark;
        }
        out += fmt::format("{:.17g} {} {} {}\n", events[i].at, to_string(events[i].kind), events[i].node, phase);
    }
    if (outcome.kind == OutcomeKind::Extinct)
        out += fmt::format("{:.17g} extinct\n", outcome.at);
    else
        out += fmt::format("{:.17g} censored {}\n", outcome.at, outcome.reason);
    return out;
}

}  // namespace epicure

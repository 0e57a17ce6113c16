#include "epicure/replicate.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <memory>
#include <stdexcept>

#include <fmt/format.h>
#include <omp.h>

namespace epicure {

const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::Cure: return "cure";
        case PolicyKind::Uniform: return "uniform";
        case PolicyKind::Degree: return "degree";
        case PolicyKind::None: return "none";
    }
    return "?";
}

PolicyKind parse_policy_kind(const std::string& name) {
    if (name == "cure") return PolicyKind::Cure;
    if (name == "uniform") return PolicyKind::Uniform;
    if (name == "degree") return PolicyKind::Degree;
    if (name == "none") return PolicyKind::None;
    throw std::invalid_argument(fmt::format("unknown policy '{}' (expected cure, uniform, degree or none)", name));
}

InitSpec InitSpec::parse(const std::string& text) {
    InitSpec spec;
    if (text == "all") return spec;
    if (text.rfind("list:", 0) == 0) {
        spec.kind = Kind::List;
        spec.nodes = parse_node_list(text.substr(5));
        return spec;
    }
    if (text.rfind("frac:", 0) == 0) {
        spec.kind = Kind::Fraction;
        std::size_t used = 0;
        try {
            spec.fraction = std::stod(text.substr(5), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size() - 5 || !(spec.fraction >= 0.0 && spec.fraction <= 1.0)) {
            throw std::invalid_argument(fmt::format("bad fraction in '{}' (expected frac:p with 0 <= p <= 1)", text));
        }
        return spec;
    }
    throw std::invalid_argument(fmt::format("bad initial set '{}' (expected all, list:i,j,... or frac:p)", text));
}

std::string InitSpec::describe() const {
    switch (kind) {
        case Kind::All: return "all";
        case Kind::List: return fmt::format("list:{}", fmt::join(nodes, ","));
        case Kind::Fraction: return fmt::format("frac:{}", fraction);
    }
    return "?";
}

Bag InitSpec::resolve(std::size_t n, RngStream& rng) const {
    switch (kind) {
        case Kind::All: return Bag::full(n);
        case Kind::List: {
            for (NodeId v : nodes)
                if (v >= n) throw std::invalid_argument(fmt::format("initial node {} outside [0, {})", v, n));
            return Bag::from_nodes(n, nodes);
        }
        case Kind::Fraction: {
            const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
            std::vector<NodeId> perm(n);
            for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<NodeId>(i);
            for (std::size_t i = 0; i < k; ++i) std::swap(perm[i], perm[i + rng.below(n - i)]);
            perm.resize(k);
            return Bag::from_nodes(n, perm);
        }
    }
    return Bag(n);
}

std::vector<PhaseEpisode> phase_episodes(const Trace& trace) {
    std::vector<PhaseEpisode> out;
    out.reserve(trace.marks.size());
    for (std::size_t i = 0; i < trace.marks.size(); ++i) {
        const PhaseMark& m = trace.marks[i];
        PhaseEpisode ep;
        ep.label = m.tag.label;
        ep.attempt = m.tag.attempt;
        ep.start = m.time;
        if (i + 1 < trace.marks.size()) {
            ep.end = trace.marks[i + 1].time;
            ep.next = trace.marks[i + 1].tag.label;
        } else {
            ep.end = trace.outcome.at;
            ep.next = trace.extinct() ? "extinct" : "censored";
        }
        out.push_back(std::move(ep));
    }
    return out;
}

namespace {

std::unique_ptr<Policy> make_policy(const ReplicationSetup& s) {
    switch (s.policy) {
        case PolicyKind::Cure:
            if (s.provider == nullptr) throw std::invalid_argument("CURE policy needs a crusade provider");
            return std::make_unique<CurePolicy>(*s.graph, s.cure, *s.provider);
        case PolicyKind::Uniform: return std::make_unique<UniformPolicy>(s.budget);
        case PolicyKind::Degree: return std::make_unique<DegreeProportionalPolicy>(*s.graph, s.budget);
        case PolicyKind::None: return std::make_unique<NoCuringPolicy>();
    }
    throw std::logic_error("unhandled policy kind");
}

}  // namespace

ReplicationRecord run_replication(const ReplicationSetup& setup, std::size_t id) {
    if (setup.graph == nullptr) throw std::invalid_argument("replication setup has no graph");
    RngStream rng(setup.seed, id);
    const Bag initial = setup.init.resolve(setup.graph->node_count(), rng);
    auto policy = make_policy(setup);
    Trace trace = run(*setup.graph, *policy, initial, setup.budget, rng, setup.caps, setup.beta);

    ReplicationRecord rec;
    rec.id = id;
    rec.seed = setup.seed;
    rec.outcome = trace.outcome.kind;
    rec.censor_reason = trace.outcome.reason;
    rec.tau = trace.outcome.at;
    rec.initial_size = initial.size();
    for (const Event& ev : trace.events) {
        if (ev.kind == EventKind::Cure)
            ++rec.cures;
        else
            ++rec.infections;
    }

    if (const auto* cure = dynamic_cast<const CurePolicy*>(policy.get())) {
        rec.counters = cure->state().counters;
        rec.attempts = rec.counters.attempts;
        rec.excursions = rec.counters.excursions;
        rec.long_excursions = rec.counters.long_excursions;
    }

    for (const PhaseEpisode& ep : phase_episodes(trace)) {
        const bool completed = ep.next != "censored";
        if (ep.label == "waiting") {
            rec.waiting_time_total += ep.length();
            if (completed) rec.waiting_lengths.push_back(ep.length());
        } else if (ep.label == "path") {
            rec.path_time_total += ep.length();
        } else if (ep.label == "excursion") {
            rec.excursion_time_total += ep.length();
            if (completed) {
                rec.excursion_lengths.push_back(ep.length());
                rec.excursion_long.push_back(ep.next == "waiting" ? 1 : 0);
            }
        }
    }

    if (setup.keep_traces) rec.trace = std::move(trace);
    return rec;
}

std::vector<ReplicationRecord> run_replications_serial(const ReplicationSetup& setup, std::size_t count) {
    std::vector<ReplicationRecord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(run_replication(setup, i));
    return out;
}

std::vector<ReplicationRecord> run_replications_parallel(const ReplicationSetup& setup, std::size_t count,
                                                         int threads) {
    if (threads <= 0) threads = configured_threads();
    std::vector<ReplicationRecord> out(count);
    std::exception_ptr failure;
    const auto n = static_cast<long long>(count);

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (long long i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = run_replication(setup, static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(epicure_replication_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

int configured_threads() {
    if (const char* env = std::getenv("EPIDEMIC_CURE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return omp_get_max_threads();
}

}  // namespace epicure

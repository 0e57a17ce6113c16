#include "epicure/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include <fmt/format.h>

namespace epicure {

namespace {

// Auto mode fills the exact table only up to this size; the table holds
// every subset of V, so n = 30 would need 2^30 entries.
constexpr std::size_t kAutoExactMaxNodes = 20;

std::size_t parse_count(const std::string& text, const std::string& spec) {
    std::size_t used = 0;
    long long v = -1;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || v < 1) {
        throw std::invalid_argument(fmt::format("bad size in graph spec '{}'", spec));
    }
    return static_cast<std::size_t>(v);
}

std::vector<NodeId> identity_order(std::size_t n) {
    std::vector<NodeId> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<NodeId>(i);
    return order;
}

}  // namespace

GraphBundle load_graph_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = colon == std::string::npos ? "" : spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (kind == "line") {
        const std::size_t n = parse_count(arg, spec);
        return {spec, make_line(n), identity_order(n)};
    }
    if (kind == "complete") {
        const std::size_t n = parse_count(arg, spec);
        return {spec, make_complete(n), identity_order(n)};
    }
    if (kind == "cycle") {
        const std::size_t n = parse_count(arg, spec);
        return {spec, make_cycle(n), identity_order(n)};
    }
    if (kind == "star") {
        const std::size_t n = parse_count(arg, spec);
        return {spec, make_star(n), identity_order(n)};
    }
    if (kind == "grid") {
        const auto x = arg.find('x');
        if (x == std::string::npos) throw std::invalid_argument(fmt::format("grid spec '{}' must look like grid:RxC", spec));
        const std::size_t rows = parse_count(arg.substr(0, x), spec);
        const std::size_t cols = parse_count(arg.substr(x + 1), spec);
        // sweep across the shorter dimension
        std::vector<NodeId> order;
        order.reserve(rows * cols);
        if (cols <= rows) {
            order = identity_order(rows * cols);
        } else {
            for (std::size_t c = 0; c < cols; ++c)
                for (std::size_t r = 0; r < rows; ++r) order.push_back(static_cast<NodeId>(r * cols + c));
        }
        return {spec, make_grid(rows, cols), std::move(order)};
    }
    return {spec, load_graph_file(spec), std::nullopt};
}

const char* to_string(CrusadeMode m) {
    switch (m) {
        case CrusadeMode::Auto: return "auto";
        case CrusadeMode::Exact: return "exact";
        case CrusadeMode::Restricted: return "restricted";
    }
    return "?";
}

CrusadeMode parse_crusade_mode(const std::string& name) {
    if (name == "auto") return CrusadeMode::Auto;
    if (name == "exact") return CrusadeMode::Exact;
    if (name == "restricted") return CrusadeMode::Restricted;
    throw std::invalid_argument(fmt::format("unknown crusade mode '{}' (expected auto, exact or restricted)", name));
}

std::size_t ExperimentResult::censored() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const ReplicationRecord& r) {
        return r.outcome == OutcomeKind::Censored;
    }));
}

std::vector<double> ExperimentResult::extinction_times() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records)
        if (r.outcome == OutcomeKind::Extinct) out.push_back(r.tau);
    return out;
}

namespace {

struct Prepared {
    std::unique_ptr<CrusadeProvider> provider;
    std::optional<std::size_t> cutwidth;
    bool exact = false;
};

Prepared prepare_provider(const ExperimentConfig& cfg, const GraphBundle& bundle) {
    const Graph& g = bundle.graph;
    const std::optional<std::vector<NodeId>> order = cfg.ordering ? cfg.ordering : bundle.natural_order;

    CrusadeMode mode = cfg.crusade_mode;
    if (mode == CrusadeMode::Auto) {
        if (g.node_count() <= kAutoExactMaxNodes || (!order && g.node_count() <= kExactModeMaxNodes))
            mode = CrusadeMode::Exact;
        else
            mode = CrusadeMode::Restricted;
    }

    Prepared p;
    if (mode == CrusadeMode::Exact) {
        auto exact = std::make_unique<ExactCrusadeProvider>(g);
        p.cutwidth = exact->cutwidth();
        p.exact = true;
        p.provider = std::move(exact);
        return p;
    }
    if (!order) {
        throw std::invalid_argument(fmt::format(
            "graph '{}' has {} nodes; restricted mode needs an ordering of V (--order)", bundle.spec, g.node_count()));
    }
    auto restricted = std::make_unique<RestrictedCrusadeProvider>(g, *order);
    p.cutwidth = restricted->cutwidth();
    p.provider = std::move(restricted);
    return p;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.replications < 1) throw std::invalid_argument("replications must be at least 1");
    if (!(cfg.budget > 0.0)) throw std::invalid_argument("budget must be positive");
    if (!(cfg.beta > 0.0)) throw std::invalid_argument("infection rate beta must be positive");

    const GraphBundle bundle = load_graph_spec(cfg.graph);
    const Graph& g = bundle.graph;
    if (cfg.init.kind == InitSpec::Kind::List) {
        for (NodeId v : cfg.init.nodes)
            if (v >= g.node_count()) throw std::invalid_argument(fmt::format("initial node {} outside [0, {})", v, g.node_count()));
    }

    ExperimentResult result;
    result.config = cfg;
    result.n = g.node_count();
    result.max_degree = g.max_degree();
    result.excursion_bound = excursion_bound(cfg.budget, g.max_degree());

    ReplicationSetup setup;
    setup.graph = &g;
    setup.policy = cfg.policy;
    setup.budget = cfg.budget;
    setup.init = cfg.init;
    setup.caps = cfg.caps;
    setup.beta = cfg.beta;
    setup.seed = cfg.seed;

    Prepared prepared;
    if (cfg.policy == PolicyKind::Cure) {
        prepared = prepare_provider(cfg, bundle);
        setup.provider = prepared.provider.get();
        setup.cure = make_cure_config(g, cfg.budget, prepared.cutwidth, cfg.instrument);
        result.warnings = setup.cure.warnings;
        result.cutwidth = prepared.cutwidth;
        result.cutwidth_exact = prepared.exact;
    } else if (g.node_count() <= kAutoExactMaxNodes) {
        result.cutwidth = cutwidth(g);
        result.cutwidth_exact = true;
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

    result.records = cfg.parallel ? run_replications_parallel(setup, cfg.replications, cfg.threads)
                                  : run_replications_serial(setup, cfg.replications);
    return result;
}

Summary estimate_extinction_time(const ExperimentResult& result) {
    const std::vector<double> taus = result.extinction_times();
    const std::size_t censored = result.censored();
    if (taus.empty()) {
        throw std::runtime_error(fmt::format("all {} replications were censored; no extinction time to estimate",
                                             result.records.size()));
    }
    if (censored > 0) {
        std::cerr << fmt::format("WARNING: {} of {} replications censored and excluded from the mean\n", censored,
                                 result.records.size());
    }
    return summarize(taus, censored);
}

Summary estimate_extinction_time(const ExperimentConfig& cfg) { return estimate_extinction_time(run_experiment(cfg)); }

std::size_t excursion_bound(double budget, std::size_t max_degree) {
    if (max_degree == 0) return std::numeric_limits<std::size_t>::max();
    const double k = std::ceil(budget / (8.0 * static_cast<double>(max_degree)));
    return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

double failure_probability(std::size_t /*n*/, double budget, std::size_t max_degree) {
    const std::size_t k = excursion_bound(budget, max_degree);
    if (k < 2) return 1.0;
    if (k >= 1024) return 0.0;
    return 3.0 / (std::exp2(static_cast<double>(k)) - 1.0);
}

double gambler_ruin_oracle(std::size_t upper, std::size_t start, double up_rate, double down_rate) {
    if (start == 0 || start >= upper) throw std::invalid_argument("gambler's ruin needs 0 < start < upper");
    if (!(up_rate > 0.0) || !(down_rate > 0.0)) throw std::invalid_argument("gambler's ruin needs positive rates");
    const double ratio = down_rate / up_rate;
    if (ratio == 1.0) return static_cast<double>(start) / static_cast<double>(upper);
    return (std::pow(ratio, static_cast<double>(start)) - 1.0) / (std::pow(ratio, static_cast<double>(upper)) - 1.0);
}

double gambler_ruin_monte_carlo(std::size_t upper, std::size_t start, double up_rate, double down_rate,
                                std::size_t trials, std::uint64_t seed) {
    if (start == 0 || start >= upper) throw std::invalid_argument("gambler's ruin needs 0 < start < upper");
    if (!(up_rate > 0.0) || !(down_rate > 0.0)) throw std::invalid_argument("gambler's ruin needs positive rates");
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    RngStream rng(seed, 0);
    const double p_up = up_rate / (up_rate + down_rate);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t x = start;
        while (x != 0 && x != upper) x = rng.uniform() < p_up ? x + 1 : x - 1;
        if (x == upper) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

namespace {

void require_cure(const ExperimentResult& r, const char* what) {
    if (r.config.policy != PolicyKind::Cure) {
        throw std::invalid_argument(fmt::format("{} verification needs the cure policy (got {})", what,
                                                to_string(r.config.policy)));
    }
}

std::map<std::string, double> common_inputs(const ExperimentResult& r) {
    std::map<std::string, double> in;
    in["n"] = static_cast<double>(r.n);
    in["r"] = r.config.budget;
    in["Delta"] = static_cast<double>(r.max_degree);
    if (r.cutwidth) in["W"] = static_cast<double>(*r.cutwidth);
    in["K"] = static_cast<double>(r.excursion_bound);
    in["p"] = failure_probability(r.n, r.config.budget, r.max_degree);
    return in;
}

BoundReport make_report(std::string name, BoundDirection dir, double bound, const ExperimentResult& r,
                        const std::vector<double>& samples, std::size_t censored) {
    BoundReport rep;
    rep.name = std::move(name);
    rep.direction = dir;
    rep.bound = bound;
    rep.inputs = common_inputs(r);
    rep.empirical = summarize(samples, censored);
    rep.verdict = decide(dir, bound, rep.empirical);
    return rep;
}

}  // namespace

std::array<BoundReport, 2> verify_lemma2(const ExperimentResult& result) {
    require_cure(result, "lemma2");
    std::vector<double> is_long;
    std::vector<double> lengths;
    for (const auto& rec : result.records) {
        for (std::size_t i = 0; i < rec.excursion_lengths.size(); ++i) {
            lengths.push_back(rec.excursion_lengths[i]);
            is_long.push_back(rec.excursion_long[i] ? 1.0 : 0.0);
        }
    }
    const double p = failure_probability(result.n, result.config.budget, result.max_degree);
    std::array<BoundReport, 2> out{
        make_report("lemma2a_long_excursion_probability", BoundDirection::Upper, p, result, is_long, 0),
        make_report("lemma2b_mean_excursion_length", BoundDirection::Upper, 4.0 / result.config.budget, result,
                    lengths, 0)};
    for (auto& rep : out) {
        if (rep.empirical.count < kMinExcursions) {
            rep.verdict = Verdict::Inconclusive;
            rep.note = fmt::format("only {} completed excursions observed (need {})", rep.empirical.count,
                                   kMinExcursions);
        }
        if (result.cutwidth && result.config.budget < 4.0 * static_cast<double>(*result.cutwidth)) {
            rep.note += rep.note.empty() ? "" : "; ";
            rep.note += "r < 4W: the bound's hypothesis fails";
        }
    }
    return out;
}

BoundReport verify_lemma3(const ExperimentResult& result) {
    require_cure(result, "lemma3");
    std::vector<double> waits;
    for (const auto& rec : result.records) waits.insert(waits.end(), rec.waiting_lengths.begin(), rec.waiting_lengths.end());
    const double bound = 8.0 * static_cast<double>(result.n) / result.config.budget;
    BoundReport rep = make_report("lemma3_mean_waiting_period", BoundDirection::Upper, bound, result, waits, 0);
    if (waits.empty()) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "no completed waiting periods observed";
    }
    return rep;
}

void check_theorem1_hypotheses(const ExperimentConfig& cfg) {
    if (cfg.policy != PolicyKind::Cure) throw std::invalid_argument("theorem1 verification needs the cure policy");
    const GraphBundle bundle = load_graph_spec(cfg.graph);
    const Prepared prepared = prepare_provider(cfg, bundle);
    const std::size_t n = bundle.graph.node_count();
    const double w = static_cast<double>(prepared.cutwidth.value_or(0));
    const double p = failure_probability(n, cfg.budget, bundle.graph.max_degree());
    if (cfg.budget < 4.0 * w) {
        throw std::invalid_argument(fmt::format("theorem1 needs r >= 4W, but r = {} and W = {}", cfg.budget, w));
    }
    if (!(static_cast<double>(n) * p < 1.0)) {
        throw std::invalid_argument(fmt::format("theorem1 needs n*p < 1, but n*p = {} (n = {}, p = {})",
                                                static_cast<double>(n) * p, n, p));
    }
}

BoundReport verify_theorem1(const ExperimentResult& result) {
    require_cure(result, "theorem1");
    const double r = result.config.budget;
    const double n = static_cast<double>(result.n);
    const double p = failure_probability(result.n, r, result.max_degree);
    if (!result.cutwidth) throw std::invalid_argument("theorem1 needs the CutWidth");
    if (r < 4.0 * static_cast<double>(*result.cutwidth)) {
        throw std::invalid_argument(fmt::format("theorem1 needs r >= 4W, but r = {} and W = {}", r, *result.cutwidth));
    }
    if (!(n * p < 1.0)) throw std::invalid_argument(fmt::format("theorem1 needs n*p < 1, but n*p = {}", n * p));

    const double bound = (1.0 / (1.0 - n * p)) * 13.0 * n / r;
    BoundReport rep = make_report("theorem1_mean_extinction_time", BoundDirection::Upper, bound, result,
                                  result.extinction_times(), result.censored());
    if (rep.empirical.censored > 0) rep.note = fmt::format("{} censored runs excluded", rep.empirical.censored);
    if (rep.empirical.count == 0) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "every run was censored";
    }
    return rep;
}

BoundReport verify_corollary_lower_bound(const ExperimentResult& result) {
    if (result.config.init.kind != InitSpec::Kind::All) {
        throw std::invalid_argument("corollary lower bound needs every node initially infected (--init all)");
    }
    const double bound = static_cast<double>(result.n) / result.config.budget;
    BoundReport rep = make_report(fmt::format("corollary1a_lower_bound_{}", to_string(result.config.policy)),
                                  BoundDirection::Lower, bound, result, result.extinction_times(), result.censored());
    if (rep.empirical.censored > 0) rep.note = fmt::format("{} censored runs excluded", rep.empirical.censored);
    if (rep.empirical.count == 0) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "every run was censored";
    }
    return rep;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& base, const std::vector<double>& budgets,
                              std::vector<ExperimentResult>* results) {
    std::vector<double> sorted = budgets;
    std::sort(sorted.begin(), sorted.end());
    std::vector<SweepPoint> out;
    for (double r : sorted) {
        ExperimentConfig cfg = base;
        cfg.budget = r;
        ExperimentResult res = run_experiment(cfg);
        SweepPoint pt;
        pt.budget = r;
        pt.tau = estimate_extinction_time(res);
        if (!out.empty()) {
            const SweepPoint& prev = out.back();
            pt.monotone_ok = pt.tau.mean <= prev.tau.mean + prev.tau.half_width + pt.tau.half_width;
        }
        out.push_back(pt);
        if (results) results->push_back(std::move(res));
    }
    return out;
}

std::string replications_csv(const std::vector<ReplicationRecord>& records) {
    std::string out =
        "replication_id,seed,outcome,tau,attempts,excursions,long_excursions,waiting_time_total,path_time_total,"
        "excursion_time_total\n";
    for (const auto& r : records) {
        out += fmt::format("{},{},{},{:.17g},{},{},{},{:.17g},{:.17g},{:.17g}\n", r.id, r.seed,
                           r.outcome == OutcomeKind::Extinct ? "extinct" : "censored", r.tau, r.attempts,
                           r.excursions, r.long_excursions, r.waiting_time_total, r.path_time_total,
                           r.excursion_time_total);
    }
    return out;
}

}  // namespace epicure

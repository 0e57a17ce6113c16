#include "epicure/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "epicure/crusade.hpp"
#include "epicure/experiments.hpp"

namespace epicure {

namespace {

using nlohmann::json;

struct CommonOptions {
    std::string graph;
    std::string policy = "cure";
    double budget = 0.0;
    std::string init = "all";
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    std::string caps;
    std::string out;
    std::string mode = "auto";
    std::string order;
    double beta = 1.0;
    bool instrument = false;
    bool serial = false;
};

void add_common(CLI::App* sub, CommonOptions& o, bool need_budget) {
    sub->add_option("--graph", o.graph, "line:N, grid:RxC, complete:N, cycle:N, star:N or an edge-list file")->required();
    auto* b = sub->add_option("--budget", o.budget, "total curing budget r");
    if (need_budget) b->required();
    sub->add_option("--policy", o.policy, "cure, uniform, degree or none");
    sub->add_option("--init", o.init, "all, list:i,j,... or frac:p");
    sub->add_option("--reps", o.reps, "number of replications");
    sub->add_option("--seed", o.seed, "base seed; replication i uses stream i");
    sub->add_option("--caps", o.caps, "censoring caps, e.g. events:100000,time:50");
    sub->add_option("--out", o.out, "CSV output path; the JSON summary goes next to it");
    sub->add_option("--mode", o.mode, "crusade mode: auto, exact or restricted");
    sub->add_option("--order", o.order, "file with an ordering of V for restricted mode");
    sub->add_option("--beta", o.beta, "infection rate per boundary edge");
    sub->add_flag("--instrument", o.instrument, "check the excursion rate bound at every excursion event");
    sub->add_flag("--serial", o.serial, "run replications on the reference serial kernel");
}

Caps parse_caps(const std::string& text) {
    Caps caps;
    if (text.empty()) return caps;
    std::string copy = text;
    std::replace(copy.begin(), copy.end(), ',', ' ');
    std::istringstream in(copy);
    std::string item;
    while (in >> item) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument(fmt::format("bad cap '{}' (expected events:N or time:T)", item));
        const std::string key = item.substr(0, colon);
        const std::string value = item.substr(colon + 1);
        try {
            if (key == "events") {
                caps.max_events = static_cast<std::size_t>(std::stoull(value));
            } else if (key == "time") {
                caps.max_time = std::stod(value);
            } else {
                throw std::invalid_argument("unknown key");
            }
        } catch (const std::exception&) {
            throw std::invalid_argument(fmt::format("bad cap '{}' (expected events:N or time:T)", item));
        }
    }
    return caps;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
    out << content;
}

std::string json_path_for(const std::string& csv_path) {
    const std::string ext = ".csv";
    if (csv_path.size() > ext.size() && csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0)
        return csv_path.substr(0, csv_path.size() - ext.size()) + ".json";
    return csv_path + ".json";
}

ExperimentConfig to_config(const CommonOptions& o) {
    ExperimentConfig cfg;
    cfg.graph = o.graph;
    cfg.policy = parse_policy_kind(o.policy);
    cfg.budget = o.budget;
    cfg.init = InitSpec::parse(o.init);
    if (o.reps < 1) throw std::invalid_argument("--reps must be at least 1");
    cfg.replications = o.reps;
    cfg.seed = o.seed;
    cfg.caps = parse_caps(o.caps);
    cfg.beta = o.beta;
    cfg.crusade_mode = parse_crusade_mode(o.mode);
    if (!o.order.empty()) cfg.ordering = parse_node_list(read_file(o.order));
    cfg.instrument = o.instrument;
    cfg.parallel = !o.serial;
    return cfg;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const Summary& s) {
    return {{"mean", s.mean},
            {"variance", s.variance},
            {"count", s.count},
            {"half_width_99", s.half_width},
            {"censored", s.censored}};
}

json to_json(const BoundReport& r) {
    return {{"name", r.name},
            {"direction", to_string(r.direction)},
            {"bound", r.bound},
            {"inputs", r.inputs},
            {"empirical", to_json(r.empirical)},
            {"verdict", to_string(r.verdict)},
            {"note", r.note}};
}

json config_json(const ExperimentConfig& c) {
    return {{"graph", c.graph},
            {"policy", to_string(c.policy)},
            {"budget", c.budget},
            {"init", c.init.describe()},
            {"replications", c.replications},
            {"seed", c.seed},
            {"caps", {{"max_events", c.caps.max_events}, {"max_time", number_or_null(c.caps.max_time)}}},
            {"beta", c.beta},
            {"crusade_mode", to_string(c.crusade_mode)},
            {"instrument", c.instrument}};
}

json result_json(const ExperimentResult& r) {
    json graph = {{"n", r.n}, {"max_degree", r.max_degree}, {"excursion_bound", r.excursion_bound}};
    graph["cutwidth"] = r.cutwidth ? json(*r.cutwidth) : json(nullptr);
    graph["cutwidth_exact"] = r.cutwidth_exact;

    json doc = {{"config", config_json(r.config)}, {"graph", graph}, {"warnings", r.warnings}};
    doc["censored"] = r.censored();
    const auto taus = r.extinction_times();
    doc["extinction_time"] = taus.empty() ? json(nullptr) : to_json(summarize(taus, r.censored()));

    if (r.config.policy == PolicyKind::Cure) {
        CureCounters total;
        for (const auto& rec : r.records) {
            total.excursion_events += rec.counters.excursion_events;
            total.rate_bound_violations += rec.counters.rate_bound_violations;
            total.detour_mismatches += rec.counters.detour_mismatches;
            total.path_mismatches += rec.counters.path_mismatches;
        }
        doc["instrumentation"] = {{"enabled", r.config.instrument},
                                  {"excursion_events_checked", total.excursion_events},
                                  {"rate_bound_violations", total.rate_bound_violations},
                                  {"detour_mismatches", total.detour_mismatches},
                                  {"path_mismatches", total.path_mismatches}};
    }
    return doc;
}

void emit_outputs(const CommonOptions& o, const ExperimentResult& result, const json& doc, std::ostream& out) {
    if (o.out.empty()) {
        out << doc.dump(2) << '\n';
        return;
    }
    write_file(o.out, replications_csv(result.records));
    write_file(json_path_for(o.out), doc.dump(2) + "\n");
    out << fmt::format("wrote {} and {}\n", o.out, json_path_for(o.out));
}

bool hypothesis_holds(const ExperimentResult& r) {
    return r.cutwidth && r.config.budget >= 4.0 * static_cast<double>(*r.cutwidth);
}

int finish_verify(const CommonOptions& o, const ExperimentResult& result, const std::vector<BoundReport>& reports,
                  std::ostream& out) {
    json doc = result_json(result);
    bool violated = false;
    doc["reports"] = json::array();
    for (const auto& rep : reports) {
        doc["reports"].push_back(to_json(rep));
        violated = violated || rep.verdict == Verdict::Fail;
    }
    if (result.config.instrument && result.config.policy == PolicyKind::Cure && hypothesis_holds(result)) {
        std::size_t violations = 0;
        for (const auto& rec : result.records) violations += rec.counters.rate_bound_violations;
        violated = violated || violations > 0;
    }
    doc["verdict"] = violated ? "fail" : "pass";
    emit_outputs(o, result, doc, out);
    for (const auto& rep : reports) {
        out << fmt::format("{}: {} (empirical {:.6g} +/- {:.3g}, bound {:.6g}, n={})\n", rep.name, to_string(rep.verdict),
                           rep.empirical.mean, rep.empirical.half_width, rep.bound, rep.empirical.count);
    }
    return violated ? 2 : 0;
}

Bag parse_bag(const std::string& text, std::size_t n) {
    if (text == "all") return Bag::full(n);
    std::vector<NodeId> nodes = parse_node_list(text);
    for (NodeId v : nodes)
        if (v >= n) throw std::invalid_argument(fmt::format("bag node {} outside [0, {})", v, n));
    return Bag::from_nodes(n, nodes);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact simulator and bound checker for budgeted epidemic curing on graphs", "epicure"};
    app.require_subcommand(1);

    std::string graph_pos;
    std::string graph_opt;
    auto* cw = app.add_subcommand("cutwidth", "print the CutWidth and an optimal ordering");
    cw->add_option("graph_spec", graph_pos, "graph spec or edge-list file");
    cw->add_option("--graph", graph_opt, "graph spec or edge-list file");

    std::string bag_pos;
    std::string bag_opt;
    auto* cr = app.add_subcommand("crusade", "print the impedance of a bag and an optimal crusade");
    cr->add_option("graph_spec", graph_pos, "graph spec or edge-list file");
    cr->add_option("bag_nodes", bag_pos, "comma-separated nodes, or all");
    cr->add_option("--graph", graph_opt, "graph spec or edge-list file");
    cr->add_option("--bag", bag_opt, "comma-separated nodes, or all");

    CommonOptions sim_opts;
    std::string trace_path;
    auto* sim = app.add_subcommand("simulate", "run replications and summarize extinction times");
    add_common(sim, sim_opts, true);
    sim_opts.reps = 1;
    sim->add_option("--trace", trace_path, "write the event log of replication 0 to this file");

    CommonOptions ver_opts;
    std::string which;
    auto* ver = app.add_subcommand("verify", "check an analytic bound by Monte Carlo");
    ver->add_option("bound", which, "lemma2, lemma3, theorem1 or corollary")
        ->required()
        ->check(CLI::IsMember({"lemma2", "lemma3", "theorem1", "corollary"}));
    add_common(ver, ver_opts, true);

    CommonOptions sweep_opts;
    std::vector<double> budgets;
    auto* sw = app.add_subcommand("sweep", "mean extinction time over a grid of budgets");
    add_common(sw, sweep_opts, false);
    sw->add_option("--budgets", budgets, "budgets to run (comma separated)")->delimiter(',')->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cw->parsed() || cr->parsed()) {
            const std::string spec = !graph_opt.empty() ? graph_opt : graph_pos;
            if (spec.empty()) throw std::invalid_argument("missing graph (positional or --graph)");
            const GraphBundle bundle = load_graph_spec(spec);
            const Graph& g = bundle.graph;
            Bag bag = g.all_nodes();
            if (cr->parsed()) {
                const std::string b = !bag_opt.empty() ? bag_opt : bag_pos;
                if (b.empty()) throw std::invalid_argument("missing bag (positional or --bag)");
                bag = parse_bag(b, g.node_count());
            }
            ImpedanceTable table(g);
            const std::size_t value = table.impedance(bag);
            const Crusade path = table.optimal_crusade(bag);
            out << value << '\n' << format_ordering(path.removal_order) << '\n';
            return 0;
        }

        if (sim->parsed()) {
            const ExperimentConfig cfg = to_config(sim_opts);
            const ExperimentResult result = run_experiment(cfg);
            if (!trace_path.empty()) {
                // replication 0 again, keeping its trace; identical by stream determinism
                ExperimentConfig one = cfg;
                one.replications = 1;
                one.parallel = false;
                const GraphBundle bundle = load_graph_spec(cfg.graph);
                ReplicationSetup setup;
                setup.graph = &bundle.graph;
                setup.policy = cfg.policy;
                setup.budget = cfg.budget;
                setup.init = cfg.init;
                setup.caps = cfg.caps;
                setup.beta = cfg.beta;
                setup.seed = cfg.seed;
                setup.keep_traces = true;
                std::unique_ptr<CrusadeProvider> provider;
                if (cfg.policy == PolicyKind::Cure) {
                    if (bundle.graph.node_count() <= kExactModeMaxNodes && cfg.crusade_mode != CrusadeMode::Restricted)
                        provider = std::make_unique<ExactCrusadeProvider>(bundle.graph);
                    else
                        provider = std::make_unique<RestrictedCrusadeProvider>(
                            bundle.graph, cfg.ordering ? *cfg.ordering : bundle.natural_order.value());
                    setup.provider = provider.get();
                    setup.cure = make_cure_config(bundle.graph, cfg.budget, provider->cutwidth(), cfg.instrument);
                }
                write_file(trace_path, run_replication(setup, 0).trace->to_log());
            }
            json doc = result_json(result);
            emit_outputs(sim_opts, result, doc, out);
            if (result.censored() > 0) {
                err << fmt::format("note: {} of {} replications censored\n", result.censored(), result.records.size());
            }
            return 0;
        }

        if (ver->parsed()) {
            ExperimentConfig cfg = to_config(ver_opts);
            if (which == "lemma2" || which == "theorem1") cfg.instrument = true;
            if (which == "theorem1") check_theorem1_hypotheses(cfg);
            if (which == "corollary" && cfg.init.kind != InitSpec::Kind::All) {
                throw std::invalid_argument("verify corollary needs --init all");
            }
            const ExperimentResult result = run_experiment(cfg);
            std::vector<BoundReport> reports;
            if (which == "lemma2") {
                const auto pair = verify_lemma2(result);
                reports.assign(pair.begin(), pair.end());
            } else if (which == "lemma3") {
                reports.push_back(verify_lemma3(result));
            } else if (which == "theorem1") {
                reports.push_back(verify_theorem1(result));
            } else {
                reports.push_back(verify_corollary_lower_bound(result));
            }
            return finish_verify(ver_opts, result, reports, out);
        }

        if (sw->parsed()) {
            if (budgets.empty()) throw std::invalid_argument("--budgets needs at least one value");
            ExperimentConfig cfg = to_config(sweep_opts);
            std::vector<ExperimentResult> results;
            const auto points = sweep(cfg, budgets, &results);
            json doc = {{"config", config_json(cfg)}, {"points", json::array()}, {"heuristic", "monotone in budget"}};
            std::string csv;
            bool monotone = true;
            for (std::size_t i = 0; i < points.size(); ++i) {
                doc["points"].push_back(
                    {{"budget", points[i].budget}, {"extinction_time", to_json(points[i].tau)}, {"monotone_ok", points[i].monotone_ok}});
                monotone = monotone && points[i].monotone_ok;
                std::istringstream rows(replications_csv(results[i].records));
                std::string line;
                bool header = true;
                while (std::getline(rows, line)) {
                    if (header) {
                        if (i == 0) csv += "budget," + line + "\n";
                        header = false;
                        continue;
                    }
                    csv += fmt::format("{:.17g},{}\n", points[i].budget, line);
                }
                out << fmt::format("r={:g}: mean tau {:.6g} +/- {:.3g}{}\n", points[i].budget, points[i].tau.mean,
                                   points[i].tau.half_width, points[i].monotone_ok ? "" : "  [heuristic check failed]");
            }
            doc["monotone_ok"] = monotone;
            if (sweep_opts.out.empty()) {
                out << doc.dump(2) << '\n';
            } else {
                write_file(sweep_opts.out, csv);
                write_file(json_path_for(sweep_opts.out), doc.dump(2) + "\n");
            }
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace epicure

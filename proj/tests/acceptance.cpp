// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ctmc_oracle.hpp"
#include "epicure/cli.hpp"
#include "epicure/crusade.hpp"
#include "epicure/experiments.hpp"
#include "epicure/sim.hpp"
#include "test_support.hpp"

using namespace epicure;

namespace {

struct Result {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Result()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Result o{false, ""};
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << fmt::format("{} [{:2}] {}: {} ({:.1f}s)", o.pass ? "PASS" : "FAIL", id, name, o.detail, secs)
              << std::endl;
}

/// Every small instance: the named families on 1..7 nodes plus 30 random
/// connected graphs.
std::vector<Graph> small_instances() {
    std::vector<Graph> gs;
    test_support::for_each_small_graph(7, 30, [&](const Graph& g) { gs.push_back(g); });
    return gs;
}

bool within_3_sigma(const Summary& s, double expected) {
    return std::abs(s.mean - expected) <= 3.0 * s.standard_error();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    const std::vector<Graph> instances = small_instances();

    report(1, "impedance equals brute force on every bag of small graphs", [&] {
        std::size_t bags = 0;
        std::size_t mismatches = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (const Graph& g : instances) {
            ImpedanceTable table(g);
            const std::uint64_t total = std::uint64_t{1} << g.node_count();
            for (std::uint64_t key = 0; key < total; ++key) {
                const Bag a = Bag::from_key(g.node_count(), key);
                if (table.impedance(a) != brute_force_impedance(g, a)) ++mismatches;
                ++bags;
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return Result{mismatches == 0 && secs < 300.0,
                       fmt::format("{} graphs, {} bags, {} mismatches", instances.size(), bags, mismatches)};
    });

    report(2, "impedance <= W + cut, restricted crusades stay within cut + W", [&] {
        std::size_t bags = 0;
        std::size_t impedance_violations = 0;
        std::size_t restricted_violations = 0;
        for (const Graph& g : instances) {
            ImpedanceTable table(g);
            const std::size_t w = table.impedance(g.all_nodes());
            const std::vector<NodeId> order_v = table.optimal_crusade(g.all_nodes()).removal_order;
            const std::uint64_t total = std::uint64_t{1} << g.node_count();
            for (std::uint64_t key = 0; key < total; ++key) {
                const Bag a = Bag::from_key(g.node_count(), key);
                const std::size_t c = cut(g, a);
                if (table.impedance(a) > w + c) ++impedance_violations;
                const Crusade cr = restrict_crusade(order_v, a);
                for (std::size_t i = 0; i <= cr.steps(); ++i)
                    if (cut(g, cr.bag_at(i)) > c + w) ++restricted_violations;
                ++bags;
            }
        }
        return Result{impedance_violations == 0 && restricted_violations == 0,
                       fmt::format("{} bags, {} impedance violations, {} restricted-crusade violations", bags,
                                   impedance_violations, restricted_violations)};
    });

    report(3, "CutWidth spot values", [] {
        bool ok = true;
        std::string lines;
        for (std::size_t n = 2; n <= 12; ++n) {
            const std::size_t w = cutwidth(make_line(n));
            ok = ok && w == 1;
            if (w != 1) lines += fmt::format(" line({})={}", n, w);
        }
        const std::size_t k4 = cutwidth(make_complete(4));
        const Graph grid = make_grid(3, 3);
        const std::size_t g33 = cutwidth(grid);
        const std::size_t g33_brute = brute_force_impedance(grid, grid.all_nodes());
        ok = ok && k4 == 4 && g33 == g33_brute;
        return Result{ok, fmt::format("line(2..12)=1{}; complete(4)={}; grid(3,3)={} brute force {}",
                                       lines.empty() ? "" : " except" + lines, k4, g33, g33_brute)};
    });

    report(4, "simulator matches first-step analysis", [] {
        const Graph line2 = make_line(2);
        UniformPolicy uni(2.0);
        const double oracle = test_support::ctmc_mean_extinction(line2, [&](const Bag& b) { return uni.allocate(b); })[3];

        ExperimentConfig cfg;
        cfg.graph = "line:2";
        cfg.policy = PolicyKind::Uniform;
        cfg.budget = 2.0;
        cfg.replications = 100000;
        cfg.seed = 2024;
        const Summary s2 = estimate_extinction_time(cfg);

        cfg.graph = "line:1";
        cfg.seed = 2025;
        const Summary s1 = estimate_extinction_time(cfg);

        const bool ok = within_3_sigma(s2, oracle) && within_3_sigma(s1, 0.5) && s2.censored == 0 && s1.censored == 0;
        return Result{ok, fmt::format("line(2): mean {:.5f} vs oracle {:.5f} (3 se {:.5f}); single node: mean {:.5f} "
                                       "vs 0.5 (3 se {:.5f})",
                                       s2.mean, oracle, 3.0 * s2.standard_error(), s1.mean, 3.0 * s1.standard_error())};
    });

    ExperimentConfig line_cfg;
    line_cfg.graph = "line:16";
    line_cfg.budget = 128.0;
    line_cfg.replications = 20000;
    line_cfg.seed = 7;
    line_cfg.instrument = true;
    const ExperimentResult line_run = run_experiment(line_cfg);

    report(5, "long-excursion frequency and mean excursion length on line(16), r=128", [&] {
        const auto reps = verify_lemma2(line_run);
        const bool ok = line_run.excursion_bound == 8 && reps[0].verdict == Verdict::Pass &&
                        reps[1].verdict == Verdict::Pass;
        return Result{ok, fmt::format("K={}; long frequency {:.5f} +/- {:.5f} vs {:.5f}; mean length {:.5f} +/- {:.5f} "
                                       "vs {:.5f}; {} excursions",
                                       line_run.excursion_bound, reps[0].empirical.mean, reps[0].empirical.half_width,
                                       reps[0].bound, reps[1].empirical.mean, reps[1].empirical.half_width,
                                       reps[1].bound, reps[1].empirical.count)};
    });

    report(6, "mean waiting period on line(16), r=128", [&] {
        const BoundReport rep = verify_lemma3(line_run);
        return Result{rep.verdict == Verdict::Pass,
                       fmt::format("mean {:.5f} +/- {:.5f} vs {:.5f}; {} waiting periods", rep.empirical.mean,
                                   rep.empirical.half_width, rep.bound, rep.empirical.count)};
    });

    report(7, "mean extinction time under the CURE policy", [&] {
        const BoundReport line_rep = verify_theorem1(line_run);

        ExperimentConfig grid_cfg = line_cfg;
        grid_cfg.graph = "grid:4x4";
        const std::size_t w = cutwidth(make_grid(4, 4));
        grid_cfg.budget = std::max(4.0 * static_cast<double>(w), 16.0 * std::log2(16.0) * 4.0);
        check_theorem1_hypotheses(grid_cfg);
        const BoundReport grid_rep = verify_theorem1(run_experiment(grid_cfg));

        const bool ok = line_rep.verdict == Verdict::Pass && grid_rep.verdict == Verdict::Pass;
        return Result{ok, fmt::format("line(16) r=128: {:.5f} +/- {:.5f} vs {:.5f}; grid(4,4) r={:g}: {:.5f} +/- "
                                       "{:.5f} vs {:.5f}",
                                       line_rep.empirical.mean, line_rep.empirical.half_width, line_rep.bound,
                                       grid_cfg.budget, grid_rep.empirical.mean, grid_rep.empirical.half_width,
                                       grid_rep.bound)};
    });

    report(8, "mean extinction time from V is at least n/r for every policy", [] {
        bool ok = true;
        std::string detail;
        for (PolicyKind p : {PolicyKind::Cure, PolicyKind::Uniform, PolicyKind::Degree}) {
            ExperimentConfig cfg;
            cfg.graph = "line:8";
            cfg.budget = 64.0;
            cfg.policy = p;
            cfg.replications = 20000;
            cfg.seed = 8;
            const BoundReport rep = verify_corollary_lower_bound(run_experiment(cfg));
            ok = ok && rep.verdict == Verdict::Pass;
            detail += fmt::format("{}{} {:.5f} +/- {:.5f}", detail.empty() ? "" : "; ", to_string(p),
                                  rep.empirical.mean, rep.empirical.half_width);
            if (p == PolicyKind::Degree) detail += fmt::format(" (bound {:.5f})", rep.bound);
        }
        return Result{ok, detail};
    });

    report(9, "cut(I) <= r/2 at every excursion event", [&] {
        CureCounters total;
        for (const auto& rec : line_run.records) {
            total.excursion_events += rec.counters.excursion_events;
            total.rate_bound_violations += rec.counters.rate_bound_violations;
            total.detour_mismatches += rec.counters.detour_mismatches;
            total.path_mismatches += rec.counters.path_mismatches;
        }
        const bool ok = total.excursion_events > 0 && total.rate_bound_violations == 0 &&
                        total.detour_mismatches == 0 && total.path_mismatches == 0;
        return Result{ok, fmt::format("{} excursion events checked, {} violations, {} detour and {} path mismatches",
                                       total.excursion_events, total.rate_bound_violations, total.detour_mismatches,
                                       total.path_mismatches)};
    });

    report(10, "repeated verify runs write identical CSV files", [] {
        const auto dir = std::filesystem::temp_directory_path() / "epicure_acceptance";
        std::filesystem::create_directories(dir);
        std::vector<std::string> csvs;
        std::vector<int> codes;
        for (const char* name : {"first.csv", "second.csv"}) {
            const auto path = dir / name;
            std::ostringstream out;
            std::ostringstream err;
            codes.push_back(run_cli({"verify", "theorem1", "--graph", "line:16", "--budget", "128", "--reps", "20000",
                                     "--seed", "7", "--out", path.string()},
                                    out, err));
            csvs.push_back(slurp(path));
        }
        const bool ok = codes[0] == 0 && codes[1] == 0 && !csvs[0].empty() && csvs[0] == csvs[1];
        return Result{ok, fmt::format("exit codes {} and {}, {} bytes, {}", codes[0], codes[1], csvs[0].size(),
                                       csvs[0] == csvs[1] ? "identical" : "different")};
    });

    std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "epicure/cure_policy.hpp"
#include "epicure/sim.hpp"

using namespace epicure;

namespace {

/// Hands out a fixed path whatever the bag, for driving the state machine by hand.
class FixedPathProvider final : public CrusadeProvider {
public:
    explicit FixedPathProvider(std::vector<NodeId> order) : order_(std::move(order)) {}
    Crusade target_path(const Bag& b) const override { return restrict_crusade(order_, b); }
    std::size_t cutwidth() const override { return 1; }
    bool exact() const override { return false; }

private:
    std::vector<NodeId> order_;
};

Event infection(NodeId v) { return {EventKind::Infection, v, 0.0}; }
Event cure(NodeId v) { return {EventKind::Cure, v, 0.0}; }

}  // namespace

TEST_CASE("config thresholds") {
    const Graph line = make_line(16);
    const CureConfig cfg = make_cure_config(line, 128.0, 1);
    CHECK(cfg.waiting_threshold == 16.0);
    CHECK(cfg.excursion_bound == 8);
    CHECK(cfg.warnings.empty());

    // r / (8 Delta) = 100 / 16 = 6.25 rounds up
    CHECK(make_cure_config(line, 100.0, 1).excursion_bound == 7);

    const CureConfig low = make_cure_config(make_grid(3, 3), 8.0, 4);
    CHECK(low.excursion_bound == 1);
    CHECK(low.warnings.size() == 2);

    CHECK(make_cure_config(make_line(1), 2.0, 0).excursion_bound == 2);
    CHECK_THROWS_AS(make_cure_config(line, 0.0, 1), std::invalid_argument);
}

TEST_CASE("allocation per phase") {
    const Graph g = make_line(4);
    const CureConfig cfg = make_cure_config(g, 64.0, 1);
    const FixedPathProvider provider({3, 2, 1, 0});

    CureState waiting;
    waiting.phase = Waiting{};
    CHECK(allocate(cfg, waiting, Bag::full(4)).total() == 0.0);

    CureState path = cure_policy_new(cfg, g, Bag::full(4), provider);
    REQUIRE(std::holds_alternative<PathFollowing>(path.phase));
    const Allocation a = allocate(cfg, path, Bag::full(4));
    REQUIRE(a.rates.size() == 1);
    CHECK(a.rates[0].first == 3);
    CHECK(a.rates[0].second == 64.0);

    CureState ex;
    ex.phase = Excursion{Bag(8), Bag(8, {5, 7}), 0};
    const Allocation b = allocate(cfg, ex, Bag(8, {5, 7}));
    CHECK(b.rates == std::vector<std::pair<NodeId, double>>{{5, 64.0}});

    CureState bad;
    bad.phase = Excursion{Bag(8), Bag(8), 0};
    CHECK_THROWS_AS(allocate(cfg, bad, Bag(8)), std::logic_error);
    CHECK_THROWS_AS(allocate(cfg, path, Bag(4, {0, 1})), std::logic_error);
}

TEST_CASE("cure_policy_new starts in waiting or on the path") {
    const Graph g = make_grid(3, 3);
    const ExactCrusadeProvider provider(g);
    // r/8 = 1; the centre alone has cut 4
    const CureConfig cfg = make_cure_config(g, 8.0, provider.cutwidth());
    const CureState busy = cure_policy_new(cfg, g, Bag(9, {4}), provider);
    CHECK(std::holds_alternative<Waiting>(busy.phase));
    CHECK(busy.counters.attempts == 1);

    const CureState quiet = cure_policy_new(cfg, g, Bag::full(9), provider);
    CHECK(std::holds_alternative<PathFollowing>(quiet.phase));
    CHECK(quiet.target.start == Bag::full(9));

    const CureState none = cure_policy_new(cfg, g, Bag(9), provider);
    CHECK(none.counters.attempts == 0);
}

TEST_CASE("waiting ends once the cut drops to r/8") {
    const Graph g = make_line(6);
    const FixedPathProvider provider({0, 1, 2, 3, 4, 5});
    // r = 8: threshold 1
    const CureConfig cfg = make_cure_config(g, 8.0, 1);
    CureState st = cure_policy_new(cfg, g, Bag(6, {1, 3}), provider);
    REQUIRE(std::holds_alternative<Waiting>(st.phase));

    on_event(cfg, g, st, infection(2), Bag(6, {1, 2, 3}), provider);
    CHECK(std::holds_alternative<Waiting>(st.phase));
    on_event(cfg, g, st, infection(0), Bag(6, {0, 1, 2, 3}), provider);
    REQUIRE(std::holds_alternative<PathFollowing>(st.phase));
    CHECK(st.target.start == Bag(6, {0, 1, 2, 3}));
    CHECK(st.target.removal_order == std::vector<NodeId>{0, 1, 2, 3});
    CHECK_THROWS_AS(on_event(cfg, g, st, cure(3), Bag(6, {0, 1, 2}), provider), std::logic_error);
}

TEST_CASE("path-following, excursion entry and a short excursion") {
    const Graph g = make_line(6);
    const FixedPathProvider provider({0, 1, 2, 3, 4, 5});
    const CureConfig cfg = make_cure_config(g, 64.0, 1, true);  // K = 4
    REQUIRE(cfg.excursion_bound == 4);

    CureState st = cure_policy_new(cfg, g, Bag(6, {0, 1}), provider);
    REQUIRE(std::holds_alternative<PathFollowing>(st.phase));

    // curing v1 = 0 when node 2 gets infected
    on_event(cfg, g, st, infection(2), Bag(6, {0, 1, 2}), provider);
    REQUIRE(std::holds_alternative<Excursion>(st.phase));
    const auto& ex = std::get<Excursion>(st.phase);
    CHECK(ex.target == Bag(6, {1}));
    CHECK(ex.detour == Bag(6, {0, 2}));
    CHECK(st.counters.excursions == 1);

    CHECK(allocate(cfg, st, Bag(6, {0, 1, 2})).rates[0].first == 0);
    on_event(cfg, g, st, cure(0), Bag(6, {1, 2}), provider);
    REQUIRE(std::holds_alternative<Excursion>(st.phase));
    on_event(cfg, g, st, cure(2), Bag(6, {1}), provider);
    REQUIRE(std::holds_alternative<PathFollowing>(st.phase));
    CHECK(std::get<PathFollowing>(st.phase).position == 1);
    CHECK(st.counters.segments == 2);
    CHECK(allocate(cfg, st, Bag(6, {1})).rates[0].first == 1);

    on_event(cfg, g, st, cure(1), Bag(6), provider);
    CHECK(st.counters.long_excursions == 0);
    CHECK(st.counters.detour_mismatches == 0);
    CHECK(st.counters.path_mismatches == 0);
}

TEST_CASE("a long excursion fails the attempt") {
    const Graph g = make_line(8);
    const FixedPathProvider provider({0, 1, 2, 3, 4, 5, 6, 7});
    CureConfig cfg = make_cure_config(g, 32.0, 1);  // K = 2, threshold 4
    REQUIRE(cfg.excursion_bound == 2);

    CureState st = cure_policy_new(cfg, g, Bag(8, {0, 1}), provider);
    REQUIRE(std::holds_alternative<PathFollowing>(st.phase));
    // D starts at 2 = K: long immediately, new attempt, waiting resolves at once
    on_event(cfg, g, st, infection(2), Bag(8, {0, 1, 2}), provider);
    CHECK(st.counters.long_excursions == 1);
    CHECK(st.counters.attempts == 2);
    REQUIRE(std::holds_alternative<PathFollowing>(st.phase));
    CHECK(st.target.start == Bag(8, {0, 1, 2}));

    cfg = make_cure_config(g, 48.0, 1);  // K = 3
    st = cure_policy_new(cfg, g, Bag(8, {0, 1}), provider);
    on_event(cfg, g, st, infection(2), Bag(8, {0, 1, 2}), provider);
    REQUIRE(std::holds_alternative<Excursion>(st.phase));
    on_event(cfg, g, st, infection(3), Bag(8, {0, 1, 2, 3}), provider);
    CHECK(st.counters.long_excursions == 1);
    CHECK(st.counters.attempts == 2);
    CHECK_FALSE(std::holds_alternative<Excursion>(st.phase));
}

TEST_CASE("the adapter emits one phase mark per phase entry") {
    const Graph g = make_line(8);
    const ExactCrusadeProvider provider(g);
    CurePolicy policy(g, make_cure_config(g, 64.0, provider.cutwidth(), true), provider);
    RngStream rng(3, 0);
    const Trace t = run(g, policy, Bag::full(8), 64.0, rng);
    REQUIRE(t.extinct());
    REQUIRE(!t.marks.empty());
    CHECK(t.marks.front().tag.label == "waiting");
    CHECK(t.marks.front().time == 0.0);
    for (std::size_t i = 1; i < t.marks.size(); ++i) {
        CHECK(t.marks[i].time >= t.marks[i - 1].time);
        CHECK(t.marks[i].tag.serial == t.marks[i - 1].tag.serial + 1);
    }
}

TEST_CASE("policy invariants over many simulated runs") {
    struct Case {
        Graph g;
        double r;
        bool exact;
    };
    std::vector<Case> cases;
    cases.push_back({make_line(12), 64.0, true});
    cases.push_back({make_grid(3, 3), 64.0, true});
    cases.push_back({make_line(40), 96.0, false});
    cases.push_back({make_grid(3, 4), 24.0, true});  // below the analysed regime

    for (const Case& c : cases) {
        std::unique_ptr<CrusadeProvider> provider;
        if (c.exact) {
            provider = std::make_unique<ExactCrusadeProvider>(c.g);
        } else {
            std::vector<NodeId> order(c.g.node_count());
            for (NodeId i = 0; i < order.size(); ++i) order[i] = i;
            provider = std::make_unique<RestrictedCrusadeProvider>(c.g, order);
        }
        const CureConfig cfg = make_cure_config(c.g, c.r, provider->cutwidth(), true);
        const bool analysed = c.r >= 4.0 * static_cast<double>(provider->cutwidth());

        for (std::uint64_t i = 0; i < 300; ++i) {
            CureState st;
            RngStream rng(41, i);
            const Bag initial = c.g.all_nodes();
            Trace trace;
            SimState sim{0.0, initial, 0};
            PhaseLog log(trace, sim);
            st = cure_policy_new(cfg, c.g, initial, *provider, &log);
            int steps = 0;
            while (!sim.infected.empty() && steps++ < 200000) {
                const Allocation a = allocate(cfg, st, sim.infected);
                if (std::holds_alternative<Waiting>(st.phase)) {
                    REQUIRE(a.total() == 0.0);
                } else {
                    REQUIRE(a.rates.size() == 1);
                    REQUIRE(a.rates[0].second == c.r);
                }
                if (auto* ex = std::get_if<Excursion>(&st.phase)) {
                    REQUIRE(ex->detour.size() >= 1);
                    REQUIRE(ex->detour.size() < cfg.excursion_bound);
                    REQUIRE(sim.infected.set_difference(ex->target) == ex->detour);
                }
                auto next = step(c.g, sim, a, c.r, rng);
                REQUIRE(next);
                sim = next->state;
                on_event(cfg, c.g, st, next->event, sim.infected, *provider, &log);
            }
            REQUIRE(sim.infected.empty());
            CHECK(st.counters.detour_mismatches == 0);
            CHECK(st.counters.path_mismatches == 0);
            if (analysed) CHECK(st.counters.rate_bound_violations == 0);
        }
    }
}

TEST_CASE("restricted target paths respect cut(C) <= cut(B) + W") {
    const Graph g = make_line(50);
    std::vector<NodeId> order(50);
    for (NodeId i = 0; i < 50; ++i) order[i] = 49 - i;
    const RestrictedCrusadeProvider provider(g, order);
    CHECK(provider.cutwidth() == 1);
    RngStream rng(5, 0);
    for (int k = 0; k < 200; ++k) {
        Bag b(50);
        for (NodeId v = 0; v < 50; ++v)
            if (rng.uniform() < 0.3) b.insert(v);
        const Crusade path = provider.target_path(b);
        for (std::size_t i = 0; i <= path.steps(); ++i) CHECK(cut(g, path.bag_at(i)) <= cut(g, b) + 1);
    }
}

TEST_CASE("baselines") {
    const Graph line = make_line(4);
    const UniformPolicy uni(6.0);
    const Allocation u = uni.allocate(Bag(4, {1, 3}));
    CHECK(u.rates == std::vector<std::pair<NodeId, double>>{{1, 3.0}, {3, 3.0}});

    const DegreeProportionalPolicy deg(line, 6.0);
    const Allocation d = deg.allocate(Bag(4, {0, 1}));
    REQUIRE(d.rates.size() == 2);
    CHECK(d.rates[0].second == doctest::Approx(2.0));
    CHECK(d.rates[1].second == doctest::Approx(4.0));

    CHECK(NoCuringPolicy{}.allocate(Bag::full(4)).total() == 0.0);
    CHECK(uni.allocate(Bag(4)).rates.empty());
}

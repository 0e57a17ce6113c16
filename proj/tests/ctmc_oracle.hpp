#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "epicure/graph.hpp"
#include "epicure/sim.hpp"

namespace test_support {

/// Mean extinction time from every bag of a small graph under a stationary
/// (state-only) allocation rule, by first-step analysis: for S != empty,
///   R(S) T(S) - sum_{S'} q(S, S') T(S') = 1,   T(empty) = 0.
/// Returns T indexed by bag key. Independent of the event-driven simulator.
inline std::vector<double> ctmc_mean_extinction(const epicure::Graph& g,
                                                const std::function<epicure::Allocation(const epicure::Bag&)>& rule,
                                                double beta = 1.0) {
    using epicure::Bag;
    const std::size_t n = g.node_count();
    if (n > 12) throw std::invalid_argument("CTMC oracle limited to 12 nodes");
    const std::size_t states = std::size_t{1} << n;
    const auto m = static_cast<Eigen::Index>(states - 1);  // key k -> row k - 1
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(m);

    for (std::uint64_t key = 1; key < states; ++key) {
        const auto row = static_cast<Eigen::Index>(key - 1);
        double out_rate = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            const std::uint64_t bit = std::uint64_t{1} << v;
            if ((key & bit) != 0) continue;
            const auto infected_nbrs = __builtin_popcountll(g.neighbor_mask(static_cast<epicure::NodeId>(v)) & key);
            if (infected_nbrs == 0) continue;
            const double q = beta * infected_nbrs;
            out_rate += q;
            a(row, static_cast<Eigen::Index>((key | bit) - 1)) -= q;
        }
        const epicure::Allocation alloc = rule(Bag::from_key(n, key));
        for (const auto& [v, rate] : alloc.rates) {
            if (rate <= 0.0) continue;
            out_rate += rate;
            const std::uint64_t next = key & ~(std::uint64_t{1} << v);
            if (next != 0) a(row, static_cast<Eigen::Index>(next - 1)) -= rate;
        }
        a(row, row) += out_rate;
    }
    const Eigen::VectorXd t = a.fullPivLu().solve(b);
    std::vector<double> out(states, 0.0);
    for (std::uint64_t key = 1; key < states; ++key) out[key] = t(static_cast<Eigen::Index>(key - 1));
    return out;
}

}  // namespace test_support

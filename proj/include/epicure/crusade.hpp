#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "epicure/graph.hpp"

namespace epicure {

/// A monotone crusade: starting from `start`, nodes are removed one at a time
/// in `removal_order`. A full crusade removes every node of `start` and ends
/// at the empty bag; a shorter order describes a partial crusade ending at
/// `end_bag()`.
struct Crusade {
    Bag start;
    std::vector<NodeId> removal_order;

    std::size_t steps() const { return removal_order.size(); }
    bool is_full() const { return removal_order.size() == start.size(); }

    /// Bag after `i` removals; bag_at(0) == start.
    Bag bag_at(std::size_t i) const;
    Bag end_bag() const { return bag_at(removal_order.size()); }

    /// Throws std::invalid_argument on duplicate or non-member nodes.
    void validate() const;
};

/// Largest cut over every bag of the crusade, start bag included.
std::size_t width(const Graph& g, const Crusade& cr);

/// Width of the full crusade from V that removes nodes in `order_v`.
std::size_t ordering_width(const Graph& g, const std::vector<NodeId>& order_v);

/// Memoized impedance values for one graph (n <= 30).
///
/// Filled top-down from whatever bag is queried; only subsets of queried bags
/// are ever computed. Each entry records the removal that attains the
/// minimum, smallest node index on ties. Once filled the const interface is
/// safe to share between threads. The table keeps a reference to the graph.
class ImpedanceTable {
public:
    explicit ImpedanceTable(const Graph& g);

    const Graph& graph() const { return *graph_; }

    /// delta(A) = max{cut(A), min_v delta(A - v)}, delta(empty) = 0.
    std::size_t impedance(const Bag& a);

    std::optional<std::size_t> lookup(const Bag& a) const;

    /// Removal chosen at `a`; `a` must be filled and nonempty.
    NodeId witness(const Bag& a) const;

    /// Follows witnesses from `a` down to the empty bag. Every subset of a
    /// previously queried bag is available.
    Crusade optimal_crusade(const Bag& a) const;

    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        std::uint16_t delta;
        std::uint8_t witness;
    };

    std::size_t fill(std::uint64_t key);
    const Entry& entry(const Bag& a) const;

    const Graph* graph_;
    std::unordered_map<std::uint64_t, Entry> entries_;
};

/// Throws std::invalid_argument if `table` was built for a different graph.
std::size_t impedance(const Graph& g, const Bag& a, ImpedanceTable& table);

/// CutWidth of g: the impedance of the full node set.
std::size_t cutwidth(const Graph& g);

Crusade optimal_crusade(const Graph& g, const Bag& a);

/// Crusade from `a` to the empty bag that removes a's nodes in the relative
/// order they appear in `order_v`, a permutation of V.
Crusade restrict_crusade(const std::vector<NodeId>& order_v, const Bag& a);

/// Minimum width over all |a|! removal orders. Independent of
/// ImpedanceTable; limited to |a| <= 9.
std::size_t brute_force_impedance(const Graph& g, const Bag& a);

inline constexpr std::size_t kBruteForceMaxBag = 9;

std::string format_ordering(const std::vector<NodeId>& order);

}  // namespace epicure

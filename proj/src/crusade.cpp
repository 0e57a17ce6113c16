#include "epicure/crusade.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace epicure {

Bag Crusade::bag_at(std::size_t i) const {
    if (i > removal_order.size()) throw std::out_of_range("crusade index past its last bag");
    Bag b = start;
    for (std::size_t k = 0; k < i; ++k) b.erase(removal_order[k]);
    return b;
}

void Crusade::validate() const {
    if (removal_order.size() > start.size()) throw std::invalid_argument("crusade removes more nodes than its start bag holds");
    Bag remaining = start;
    for (NodeId v : removal_order) {
        if (!remaining.contains(v)) {
            throw std::invalid_argument(fmt::format("crusade removes node {} which is not in the current bag", v));
        }
        remaining.erase(v);
    }
}

std::size_t width(const Graph& g, const Crusade& cr) {
    cr.validate();
    Bag b = cr.start;
    std::size_t w = cut(g, b);
    for (NodeId v : cr.removal_order) {
        b.erase(v);
        w = std::max(w, cut(g, b));
    }
    return w;
}

namespace {

void require_permutation(const std::vector<NodeId>& order, std::size_t n) {
    if (order.size() != n) throw std::invalid_argument(fmt::format("ordering has {} entries, expected {}", order.size(), n));
    std::vector<char> seen(n, 0);
    for (NodeId v : order) {
        if (v >= n || seen[v]) throw std::invalid_argument("ordering is not a permutation of the node set");
        seen[v] = 1;
    }
}

}  // namespace

std::size_t ordering_width(const Graph& g, const std::vector<NodeId>& order_v) {
    require_permutation(order_v, g.node_count());
    return width(g, Crusade{g.all_nodes(), order_v});
}

ImpedanceTable::ImpedanceTable(const Graph& g) : graph_(&g) {
    if (g.node_count() > kExactModeMaxNodes) {
        throw std::invalid_argument(fmt::format("exact impedance needs n <= {} (graph has {} nodes)", kExactModeMaxNodes,
                                                g.node_count()));
    }
    entries_.emplace(0, Entry{0, 0});
}

std::size_t ImpedanceTable::fill(std::uint64_t key) {
    if (auto it = entries_.find(key); it != entries_.end()) return it->second.delta;

    const Graph& g = *graph_;
    std::size_t boundary = 0;
    for (std::uint64_t bits = key; bits != 0; bits &= bits - 1) {
        const int v = __builtin_ctzll(bits);
        boundary += static_cast<std::size_t>(__builtin_popcountll(g.neighbor_mask(static_cast<NodeId>(v)) & ~key));
    }

    std::size_t best = std::numeric_limits<std::size_t>::max();
    int best_node = -1;
    for (std::uint64_t bits = key; bits != 0; bits &= bits - 1) {
        const int v = __builtin_ctzll(bits);
        const std::size_t child = fill(key & ~(std::uint64_t{1} << v));
        if (child < best) {
            best = child;
            best_node = v;
        }
    }
    const std::size_t delta = std::max(boundary, best);
    entries_.emplace(key, Entry{static_cast<std::uint16_t>(delta), static_cast<std::uint8_t>(best_node)});
    return delta;
}

std::size_t ImpedanceTable::impedance(const Bag& a) {
    if (a.universe() != graph_->node_count()) throw std::invalid_argument("bag and graph sizes differ");
    return fill(a.key());
}

std::optional<std::size_t> ImpedanceTable::lookup(const Bag& a) const {
    if (auto it = entries_.find(a.key()); it != entries_.end()) return it->second.delta;
    return std::nullopt;
}

const ImpedanceTable::Entry& ImpedanceTable::entry(const Bag& a) const {
    auto it = entries_.find(a.key());
    if (it == entries_.end()) throw std::logic_error(fmt::format("impedance of {} has not been computed", a.to_string()));
    return it->second;
}

NodeId ImpedanceTable::witness(const Bag& a) const {
    if (a.empty()) throw std::logic_error("the empty bag has no removal witness");
    return entry(a).witness;
}

Crusade ImpedanceTable::optimal_crusade(const Bag& a) const {
    Crusade cr{a, {}};
    cr.removal_order.reserve(a.size());
    Bag b = a;
    while (!b.empty()) {
        const NodeId v = witness(b);
        cr.removal_order.push_back(v);
        b.erase(v);
    }
    return cr;
}

std::size_t impedance(const Graph& g, const Bag& a, ImpedanceTable& table) {
    if (&table.graph() != &g) throw std::invalid_argument("impedance table belongs to a different graph");
    return table.impedance(a);
}

std::size_t cutwidth(const Graph& g) {
    ImpedanceTable table(g);
    return table.impedance(g.all_nodes());
}

Crusade optimal_crusade(const Graph& g, const Bag& a) {
    ImpedanceTable table(g);
    table.impedance(a);
    return table.optimal_crusade(a);
}

Crusade restrict_crusade(const std::vector<NodeId>& order_v, const Bag& a) {
    require_permutation(order_v, a.universe());
    Crusade cr{a, {}};
    cr.removal_order.reserve(a.size());
    for (NodeId v : order_v)
        if (a.contains(v)) cr.removal_order.push_back(v);
    return cr;
}

std::size_t brute_force_impedance(const Graph& g, const Bag& a) {
    if (a.size() > kBruteForceMaxBag) {
        throw std::invalid_argument(fmt::format("brute force limited to bags of at most {} nodes", kBruteForceMaxBag));
    }
    std::vector<NodeId> order = a.members();
    const std::size_t start_cut = cut(g, a);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    do {
        Bag b = a;
        std::size_t w = start_cut;
        for (NodeId v : order) {
            if (w >= best) break;
            b.erase(v);
            w = std::max(w, cut(g, b));
        }
        best = std::min(best, w);
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

std::string format_ordering(const std::vector<NodeId>& order) {
    return fmt::format("{}", fmt::join(order, " "));
}

}  // namespace epicure

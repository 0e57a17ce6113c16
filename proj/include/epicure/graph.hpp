#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epicure {

using NodeId = std::uint32_t;

/// Largest node count for which bags carry a packed bitmask key and the
/// exact impedance machinery is available.
inline constexpr std::size_t kExactModeMaxNodes = 30;

/// A subset of the node set of a graph with `n` nodes.
///
/// Stored as a packed bitset so membership is O(1) and iteration visits
/// members in increasing index order. For n <= 30 the whole bag fits in a
/// single word and `key()` returns it, which is what memo tables index by.
class Bag {
public:
    Bag() = default;
    explicit Bag(std::size_t n);
    Bag(std::size_t n, std::initializer_list<NodeId> members);

    static Bag full(std::size_t n);
    static Bag from_nodes(std::size_t n, const std::vector<NodeId>& members);
    static Bag from_key(std::size_t n, std::uint64_t key);

    std::size_t universe() const { return n_; }
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    bool contains(NodeId v) const {
        return v < n_ && ((words_[v >> 6] >> (v & 63)) & 1u) != 0;
    }
    void insert(NodeId v);
    void erase(NodeId v);

    /// Packed key; throws std::logic_error when universe() > 30.
    std::uint64_t key() const;

    /// First 64 membership bits.
    std::uint64_t low_word() const { return words_.empty() ? 0 : words_[0]; }

    std::vector<NodeId> members() const;
    NodeId lowest() const;

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                const int b = __builtin_ctzll(bits);
                f(static_cast<NodeId>(w * 64 + static_cast<std::size_t>(b)));
                bits &= bits - 1;
            }
        }
    }

    Bag set_union(const Bag& other) const;
    Bag set_difference(const Bag& other) const;
    Bag complement() const;
    bool is_subset_of(const Bag& other) const;

    friend bool operator==(const Bag& a, const Bag& b) {
        return a.n_ == b.n_ && a.words_ == b.words_;
    }

    std::string to_string() const;

private:
    void check_same_universe(const Bag& other) const;

    std::size_t n_ = 0;
    std::size_t count_ = 0;
    std::vector<std::uint64_t> words_;
};

struct Edge {
    NodeId u;
    NodeId v;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable simple undirected graph.
class Graph {
public:
    /// Builds from an edge list. Duplicates (in either orientation) are
    /// dropped; self-loops and out-of-range endpoints throw.
    Graph(std::size_t n, const std::vector<Edge>& edges);

    std::size_t node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t max_degree() const { return max_degree_; }
    std::size_t degree(NodeId v) const { return adjacency_[v].size(); }

    /// Edges with u < v, sorted lexicographically.
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_[v]; }

    /// Neighbor bitmask; only valid when node_count() <= 64.
    std::uint64_t neighbor_mask(NodeId v) const { return masks_[v]; }
    bool has_masks() const { return !masks_.empty(); }

    bool is_connected() const;
    Bag all_nodes() const { return Bag::full(n_); }

private:
    std::size_t n_;
    std::size_t max_degree_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<std::uint64_t> masks_;
};

/// Parses the edge-list text format: header "n m", then m lines "u v".
/// Blank lines and lines starting with '#' are ignored. Errors carry the
/// 1-based line number. A disconnected graph triggers a warning on stderr
/// unless `require_connected` is set, in which case it throws.
Graph load_graph(std::string_view text, bool require_connected = false);
Graph load_graph_file(const std::string& path, bool require_connected = false);
std::string to_edge_list(const Graph& g);

Graph make_line(std::size_t n);
Graph make_grid(std::size_t rows, std::size_t cols);
Graph make_complete(std::size_t n);
Graph make_cycle(std::size_t n);
Graph make_star(std::size_t n);

/// Number of edges with exactly one endpoint in `a`.
std::size_t cut(const Graph& g, const Bag& a);

/// Every edge leaving `a`, oriented (inside, outside), ordered by the inside
/// endpoint and then by adjacency order.
std::vector<Edge> boundary_edges(const Graph& g, const Bag& a);

/// Parses whitespace-separated node indices.
std::vector<NodeId> parse_node_list(std::string_view text);

}  // namespace epicure

#include "epicure/graph.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace epicure {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

}  // namespace

Bag::Bag(std::size_t n) : n_(n), words_(word_count(n), 0) {}

Bag::Bag(std::size_t n, std::initializer_list<NodeId> members) : Bag(n) {
    for (NodeId v : members) insert(v);
}

Bag Bag::full(std::size_t n) {
    Bag b(n);
    for (std::size_t w = 0; w < b.words_.size(); ++w) b.words_[w] = ~std::uint64_t{0};
    if (n % 64 != 0) b.words_.back() = (std::uint64_t{1} << (n % 64)) - 1;
    b.count_ = n;
    return b;
}

Bag Bag::from_nodes(std::size_t n, const std::vector<NodeId>& members) {
    Bag b(n);
    for (NodeId v : members) b.insert(v);
    return b;
}

Bag Bag::from_key(std::size_t n, std::uint64_t key) {
    if (n > kExactModeMaxNodes) throw std::logic_error("bag keys exist only for n <= 30");
    if (n < 64 && (key >> n) != 0) throw std::out_of_range("bag key has bits outside the universe");
    Bag b(n);
    if (!b.words_.empty()) b.words_[0] = key;
    b.count_ = static_cast<std::size_t>(__builtin_popcountll(key));
    return b;
}

void Bag::insert(NodeId v) {
    if (v >= n_) throw std::out_of_range(fmt::format("node {} outside universe of {} nodes", v, n_));
    std::uint64_t& w = words_[v >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (v & 63);
    if ((w & bit) == 0) {
        w |= bit;
        ++count_;
    }
}

void Bag::erase(NodeId v) {
    if (v >= n_) throw std::out_of_range(fmt::format("node {} outside universe of {} nodes", v, n_));
    std::uint64_t& w = words_[v >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (v & 63);
    if ((w & bit) != 0) {
        w &= ~bit;
        --count_;
    }
}

std::uint64_t Bag::key() const {
    if (n_ > kExactModeMaxNodes) {
        throw std::logic_error(fmt::format("bag over {} nodes has no packed key (limit {})", n_, kExactModeMaxNodes));
    }
    return words_.empty() ? 0 : words_[0];
}

std::vector<NodeId> Bag::members() const {
    std::vector<NodeId> out;
    out.reserve(count_);
    for_each([&](NodeId v) { out.push_back(v); });
    return out;
}

NodeId Bag::lowest() const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if (words_[w] != 0) return static_cast<NodeId>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(words_[w])));
    }
    throw std::logic_error("lowest() on empty bag");
}

void Bag::check_same_universe(const Bag& other) const {
    if (n_ != other.n_) throw std::invalid_argument("bags over different node sets");
}

Bag Bag::set_union(const Bag& other) const {
    check_same_universe(other);
    Bag out(n_);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        out.words_[w] = words_[w] | other.words_[w];
        out.count_ += static_cast<std::size_t>(__builtin_popcountll(out.words_[w]));
    }
    return out;
}

Bag Bag::set_difference(const Bag& other) const {
    check_same_universe(other);
    Bag out(n_);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        out.words_[w] = words_[w] & ~other.words_[w];
        out.count_ += static_cast<std::size_t>(__builtin_popcountll(out.words_[w]));
    }
    return out;
}

Bag Bag::complement() const { return full(n_).set_difference(*this); }

bool Bag::is_subset_of(const Bag& other) const {
    check_same_universe(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if ((words_[w] & ~other.words_[w]) != 0) return false;
    }
    return true;
}

std::string Bag::to_string() const {
    std::string out = "{";
    bool first = true;
    for_each([&](NodeId v) {
        if (!first) out += ",";
        out += std::to_string(v);
        first = false;
    });
    return out + "}";
}

Graph::Graph(std::size_t n, const std::vector<Edge>& edges) : n_(n), adjacency_(n) {
    edges_.reserve(edges.size());
    for (const Edge& e : edges) {
        if (e.u >= n || e.v >= n) {
            throw std::out_of_range(fmt::format("edge ({}, {}) references a node outside [0, {})", e.u, e.v, n));
        }
        if (e.u == e.v) throw std::invalid_argument(fmt::format("self-loop at node {}", e.u));
        edges_.push_back(Edge{std::min(e.u, e.v), std::max(e.u, e.v)});
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    for (const Edge& e : edges_) {
        adjacency_[e.u].push_back(e.v);
        adjacency_[e.v].push_back(e.u);
    }
    for (auto& adj : adjacency_) {
        std::sort(adj.begin(), adj.end());
        max_degree_ = std::max(max_degree_, adj.size());
    }
    if (n <= 64) {
        masks_.assign(n, 0);
        for (const Edge& e : edges_) {
            masks_[e.u] |= std::uint64_t{1} << e.v;
            masks_[e.v] |= std::uint64_t{1} << e.u;
        }
    }
}

bool Graph::is_connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(n_, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : adjacency_[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    return reached == n_;
}

namespace {

bool skippable(std::string_view line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string_view::npos || line[pos] == '#';
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
    throw std::runtime_error(fmt::format("edge list line {}: {}", line_no, what));
}

}  // namespace

Graph load_graph(std::string_view text, bool require_connected) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    long long n = 0;
    long long m = 0;
    std::vector<Edge> edges;

    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        std::istringstream fields(line);
        long long a = 0;
        long long b = 0;
        std::string extra;
        if (!(fields >> a >> b) || (fields >> extra)) {
            parse_error(line_no, have_header ? "expected \"u v\"" : "expected header \"n m\"");
        }
        if (!have_header) {
            if (a < 1 || b < 0) parse_error(line_no, "header needs n >= 1 and m >= 0");
            n = a;
            m = b;
            have_header = true;
            edges.reserve(static_cast<std::size_t>(m));
            continue;
        }
        if (static_cast<long long>(edges.size()) == m) parse_error(line_no, fmt::format("more than the declared {} edges", m));
        if (a < 0 || b < 0 || a >= n || b >= n) {
            parse_error(line_no, fmt::format("node out of range [0, {}) in edge ({}, {})", n, a, b));
        }
        if (a == b) parse_error(line_no, fmt::format("self-loop at node {}", a));
        edges.push_back(Edge{static_cast<NodeId>(a), static_cast<NodeId>(b)});
    }
    if (!have_header) parse_error(line_no + 1, "missing header \"n m\"");
    if (static_cast<long long>(edges.size()) != m) {
        parse_error(line_no, fmt::format("declared {} edges but found {}", m, edges.size()));
    }

    Graph g(static_cast<std::size_t>(n), edges);
    if (!g.is_connected()) {
        if (require_connected) throw std::runtime_error("graph is not connected");
        std::cerr << "warning: graph is not connected\n";
    }
    return g;
}

Graph load_graph_file(const std::string& path, bool require_connected) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open graph file '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return load_graph(buf.str(), require_connected);
}

std::string to_edge_list(const Graph& g) {
    std::string out = fmt::format("{} {}\n", g.node_count(), g.edge_count());
    for (const Edge& e : g.edges()) out += fmt::format("{} {}\n", e.u, e.v);
    return out;
}

Graph make_line(std::size_t n) {
    if (n == 0) throw std::invalid_argument("line graph needs at least one node");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1)});
    return Graph(n, edges);
}

Graph make_grid(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("grid graph needs rows, cols >= 1");
    std::vector<Edge> edges;
    auto id = [cols](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * cols + c); };
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1)});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c)});
        }
    }
    return Graph(rows * cols, edges);
}

Graph make_complete(std::size_t n) {
    if (n == 0) throw std::invalid_argument("complete graph needs at least one node");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    return Graph(n, edges);
}

Graph make_cycle(std::size_t n) {
    if (n < 3) return make_line(n);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n)});
    return Graph(n, edges);
}

Graph make_star(std::size_t n) {
    if (n == 0) throw std::invalid_argument("star graph needs at least one node");
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < n; ++i) edges.push_back({0, static_cast<NodeId>(i)});
    return Graph(n, edges);
}

std::size_t cut(const Graph& g, const Bag& a) {
    if (a.universe() != g.node_count()) throw std::invalid_argument("bag and graph sizes differ");
    std::size_t total = 0;
    if (g.has_masks()) {
        const std::uint64_t mask = a.low_word();
        a.for_each([&](NodeId v) { total += static_cast<std::size_t>(__builtin_popcountll(g.neighbor_mask(v) & ~mask)); });
        return total;
    }
    a.for_each([&](NodeId v) {
        for (NodeId w : g.neighbors(v))
            if (!a.contains(w)) ++total;
    });
    return total;
}

std::vector<Edge> boundary_edges(const Graph& g, const Bag& a) {
    if (a.universe() != g.node_count()) throw std::invalid_argument("bag and graph sizes differ");
    std::vector<Edge> out;
    a.for_each([&](NodeId v) {
        for (NodeId w : g.neighbors(v))
            if (!a.contains(w)) out.push_back({v, w});
    });
    return out;
}

std::vector<NodeId> parse_node_list(std::string_view text) {
    std::string copy(text);
    for (char& c : copy)
        if (c == ',') c = ' ';
    std::istringstream in(copy);
    std::vector<NodeId> out;
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        long long v = -1;
        try {
            v = std::stoll(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size() || v < 0) throw std::invalid_argument(fmt::format("bad node index '{}'", tok));
        out.push_back(static_cast<NodeId>(v));
    }
    return out;
}

}  // namespace epicure

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "analysis.hpp"
#include "mutabench/rulemut.hpp"

namespace mutabench::rulemut {

using py::Kind;
using py::Node;
using py::NodePath;

namespace {

constexpr std::size_t kExactLimit = 20;

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

// Maximal runs of statements separated by nodes that are ordered against
// everything else. Returns [first, last) pairs; separators form runs of one.
std::vector<std::pair<std::size_t, std::size_t>> segments(const DependencyGraph& g) {
    std::vector<std::size_t> degree(g.size, 0);
    for (auto [a, b] : g.edges) {
        ++degree[a];
        ++degree[b];
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < g.size; ++i) {
        if (g.size > 1 && degree[i] == g.size - 1) {
            if (start < i) out.emplace_back(start, i);
            out.emplace_back(i, i + 1);
            start = i + 1;
        }
    }
    if (start < g.size) out.emplace_back(start, g.size);
    return out;
}

// Predecessor masks of the nodes in [first, last), relative to `first`.
std::vector<std::uint32_t> local_predecessors(const DependencyGraph& g, std::size_t first, std::size_t last) {
    std::vector<std::uint32_t> pred(last - first, 0);
    for (auto [a, b] : g.edges) {
        if (a >= first && b < last && b >= first && a < last) pred[b - first] |= 1u << (a - first);
    }
    return pred;
}

// completions[mask] = number of ways to finish an order whose placed set is `mask`.
std::vector<std::uint64_t> completions(const std::vector<std::uint32_t>& pred) {
    std::size_t n = pred.size();
    std::uint32_t full = (1u << n) - 1;
    std::vector<std::uint64_t> ways(std::size_t{1} << n, 0);
    ways[full] = 1;
    for (std::uint32_t mask = full; mask-- > 0;) {
        std::uint64_t total = 0;
        for (std::size_t v = 0; v < n; ++v) {
            std::uint32_t bit = 1u << v;
            if (!(mask & bit) && (pred[v] & ~mask) == 0) total = saturating_add(total, ways[mask | bit]);
        }
        ways[mask] = total;
    }
    return ways;
}

void sample_segment(const DependencyGraph& g, std::size_t first, std::size_t last, Rng& rng,
                    std::vector<std::size_t>& out) {
    std::size_t n = last - first;
    auto pred = local_predecessors(g, first, last);
    if (n <= kExactLimit) {
        auto ways = completions(pred);
        std::uint32_t mask = 0;
        for (std::size_t step = 0; step < n; ++step) {
            std::uint64_t r = rng.below(ways[mask]);
            for (std::size_t v = 0; v < n; ++v) {
                std::uint32_t bit = 1u << v;
                if ((mask & bit) || (pred[v] & ~mask) != 0) continue;
                if (r < ways[mask | bit]) {
                    out.push_back(first + v);
                    mask |= bit;
                    break;
                }
                r -= ways[mask | bit];
            }
        }
        return;
    }
    // Large segments: random topological order (not uniform).
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> next(n);
    for (auto [a, b] : g.edges) {
        if (a >= first && a < last && b >= first && b < last) {
            ++indegree[b - first];
            next[a - first].push_back(b - first);
        }
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (indegree[v] == 0) ready.push_back(v);
    }
    while (!ready.empty()) {
        std::size_t pick = rng.below(ready.size());
        std::size_t v = ready[pick];
        ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
        out.push_back(first + v);
        for (std::size_t w : next[v]) {
            if (--indegree[w] == 0) ready.push_back(w);
        }
    }
}

bool declares_scope_names(const Node& def) {
    bool found = false;
    py::walk(def.kids[2], [&](const Node& n, const NodePath&) {
        if (n.kind == Kind::Global || n.kind == Kind::Nonlocal) found = true;
    });
    return found;
}

bool is_identity(const std::vector<std::size_t>& order) {
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] != i) return false;
    }
    return true;
}

void reorder(Node& block, const std::vector<std::size_t>& order) {
    std::vector<Node> kids;
    kids.reserve(order.size());
    for (std::size_t i : order) kids.push_back(std::move(block.kids[i]));
    block.kids = std::move(kids);
}

}  // namespace

bool DependencyGraph::has_edge(std::size_t from, std::size_t to) const {
    return std::find(edges.begin(), edges.end(), std::make_pair(from, to)) != edges.end();
}

bool DependencyGraph::admits(const std::vector<std::size_t>& order) const {
    if (order.size() != size) return false;
    std::vector<std::size_t> position(size, size);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] >= size || position[order[i]] != size) return false;
        position[order[i]] = i;
    }
    return std::all_of(edges.begin(), edges.end(), [&](auto e) { return position[e.first] < position[e.second]; });
}

DependencyGraph build_dependency_graph(const Node& block) {
    DependencyGraph g;
    g.size = block.kids.size();
    std::vector<detail::Effects> fx;
    fx.reserve(g.size);
    for (const auto& s : block.kids) fx.push_back(detail::statement_effects(s));
    for (std::size_t j = 0; j < g.size; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            const auto& a = fx[i];
            const auto& b = fx[j];
            bool ordered = a.barrier || b.barrier || (a.may_raise && b.may_raise) || intersects(a.writes, b.reads) ||
                           intersects(a.reads, b.writes) || intersects(a.writes, b.writes);
            if (ordered) g.edges.emplace_back(i, j);
        }
    }
    return g;
}

std::uint64_t count_orders(const DependencyGraph& graph) {
    std::uint64_t total = 1;
    for (auto [first, last] : segments(graph)) {
        if (last - first <= 1) continue;
        if (last - first > kExactLimit) return std::numeric_limits<std::uint64_t>::max();
        total = saturating_mul(total, completions(local_predecessors(graph, first, last))[0]);
    }
    return total;
}

std::vector<std::size_t> sample_order(const DependencyGraph& graph, Rng& rng) {
    std::vector<std::size_t> out;
    out.reserve(graph.size);
    for (auto [first, last] : segments(graph)) {
        if (last - first == 1) {
            out.push_back(first);
        } else {
            sample_segment(graph, first, last, rng, out);
        }
    }
    return out;
}

std::vector<OperatorApplication> permute_statements(Node& module, Rng& rng, const MutationConfig& config) {
    struct Candidate {
        NodePath path;
        DependencyGraph graph;
    };
    std::vector<Candidate> candidates;
    for (const auto& fn : detail::functions(module)) {
        if (declares_scope_names(*py::node_at(module, fn.path))) continue;
        for (auto& block : detail::own_blocks(module, fn.path)) {
            if (block.guarded) continue;
            auto graph = build_dependency_graph(*py::node_at(module, block.path));
            if (count_orders(graph) > 1) candidates.push_back(Candidate{std::move(block.path), std::move(graph)});
        }
    }
    if (candidates.empty()) return {};

    std::vector<const Candidate*> chosen;
    for (const auto& c : candidates) {
        if (rng.chance(config.site_probability)) chosen.push_back(&c);
    }
    if (chosen.empty()) chosen.push_back(&candidates[rng.below(candidates.size())]);

    // Movable statements never contain blocks, so block paths survive
    // reordering of their ancestors.
    std::vector<OperatorApplication> out;
    for (const Candidate* c : chosen) {
        std::vector<std::size_t> order = sample_order(c->graph, rng);
        for (int attempt = 0; attempt < 64 && is_identity(order); ++attempt) order = sample_order(c->graph, rng);
        if (is_identity(order)) continue;
        OperatorApplication app;
        app.op = Operator::Permute;
        app.site = c->path;
        app.order = std::move(order);
        apply(module, app);
        out.push_back(std::move(app));
    }
    return out;
}

namespace detail {

void apply_permutation(Node& module, const OperatorApplication& step) {
    Node* block = py::node_at(module, step.site);
    if (block == nullptr || block->kind != Kind::Block) throw std::invalid_argument("permutation site is not a block");
    if (!build_dependency_graph(*block).admits(step.order)) {
        throw std::invalid_argument("recorded order violates statement dependencies");
    }
    reorder(*block, step.order);
}

}  // namespace detail

}  // namespace mutabench::rulemut

#include "dpcube/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpcube {

namespace {
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
}

MinCostFlow::MinCostFlow(int num_nodes) : n_(num_nodes), supply_(num_nodes, 0) {
    if (num_nodes < 1) throw FlowError("MinCostFlow: need at least one node");
}

int MinCostFlow::add_arc(int tail, int head, std::int64_t cost) {
    if (tail < 0 || tail >= n_ || head < 0 || head >= n_ || tail == head) {
        throw FlowError("MinCostFlow: bad arc endpoints");
    }
    if (cost < 0) throw FlowError("MinCostFlow: negative arc cost");
    tail_.push_back(tail);
    head_.push_back(head);
    cost_.push_back(cost);
    return num_arcs() - 1;
}

void MinCostFlow::set_supply(int node, std::int64_t supply) { supply_[node] = supply; }

void MinCostFlow::set_initial_tree(std::vector<std::pair<int, int>> edges) {
    warm_edges_ = std::move(edges);
}

namespace {

std::int64_t artificial_cost(const std::vector<std::int64_t>& costs, int num_nodes) {
    std::int64_t max_cost = 1;
    for (std::int64_t c : costs) max_cost = std::max(max_cost, c);
    // Must dominate any real tree path, which costs at most #nodes * max_cost.
    return 1 + max_cost * static_cast<std::int64_t>(num_nodes + 1);
}

}  // namespace

void MinCostFlow::build_initial_tree() {
    const int root = n_;
    const int v = n_ + 1;
    const std::int64_t big = artificial_cost(cost_, v);

    flow_.assign(tail_.size(), 0);
    in_tree_.assign(tail_.size(), 0);

    parent_.assign(v, -1);
    pred_arc_.assign(v, -1);
    depth_.assign(v, 0);
    forward_.assign(v, 0);
    pi_.assign(v, 0);
    first_child_.assign(v, -1);
    next_sib_.assign(v, -1);
    prev_sib_.assign(v, -1);

    // Star tree through the root: supply nodes point toward the root,
    // demand nodes away from it.
    for (int u = 0; u < n_; ++u) {
        int arc;
        if (supply_[u] >= 0) {
            arc = static_cast<int>(tail_.size());
            tail_.push_back(u);
            head_.push_back(root);
            cost_.push_back(big);
            flow_.push_back(supply_[u]);
            forward_[u] = 1;
            pi_[u] = -big;
        } else {
            arc = static_cast<int>(tail_.size());
            tail_.push_back(root);
            head_.push_back(u);
            cost_.push_back(big);
            flow_.push_back(-supply_[u]);
            forward_[u] = 0;
            pi_[u] = big;
        }
        in_tree_.push_back(1);
        parent_[u] = root;
        pred_arc_[u] = arc;
        depth_[u] = 1;
        next_sib_[u] = u + 1 < n_ ? u + 1 : -1;
        prev_sib_[u] = u - 1;
    }
    first_child_[root] = n_ > 0 ? 0 : -1;
}

void MinCostFlow::build_warm_tree() {
    const int root = n_;
    const int v = n_ + 1;
    if (static_cast<int>(warm_edges_.size()) != n_ - 1) {
        throw FlowError("MinCostFlow: warm tree must have exactly n-1 edges");
    }
    const std::int64_t big = artificial_cost(cost_, v);

    flow_.assign(tail_.size(), 0);
    in_tree_.assign(tail_.size(), 0);

    parent_.assign(v, -1);
    pred_arc_.assign(v, -1);
    depth_.assign(v, 0);
    forward_.assign(v, 0);
    pi_.assign(v, 0);
    first_child_.assign(v, -1);
    next_sib_.assign(v, -1);
    prev_sib_.assign(v, -1);

    // Leaf stripping assigns each tree edge the unique flow that balances
    // the subtree behind it, choosing whichever arc direction keeps it >= 0.
    std::vector<int> degree(n_, 0);
    std::vector<std::vector<std::pair<int, int>>> adjacency(n_);  // (edge id, other node)
    for (std::size_t e = 0; e < warm_edges_.size(); ++e) {
        const auto [fwd, bwd] = warm_edges_[e];
        const int a = tail_[fwd], b = head_[fwd];
        if (bwd >= 0 && (tail_[bwd] != b || head_[bwd] != a)) {
            throw FlowError("MinCostFlow: warm edge pair is not a forward/backward pair");
        }
        adjacency[a].push_back({static_cast<int>(e), b});
        adjacency[b].push_back({static_cast<int>(e), a});
        ++degree[a];
        ++degree[b];
    }
    std::vector<std::int64_t> acc(supply_);
    std::vector<char> stripped(n_, 0);
    std::vector<char> edge_done(warm_edges_.size(), 0);
    std::vector<int> queue;
    for (int u = 0; u < n_; ++u) {
        if (degree[u] == 1) queue.push_back(u);
    }
    int remaining = n_;
    while (!queue.empty()) {
        const int u = queue.back();
        queue.pop_back();
        if (stripped[u]) continue;
        int edge = -1, other = -1;
        for (const auto& [e, w] : adjacency[u]) {
            if (!edge_done[e]) {
                edge = e;
                other = w;
                break;
            }
        }
        if (edge < 0) break;  // last node standing
        const auto [fwd, bwd] = warm_edges_[edge];
        int chosen;
        std::int64_t f;
        if (acc[u] >= 0) {
            chosen = tail_[fwd] == u ? fwd : bwd;
            f = acc[u];
        } else {
            chosen = head_[fwd] == u ? fwd : bwd;
            f = -acc[u];
        }
        if (chosen < 0) throw FlowError("MinCostFlow: warm tree needs the missing arc direction");
        flow_[chosen] = f;
        in_tree_[chosen] = 1;
        parent_[u] = other;
        pred_arc_[u] = chosen;
        forward_[u] = tail_[chosen] == u;
        acc[other] += acc[u];
        stripped[u] = 1;
        edge_done[edge] = 1;
        --remaining;
        if (--degree[other] == 1 && !stripped[other]) queue.push_back(other);
    }
    if (remaining != 1) throw FlowError("MinCostFlow: warm tree does not span all nodes");
    int center = -1;
    for (int u = 0; u < n_; ++u) {
        if (!stripped[u]) center = u;
    }

    // Single artificial arc anchors the tree at the root.
    const int anchor = static_cast<int>(tail_.size());
    tail_.push_back(center);
    head_.push_back(root);
    cost_.push_back(big);
    flow_.push_back(0);
    in_tree_.push_back(1);
    parent_[center] = root;
    pred_arc_[center] = anchor;
    forward_[center] = 1;

    // Child lists, then depth and potentials by one preorder walk.
    for (int u = 0; u < n_; ++u) {
        const int p = parent_[u];
        prev_sib_[u] = -1;
        next_sib_[u] = first_child_[p];
        if (first_child_[p] >= 0) prev_sib_[first_child_[p]] = u;
        first_child_[p] = u;
    }
    std::vector<int> stack{root};
    pi_[root] = 0;
    depth_[root] = 0;
    while (!stack.empty()) {
        const int w = stack.back();
        stack.pop_back();
        if (w != root) {
            const int p = parent_[w];
            const int a = pred_arc_[w];
            depth_[w] = depth_[p] + 1;
            pi_[w] = forward_[w] ? pi_[p] - cost_[a] : pi_[p] + cost_[a];
        }
        for (int c = first_child_[w]; c >= 0; c = next_sib_[c]) stack.push_back(c);
    }
}

int MinCostFlow::find_join(int u, int v) const {
    while (u != v) {
        if (depth_[u] >= depth_[v]) {
            u = parent_[u];
        } else {
            v = parent_[v];
        }
    }
    return u;
}

std::int64_t MinCostFlow::solve() {
    std::int64_t total = 0;
    for (int u = 0; u < n_; ++u) total += supply_[u];
    if (total != 0) throw FlowError("MinCostFlow: supplies do not sum to zero");

    const int num_user_arcs = num_arcs();
    if (warm_edges_.empty()) {
        build_initial_tree();
    } else {
        build_warm_tree();
    }
    const int num_all_arcs = num_arcs();

    const int block =
        std::max(64, static_cast<int>(std::sqrt(static_cast<double>(num_all_arcs))));
    int next_arc = 0;
    bool bland = false;
    long degenerate_streak = 0;
    const long degenerate_limit = 64L * (n_ + 2);

    std::vector<int> subtree_stack;
    subtree_stack.reserve(64);

    for (;;) {
        // Entering arc: most negative reduced cost within a block scan
        // (Bland: first eligible by index, used only to break stalls).
        int enter = -1;
        std::int64_t best = 0;
        int scanned = 0;
        for (int a = next_arc; scanned < num_all_arcs; ++scanned, a = (a + 1 == num_all_arcs ? 0 : a + 1)) {
            if (in_tree_[a]) continue;
            const std::int64_t rc = cost_[a] + pi_[tail_[a]] - pi_[head_[a]];
            if (rc < best) {
                best = rc;
                enter = a;
                if (bland) {
                    next_arc = a + 1 == num_all_arcs ? 0 : a + 1;
                    break;
                }
            }
            if (!bland && scanned % block == block - 1 && enter >= 0) {
                next_arc = a + 1 == num_all_arcs ? 0 : a + 1;
                break;
            }
        }
        if (enter < 0) break;  // optimal
        ++pivots_;

        const int first = tail_[enter];
        const int second = head_[enter];
        const int join = find_join(first, second);
        pivot_work_ += (depth_[first] - depth_[join]) + (depth_[second] - depth_[join]);

        // The cycle pushes along enter (first -> second), returns
        // second -> join -> first through the tree. Residuals come from arcs
        // traversed against their direction.
        std::int64_t delta = kInf;
        int out_node = -1;  // node whose pred arc leaves
        for (int w = first; w != join; w = parent_[w]) {
            if (forward_[w]) {  // arc w -> parent, traversed parent -> w side
                if (flow_[pred_arc_[w]] < delta) {
                    delta = flow_[pred_arc_[w]];
                    out_node = w;
                }
            }
        }
        for (int w = second; w != join; w = parent_[w]) {
            if (!forward_[w]) {  // arc parent -> w, traversed w -> parent side
                if (flow_[pred_arc_[w]] <= delta) {
                    delta = flow_[pred_arc_[w]];
                    out_node = w;
                }
            }
        }
        if (out_node < 0) {
            throw FlowError("MinCostFlow: negative-cost cycle (unbounded instance)");
        }

        if (delta > 0) {
            flow_[enter] += delta;
            for (int w = first; w != join; w = parent_[w]) {
                flow_[pred_arc_[w]] += forward_[w] ? -delta : delta;
            }
            for (int w = second; w != join; w = parent_[w]) {
                flow_[pred_arc_[w]] += forward_[w] ? delta : -delta;
            }
            degenerate_streak = 0;
            bland = false;
        } else if (++degenerate_streak > degenerate_limit) {
            bland = true;
        }

        // Replace the leaving arc by the entering one: re-root the detached
        // subtree at the entering arc's endpoint inside it.
        bool out_on_first_side = false;
        for (int w = first; w != join; w = parent_[w]) {
            if (w == out_node) {
                out_on_first_side = true;
                break;
            }
        }
        const int p = out_on_first_side ? first : second;  // endpoint inside subtree
        const int q = out_on_first_side ? second : first;

        const std::int64_t rc_enter = cost_[enter] + pi_[first] - pi_[second];
        const std::int64_t shift = (p == second) ? rc_enter : -rc_enter;

        in_tree_[pred_arc_[out_node]] = 0;
        in_tree_[enter] = 1;

        auto detach = [&](int node) {
            const int par = parent_[node];
            if (prev_sib_[node] >= 0) {
                next_sib_[prev_sib_[node]] = next_sib_[node];
            } else {
                first_child_[par] = next_sib_[node];
            }
            if (next_sib_[node] >= 0) prev_sib_[next_sib_[node]] = prev_sib_[node];
        };
        auto attach = [&](int node, int par) {
            parent_[node] = par;
            prev_sib_[node] = -1;
            next_sib_[node] = first_child_[par];
            if (first_child_[par] >= 0) prev_sib_[first_child_[par]] = node;
            first_child_[par] = node;
        };

        // Reverse the parent chain p -> ... -> out_node.
        int node = p;
        int prev_parent = parent_[p];
        int prev_arc = pred_arc_[p];
        char prev_forward = forward_[p];
        detach(p);
        while (node != out_node) {
            const int up = prev_parent;
            const int up_parent = parent_[up];
            const int up_arc = pred_arc_[up];
            const char up_forward = forward_[up];
            detach(up);
            attach(up, node);
            pred_arc_[up] = prev_arc;
            forward_[up] = !prev_forward;
            node = up;
            prev_parent = up_parent;
            prev_arc = up_arc;
            prev_forward = up_forward;
        }
        attach(p, q);
        pred_arc_[p] = enter;
        forward_[p] = (first == p);

        // Refresh depth and potential across the moved subtree.
        subtree_stack.clear();
        subtree_stack.push_back(p);
        while (!subtree_stack.empty()) {
            const int w = subtree_stack.back();
            subtree_stack.pop_back();
            ++pivot_work_;
            depth_[w] = depth_[parent_[w]] + 1;
            pi_[w] += shift;
            for (int c = first_child_[w]; c >= 0; c = next_sib_[c]) {
                subtree_stack.push_back(c);
            }
        }
    }

    // Any residual flow on an artificial arc means the user graph cannot
    // route the supplies.
    std::int64_t objective = 0;
    for (int a = 0; a < num_user_arcs; ++a) objective += cost_[a] * flow_[a];
    for (int a = num_user_arcs; a < num_all_arcs; ++a) {
        if (flow_[a] != 0) throw FlowError("MinCostFlow: infeasible (disconnected supplies)");
    }
    // Drop the artificial arcs so flow() indices match what the caller added.
    tail_.resize(num_user_arcs);
    head_.resize(num_user_arcs);
    cost_.resize(num_user_arcs);
    flow_.resize(num_user_arcs);
    in_tree_.resize(num_user_arcs);
    return objective;
}

void add_grid_snake_tree(MinCostFlow& mcf, std::span<const int> dims, std::int64_t step_cost) {
    const int d = static_cast<int>(dims.size());
    std::int64_t cells = 1;
    for (int s : dims) cells *= s;
    if (cells < 2) return;

    std::vector<std::int64_t> stride(d, 1);
    for (int axis = d - 2; axis >= 0; --axis) stride[axis] = stride[axis + 1] * dims[axis + 1];

    // Boustrophedon decode: consecutive ranks differ in exactly one axis by
    // one step, so every consecutive pair is a king neighbor.
    auto zigzag_cell = [&](std::int64_t rank) {
        std::int64_t cell = 0;
        bool flip = false;
        for (int axis = 0; axis < d; ++axis) {
            const std::int64_t q = rank / stride[axis];
            rank %= stride[axis];
            const std::int64_t digit = flip ? dims[axis] - 1 - q : q;
            cell = cell * dims[axis] + digit;
            // Reflection parity accumulates over emitted digits, not raw ones.
            if (digit % 2 == 1) flip = !flip;
        }
        return cell;
    };

    std::vector<std::pair<int, int>> edges;
    edges.reserve(cells - 1);
    std::int64_t prev = zigzag_cell(0);
    for (std::int64_t rank = 1; rank < cells; ++rank) {
        const std::int64_t cur = zigzag_cell(rank);
        const int fwd = mcf.add_arc(static_cast<int>(prev), static_cast<int>(cur), step_cost);
        const int bwd = mcf.add_arc(static_cast<int>(cur), static_cast<int>(prev), step_cost);
        edges.push_back({fwd, bwd});
        prev = cur;
    }
    mcf.set_initial_tree(std::move(edges));
}

void add_grid_king_arcs(MinCostFlow& mcf, std::span<const int> dims, std::int64_t step_cost) {
    const int d = static_cast<int>(dims.size());
    std::int64_t cells = 1;
    for (int s : dims) cells *= s;

    // Lexicographically positive offsets in {-1,0,1}^d enumerate each
    // neighbor pair once; both directions get an arc.
    std::vector<std::vector<int>> offsets;
    std::vector<int> offset(d, -1);
    for (;;) {
        int first_nonzero = 0;
        while (first_nonzero < d && offset[first_nonzero] == 0) ++first_nonzero;
        if (first_nonzero < d && offset[first_nonzero] > 0) offsets.push_back(offset);
        int axis = d - 1;
        while (axis >= 0 && offset[axis] == 1) offset[axis--] = -1;
        if (axis < 0) break;
        ++offset[axis];
    }

    std::vector<int> idx(d, 0);
    std::vector<std::int64_t> stride(d, 1);
    for (int axis = d - 2; axis >= 0; --axis) stride[axis] = stride[axis + 1] * dims[axis + 1];

    for (std::int64_t cell = 0; cell < cells; ++cell) {
        for (const auto& off : offsets) {
            std::int64_t neighbor = cell;
            bool ok = true;
            for (int axis = 0; axis < d; ++axis) {
                const int moved = idx[axis] + off[axis];
                if (moved < 0 || moved >= dims[axis]) {
                    ok = false;
                    break;
                }
                neighbor += off[axis] * stride[axis];
            }
            if (ok) {
                mcf.add_arc(static_cast<int>(cell), static_cast<int>(neighbor), step_cost);
                mcf.add_arc(static_cast<int>(neighbor), static_cast<int>(cell), step_cost);
            }
        }
        // Advance the multi-index alongside the linear one.
        for (int axis = d - 1; axis >= 0; --axis) {
            if (++idx[axis] < dims[axis]) break;
            idx[axis] = 0;
        }
    }
}

}  // namespace dpcube

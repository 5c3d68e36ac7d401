// Exact maximum-weight matching in general graphs via the primal-dual
// blossom method (O(n^3)), plus a minimum-weight perfect matching wrapper
// and a batched driver for syndrome decoding.
//
// Weights are int64; callers quantize floating point weights. All weights
// are doubled internally so that dual variables and half-slacks stay
// integral throughout.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace py = pybind11;

using i64 = std::int64_t;

namespace {

constexpr int LABEL_NONE = 0;
constexpr int LABEL_S = 1;
constexpr int LABEL_T = 2;

constexpr std::pair<int, int> NO_EDGE{-1, -1};

// Primal-dual matching state. Blossom ids 0..n-1 are the trivial blossoms
// (one per vertex); non-trivial blossoms get ids >= n from a free pool.
struct Matcher {
    int n = 0;
    std::vector<int> ex, ey;
    std::vector<i64> ew;  // doubled weights
    std::vector<std::vector<int>> adj;

    int nblossom = 0;
    std::vector<int> parent, base_vertex, label, best_edge;
    std::vector<std::pair<int, int>> tree_edge;
    std::vector<char> marker, has_best_set;
    std::vector<i64> dual_var;
    std::vector<std::vector<int>> subblossoms;
    std::vector<std::vector<std::pair<int, int>>> bedges;
    std::vector<std::vector<int>> best_edge_set;
    std::vector<int> nontrivial;
    std::vector<int> free_ids;

    std::vector<int> mate, top, vbest_edge;
    std::vector<i64> dual2x;
    std::vector<int> queue;

    Matcher(int num_vertex, const std::vector<int>& xs,
            const std::vector<int>& ys, const std::vector<i64>& ws)
        : n(num_vertex), ex(xs), ey(ys) {
        ew.resize(ws.size());
        for (size_t e = 0; e < ws.size(); ++e) ew[e] = 2 * ws[e];
        adj.assign(n, {});
        for (size_t e = 0; e < ex.size(); ++e) {
            adj[ex[e]].push_back(static_cast<int>(e));
            adj[ey[e]].push_back(static_cast<int>(e));
        }

        nblossom = n + n / 2 + 2;
        parent.assign(nblossom, -1);
        base_vertex.assign(nblossom, -1);
        label.assign(nblossom, LABEL_NONE);
        best_edge.assign(nblossom, -1);
        tree_edge.assign(nblossom, NO_EDGE);
        marker.assign(nblossom, 0);
        has_best_set.assign(nblossom, 0);
        dual_var.assign(nblossom, 0);
        subblossoms.assign(nblossom, {});
        bedges.assign(nblossom, {});
        best_edge_set.assign(nblossom, {});
        for (int x = 0; x < n; ++x) base_vertex[x] = x;
        for (int b = nblossom - 1; b >= n; --b) free_ids.push_back(b);

        mate.assign(n, -1);
        top.resize(n);
        for (int x = 0; x < n; ++x) top[x] = x;
        vbest_edge.assign(n, -1);
        // Weights are doubled, so the initial duals are even and all
        // half-slacks encountered by the algorithm stay integral.
        i64 max_weight = 0;
        for (i64 w : ew) max_weight = std::max(max_weight, w);
        dual2x.assign(n, max_weight);
    }

    int alloc_blossom() {
        if (free_ids.empty()) throw std::runtime_error("blossom pool exhausted");
        int b = free_ids.back();
        free_ids.pop_back();
        parent[b] = -1;
        label[b] = LABEL_NONE;
        best_edge[b] = -1;
        tree_edge[b] = NO_EDGE;
        marker[b] = 0;
        has_best_set[b] = 0;
        dual_var[b] = 0;
        subblossoms[b].clear();
        bedges[b].clear();
        best_edge_set[b].clear();
        return b;
    }

    void free_blossom(int b) {
        auto it = std::find(nontrivial.begin(), nontrivial.end(), b);
        nontrivial.erase(it);
        free_ids.push_back(b);
    }

    bool is_trivial(int b) const { return b < n; }

    void vertices_of(int b, std::vector<int>& out) const {
        out.clear();
        if (is_trivial(b)) {
            out.push_back(b);
            return;
        }
        std::vector<int> stack{b};
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int sub : subblossoms[cur]) {
                if (is_trivial(sub))
                    out.push_back(sub);
                else
                    stack.push_back(sub);
            }
        }
    }

    i64 edge_slack_2x(int e) const {
        return dual2x[ex[e]] + dual2x[ey[e]] - 2 * ew[e];
    }

    // --- least-slack edge tracking -------------------------------------

    void lset_reset() {
        for (int x = 0; x < n; ++x) vbest_edge[x] = -1;
        for (int b = 0; b < n; ++b) best_edge[b] = -1;
        for (int b : nontrivial) {
            best_edge[b] = -1;
            has_best_set[b] = 0;
            best_edge_set[b].clear();
        }
    }

    void lset_add_vertex_edge(int y, int e, i64 slack) {
        int be = vbest_edge[y];
        if (be == -1 || slack < edge_slack_2x(be)) vbest_edge[y] = e;
    }

    std::pair<int, i64> lset_get_best_vertex_edge() const {
        int best_index = -1;
        i64 best_slack = 0;
        for (int x = 0; x < n; ++x) {
            if (label[top[x]] != LABEL_NONE) continue;
            int e = vbest_edge[x];
            if (e == -1) continue;
            i64 slack = edge_slack_2x(e);
            if (best_index == -1 || slack < best_slack) {
                best_index = e;
                best_slack = slack;
            }
        }
        return {best_index, best_slack};
    }

    void lset_new_blossom(int b) {
        if (!is_trivial(b)) {
            has_best_set[b] = 1;
            best_edge_set[b].clear();
        }
    }

    void lset_add_blossom_edge(int b, int e, i64 slack) {
        if (best_edge[b] == -1 || slack < edge_slack_2x(best_edge[b]))
            best_edge[b] = e;
        if (!is_trivial(b)) best_edge_set[b].push_back(e);
    }

    void lset_merge_blossoms(int blossom) {
        std::vector<int> best_edge_to(n, -1);
        std::vector<i64> best_slack_to(n, 0);
        int bedge = -1;
        i64 bslack = 0;

        for (int sub : subblossoms[blossom]) {
            if (label[sub] != LABEL_S) continue;
            const std::vector<int>* sub_edges;
            if (!is_trivial(sub)) {
                sub_edges = &best_edge_set[sub];
            } else {
                sub_edges = &adj[base_vertex[sub]];
            }
            for (int e : *sub_edges) {
                int bx = top[ex[e]];
                int by = top[ey[e]];
                if (bx == by) continue;
                int other = (bx == blossom) ? by : bx;
                if (label[other] != LABEL_S) continue;
                i64 slack = edge_slack_2x(e);
                int ob = base_vertex[other];
                if (best_edge_to[ob] == -1 || slack < best_slack_to[ob]) {
                    best_edge_to[ob] = e;
                    best_slack_to[ob] = slack;
                }
                if (bedge == -1 || slack < bslack) {
                    bedge = e;
                    bslack = slack;
                }
            }
            if (!is_trivial(sub)) {
                has_best_set[sub] = 0;
                best_edge_set[sub].clear();
            }
        }

        best_edge_set[blossom].clear();
        for (int e : best_edge_to)
            if (e != -1) best_edge_set[blossom].push_back(e);
        has_best_set[blossom] = 1;
        best_edge[blossom] = bedge;
    }

    std::pair<int, i64> lset_get_best_blossom_edge() const {
        int best_index = -1;
        i64 best_slack = 0;
        auto consider = [&](int b) {
            if (label[b] != LABEL_S || parent[b] != -1) return;
            int e = best_edge[b];
            if (e == -1) return;
            i64 slack = edge_slack_2x(e);
            if (best_index == -1 || slack < best_slack) {
                best_index = e;
                best_slack = slack;
            }
        };
        for (int b = 0; b < n; ++b) consider(b);
        for (int b : nontrivial) consider(b);
        return {best_index, best_slack};
    }

    // --- stage bookkeeping ---------------------------------------------

    void reset_stage() {
        for (int b = 0; b < n; ++b) {
            label[b] = LABEL_NONE;
            tree_edge[b] = NO_EDGE;
        }
        for (int b : nontrivial) {
            label[b] = LABEL_NONE;
            tree_edge[b] = NO_EDGE;
        }
        queue.clear();
        lset_reset();
    }

    // Trace back through the alternating trees from x and y. Returns an
    // odd-length alternating path; if it is a cycle the caller builds a
    // blossom, otherwise it augments.
    std::vector<std::pair<int, int>> trace_alternating_paths(int x, int y) {
        std::vector<int> marked;
        std::vector<std::pair<int, int>> xedges{{x, y}};
        std::vector<std::pair<int, int>> yedges{{y, x}};
        int first_common = -1;

        while (x != -1 || y != -1) {
            int bx = top[x];
            if (marker[bx]) {
                first_common = bx;
                break;
            }
            marker[bx] = 1;
            marked.push_back(bx);

            if (tree_edge[bx] == NO_EDGE) {
                x = -1;
            } else {
                xedges.push_back(tree_edge[bx]);
                x = tree_edge[bx].first;
            }

            if (y != -1) {
                std::swap(x, y);
                std::swap(xedges, yedges);
            }
        }

        for (int b : marked) marker[b] = 0;

        if (first_common != -1) {
            while (top[yedges.back().first] != first_common) yedges.pop_back();
        }

        std::vector<std::pair<int, int>> path(xedges.rbegin(), xedges.rend());
        for (size_t i = 1; i < yedges.size(); ++i)
            path.emplace_back(yedges[i].second, yedges[i].first);
        return path;
    }

    // --- blossom creation and expansion --------------------------------

    void make_blossom(const std::vector<std::pair<int, int>>& path) {
        std::vector<int> subs;
        subs.reserve(path.size());
        for (auto& pe : path) subs.push_back(top[pe.first]);

        int blossom = alloc_blossom();
        nontrivial.push_back(blossom);
        subblossoms[blossom] = subs;
        bedges[blossom] = path;
        base_vertex[blossom] = base_vertex[subs[0]];
        dual_var[blossom] = 0;

        for (int sub : subs) parent[sub] = blossom;

        std::vector<int> verts;
        vertices_of(blossom, verts);
        for (int x : verts) top[x] = blossom;

        label[blossom] = LABEL_S;
        tree_edge[blossom] = tree_edge[subs[0]];

        for (int sub : subs) {
            if (label[sub] == LABEL_T) {
                std::vector<int> sv;
                vertices_of(sub, sv);
                queue.insert(queue.end(), sv.begin(), sv.end());
            }
        }

        lset_merge_blossoms(blossom);
    }

    // Path through `blossom` from sub-blossom `sub` to the base.
    void find_path_through_blossom(
        int blossom, int sub, std::vector<int>& nodes,
        std::vector<std::pair<int, int>>& edges) const {
        nodes.clear();
        edges.clear();
        nodes.push_back(sub);
        const auto& subs = subblossoms[blossom];
        const auto& bed = bedges[blossom];
        int nsub = static_cast<int>(subs.size());
        int p = static_cast<int>(
            std::find(subs.begin(), subs.end(), sub) - subs.begin());
        while (p != 0) {
            if (p % 2 == 0) {
                edges.emplace_back(bed[p - 1].second, bed[p - 1].first);
                nodes.push_back(subs[p - 1]);
                edges.emplace_back(bed[p - 2].second, bed[p - 2].first);
                nodes.push_back(subs[p - 2]);
                p -= 2;
            } else {
                edges.push_back(bed[p]);
                nodes.push_back(subs[p + 1]);
                edges.push_back(bed[p + 1]);
                nodes.push_back(subs[(p + 2) % nsub]);
                p = (p + 2) % nsub;
            }
        }
    }

    void expand_t_blossom(int blossom) {
        for (int sub : subblossoms[blossom]) {
            parent[sub] = -1;
            if (!is_trivial(sub)) {
                std::vector<int> sv;
                vertices_of(sub, sv);
                for (int x : sv) top[x] = sub;
            } else {
                top[base_vertex[sub]] = sub;
            }
        }

        auto entry = tree_edge[blossom];
        int sub = top[entry.second];
        label[sub] = LABEL_T;
        tree_edge[sub] = entry;

        std::vector<int> path_nodes;
        std::vector<std::pair<int, int>> path_edges;
        find_path_through_blossom(blossom, sub, path_nodes, path_edges);

        for (size_t p = 0; p + 1 < path_edges.size(); p += 2) {
            int x = path_edges[p].second;
            assign_label_s(x);
            int nxt = path_nodes[p + 2];
            label[nxt] = LABEL_T;
            tree_edge[nxt] = path_edges[p + 1];
        }

        free_blossom(blossom);
    }

    void expand_blossom_rec(int blossom, std::vector<int>& stack) {
        for (int sub : subblossoms[blossom]) {
            parent[sub] = -1;
            if (!is_trivial(sub)) {
                if (dual_var[sub] == 0) {
                    stack.push_back(sub);
                } else {
                    std::vector<int> sv;
                    vertices_of(sub, sv);
                    for (int x : sv) top[x] = sub;
                }
            } else {
                top[base_vertex[sub]] = sub;
            }
        }
        free_blossom(blossom);
    }

    void expand_zero_dual_blossoms() {
        std::vector<int> stack;
        for (int b : nontrivial)
            if (parent[b] == -1 && dual_var[b] == 0) stack.push_back(b);
        while (!stack.empty()) {
            int b = stack.back();
            stack.pop_back();
            expand_blossom_rec(b, stack);
        }
    }

    // --- augmenting -----------------------------------------------------

    void augment_blossom_rec(int blossom, int sub,
                             std::vector<std::pair<int, int>>& stack) {
        std::vector<int> path_nodes;
        std::vector<std::pair<int, int>> path_edges;
        find_path_through_blossom(blossom, sub, path_nodes, path_edges);

        for (size_t p = 0; p + 1 < path_edges.size(); p += 2) {
            int x = path_edges[p + 1].first;
            int y = path_edges[p + 1].second;
            mate[x] = y;
            mate[y] = x;
            int bx = path_nodes[p + 1];
            if (!is_trivial(bx)) stack.emplace_back(bx, x);
            int by = path_nodes[p + 2];
            if (!is_trivial(by)) stack.emplace_back(by, y);
        }

        auto& subs = subblossoms[blossom];
        auto& bed = bedges[blossom];
        int p = static_cast<int>(
            std::find(subs.begin(), subs.end(), sub) - subs.begin());
        std::rotate(subs.begin(), subs.begin() + p, subs.end());
        std::rotate(bed.begin(), bed.begin() + p, bed.end());
        base_vertex[blossom] = base_vertex[sub];
    }

    void augment_blossom(int blossom, int sub_vertex) {
        // stack entries: (outer blossom, sub-blossom id to augment from)
        std::vector<std::pair<int, int>> stack{{blossom, sub_vertex}};
        while (!stack.empty()) {
            auto [outer, sub] = stack.back();
            stack.pop_back();
            int b = parent[sub];
            if (b != outer) stack.emplace_back(outer, b);
            augment_blossom_rec(b, sub, stack);
        }
    }

    void augment_matching(const std::vector<std::pair<int, int>>& path) {
        for (size_t i = 0; i < path.size(); i += 2) {
            auto [x, y] = path[i];
            int bx = top[x];
            if (!is_trivial(bx)) augment_blossom(bx, x);
            int by = top[y];
            if (!is_trivial(by)) augment_blossom(by, y);
            mate[x] = y;
            mate[y] = x;
        }
    }

    // --- labeling -------------------------------------------------------

    void assign_label_s(int x) {
        int bx = top[x];
        label[bx] = LABEL_S;
        int y = mate[x];
        if (y == -1) {
            tree_edge[bx] = NO_EDGE;
        } else {
            tree_edge[bx] = {y, x};
        }
        lset_new_blossom(bx);
        std::vector<int> verts;
        vertices_of(bx, verts);
        queue.insert(queue.end(), verts.begin(), verts.end());
    }

    void assign_label_t(int x, int y) {
        int by = top[y];
        label[by] = LABEL_T;
        tree_edge[by] = {x, y};
        int z = mate[base_vertex[by]];
        assign_label_s(z);
    }

    bool add_s_to_s_edge(int x, int y,
                         std::vector<std::pair<int, int>>& aug_path) {
        auto path = trace_alternating_paths(x, y);
        int p = path.front().first;
        int q = path.back().second;
        if (top[p] == top[q]) {
            make_blossom(path);
            return false;
        }
        aug_path = std::move(path);
        return true;
    }

    bool substage_scan(std::vector<std::pair<int, int>>& aug_path) {
        while (!queue.empty()) {
            int x = queue.back();
            queue.pop_back();
            for (int e : adj[x]) {
                int y = (ex[e] != x) ? ex[e] : ey[e];
                int bx = top[x];
                int by = top[y];
                if (bx == by) continue;
                int ylabel = label[by];
                i64 slack = edge_slack_2x(e);
                if (slack <= 0) {
                    if (ylabel == LABEL_NONE) {
                        assign_label_t(x, y);
                    } else if (ylabel == LABEL_S) {
                        if (add_s_to_s_edge(x, y, aug_path)) return true;
                    }
                } else if (ylabel == LABEL_S) {
                    lset_add_blossom_edge(bx, e, slack);
                }
                if (ylabel != LABEL_S) lset_add_vertex_edge(y, e, slack);
            }
        }
        return false;
    }

    // --- dual updates ---------------------------------------------------

    std::tuple<int, i64, int, int> substage_calc_dual_delta() const {
        int delta_type = 1;
        int delta_edge = -1;
        int delta_blossom = -1;
        i64 delta_2x = -1;
        for (int x = 0; x < n; ++x)
            if (label[top[x]] == LABEL_S &&
                (delta_2x == -1 || dual2x[x] < delta_2x))
                delta_2x = dual2x[x];

        auto [e2, slack2] = lset_get_best_vertex_edge();
        if (e2 != -1 && slack2 <= delta_2x) {
            delta_type = 2;
            delta_2x = slack2;
            delta_edge = e2;
        }

        auto [e3, slack3] = lset_get_best_blossom_edge();
        if (e3 != -1) {
            if (slack3 % 2 != 0)
                throw std::runtime_error("odd S-to-S slack");
            i64 half = slack3 / 2;
            if (half <= delta_2x) {
                delta_type = 3;
                delta_2x = half;
                delta_edge = e3;
            }
        }

        for (int b : nontrivial) {
            if (label[b] == LABEL_T && parent[b] == -1 &&
                dual_var[b] <= delta_2x) {
                delta_type = 4;
                delta_2x = dual_var[b];
                delta_blossom = b;
            }
        }

        return {delta_type, delta_2x, delta_edge, delta_blossom};
    }

    void substage_apply_delta_step(i64 delta_2x) {
        for (int x = 0; x < n; ++x) {
            int l = label[top[x]];
            if (l == LABEL_S)
                dual2x[x] -= delta_2x;
            else if (l == LABEL_T)
                dual2x[x] += delta_2x;
        }
        for (int b : nontrivial) {
            if (parent[b] != -1) continue;
            if (label[b] == LABEL_S)
                dual_var[b] += delta_2x;
            else if (label[b] == LABEL_T)
                dual_var[b] -= delta_2x;
        }
    }

    // --- main loop ------------------------------------------------------

    bool run_stage() {
        for (int x = 0; x < n; ++x)
            if (mate[x] == -1) assign_label_s(x);
        if (queue.empty()) return false;

        std::vector<std::pair<int, int>> aug_path;
        bool augmented = false;
        while (true) {
            if (substage_scan(aug_path)) {
                augmented = true;
                break;
            }
            auto [delta_type, delta_2x, delta_edge, delta_blossom] =
                substage_calc_dual_delta();
            substage_apply_delta_step(delta_2x);

            if (delta_type == 2) {
                int x = ex[delta_edge], y = ey[delta_edge];
                if (label[top[x]] != LABEL_S) std::swap(x, y);
                assign_label_t(x, y);
            } else if (delta_type == 3) {
                int x = ex[delta_edge], y = ey[delta_edge];
                if (add_s_to_s_edge(x, y, aug_path)) {
                    augmented = true;
                    break;
                }
            } else if (delta_type == 4) {
                expand_t_blossom(delta_blossom);
            } else {
                break;  // delta 1: no further improvement
            }
        }

        if (augmented) augment_matching(aug_path);
        expand_zero_dual_blossoms();
        reset_stage();
        return augmented;
    }

    void solve() {
        if (ex.empty()) return;
        while (run_stage()) {
        }
    }
};

std::vector<int> max_weight_matching_core(int n, std::vector<int> xs,
                                          std::vector<int> ys,
                                          std::vector<i64> ws) {
    // Drop negative-weight edges; they never belong to a maximum matching.
    std::vector<int> fx, fy;
    std::vector<i64> fw;
    for (size_t e = 0; e < ws.size(); ++e) {
        if (ws[e] >= 0) {
            fx.push_back(xs[e]);
            fy.push_back(ys[e]);
            fw.push_back(ws[e]);
        }
    }
    if (fx.empty()) return std::vector<int>(n, -1);
    Matcher m(n, fx, fy, fw);
    m.solve();
    return m.mate;
}

// Minimum-weight perfect matching: negate weights, then shift them so the
// maximum-weight matching is forced to have maximum cardinality.
std::vector<int> min_weight_perfect_matching_core(int n,
                                                  const std::vector<int>& xs,
                                                  const std::vector<int>& ys,
                                                  std::vector<i64> ws) {
    if (n % 2 != 0) throw std::invalid_argument("odd vertex count");
    if (n == 0) return {};
    if (xs.empty()) throw std::invalid_argument("no edges");
    for (i64& w : ws) w = -w;
    i64 wmin = *std::min_element(ws.begin(), ws.end());
    i64 wmax = *std::max_element(ws.begin(), ws.end());
    i64 range = wmax - wmin;
    if (!(wmin > 0 && wmin >= static_cast<i64>(n) * range)) {
        i64 delta = (range > 0) ? static_cast<i64>(n) * range - wmin : 1 - wmin;
        for (i64& w : ws) w += delta;
    }
    auto mate = max_weight_matching_core(n, xs, ys, ws);
    for (int x = 0; x < n; ++x)
        if (mate[x] == -1)
            throw std::runtime_error("graph has no perfect matching");
    return mate;
}

}  // namespace

static py::list min_weight_perfect_matching(
    int n, const std::vector<std::tuple<int, int, i64>>& edges) {
    std::vector<int> xs, ys;
    std::vector<i64> ws;
    for (auto& [x, y, w] : edges) {
        xs.push_back(x);
        ys.push_back(y);
        ws.push_back(w);
    }
    auto mate = min_weight_perfect_matching_core(n, xs, ys, ws);
    py::list pairs;
    for (int x = 0; x < n; ++x)
        if (mate[x] > x) pairs.append(py::make_tuple(x, mate[x]));
    return pairs;
}

static py::list max_weight_matching(
    int n, const std::vector<std::tuple<int, int, i64>>& edges) {
    std::vector<int> xs, ys;
    std::vector<i64> ws;
    for (auto& [x, y, w] : edges) {
        xs.push_back(x);
        ys.push_back(y);
        ws.push_back(w);
    }
    auto mate = max_weight_matching_core(n, xs, ys, ws);
    py::list pairs;
    for (int x = 0; x < n; ++x)
        if (mate[x] > x) pairs.append(py::make_tuple(x, mate[x]));
    return pairs;
}

// Batched defect matching against precomputed path tables.
//
// dist  : (N, N) int64, shortest-path weight between detectors
// distb : (N,)  int64, shortest-path weight detector -> boundary
// flip  : (N, N) uint8, logical-flip parity of the path between detectors
// flipb : (N,)  uint8, logical-flip parity of the path to the boundary
// defects / offsets : CSR-style list of defect index lists, one per job
//
// Returns (per-job predicted logical flip, per-job total matching weight).
static py::tuple decode_batch(
    py::array_t<i64, py::array::c_style | py::array::forcecast> dist,
    py::array_t<i64, py::array::c_style | py::array::forcecast> distb,
    py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> flip,
    py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> flipb,
    py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>
        defects,
    py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>
        offsets) {
    auto D = dist.unchecked<2>();
    auto Db = distb.unchecked<1>();
    auto F = flip.unchecked<2>();
    auto Fb = flipb.unchecked<1>();
    auto defs = defects.unchecked<1>();
    auto offs = offsets.unchecked<1>();

    py::ssize_t njobs = offs.shape(0) - 1;
    py::array_t<std::uint8_t> out_flip(njobs);
    py::array_t<i64> out_weight(njobs);
    auto of = out_flip.mutable_unchecked<1>();
    auto ow = out_weight.mutable_unchecked<1>();

    std::vector<int> xs, ys;
    std::vector<i64> ws;

    for (py::ssize_t j = 0; j < njobs; ++j) {
        i64 lo = offs(j), hi = offs(j + 1);
        int m = static_cast<int>(hi - lo);
        if (m == 0) {
            of(j) = 0;
            ow(j) = 0;
            continue;
        }
        if (m == 1) {
            int d0 = defs(lo);
            of(j) = Fb(d0);
            ow(j) = Db(d0);
            continue;
        }
        // Pairs may also match "via the boundary" at cost Db(a)+Db(b), so
        // each defect-defect edge carries the cheaper of the two routes; an
        // odd defect count adds one virtual boundary node.
        int nn = (m % 2 == 0) ? m : m + 1;
        xs.clear();
        ys.clear();
        ws.clear();
        for (int a = 0; a < m; ++a) {
            int da = defs(lo + a);
            for (int b = a + 1; b < m; ++b) {
                int db = defs(lo + b);
                i64 direct = D(da, db);
                i64 viab = Db(da) + Db(db);
                xs.push_back(a);
                ys.push_back(b);
                ws.push_back(direct < viab ? direct : viab);
            }
            if (nn > m) {
                xs.push_back(a);
                ys.push_back(m);
                ws.push_back(Db(da));
            }
        }

        auto mate = min_weight_perfect_matching_core(nn, xs, ys, ws);

        std::uint8_t fl = 0;
        i64 total = 0;
        for (int a = 0; a < m; ++a) {
            int mb = mate[a];
            int da = defs(lo + a);
            if (mb == m) {
                fl ^= Fb(da);
                total += Db(da);
            } else if (mb > a) {
                int db = defs(lo + mb);
                i64 direct = D(da, db);
                i64 viab = Db(da) + Db(db);
                if (direct <= viab) {
                    fl ^= F(da, db);
                    total += direct;
                } else {
                    fl ^= static_cast<std::uint8_t>(Fb(da) ^ Fb(db));
                    total += viab;
                }
            }
        }
        of(j) = fl;
        ow(j) = total;
    }

    return py::make_tuple(out_flip, out_weight);
}

PYBIND11_MODULE(_blossom, mod) {
    mod.doc() = "Exact blossom matching (int64 weights) and batched decoding";
    mod.def("min_weight_perfect_matching", &min_weight_perfect_matching,
            py::arg("n"), py::arg("edges"));
    mod.def("max_weight_matching", &max_weight_matching, py::arg("n"),
            py::arg("edges"));
    mod.def("decode_batch", &decode_batch, py::arg("dist"), py::arg("distb"),
            py::arg("flip"), py::arg("flipb"), py::arg("defects"),
            py::arg("offsets"));
}

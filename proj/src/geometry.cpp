#include "spinlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

namespace spinlab {

LatticePath make_path(int width, int height, std::vector<LatticePoint> verts, int t0) {
    if (verts.empty()) throw std::invalid_argument("make_path: empty path");
    LatticePath p;
    p.width = width;
    p.height = height;
    p.verts = std::move(verts);
    p.t0 = t0;
    for (size_t i = 0; i < p.verts.size(); ++i) {
        const auto [x, y] = p.verts[i];
        if (x < 0 || x >= width || y < 0 || y >= height)
            throw std::invalid_argument("make_path: vertex outside the window");
        if (!p.index_of.insert({p.verts[i], static_cast<int>(i)}).second)
            throw std::invalid_argument("make_path: repeated vertex (path not simple)");
        if (i > 0) {
            const auto [px, py] = p.verts[i - 1];
            if (std::abs(px - x) + std::abs(py - y) != 1)
                throw std::invalid_argument("make_path: consecutive vertices not neighbors");
        }
    }
    return p;
}

CrossQuery nth_cross(const LatticePath& path, LatticePoint p, int n) {
    if (n < 1) throw std::invalid_argument("nth_cross: n >= 1 required");
    if (path.position(p) < 0) throw std::invalid_argument("nth_cross: base point not on the path");
    CrossQuery q;
    q.cross.base = p;
    q.cross.n = n;
    // ray directions in the order x+, x-, y+, y-
    const std::array<LatticePoint, 4> dirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    for (int r = 0; r < 4; ++r) {
        std::vector<std::pair<int, LatticePoint>> hits;  // (distance, point)
        for (const auto& v : path.verts) {
            const int dx = v.first - p.first, dy = v.second - p.second;
            const int along = dx * dirs[r].first + dy * dirs[r].second;
            const int off = dx * dirs[r].second - dy * dirs[r].first;
            if (off == 0 && along > 0) hits.push_back({along, v});
        }
        std::sort(hits.begin(), hits.end());
        q.hits[r] = static_cast<int>(hits.size());
        if (q.hits[r] >= n) q.cross.points[r] = hits[n - 1].second;
    }
    q.available = q.hits[0] >= n && q.hits[1] >= n && q.hits[2] >= n && q.hits[3] >= n;
    return q;
}

SnailQuery nth_snail(const LatticePath& path, LatticePoint p, int n) {
    SnailQuery out;
    auto cq = nth_cross(path, p, n);
    if (!cq.available) return out;
    // minimal connected subpath containing p and all path points on the two
    // cross segments = the span of positions over p and the first n hits on
    // each ray (those are exactly the path points on the segments)
    int lo = path.position(p), hi = lo;
    const std::array<LatticePoint, 4> dirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    for (int r = 0; r < 4; ++r) {
        for (const auto& v : path.verts) {
            const int dx = v.first - p.first, dy = v.second - p.second;
            const int along = dx * dirs[r].first + dy * dirs[r].second;
            const int off = dx * dirs[r].second - dy * dirs[r].first;
            if (off != 0 || along <= 0) continue;
            // inside the n-th cross segment iff not beyond the n-th hit
            const int limit =
                (cq.cross.points[r].first - p.first) * dirs[r].first +
                (cq.cross.points[r].second - p.second) * dirs[r].second;
            if (along > limit) continue;
            const int idx = path.position(v);
            lo = std::min(lo, idx);
            hi = std::max(hi, idx);
        }
    }
    out.available = true;
    out.snail = {n, lo, hi, hi - lo};
    return out;
}

namespace {

struct Segment1D {
    int fixed;    // the constant coordinate
    int lo, hi;   // varying-coordinate extent
};

// horizontal segment of the cross of p (through p, between the x- and x+ hits)
Segment1D horizontal_segment(const Cross& c) {
    return {c.base.second, c.points[1].first, c.points[0].first};
}
Segment1D vertical_segment(const Cross& c) {
    return {c.base.first, c.points[3].second, c.points[2].second};
}

bool perpendicular_point_intersection(const Segment1D& h, const Segment1D& v) {
    // h horizontal at y = h.fixed spanning x in [h.lo, h.hi]; v vertical
    return h.lo <= v.fixed && v.fixed <= h.hi && v.lo <= h.fixed && h.fixed <= v.hi;
}

}  // namespace

CrossLemmaResult check_cross_lemma(const LatticePath& path, LatticePoint p, LatticePoint q, int n,
                                   int m) {
    CrossLemmaResult res;
    auto cp = nth_cross(path, p, n);
    auto cq = nth_cross(path, q, m);
    if (!cp.available || !cq.available) return res;
    const auto hp = horizontal_segment(cp.cross), vp = vertical_segment(cp.cross);
    const auto hq = horizontal_segment(cq.cross), vq = vertical_segment(cq.cross);
    if (!perpendicular_point_intersection(hp, vq) && !perpendicular_point_intersection(hq, vp))
        return res;
    res.precondition_ok = true;

    auto sp = nth_snail(path, p, n), sq = nth_snail(path, q, m);
    res.snail_length_sum = sp.snail.length + sq.snail.length;
    res.path_distance = std::abs(path.position(p) - path.position(q));
    const int lo = std::max(sp.snail.lo_index, sq.snail.lo_index);
    const int hi = std::min(sp.snail.hi_index, sq.snail.hi_index);
    const bool share = lo <= hi;
    res.holds = share && res.path_distance <= res.snail_length_sum;
    if (share) res.shared_vertex = path.verts[lo];
    return res;
}

namespace {

long long igcd(long long a, long long b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a < 0 ? -a : a;
}

}  // namespace

std::vector<RayCrossing> ray_intersections(const LatticePath& path, LatticePoint p, int a, int b) {
    if (a == 0 && b == 0) throw std::invalid_argument("ray_intersections: zero direction");
    if (path.position(p) < 0)
        throw std::invalid_argument("ray_intersections: base point not on the path");
    const int idx_p = path.position(p);
    const long long dd = static_cast<long long>(a) * a + static_cast<long long>(b) * b;

    const int nverts = static_cast<int>(path.verts.size());
    auto side = [&](int i) {
        const long long dx = path.verts[i].first - p.first;
        const long long dy = path.verts[i].second - p.second;
        return a * dy - b * dx;  // 0 on the ray's line
    };
    auto s_of_vertex = [&](int i) {  // ray parameter of an on-line vertex
        const long long dx = path.verts[i].first - p.first;
        const long long dy = path.verts[i].second - p.second;
        return std::pair<long long, long long>{a * dx + b * dy, dd};
    };

    std::vector<RayCrossing> out;
    auto push = [&](long long num, long long den, int lo, int hi) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        if (num < 0) return;  // line crossing behind the ray base
        const long long g = std::max<long long>(igcd(num, den), 1);
        RayCrossing rc;
        rc.s_num = num / g;
        rc.s_den = den / g;
        rc.lo_index = lo;
        rc.hi_index = hi;
        const double mid = (lo + hi) / 2.0;
        rc.tag = mid < idx_p ? RayTag::Past : mid > idx_p ? RayTag::Future : RayTag::AtBase;
        out.push_back(rc);
    };

    int i = 0;
    while (i < nverts) {
        const long long si = side(i);
        if (si != 0) {
            // transversal crossing strictly inside the edge [i, i+1]?
            if (i + 1 < nverts) {
                const long long sj = side(i + 1);
                if (sj != 0 && ((si > 0) != (sj > 0))) {
                    // edge point u + r (v-u), r = si / (si - sj)
                    const long long dxu = path.verts[i].first - p.first;
                    const long long dyu = path.verts[i].second - p.second;
                    const long long ex = path.verts[i + 1].first - path.verts[i].first;
                    const long long ey = path.verts[i + 1].second - path.verts[i].second;
                    const long long udotd = a * dxu + b * dyu;
                    const long long edotd = a * ex + b * ey;
                    push(udotd * (si - sj) + si * edotd, dd * (si - sj), i, i + 1);
                }
            }
            ++i;
            continue;
        }
        // run of on-line vertices [i..j]
        int j = i;
        while (j + 1 < nverts && side(j + 1) == 0) ++j;
        const bool has_before = i > 0, has_after = j + 1 < nverts;
        const bool crossing = has_before && has_after && ((side(i - 1) > 0) != (side(j + 1) > 0));
        if (crossing) {
            // parameter: the run vertex closest to the base along the ray
            std::pair<long long, long long> best{0, 0};
            bool found = false;
            for (int k = i; k <= j; ++k) {
                auto s = s_of_vertex(k);
                if (s.first < 0) continue;
                if (!found || s.first * best.second < best.first * s.second) {
                    best = s;
                    found = true;
                }
            }
            if (found) push(best.first, best.second, i, j);
        }
        i = j + 1;
    }
    std::sort(out.begin(), out.end(), [](const RayCrossing& x, const RayCrossing& y) {
        return x.s_num * y.s_den < y.s_num * x.s_den;
    });
    return out;
}

LatticePath sample_self_avoiding_path(int width, int height, int target_length, uint64_t seed) {
    RngStream rng(purpose_seed(seed, Purpose::Scratch));
    // randomized depth-first growth with backtracking; myopic growth alone
    // traps near length 70 on the square lattice
    for (int attempt = 0; attempt < 50; ++attempt) {
        std::vector<LatticePoint> verts{{width / 2, height / 2}};
        std::set<LatticePoint> used{verts[0]};
        std::vector<std::vector<LatticePoint>> untried(1);
        auto options_of = [&](LatticePoint v) {
            std::vector<LatticePoint> opts;
            for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                const LatticePoint nb{v.first + dx, v.second + dy};
                if (nb.first < 0 || nb.first >= width || nb.second < 0 || nb.second >= height)
                    continue;
                if (!used.count(nb)) opts.push_back(nb);
            }
            for (size_t i = opts.size(); i > 1; --i)
                std::swap(opts[i - 1], opts[rng.below(i)]);
            return opts;
        };
        untried[0] = options_of(verts[0]);
        long long budget = 200'000;
        while (static_cast<int>(verts.size()) < target_length && --budget > 0) {
            if (untried.back().empty()) {
                if (verts.size() <= 1) break;  // exhausted
                used.erase(verts.back());
                verts.pop_back();
                untried.pop_back();
                continue;
            }
            const auto nb = untried.back().back();
            untried.back().pop_back();
            if (used.count(nb)) continue;
            verts.push_back(nb);
            used.insert(nb);
            untried.push_back(options_of(nb));
        }
        if (static_cast<int>(verts.size()) >= target_length)
            return make_path(width, height, std::move(verts));
    }
    throw std::runtime_error("sample_self_avoiding_path: growth kept dead-ending");
}

// ---------------------------------------------------------------------------
// Forests.
// ---------------------------------------------------------------------------

ForestView make_forest(int width, int height, std::vector<int> parent) {
    if (static_cast<int>(parent.size()) != width * height)
        throw std::invalid_argument("make_forest: parent map size mismatch");
    ForestView f;
    f.width = width;
    f.height = height;
    f.parent = std::move(parent);
    f.children.assign(f.parent.size(), {});
    const int n = width * height;
    for (int v = 0; v < n; ++v) {
        const int pa = f.parent[v];
        if (pa >= 0) {
            if (pa >= n || !f.in_forest(pa))
                throw std::invalid_argument("make_forest: parent outside the forest");
            f.children[pa].push_back(v);
        }
    }
    // acyclicity: walking up must terminate
    for (int v = 0; v < n; ++v) {
        if (!f.in_forest(v)) continue;
        int steps = 0, u = v;
        while (f.parent[u] >= 0) {
            u = f.parent[u];
            if (++steps > n) throw std::invalid_argument("make_forest: parent map has a cycle");
        }
    }
    // components over undirected parent edges
    f.component.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        if (!f.in_forest(v) || f.component[v] >= 0) continue;
        // find the root of v's tree, then flood
        int root = v;
        while (f.parent[root] >= 0) root = f.parent[root];
        std::vector<int> stack{root};
        f.component[root] = f.component_count;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int c : f.children[u])
                if (f.component[c] < 0) {
                    f.component[c] = f.component_count;
                    stack.push_back(c);
                }
        }
        ++f.component_count;
    }
    return f;
}

std::vector<int> ForestView::stem(int v) const {
    std::vector<int> out;
    while (v >= 0 && in_forest(v)) {
        out.push_back(v);
        v = parent[v];
    }
    return out;
}

ForestView sample_directed_forest(int width, int height, double p, uint64_t seed) {
    if (!(p > 0.0 && p < 1.0) && p != 0.0 && p != 1.0)
        throw std::invalid_argument("sample_directed_forest: p in [0,1] required");
    RngStream rng(purpose_seed(seed, Purpose::Scratch));
    std::vector<int> parent(width * height, -2);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const int v = y * width + x;
            const bool up = rng.bernoulli(p);
            if (up) parent[v] = (y + 1 < height) ? v + width : -1;
            else parent[v] = (x + 1 < width) ? v + 1 : -1;
        }
    return make_forest(width, height, std::move(parent));
}

ComponentClass classify_component(const ForestView& f, int component_id) {
    ComponentClass out;
    std::vector<int> verts;
    for (int v = 0; v < f.width * f.height; ++v)
        if (f.component[v] == component_id) verts.push_back(v);
    if (verts.empty()) throw std::invalid_argument("classify_component: unknown component");

    int contacts = 0;
    bool cut_structure = false;
    for (int v : verts)
        if (f.on_window_boundary(v)) {
            ++contacts;
            int deg = (f.parent[v] >= 0 ? 1 : 0) + static_cast<int>(f.children[v].size());
            if (deg >= 2) cut_structure = true;
        }
    out.boundary_paths = contacts;
    out.kind = contacts == 0   ? ComponentKind::Finite
               : contacts == 1 ? ComponentKind::Single
               : contacts == 2 ? ComponentKind::Bi
                               : ComponentKind::Multi;
    out.undetermined = contacts > 0 && cut_structure;

    // encounter points: interior vertices whose removal leaves >= 3 parts that
    // reach the window boundary. Root the tree and count via subtree sums.
    std::vector<int> boundary_in_subtree(f.width * f.height, 0);
    int root = verts[0];
    while (f.parent[root] >= 0) root = f.parent[root];
    // post-order accumulate
    std::vector<std::pair<int, bool>> stack{{root, false}};
    std::vector<int> order;
    while (!stack.empty()) {
        auto [v, processed] = stack.back();
        stack.pop_back();
        if (processed) {
            order.push_back(v);
            continue;
        }
        stack.push_back({v, true});
        for (int c : f.children[v]) stack.push_back({c, false});
    }
    int total_boundary = 0;
    for (int v : order) {
        int sum = f.on_window_boundary(v) ? 1 : 0;
        for (int c : f.children[v]) sum += boundary_in_subtree[c];
        boundary_in_subtree[v] = sum;
    }
    total_boundary = boundary_in_subtree[root];
    for (int v : verts) {
        if (f.on_window_boundary(v)) continue;
        int parts = 0;
        int below = 0;
        for (int c : f.children[v]) {
            if (boundary_in_subtree[c] > 0) ++parts;
            below += boundary_in_subtree[c];
        }
        if (f.parent[v] >= 0 && total_boundary - below > 0) ++parts;  // the up side
        if (parts >= 3) out.encounter_points.push_back(v);
    }
    return out;
}

MtEstimate mt_estimate(const ForestView& f, std::span<const double> f_values, int margin) {
    if (margin < 1) throw std::invalid_argument("mt_estimate: margin >= 1 required");
    if (static_cast<int>(f_values.size()) != margin)
        throw std::invalid_argument("mt_estimate: need f(1..margin)");
    if (2 * margin >= std::min(f.width, f.height))
        throw std::invalid_argument("mt_estimate: margin too large for the window");
    MtEstimate est;
    for (double x : f_values) est.lhs += x;

    auto in_core = [&](int v) {
        const int x = f.vx(v), y = f.vy(v);
        return std::min(std::min(x, y), std::min(f.width - 1 - x, f.height - 1 - y)) >= margin;
    };
    const int n = f.width * f.height;
    std::vector<double> acc(n, 0.0);
    for (int y0 = 0; y0 < n; ++y0) {
        if (!f.in_forest(y0)) continue;
        int u = y0;
        for (int k = 1; k <= margin; ++k) {
            u = f.parent[u];
            if (u < 0) break;
            if (in_core(u)) acc[u] += f_values[k - 1];
        }
    }
    double sum = 0;
    int core = 0;
    for (int v = 0; v < n; ++v) {
        if (!f.in_forest(v) || !in_core(v)) continue;
        ++core;
        sum += acc[v];
    }
    if (core == 0) throw std::runtime_error("mt_estimate: empty core");
    est.core_size = core;
    est.rhs = sum / core;
    return est;
}

long long count_boundary_path_edges(const ForestView& f, int box_halfwidth) {
    const int n = box_halfwidth;
    const int cx = f.width / 2, cy = f.height / 2;
    if (cx - n < 0 || cy - n < 0 || cx + n >= f.width || cy + n >= f.height)
        throw std::invalid_argument("count_boundary_path_edges: box outside the window");
    auto linf = [&](int v) { return std::max(std::abs(f.vx(v) - cx), std::abs(f.vy(v) - cy)); };

    // reach(v): some vertex of R(v) (v's subtree, v included) lies on or
    // beyond the box shell
    const int total = f.width * f.height;
    std::vector<int8_t> reach(total, 0);
    // process children before parents: order by post-order over every tree
    std::vector<int> order;
    order.reserve(total);
    {
        std::vector<std::pair<int, bool>> stack;
        for (int v = 0; v < total; ++v)
            if (f.in_forest(v) && f.parent[v] < 0) stack.push_back({v, false});
        while (!stack.empty()) {
            auto [v, processed] = stack.back();
            stack.pop_back();
            if (processed) {
                order.push_back(v);
                continue;
            }
            stack.push_back({v, true});
            for (int c : f.children[v]) stack.push_back({c, false});
        }
    }
    for (int v : order) {
        int8_t r = linf(v) >= n ? 1 : 0;
        for (int c : f.children[v]) r = r || reach[c];
        reach[v] = r;
    }
    long long count = 0;
    for (int v = 0; v < total; ++v) {
        if (!f.in_forest(v) || f.parent[v] < 0) continue;
        if (linf(v) <= n && linf(f.parent[v]) <= n && reach[v]) ++count;
    }
    return count;
}

void write_forest(std::ostream& out, const ForestView& f) {
    out << "forest " << f.width << ' ' << f.height << '\n';
    for (size_t v = 0; v < f.parent.size(); ++v) out << v << ' ' << f.parent[v] << '\n';
}

ForestView read_forest(std::istream& in) {
    std::string word;
    int w, h;
    in >> word >> w >> h;
    if (word != "forest") throw std::runtime_error("read_forest: bad header");
    std::vector<int> parent(w * h, -2);
    for (int i = 0; i < w * h; ++i) {
        int v, pa;
        in >> v >> pa;
        if (!in || v < 0 || v >= w * h) throw std::runtime_error("read_forest: bad row");
        parent[v] = pa;
    }
    return make_forest(w, h, std::move(parent));
}

void write_estimator_csv(std::ostream& out, std::span<const EstimatorRow> rows) {
    out << "n,value,stderr,seeds\n";
    for (const auto& r : rows)
        out << r.n << ',' << r.value << ',' << r.stderr_ << ',' << r.seeds << '\n';
}

}  // namespace spinlab

#include "spinlab/planar.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spinlab {

namespace {

std::vector<Edge> window_edges(int w, int h, bool periodic) {
    std::vector<Edge> es;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int v = y * w + x;
            if (periodic) {
                es.push_back({v, y * w + (x + 1) % w});
                es.push_back({v, ((y + 1) % h) * w + x});
            } else {
                if (x + 1 < w) es.push_back({v, v + 1});
                if (y + 1 < h) es.push_back({v, v + w});
            }
        }
    return es;
}

}  // namespace

bool PlanarWindow::is_border_vertex(int v) const {
    if (mode == BoundaryMode::Periodic) return false;
    const int x = vx(v), y = vy(v);
    return x == 0 || y == 0 || x == width - 1 || y == height - 1;
}

bool PlanarWindow::is_cell(int v) const {
    if (mode == BoundaryMode::Periodic) return false;
    const int x = vx(v), y = vy(v);
    return x >= 1 && x <= width - 2 && y >= 1 && y <= height - 2;
}

std::vector<int> PlanarWindow::cell_vertices() const {
    std::vector<int> out;
    for (int y = 1; y <= height - 2; ++y)
        for (int x = 1; x <= width - 2; ++x) out.push_back(vertex_id(x, y));
    return out;
}

std::array<int, 4> PlanarWindow::face_edges(int f) const {
    const int x = fx(f), y = fy(f);
    auto eid = [&](int a, int b) {
        const int e = graph.edge_index(a, b);
        if (e < 0) throw std::logic_error("face_edges: missing edge");
        return e;
    };
    if (mode == BoundaryMode::Periodic) {
        const int x1 = (x + 1) % width, y1 = (y + 1) % height;
        return {eid(vertex_id(x, y), vertex_id(x1, y)), eid(vertex_id(x1, y), vertex_id(x1, y1)),
                eid(vertex_id(x, y1), vertex_id(x1, y1)), eid(vertex_id(x, y), vertex_id(x, y1))};
    }
    return {eid(vertex_id(x, y), vertex_id(x + 1, y)),
            eid(vertex_id(x + 1, y), vertex_id(x + 1, y + 1)),
            eid(vertex_id(x, y + 1), vertex_id(x + 1, y + 1)),
            eid(vertex_id(x, y), vertex_id(x, y + 1))};
}

int PlanarWindow::reference_cell() const {
    const int x = std::clamp(width / 2, 1, width - 2);
    const int y = std::clamp(height / 2, 1, height - 2);
    return vertex_id(x, y);
}

PlanarWindow build_square_window(int width, int height, BoundaryMode mode,
                                 std::vector<int8_t> xi) {
    if (width < 2 || height < 2)
        throw std::invalid_argument("build_square_window: dimensions >= 2 required");
    if (mode == BoundaryMode::Periodic && (width < 3 || height < 3))
        throw std::invalid_argument("build_square_window: periodic mode needs dims >= 3");
    PlanarWindow w;
    w.width = width;
    w.height = height;
    w.mode = mode;
    w.graph = make_graph(width * height, window_edges(width, height, mode == BoundaryMode::Periodic),
                         GraphKind::SquareWindow);
    if (mode == BoundaryMode::Fixed) {
        if (static_cast<int>(xi.size()) != w.graph.n)
            throw std::invalid_argument("build_square_window: fixed mode needs xi of size n");
        w.xi = std::move(xi);
    }
    w.graph.boundary_flag.assign(w.graph.n, 0);
    for (int v = 0; v < w.graph.n; ++v)
        if (w.is_border_vertex(v)) w.graph.boundary_flag[v] = 1;

    if (mode == BoundaryMode::Periodic) {
        w.faces_x = width;
        w.faces_y = height;
        // On the torus every edge has a dual partner.
        w.dual_of_primal.assign(w.graph.edge_count(), -1);
        for (int f = 0; f < w.face_count(); ++f) {
            // attribute bottom and left edge of each face once
            const int x = w.fx(f), y = w.fy(f);
            const int x1 = (x + 1) % width, y1 = (y + 1) % height;
            const int fb = w.face_id(x, (y + height - 1) % height);
            const int fl = w.face_id((x + width - 1) % width, y);
            const int eb = w.graph.edge_index(w.vertex_id(x, y), w.vertex_id(x1, y));
            const int el = w.graph.edge_index(w.vertex_id(x, y), w.vertex_id(x, y1));
            for (auto [e, other] : {std::pair{eb, fb}, std::pair{el, fl}}) {
                if (w.dual_of_primal[e] >= 0) continue;
                w.dual_of_primal[e] = static_cast<int>(w.primal_of_dual.size());
                w.primal_of_dual.push_back(e);
                w.dual_ends.push_back({std::min(f, other), std::max(f, other)});
            }
        }
        return w;
    }

    w.faces_x = width - 1;
    w.faces_y = height - 1;
    w.dual_of_primal.assign(w.graph.edge_count(), -1);
    for (int e = 0; e < w.graph.edge_count(); ++e) {
        const auto [u, v] = w.graph.edges[e];
        const int ux = w.vx(u), uy = w.vy(u);
        int fa = -1, fb = -1;
        if (w.vy(v) == uy) {  // horizontal primal edge: interior iff 1 <= y <= h-2
            if (uy >= 1 && uy <= height - 2) {
                fa = w.face_id(ux, uy - 1);
                fb = w.face_id(ux, uy);
            }
        } else {  // vertical primal edge: interior iff 1 <= x <= w-2
            if (ux >= 1 && ux <= width - 2) {
                fa = w.face_id(ux - 1, uy);
                fb = w.face_id(ux, uy);
            }
        }
        if (fa >= 0) {
            w.dual_of_primal[e] = static_cast<int>(w.primal_of_dual.size());
            w.primal_of_dual.push_back(e);
            w.dual_ends.push_back({std::min(fa, fb), std::max(fa, fb)});
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Loop construction from an enclosed cell set.
// ---------------------------------------------------------------------------

namespace {

struct BoundarySegment {
    int fa, fb;          // faces, fa < fb
    int crossed_primal;  // primal edge the segment crosses
};

// Boundary segments of a cell set (cells = interior primal vertex ids).
// Returns false if the window's dual structure cannot host the set.
bool boundary_segments(const PlanarWindow& w, const std::set<int>& cells,
                       std::vector<BoundarySegment>& out) {
    out.clear();
    for (int c : cells) {
        if (!w.is_cell(c)) return false;
        const int x = w.vx(c), y = w.vy(c);
        struct Side {
            int nx, ny;        // neighbor vertex that must be outside
            int fax, fay, fbx, fby;  // faces of the segment
            int px, py, qx, qy;      // crossed primal edge endpoints
        };
        const Side sides[4] = {
            {x, y - 1, x - 1, y - 1, x, y - 1, x, y - 1, x, y},      // south
            {x, y + 1, x - 1, y, x, y, x, y, x, y + 1},              // north
            {x - 1, y, x - 1, y - 1, x - 1, y, x - 1, y, x, y},      // west
            {x + 1, y, x, y - 1, x, y, x, y, x + 1, y},              // east
        };
        for (const auto& s : sides) {
            if (cells.count(w.vertex_id(s.nx, s.ny))) continue;
            const int fa = w.face_id(s.fax, s.fay), fb = w.face_id(s.fbx, s.fby);
            const int e = w.graph.edge_index(w.vertex_id(s.px, s.py), w.vertex_id(s.qx, s.qy));
            if (e < 0 || w.dual_of_primal[e] < 0) return false;
            out.push_back({std::min(fa, fb), std::max(fa, fb), e});
        }
    }
    return true;
}

// Walks the boundary; returns the face cycle (canonical start and direction)
// or an empty vector when the boundary is not a single simple cycle.
std::vector<int> walk_cycle(const std::vector<BoundarySegment>& segs) {
    std::map<int, std::vector<int>> at;  // face -> segment indices
    for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
        at[segs[i].fa].push_back(i);
        at[segs[i].fb].push_back(i);
    }
    for (const auto& [f, ids] : at)
        if (ids.size() != 2) return {};  // pinch point or broken boundary

    const int start = at.begin()->first;
    std::vector<int> cycle{start};
    std::vector<uint8_t> used(segs.size(), 0);
    // deterministic direction: of the two segments at start, take the one
    // leading to the smaller neighbor face
    auto other_end = [&](int si, int f) { return segs[si].fa == f ? segs[si].fb : segs[si].fa; };
    {
        const auto& ids = at[start];
        int s0 = ids[0], s1 = ids[1];
        if (other_end(s1, start) < other_end(s0, start)) std::swap(s0, s1);
        used[s0] = 1;
        cycle.push_back(other_end(s0, start));
    }
    while (cycle.back() != start) {
        const int f = cycle.back();
        int next_seg = -1;
        for (int si : at[f])
            if (!used[si]) next_seg = si;
        if (next_seg < 0) return {};
        used[next_seg] = 1;
        const int nf = other_end(next_seg, f);
        if (nf == start) break;
        cycle.push_back(nf);
    }
    if (!std::all_of(used.begin(), used.end(), [](uint8_t u) { return u != 0; }))
        return {};  // leftover segments: the set has a hole
    return cycle;
}

std::optional<DualLoop> try_loop_from_cells(const PlanarWindow& w, const std::set<int>& cells) {
    if (cells.empty()) return std::nullopt;
    // connectivity of the cell set
    {
        std::set<int> seen;
        std::vector<int> stack{*cells.begin()};
        seen.insert(*cells.begin());
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            const int x = w.vx(c), y = w.vy(c);
            for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                const int nb = w.vertex_id(x + dx, y + dy);
                if (cells.count(nb) && !seen.count(nb)) {
                    seen.insert(nb);
                    stack.push_back(nb);
                }
            }
        }
        if (seen.size() != cells.size()) return std::nullopt;
    }
    std::vector<BoundarySegment> segs;
    if (!boundary_segments(w, cells, segs)) return std::nullopt;
    auto cycle = walk_cycle(segs);
    if (cycle.empty()) return std::nullopt;

    DualLoop loop;
    loop.cells.assign(cells.begin(), cells.end());
    loop.face_cycle = std::move(cycle);
    std::set<int> duals, primals, vg(cells.begin(), cells.end());
    for (const auto& s : segs) {
        duals.insert(w.dual_of_primal[s.crossed_primal]);
        primals.insert(s.crossed_primal);
        vg.insert(w.graph.edges[s.crossed_primal].u);
        vg.insert(w.graph.edges[s.crossed_primal].v);
    }
    loop.dual_edges.assign(duals.begin(), duals.end());
    loop.crossed_primal_edges.assign(primals.begin(), primals.end());
    loop.vgamma.assign(vg.begin(), vg.end());
    return loop;
}

}  // namespace

DualLoop loop_from_cells(const PlanarWindow& w, std::span<const int> cells) {
    if (w.mode == BoundaryMode::Periodic)
        throw std::invalid_argument("loop_from_cells: loops are not defined on periodic windows");
    std::set<int> cs(cells.begin(), cells.end());
    auto loop = try_loop_from_cells(w, cs);
    if (!loop)
        throw std::invalid_argument(
            "loop_from_cells: cell set is not a simply-connected interior polyomino");
    return *loop;
}

// ---------------------------------------------------------------------------
// Enumeration: connected interior cell sets with perimeter <= max_length.
// ---------------------------------------------------------------------------

namespace {

// fixed polyominoes by cell count (A001168); used only for the budget guard
constexpr std::array<long long, 9> kFixedPolyominoes{1, 2, 6, 19, 63, 216, 760, 2725, 9910};

struct Enumerator {
    const PlanarWindow& w;
    int max_length;
    std::size_t cap;
    std::vector<int> cells;  // all interior vertices
    std::vector<DualLoop>& out;

    std::set<int> current;
    int internal_adjacencies = 0;
    std::vector<uint8_t> banned, in_ext;

    Enumerator(const PlanarWindow& w_, int max_len, std::size_t cap_, std::vector<DualLoop>& out_)
        : w(w_), max_length(max_len), cap(cap_), out(out_) {
        banned.assign(w.graph.n, 0);
        in_ext.assign(w.graph.n, 0);
    }

    int kmax() const { return std::max(1, (max_length * max_length) / 16); }

    std::vector<int> cell_neighbors(int c) const {
        std::vector<int> nb;
        const int x = w.vx(c), y = w.vy(c);
        for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            const int v = w.vertex_id(x + dx, y + dy);
            if (w.is_cell(v)) nb.push_back(v);
        }
        return nb;
    }

    void visit() {
        const int perim = 4 * static_cast<int>(current.size()) - 2 * internal_adjacencies;
        if (perim > max_length) return;
        if (auto loop = try_loop_from_cells(w, current)) {
            if (out.size() >= cap) throw std::length_error("enumerate_dual_loops: cap exceeded");
            out.push_back(std::move(*loop));
        }
    }

    void add_cell(int c) {
        for (int nb : cell_neighbors(c))
            if (current.count(nb)) ++internal_adjacencies;
        current.insert(c);
    }
    void remove_cell(int c) {
        current.erase(c);
        for (int nb : cell_neighbors(c))
            if (current.count(nb)) --internal_adjacencies;
    }

    // Enumerates every connected superset of `current` reachable through the
    // candidate list exactly once. in_ext marks are owned by the frame that
    // set them and are cleared only on that frame's exit; consumed candidates
    // stay marked (they are in `current` or `banned` for the relevant window).
    void grow(int seed, std::vector<int> ext) {
        visit();
        if (static_cast<int>(current.size()) >= kmax()) return;
        std::vector<int> banned_here;
        size_t idx = 0;
        while (idx < ext.size()) {
            const int c = ext[idx++];
            std::vector<int> child_ext(ext.begin() + idx, ext.end());
            std::vector<int> marked;
            for (int nb : cell_neighbors(c)) {
                if (nb <= seed || banned[nb] || in_ext[nb] || current.count(nb)) continue;
                child_ext.push_back(nb);
                in_ext[nb] = 1;
                marked.push_back(nb);
            }
            add_cell(c);
            grow(seed, std::move(child_ext));
            remove_cell(c);
            for (int nb : marked) in_ext[nb] = 0;
            banned[c] = 1;
            banned_here.push_back(c);
        }
        for (int c : banned_here) banned[c] = 0;
    }

    void run() {
        cells = w.cell_vertices();
        // budget prediction before enumerating
        const int k = kmax();
        long long per_cell = 0;
        for (int i = 0; i < k; ++i)
            per_cell += (i < static_cast<int>(kFixedPolyominoes.size()))
                            ? (i + 1) * kFixedPolyominoes[i]
                            : kFixedPolyominoes.back() * 8 * (i + 1);
        if (static_cast<long long>(cells.size()) * per_cell > static_cast<long long>(cap) * 64)
            throw std::length_error("enumerate_dual_loops: predicted loop count exceeds cap");
        for (int seed : cells) {
            add_cell(seed);
            std::vector<int> ext;
            for (int nb : cell_neighbors(seed))
                if (nb > seed) {
                    ext.push_back(nb);
                    in_ext[nb] = 1;
                }
            grow(seed, ext);
            for (int nb : ext) in_ext[nb] = 0;
            remove_cell(seed);
        }
    }
};

}  // namespace

std::vector<DualLoop> enumerate_dual_loops(const PlanarWindow& w, int max_length, std::size_t cap) {
    if (w.mode == BoundaryMode::Periodic)
        throw std::invalid_argument("enumerate_dual_loops: periodic windows are not supported");
    if (max_length < 4) throw std::invalid_argument("enumerate_dual_loops: max_length >= 4 required");
    std::vector<DualLoop> out;
    Enumerator en(w, max_length, cap, out);
    en.run();
    std::sort(out.begin(), out.end(), [](const DualLoop& a, const DualLoop& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        return a.cells < b.cells;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Congruence types.
// ---------------------------------------------------------------------------

namespace {

using CellCoords = std::vector<std::pair<int, int>>;

CellCoords normalize(CellCoords cs) {
    int mx = cs[0].first, my = cs[0].second;
    for (auto [x, y] : cs) {
        mx = std::min(mx, x);
        my = std::min(my, y);
    }
    for (auto& [x, y] : cs) {
        x -= mx;
        y -= my;
    }
    std::sort(cs.begin(), cs.end());
    return cs;
}

CellCoords apply_symmetry(const CellCoords& cs, int sym) {
    CellCoords out;
    out.reserve(cs.size());
    for (auto [x, y] : cs) {
        if (sym & 4) x = -x;              // reflection
        switch (sym & 3) {                // rotation by 90 degrees, sym&3 times
            case 0: out.push_back({x, y}); break;
            case 1: out.push_back({y, -x}); break;
            case 2: out.push_back({-x, -y}); break;
            case 3: out.push_back({-y, x}); break;
        }
    }
    return out;
}

// Distinct normalized orientations of a polyomino under the dihedral group.
std::vector<CellCoords> orientations(const CellCoords& canon) {
    std::set<CellCoords> seen;
    for (int s = 0; s < 8; ++s) seen.insert(normalize(apply_symmetry(canon, s)));
    return {seen.begin(), seen.end()};
}

std::string cells_key(const CellCoords& cs) {
    std::string k;
    for (auto [x, y] : cs) {
        k += std::to_string(x);
        k += ',';
        k += std::to_string(y);
        k += ';';
    }
    return k;
}

}  // namespace

LoopType canonical_loop_type(const PlanarWindow& w, const DualLoop& loop) {
    CellCoords cs;
    for (int c : loop.cells) cs.push_back({w.vx(c), w.vy(c)});
    CellCoords canon = normalize(cs);
    for (int s = 1; s < 8; ++s) canon = std::min(canon, normalize(apply_symmetry(cs, s)));

    LoopType t;
    t.canonical_cells = canon;
    t.key = cells_key(canon);
    t.length = loop.length();
    t.span = loop.span();

    // n_[gamma]: distinct placements of the type covering a fixed cell,
    // over all orientations and translations.
    std::set<CellCoords> placements;
    for (const auto& ori : orientations(canon)) {
        for (const auto& anchor : ori) {
            CellCoords placed;
            for (auto [x, y] : ori) placed.push_back({x - anchor.first, y - anchor.second});
            std::sort(placed.begin(), placed.end());
            placements.insert(placed);
        }
    }
    t.members_at_origin = static_cast<int>(placements.size());

    // truncation: does every placement covering the reference cell fit the window?
    const int rx = w.vx(w.reference_cell()), ry = w.vy(w.reference_cell());
    t.truncated = false;
    for (const auto& placed : placements)
        for (auto [dx, dy] : placed) {
            const int x = rx + dx, y = ry + dy;
            if (x < 1 || x > w.width - 2 || y < 1 || y > w.height - 2) t.truncated = true;
        }
    return t;
}

int LoopEnsemble::count_of_length(int l) const {
    int c = 0;
    for (const auto& t : types)
        if (t.length == l) ++c;
    return c;
}

LoopEnsemble build_loop_ensemble(const PlanarWindow& w, int max_length, std::size_t cap) {
    LoopEnsemble ens;
    ens.max_length = max_length;
    ens.loops = enumerate_dual_loops(w, max_length, cap);
    std::map<std::string, int> by_key;
    ens.type_of.resize(ens.loops.size());
    for (size_t i = 0; i < ens.loops.size(); ++i) {
        LoopType t = canonical_loop_type(w, ens.loops[i]);
        auto it = by_key.find(t.key);
        if (it == by_key.end()) {
            it = by_key.insert({t.key, static_cast<int>(ens.types.size())}).first;
            ens.types.push_back(std::move(t));
        }
        ens.type_of[i] = it->second;
    }
    ens.loops_on_dual_edge.assign(w.dual_edge_count(), {});
    for (size_t i = 0; i < ens.loops.size(); ++i)
        for (int d : ens.loops[i].dual_edges)
            ens.loops_on_dual_edge[d].push_back(static_cast<int>(i));
    return ens;
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

void write_window(std::ostream& out, const PlanarWindow& w) {
    const char* m = w.mode == BoundaryMode::Free      ? "free"
                    : w.mode == BoundaryMode::Fixed   ? "fixed"
                                                      : "periodic";
    out << "window " << w.width << ' ' << w.height << ' ' << m << ' ' << w.graph.edge_count()
        << '\n';
    if (w.mode == BoundaryMode::Fixed) {
        out << "xi";
        for (auto v : w.xi) out << ' ' << int(v);
        out << '\n';
    }
    for (const auto& e : w.graph.edges) out << e.u << ' ' << e.v << '\n';
}

PlanarWindow read_window(std::istream& in) {
    std::string word, m;
    int wd = 0, ht = 0, ec = 0;
    in >> word >> wd >> ht >> m >> ec;
    if (word != "window") throw std::runtime_error("read_window: bad header");
    BoundaryMode mode = m == "free"      ? BoundaryMode::Free
                        : m == "fixed"   ? BoundaryMode::Fixed
                        : m == "periodic" ? BoundaryMode::Periodic
                                          : throw std::runtime_error("read_window: bad mode");
    std::vector<int8_t> xi;
    if (mode == BoundaryMode::Fixed) {
        in >> word;
        if (word != "xi") throw std::runtime_error("read_window: missing xi");
        xi.resize(wd * ht);
        for (auto& v : xi) {
            int x;
            in >> x;
            v = static_cast<int8_t>(x);
        }
    }
    PlanarWindow w = build_square_window(wd, ht, mode, std::move(xi));
    if (ec != w.graph.edge_count()) throw std::runtime_error("read_window: edge count mismatch");
    for (int i = 0; i < ec; ++i) {
        int u, v;
        in >> u >> v;
        if (!in || w.graph.edge_index(u, v) < 0)
            throw std::runtime_error("read_window: edge list mismatch");
    }
    return w;
}

void write_loops(std::ostream& out, const PlanarWindow& w, std::span<const DualLoop> loops) {
    out << "loops " << w.width << ' ' << w.height << ' ' << loops.size() << '\n';
    for (const auto& l : loops) {
        out << l.face_cycle.size();
        for (int f : l.face_cycle) out << ' ' << f;
        out << '\n';
    }
}

std::vector<DualLoop> read_loops(std::istream& in, const PlanarWindow& w) {
    std::string word;
    int wd, ht;
    size_t count;
    in >> word >> wd >> ht >> count;
    if (word != "loops" || wd != w.width || ht != w.height)
        throw std::runtime_error("read_loops: header mismatch");
    std::vector<DualLoop> out;
    for (size_t i = 0; i < count; ++i) {
        size_t k;
        in >> k;
        std::vector<int> cyc(k);
        for (auto& f : cyc) in >> f;
        if (!in) throw std::runtime_error("read_loops: truncated");
        // recover enclosed cells by horizontal-ray parity against the cycle's
        // vertical segments, then rebuild the loop
        std::set<std::pair<int, int>> vsegs;  // (x, lower y) in face coordinates
        for (size_t j = 0; j < k; ++j) {
            const int a = cyc[j], b = cyc[(j + 1) % k];
            if (w.fx(a) == w.fx(b)) vsegs.insert({w.fx(a), std::min(w.fy(a), w.fy(b))});
        }
        std::vector<int> cells;
        for (int c : w.cell_vertices()) {
            const int x = w.vx(c), y = w.vy(c);
            int crossings = 0;
            for (const auto& [sx, sy] : vsegs)
                if (sy == y - 1 && sx < x) ++crossings;
            if (crossings % 2 == 1) cells.push_back(c);
        }
        out.push_back(loop_from_cells(w, cells));
    }
    return out;
}

}  // namespace spinlab

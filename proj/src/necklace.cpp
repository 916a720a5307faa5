#include "twistlab/necklace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "twistlab/util.hpp"

namespace twistlab {

int BalancedCode::popcount() const {
    int c = 0;
    for (auto w : words) c += std::popcount(w);
    return c;
}

int BalancedCode::and_popcount(const BalancedCode& other) const {
    int c = 0;
    for (std::size_t i = 0; i < words.size(); ++i) c += std::popcount(words[i] & other.words[i]);
    return c;
}

BalancedCode make_code(int n_bits) {
    BalancedCode c;
    c.n_bits = n_bits;
    c.words.assign(static_cast<size_t>((n_bits + 63) / 64), 0);
    return c;
}

std::vector<BalancedCode> sample_codes(int N, int M, std::uint64_t seed) {
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("sample_codes: N must be even, >= 2");
    Rng rng = Rng(seed).substream("codes");
    std::vector<BalancedCode> out;
    out.reserve(static_cast<size_t>(M));
    std::vector<int> idx(static_cast<size_t>(N));
    for (int j = 0; j < M; ++j) {
        for (int i = 0; i < N; ++i) idx[static_cast<size_t>(i)] = i;
        rng.shuffle(idx);
        BalancedCode c = make_code(N);
        for (int i = 0; i < N / 2; ++i) c.set(idx[static_cast<size_t>(i)]);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<BalancedCode> sample_codes_balanced(int N, int M, std::uint64_t seed) {
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("sample_codes_balanced: N even, >= 2");
    Rng rng = Rng(seed).substream("codes_balanced");
    int rows = M, cols = N / 2;
    // usage multiset: each color appears floor(M/2) or ceil(M/2) times, total M*N/2
    std::vector<int> colors(static_cast<size_t>(N));
    for (int k = 0; k < N; ++k) colors[static_cast<size_t>(k)] = k;
    rng.shuffle(colors);
    std::vector<int> slots;
    slots.reserve(static_cast<size_t>(rows) * static_cast<size_t>(cols));
    int lo = M / 2, hi = (M + 1) / 2;
    int hi_count = (rows * cols) - lo * N;  // how many colors take the larger usage
    hi_count = hi == lo ? 0 : hi_count;
    for (int t = 0; t < N; ++t) {
        int usage = t < hi_count ? hi : lo;
        for (int u = 0; u < usage; ++u) slots.push_back(colors[static_cast<size_t>(t)]);
    }
    rng.shuffle(slots);

    // deal into rows, then repair duplicate colors within a row by swapping
    auto slot = [&](int r, int c) -> int& { return slots[static_cast<size_t>(r * cols + c)]; };
    auto row_has = [&](int r, int color, int skip_c) {
        for (int c = 0; c < cols; ++c)
            if (c != skip_c && slot(r, c) == color) return true;
        return false;
    };
    for (int guard = 0; guard < 100000; ++guard) {
        bool clean = true;
        for (int r = 0; r < rows && clean; ++r) {
            for (int c = 0; c < cols; ++c) {
                if (!row_has(r, slot(r, c), c)) continue;
                clean = false;
                // swap with a random slot elsewhere that breaks the duplicate
                for (int attempt = 0; attempt < 10000; ++attempt) {
                    int r2 = static_cast<int>(rng.below(static_cast<std::uint64_t>(rows)));
                    int c2 = static_cast<int>(rng.below(static_cast<std::uint64_t>(cols)));
                    if (r2 == r) continue;
                    int a = slot(r, c), b = slot(r2, c2);
                    if (a == b) continue;
                    if (row_has(r, b, -1) || row_has(r2, a, -1)) continue;
                    std::swap(slot(r, c), slot(r2, c2));
                    break;
                }
                break;
            }
        }
        if (clean) break;
        if (guard == 99999)
            throw std::runtime_error("sample_codes_balanced: repair loop failed to converge");
    }

    std::vector<BalancedCode> out;
    out.reserve(static_cast<size_t>(M));
    for (int r = 0; r < rows; ++r) {
        BalancedCode code = make_code(N);
        for (int c = 0; c < cols; ++c) code.set(slot(r, c));
        if (code.popcount() != N / 2)
            throw std::runtime_error("sample_codes_balanced: row has duplicate colors");
        out.push_back(std::move(code));
    }
    return out;
}

Coloring coloring_from_codes(int N, const std::vector<BalancedCode>& codes) {
    Coloring c;
    c.n_colors = N;
    c.pearls = N / 2;
    c.codes = codes;
    c.cols.reserve(codes.size());
    for (const auto& code : codes) {
        std::vector<int> col;
        col.reserve(static_cast<size_t>(N / 2));
        for (int i = 0; i < N; ++i)
            if (code.get(i)) col.push_back(i);
        if (static_cast<int>(col.size()) != N / 2)
            throw std::invalid_argument("coloring_from_codes: code is not balanced");
        c.cols.push_back(std::move(col));
    }
    return c;
}

ColoringReport verify_coloring(const Coloring& c, int n, double eps) {
    ColoringReport rep;
    int N = c.n_colors;
    int M = static_cast<int>(c.cols.size());
    rep.usage.assign(static_cast<size_t>(N), 0);
    for (const auto& col : c.cols)
        for (int k : col) rep.usage[static_cast<size_t>(k)]++;
    rep.max_usage = 0;
    for (int u : rep.usage) rep.max_usage = std::max(rep.max_usage, u);
    rep.usage_threshold = M * (1.0 + eps) / 2.0;
    rep.usage_threshold_paper = M * (1.0 + std::pow(eps, 3) / (static_cast<double>(n) * n)) / 2.0;
    // a single necklace cannot crowd any case; the fractional threshold is
    // only meaningful once M(1+eps)/2 >= 1
    rep.property1 = rep.max_usage <= rep.usage_threshold || rep.max_usage <= 1;

    // max pairwise agreement via popcount of bitwise AND, parallel over columns
    std::vector<int> col_max(static_cast<size_t>(M), 0);
    parallel_for(static_cast<size_t>(M), [&](std::size_t j) {
        int best = 0;
        for (std::size_t j2 = j + 1; j2 < static_cast<size_t>(M); ++j2)
            best = std::max(best, c.codes[j].and_popcount(c.codes[j2]));
        col_max[j] = best;
    });
    rep.max_agreement = 0;
    for (int v : col_max) rep.max_agreement = std::max(rep.max_agreement, v);
    rep.agreement_fraction = M >= 2 ? 2.0 * rep.max_agreement / N : 0.0;
    rep.property2 = M < 2 || rep.agreement_fraction < 0.75;
    rep.pass = rep.property1 && rep.property2;
    return rep;
}

BernsteinReport bernstein_bounds(int N, int M, double eps) {
    BernsteinReport r;
    r.p0 = 2.0 * std::exp(-(M * eps * eps) / (2.0 * (1.0 + eps / 3.0)));
    r.p = std::sqrt(2.0 * N) * std::exp(-N / 10.0);
    r.pair_term = 0.5 * static_cast<double>(M) * M * r.p;
    r.code_term = N * r.p0;
    r.total = r.code_term + r.pair_term;
    return r;
}

// ---- layout -------------------------------------------------------------------

NecklaceLayout build_layout(int n, double eps) {
    if (n < 2) throw std::invalid_argument("build_layout: n >= 2");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("build_layout: eps in (0,1)");
    double c1_lhs = 1.0 - eps, c1_rhs = std::pow(1.0 - eps * eps, 2);
    if (!(c1_lhs < c1_rhs))
        throw std::invalid_argument("build_layout: eps violates (1-eps) < (1-eps^2)^2");
    double c2 = 0.25 - 0.25 * std::pow(eps, 3) - std::sqrt(2.0) * eps / n;
    if (!(c2 > 0.2))
        throw std::invalid_argument("build_layout: eps violates the separation inequality");

    NecklaceLayout l;
    l.n = n;
    l.N = 2 * n * n;
    l.eps = eps;
    double M_real = std::pow(2.0 * l.N, -0.25) * std::exp(l.N / 20.0);
    if (M_real < 1.0) throw std::invalid_argument("build_layout: M < 1 at this n");
    l.M = static_cast<int>(std::floor(M_real));
    l.eta = eps * eps / (5.0 * n);

    // M >= exp(eta^{-2+eps}) is the asymptotic requirement; evaluated in logs
    double exponent = std::pow(l.eta, -2.0 + eps);
    l.exp_bound_holds = std::log(static_cast<double>(l.M)) >= exponent;

    l.pearl_width = (1.0 - 2.0 * std::pow(eps, 3) / l.N) * 2.0 / l.N;
    l.pearl_height = (1.0 - eps) * 2.0 / l.M;
    l.pearl_volume = l.pearl_width * l.pearl_height;
    l.case_side = (1.0 - eps * eps) / n;
    l.case_volume = l.case_side * l.case_side;
    l.case_gap = eps * eps / n;

    l.segments.resize(static_cast<size_t>(l.M));
    for (int j = 0; j < l.M; ++j) {
        l.segments[static_cast<size_t>(j)] = {(j + eps / 2.0) * 2.0 / l.M,
                                              (j + 1.0 - eps / 2.0) * 2.0 / l.M};
    }
    return l;
}

NecklaceLayout::Box NecklaceLayout::pearl(int i, int j) const {
    double margin = std::pow(eps, 3) / N;
    Box b;
    b.th_lo = (i + margin) * 2.0 / N;
    b.th_hi = (i + 1.0 - margin) * 2.0 / N;
    b.y_lo = segments[static_cast<size_t>(j)].lo;
    b.y_hi = segments[static_cast<size_t>(j)].hi;
    return b;
}

NecklaceLayout::Box NecklaceLayout::case_box(int k) const {
    auto [zx, zy] = case_anchor(k);
    double inset = eps * eps / (2.0 * n);
    Box b;
    b.th_lo = zx + inset;
    b.th_hi = zx + inset + case_side;
    b.y_lo = zy + inset;
    b.y_hi = zy + inset + case_side;
    return b;
}

std::pair<double, double> NecklaceLayout::case_anchor(int k) const {
    int xk = k % n;
    int yk = k / n;  // 0 .. 2n-1
    return {static_cast<double>(xk) / n, static_cast<double>(yk) / n};
}

// ---- rearrangements -------------------------------------------------------------

Rearrangement::Rearrangement(std::vector<Piece> pieces, double y_period)
    : pieces_(std::move(pieces)), y_period_(y_period) {
    order_.resize(pieces_.size());
    torder_.resize(pieces_.size());
    for (std::size_t i = 0; i < pieces_.size(); ++i) order_[i] = torder_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        if (pieces_[a].s_th_lo != pieces_[b].s_th_lo)
            return pieces_[a].s_th_lo < pieces_[b].s_th_lo;
        return pieces_[a].s_y_lo < pieces_[b].s_y_lo;
    });
    std::sort(torder_.begin(), torder_.end(), [&](std::size_t a, std::size_t b) {
        if (pieces_[a].t_th_lo != pieces_[b].t_th_lo)
            return pieces_[a].t_th_lo < pieces_[b].t_th_lo;
        return pieces_[a].t_y_lo < pieces_[b].t_y_lo;
    });
    for (const auto& p : pieces_) {
        max_src_w_ = std::max(max_src_w_, p.s_th_hi - p.s_th_lo);
        max_tgt_w_ = std::max(max_tgt_w_, p.t_th_hi - p.t_th_lo);
    }
}

namespace {

// keep affine images strictly inside their half-open boxes so edge rounding
// cannot flip the piece selected by the reverse lookup
double clamp_into(double v, double lo, double hi) {
    if (v < lo) return lo;
    if (v >= hi) return std::nextafter(hi, lo);
    return v;
}

double reduce_period(double y, double period) {
    if (period <= 0.0) return y;
    double r = y - period * std::floor(y / period);
    if (r >= period) r -= period;
    return r;
}

}  // namespace

const Rearrangement::Piece* Rearrangement::find_source(double th, double y) const {
    // scan backward from the first piece with s_th_lo > th
    std::size_t lo = 0, hi = order_.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (pieces_[order_[mid]].s_th_lo <= th) lo = mid + 1;
        else hi = mid;
    }
    for (std::size_t k = lo; k-- > 0;) {
        const Piece& p = pieces_[order_[k]];
        if (p.s_th_lo < th - max_src_w_) break;
        if (p.s_th_hi <= th) continue;
        if (th >= p.s_th_lo && y >= p.s_y_lo && y < p.s_y_hi) return &p;
    }
    return nullptr;
}

const Rearrangement::Piece* Rearrangement::find_target(double th, double y) const {
    std::size_t lo = 0, hi = torder_.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (pieces_[torder_[mid]].t_th_lo <= th) lo = mid + 1;
        else hi = mid;
    }
    for (std::size_t k = lo; k-- > 0;) {
        const Piece& p = pieces_[torder_[k]];
        if (p.t_th_lo < th - max_tgt_w_) break;
        if (p.t_th_hi <= th) continue;
        if (th >= p.t_th_lo && y >= p.t_y_lo && y < p.t_y_hi) return &p;
    }
    return nullptr;
}

AnnulusPoint Rearrangement::apply(const AnnulusPoint& x) const {
    double th = mod1(x.theta);
    double y = reduce_period(x.y, y_period_);
    const Piece* p = find_source(th, y);
    if (p == nullptr) return {th, x.y};
    double sx = (p->t_th_hi - p->t_th_lo) / (p->s_th_hi - p->s_th_lo);
    double sy = (p->t_y_hi - p->t_y_lo) / (p->s_y_hi - p->s_y_lo);
    double nth = clamp_into(p->t_th_lo + (th - p->s_th_lo) * sx, p->t_th_lo, p->t_th_hi);
    double ny = clamp_into(p->t_y_lo + (y - p->s_y_lo) * sy, p->t_y_lo, p->t_y_hi);
    // re-attach the period offset without disturbing the clamped value
    return {mod1(nth), ny + (x.y - y)};
}

AnnulusPoint Rearrangement::apply_inverse(const AnnulusPoint& x) const {
    double th = mod1(x.theta);
    double y = reduce_period(x.y, y_period_);
    const Piece* p = find_target(th, y);
    if (p == nullptr) return {th, x.y};
    double sx = (p->s_th_hi - p->s_th_lo) / (p->t_th_hi - p->t_th_lo);
    double sy = (p->s_y_hi - p->s_y_lo) / (p->t_y_hi - p->t_y_lo);
    double nth = clamp_into(p->s_th_lo + (th - p->t_th_lo) * sx, p->s_th_lo, p->s_th_hi);
    double ny = clamp_into(p->s_y_lo + (y - p->t_y_lo) * sy, p->s_y_lo, p->s_y_hi);
    return {mod1(nth), ny + (x.y - y)};
}

double Rearrangement::max_piece_scale() const {
    double s = 1.0;
    for (const auto& p : pieces_) {
        double sx = (p.t_th_hi - p.t_th_lo) / (p.s_th_hi - p.s_th_lo);
        double sy = (p.t_y_hi - p.t_y_lo) / (p.s_y_hi - p.s_y_lo);
        s = std::max({s, sx, 1.0 / sx, sy, 1.0 / sy});
    }
    return s;
}

Rearrangement build_rearrangement(const NecklaceLayout& layout, const Coloring& coloring) {
    int N = layout.N;
    int M = layout.M;
    if (coloring.n_colors != N || static_cast<int>(coloring.cols.size()) != M)
        throw std::invalid_argument("build_rearrangement: coloring does not match layout");

    // strips stack bottom-up inside each case in (i, j) lexicographic order
    double strip_h = layout.pearl_volume / layout.case_side;
    // column j colors pearl rows 0..N/2-1 in order
    std::vector<std::vector<std::pair<int, int>>> by_color(static_cast<size_t>(N));
    for (int j = 0; j < M; ++j) {
        const auto& col = coloring.cols[static_cast<size_t>(j)];
        for (int i = 0; i < static_cast<int>(col.size()); ++i)
            by_color[static_cast<size_t>(col[static_cast<size_t>(i)])].push_back({i, j});
    }
    for (int k = 0; k < N; ++k) {
        auto& v = by_color[static_cast<size_t>(k)];
        std::sort(v.begin(), v.end());
        double need = static_cast<double>(v.size()) * strip_h;
        if (need > layout.case_side * (1.0 + 1e-12))
            throw std::runtime_error(
                "build_rearrangement: capacity violation in case " + std::to_string(k) +
                " (usage " + std::to_string(v.size()) + "); coloring property (1) failed");
    }

    std::vector<Rearrangement::Piece> pieces;
    for (int k = 0; k < N; ++k) {
        auto cb = layout.case_box(k);
        const auto& v = by_color[static_cast<size_t>(k)];
        for (std::size_t idx = 0; idx < v.size(); ++idx) {
            auto [i, j] = v[idx];
            auto pb = layout.pearl(i, j);
            Rearrangement::Piece p;
            p.s_th_lo = pb.th_lo;
            p.s_th_hi = pb.th_hi;
            p.s_y_lo = pb.y_lo;
            p.s_y_hi = pb.y_hi;
            p.t_th_lo = cb.th_lo;
            p.t_th_hi = cb.th_hi;
            p.t_y_lo = cb.y_lo + static_cast<double>(idx) * strip_h;
            p.t_y_hi = cb.y_lo + static_cast<double>(idx + 1) * strip_h;
            pieces.push_back(p);
        }
    }
    Rearrangement r(std::move(pieces), 2.0);
    r.set_covers_domain(false);
    return r;
}

namespace {

struct Rect {
    double th_lo, th_hi, y_lo, y_hi;
    double area() const { return (th_hi - th_lo) * (y_hi - y_lo); }
};

// pair source and target rectangle lists of equal total area into det-1
// affine pieces, slicing along theta as needed
void exchange_rects(std::vector<Rect> src, std::vector<Rect> tgt,
                    std::vector<Rearrangement::Piece>& out) {
    std::size_t i = 0, j = 0;
    double src_used = 0.0, tgt_used = 0.0;  // fraction of current rect consumed
    while (i < src.size() && j < tgt.size()) {
        Rect& s = src[i];
        Rect& t = tgt[j];
        double sa = s.area() * (1.0 - src_used);
        double ta = t.area() * (1.0 - tgt_used);
        if (sa < 1e-15) { ++i; src_used = 0.0; continue; }
        if (ta < 1e-15) { ++j; tgt_used = 0.0; continue; }
        double amt = std::min(sa, ta);
        double s_lo = s.th_lo + (s.th_hi - s.th_lo) * src_used;
        double s_hi = s.th_lo + (s.th_hi - s.th_lo) * (src_used + amt / s.area());
        double t_lo = t.th_lo + (t.th_hi - t.th_lo) * tgt_used;
        double t_hi = t.th_lo + (t.th_hi - t.th_lo) * (tgt_used + amt / t.area());
        out.push_back({s_lo, s_hi, s.y_lo, s.y_hi, t_lo, t_hi, t.y_lo, t.y_hi});
        src_used += amt / s.area();
        tgt_used += amt / t.area();
        if (src_used >= 1.0 - 1e-12) { ++i; src_used = 0.0; }
        if (tgt_used >= 1.0 - 1e-12) { ++j; tgt_used = 0.0; }
    }
}

}  // namespace

Rearrangement build_rearrangement_complete(const NecklaceLayout& layout,
                                           const Coloring& coloring) {
    Rearrangement base = build_rearrangement(layout, coloring);
    std::vector<Rearrangement::Piece> pieces = base.pieces();

    int N = layout.N;
    int n = layout.n;
    int M = layout.M;
    double margin = std::pow(layout.eps, 3) / N;       // pearl gap half-width (column units)
    double w0 = margin * 2.0 / N;                      // fixed sliver half-width at theta = 0
    double inset = layout.eps * layout.eps / (2.0 * n);
    double b0 = inset;                                 // fixed band height at y = 0 (mod 2)

    // source leftovers: theta gap columns (excluding the fixed one at 0) and
    // the y margin bands over each pearl column
    std::vector<Rect> src;
    for (int i = 1; i < N / 2; ++i) {
        double c = static_cast<double>(i) * 2.0 / N;
        src.push_back({c - w0, c + w0, b0, 2.0 - b0});
    }
    std::vector<std::pair<double, double>> ygaps;
    ygaps.push_back({b0, layout.segments.front().lo});
    for (int j = 0; j + 1 < M; ++j)
        ygaps.push_back({layout.segments[static_cast<size_t>(j)].hi,
                         layout.segments[static_cast<size_t>(j + 1)].lo});
    ygaps.push_back({layout.segments.back().hi, 2.0 - b0});
    for (int i = 0; i < N / 2; ++i) {
        auto pb = layout.pearl(i, 0);
        for (auto [lo, hi] : ygaps)
            if (hi - lo > 1e-14) src.push_back({pb.th_lo, pb.th_hi, lo, hi});
    }

    // target leftovers: per cell, the four frame bands clipped against the
    // fixed axis bands, plus the unused top of each case interior
    double strip_h = layout.pearl_volume / layout.case_side;
    std::vector<int> usage(static_cast<size_t>(N), 0);
    for (const auto& col : coloring.cols)
        for (int k : col) usage[static_cast<size_t>(k)]++;
    std::vector<Rect> tgt;
    for (int k = 0; k < N; ++k) {
        auto [zx, zy] = layout.case_anchor(k);
        double cw = 1.0 / n;  // cell is (1/n) x (1/n) on the torus
        auto clip = [&](Rect r) {
            // clip against the fixed bands at theta ~ 0 and y ~ 0 (mod 2)
            if (r.th_lo < w0) r.th_lo = w0;
            if (r.th_hi > 1.0 - w0) r.th_hi = 1.0 - w0;
            if (r.y_lo < b0) r.y_lo = b0;
            if (r.y_hi > 2.0 - b0) r.y_hi = 2.0 - b0;
            if (r.th_hi - r.th_lo > 1e-14 && r.y_hi - r.y_lo > 1e-14) tgt.push_back(r);
        };
        clip({zx, zx + inset, zy, zy + cw});                               // left frame
        clip({zx + inset + layout.case_side, zx + cw, zy, zy + cw});      // right frame
        clip({zx + inset, zx + inset + layout.case_side, zy, zy + inset});  // bottom
        clip({zx + inset, zx + inset + layout.case_side, zy + inset + layout.case_side,
              zy + cw});                                                   // top
        double used_h = usage[static_cast<size_t>(k)] * strip_h;
        clip({zx + inset, zx + inset + layout.case_side, zy + inset + used_h,
              zy + inset + layout.case_side});                             // free interior
    }

    exchange_rects(std::move(src), std::move(tgt), pieces);
    Rearrangement r(std::move(pieces), 2.0);
    r.set_covers_domain(true);
    return r;
}

Rearrangement build_equidistribution_rearrangement(int n, double eps) {
    if (n < 1) throw std::invalid_argument("equidistribution: n >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("equidistribution: eps in (0,1)");
    int N = n * n;
    std::vector<Rearrangement::Piece> pieces;
    pieces.reserve(static_cast<size_t>(5 * N));
    for (int k = 0; k < N; ++k) {
        auto cps = equidist_column_pieces(n, eps, k);
        for (const auto& p : cps) pieces.push_back(p);
    }
    Rearrangement r(std::move(pieces), 0.0);
    r.set_covers_domain(true);
    return r;
}

double equidistribution_cell_diameter(int n, double eps) {
    double a = std::hypot((1.0 - eps / 4.0) / n, (2.0 - 2.0 * eps) / n);
    double b = std::hypot(eps / (8.0 * n), 2.0 / n);
    double c = std::hypot((1.0 - eps / 4.0) / n, eps / n);
    return std::max({a, b, c});
}

std::array<Rearrangement::Piece, 5> equidist_column_pieces(int n, double eps, int k) {
    int N = n * n;
    double colw = 1.0 / N;
    double g = eps / (8.0 * N);          // side gap width
    double wc = (1.0 - eps / 4.0) / N;   // core width
    double x0 = static_cast<double>(k) * colw;

    int cx = k % n, cy = k / n;
    double cell_x = static_cast<double>(cx) / n;
    double cell_y = -1.0 + 2.0 * static_cast<double>(cy) / n;
    double fg = eps / (8.0 * n);         // frame strip width
    double win = (1.0 - eps / 4.0) / n;  // interior width
    double hb = eps / n;                 // bottom/top slab height
    double hc = (2.0 - 2.0 * eps) / n;   // interior height

    std::array<Rearrangement::Piece, 5> out;
    // left gap -> left frame strip (full cell height)
    out[0] = {x0, x0 + g, -1.0, 1.0, cell_x, cell_x + fg, cell_y, cell_y + 2.0 / n};
    // right gap -> right frame strip
    out[1] = {x0 + g + wc, x0 + colw, -1.0, 1.0,
              cell_x + fg + win, cell_x + 1.0 / n, cell_y, cell_y + 2.0 / n};
    // core x bottom margin -> bottom slab
    out[2] = {x0 + g, x0 + g + wc, -1.0, -1.0 + eps,
              cell_x + fg, cell_x + fg + win, cell_y, cell_y + hb};
    // core x I_eps -> interior cell
    out[3] = {x0 + g, x0 + g + wc, -1.0 + eps, 1.0 - eps,
              cell_x + fg, cell_x + fg + win, cell_y + hb, cell_y + hb + hc};
    // core x top margin -> top slab
    out[4] = {x0 + g, x0 + g + wc, 1.0 - eps, 1.0,
              cell_x + fg, cell_x + fg + win, cell_y + hb + hc, cell_y + 2.0 / n};
    return out;
}

std::string layout_to_csv(const NecklaceLayout& l) {
    std::ostringstream out;
    out << "# necklace layout: n=" << l.n << " N=" << l.N << " M=" << l.M
        << " eps=" << format_g17(l.eps) << " eta=" << format_g17(l.eta) << "\n";
    out << "# kind,index,th_lo,th_hi,y_lo,y_hi\n";
    for (int j = 0; j < l.M; ++j) {
        auto b = l.pearl(0, j);
        out << "segment," << j << ",," << "," << format_g17(b.y_lo) << ","
            << format_g17(b.y_hi) << "\n";
    }
    for (int k = 0; k < l.N; ++k) {
        auto b = l.case_box(k);
        out << "case," << k << "," << format_g17(b.th_lo) << "," << format_g17(b.th_hi) << ","
            << format_g17(b.y_lo) << "," << format_g17(b.y_hi) << "\n";
    }
    return out.str();
}

std::string coloring_to_csv(const Coloring& c) {
    std::ostringstream out;
    out << "# coloring matrix: rows = pearls (1.." << c.pearls << "), columns = necklaces\n";
    for (int i = 0; i < c.pearls; ++i) {
        for (std::size_t j = 0; j < c.cols.size(); ++j) {
            if (j) out << ",";
            out << c.cols[j][static_cast<size_t>(i)];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace twistlab

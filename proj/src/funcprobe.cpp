#include "dseq/funcprobe.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

#include "dseq/detail/scan.hpp"
#include "dseq/parallel.hpp"

namespace dseq {

std::string to_string(const Interval2D& d) { return to_string(d.x) + "x" + to_string(d.y); }

Interval2D parse_interval2d(std::string_view text) {
    const auto cut = text.find_first_of("xX", text.find_first_of("])"));
    if (cut == std::string_view::npos) throw std::invalid_argument("domain must look like [a,b]x[c,d]");
    return Interval2D{parse_interval(text.substr(0, cut)), parse_interval(text.substr(cut + 1))};
}

std::string_view to_string(ProbeVerdict v) {
    return v == ProbeVerdict::Violated ? "violated" : "no-violation-found";
}

std::string_view to_string(PairKind k) {
    switch (k) {
    case PairKind::Joint: return "joint";
    case PairKind::XOnly: return "x-only";
    case PairKind::YOnly: return "y-only";
    }
    return "?";
}

std::string_view to_string(ProbeMode m) {
    switch (m) {
    case ProbeMode::SeqCont: return "seqcont";
    case ProbeMode::QcPreservation: return "qcpres";
    case ProbeMode::UcFalsify: return "ucfalsify";
    case ProbeMode::CauchyImage: return "cauchyimage";
    }
    return "?";
}

FunctionSpec FunctionSpec::parse(std::string_view text, Interval2D domain) {
    auto e = expr::Expression::parse(text, {"x", "y"});
    FunctionSpec f(domain, e.to_string());
    f.general_ = std::move(e);
    return f;
}

FunctionSpec FunctionSpec::product(std::string_view g_of_x, std::string_view h_of_y, Interval2D domain) {
    auto g = expr::Expression::parse(g_of_x, {"x"});
    auto h = expr::Expression::parse(h_of_y, {"y"});
    FunctionSpec f(domain, "(" + g.to_string() + ")*(" + h.to_string() + ")");
    f.product_.emplace(std::move(g), std::move(h));
    return f;
}

double FunctionSpec::operator()(double x, double y) const {
    try {
        if (product_) {
            const double v = product_->first(x) * product_->second(y);
            if (!std::isfinite(v)) throw DomainError("non-finite product");
            return v;
        }
        return (*general_)(x, y);
    } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " at point (" + expr::format_number(x) + ", " +
                          expr::format_number(y) + ")");
    }
}

PointSequence PointSequence::from_scalar(const DoubleSequence& s) { return PointSequence{s, transpose(s)}; }

std::optional<std::int64_t> PointSequence::threshold(PropertyKind kind, double eps) const {
    if (kind != PropertyKind::Cauchy && kind != PropertyKind::QuasiCauchy)
        throw std::invalid_argument("plane thresholds exist for cauchy and quasi-cauchy only");
    if (!x.modulus() || !y.modulus()) return std::nullopt;
    const Property p{kind, 0.0};
    const double part = eps / std::sqrt(2.0);
    const auto nx = modulus_threshold(x, p, part);
    const auto ny = modulus_threshold(y, p, part);
    if (!nx || !ny) return std::nullopt;
    return std::max(*nx, *ny);
}

Defect point_qc_defect(const PointSequence& seq, Window w) {
    return detail::neighbor_defect(
        w, [&](IndexPair p) { return seq(p); }, [](Point2 a, Point2 b) { return distance(a, b); });
}

DoubleSequence image(const FunctionSpec& f, const PointSequence& seq) {
    return DoubleSequence([f, seq](IndexPair p) { return f(seq(p)); },
                          f.descriptor() + " o " + seq.descriptor());
}

namespace {

void check_positive(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

/// Largest value(p) over window cells, first in row-major order on ties.
template <class Value>
Defect scan_max(Window w, Value value) {
    Defect best;
    for (std::int64_t k = w.lo + 1; k <= w.hi; ++k)
        for (std::int64_t l = w.lo + 1; l <= w.hi; ++l) {
            const IndexPair p(k, l);
            const double v = value(p);
            if (!best.witness || v > best.value) best = Defect{v, Witness{p, std::nullopt, v}};
        }
    return best;
}

/// Every cell a quasi-Cauchy scan of w touches lies in the domain.
void require_in_domain(const PointSequence& seq, const Interval2D& domain, Window w) {
    for (std::int64_t k = w.lo + 1; k <= w.hi + 1; ++k)
        for (std::int64_t l = w.lo + 1; l <= w.hi + 1; ++l) {
            const IndexPair idx(k, l);
            const Point2 p = seq(idx);
            if (!domain.contains(p))
                throw DomainError("point (" + expr::format_number(p.x) + ", " + expr::format_number(p.y) +
                                      ") outside " + to_string(domain),
                                  idx);
        }
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic value in [-1, 1] for (seed, k, l, lane).
double hashed_unit(std::uint64_t seed, IndexPair p, std::uint64_t lane) {
    std::uint64_t h = splitmix(seed ^ splitmix(static_cast<std::uint64_t>(p.k)));
    h = splitmix(h ^ static_cast<std::uint64_t>(p.l));
    h = splitmix(h ^ lane);
    return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

Modulus coordinate_modulus(double reach) {
    return Modulus{ModulusKind::PLimit, [reach](double eps) -> std::optional<std::int64_t> {
                       if (!(eps > 0.0)) return std::nullopt;
                       const double n = std::floor(reach / eps) + 1.0;
                       if (n > 4e18) return std::nullopt;
                       return static_cast<std::int64_t>(n);
                   }};
}

/// x = L.x + r*u*f(k,l), y = L.y + r*v*g(k,l), |f|, |g| <= 1/min(k,l).
Approach make_approach(std::string name, Point2 L, double r, double u, double v,
                       std::function<double(IndexPair)> fx, std::function<double(IndexPair)> fy) {
    DoubleSequence xs([=](IndexPair p) { return L.x + r * u * fx(p); }, name + ".x", coordinate_modulus(r * std::fabs(u)),
                      L.x);
    DoubleSequence ys([=](IndexPair p) { return L.y + r * v * fy(p); }, name + ".y", coordinate_modulus(r * std::fabs(v)),
                      L.y);
    return Approach{std::move(name), PointSequence{std::move(xs), std::move(ys)}, 0, {}, {}, false};
}

std::string direction_name(const char* strategy, int u, int v) {
    return std::string(strategy) + "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

} // namespace

ProbeReport seq_continuity_probe(const FunctionSpec& f, Point2 L, const std::vector<ApproachStrategy>& strategies,
                                 const SeqContConfig& cfg) {
    check_positive(cfg.epsilon);
    if (strategies.empty()) throw std::invalid_argument("no approach strategies given");
    if (cfg.depths.empty() || cfg.width < 1) throw std::invalid_argument("probe windows are empty");
    for (std::size_t i = 1; i < cfg.depths.size(); ++i)
        if (cfg.depths[i] <= cfg.depths[i - 1]) throw std::invalid_argument("probe depths must increase");
    const Interval2D& D = f.domain();
    if (!D.interior(L)) throw std::invalid_argument("the limit point must be interior to the domain");
    const double r = 0.5 * std::min({L.x - D.x.lo, D.x.hi - L.x, L.y - D.y.lo, D.y.hi - L.y});

    static constexpr std::array<std::array<int, 2>, 8> kCompass{
        {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
    static constexpr std::array<std::array<int, 2>, 4> kDiagonals{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
    auto inv_k = [](IndexPair p) { return 1.0 / static_cast<double>(p.k); };
    auto inv_l = [](IndexPair p) { return 1.0 / static_cast<double>(p.l); };
    auto inv_max = [](IndexPair p) { return 1.0 / static_cast<double>(std::max(p.k, p.l)); };

    ProbeReport rep;
    rep.mode = ProbeMode::SeqCont;
    rep.function = f.descriptor();
    rep.epsilon = cfg.epsilon;
    rep.target = L;

    for (const ApproachStrategy s : strategies) {
        switch (s) {
        case ApproachStrategy::Radial:
            for (const auto& [u, v] : kCompass)
                rep.approaches.push_back(make_approach(direction_name("radial", u, v), L, r, u, v, inv_k, inv_l));
            break;
        case ApproachStrategy::Diagonal:
            for (const auto& [u, v] : kDiagonals)
                rep.approaches.push_back(make_approach(direction_name("diagonal", u, v), L, r, u, v, inv_max, inv_max));
            break;
        case ApproachStrategy::Random: {
            const std::uint64_t seed = cfg.seed;
            rep.approaches.push_back(make_approach(
                "random(seed=" + std::to_string(seed) + ")", L, r, 1.0, 1.0,
                [seed](IndexPair p) { return hashed_unit(seed, p, 0) / static_cast<double>(p.k); },
                [seed](IndexPair p) { return hashed_unit(seed, p, 1) / static_cast<double>(p.l); }));
            break;
        }
        }
    }

    const double fL = f(L);
    for (Approach& a : rep.approaches) {
        const auto nx = a.sequence.x.modulus()->threshold(cfg.epsilon / std::sqrt(2.0));
        const auto ny = a.sequence.y.modulus()->threshold(cfg.epsilon / std::sqrt(2.0));
        a.modulus_n = std::max(nx.value_or(0), ny.value_or(0));
        const DoubleSequence z = image(f, a.sequence);
        for (const std::int64_t n : cfg.depths) {
            const Window w(n, n + cfg.width);
            a.source_defects.push_back({w, scan_max(w, [&](IndexPair p) { return distance(a.sequence(p), L); })});
            a.image_defects.push_back({w, p_limit_defect(z, fL, w)});
            rep.evaluations += w.size() * w.size();
        }
        a.violated = a.image_defects.back().defect.value >= cfg.epsilon;
        if (a.violated) rep.verdict = ProbeVerdict::Violated;
    }
    return rep;
}

ProbeReport qc_preservation_check(const FunctionSpec& f, const PointSequence& seq, Window w, double eps,
                                  std::optional<double> source_eps) {
    check_positive(eps);
    const double src_eps = source_eps.value_or(eps);
    check_positive(src_eps);
    require_in_domain(seq, f.domain(), w);

    ProbeReport rep;
    rep.mode = ProbeMode::QcPreservation;
    rep.function = f.descriptor();
    rep.epsilon = eps;
    rep.source = seq;
    WindowComparison c{w, point_qc_defect(seq, w), quasi_cauchy_defect(image(f, seq), w)};
    rep.evaluations = (w.size() + 1) * (w.size() + 1);
    if (c.image.value >= eps && c.source.value < src_eps) rep.verdict = ProbeVerdict::Violated;
    rep.windows.push_back(std::move(c));
    return rep;
}

ProbeReport cauchy_image_check(const FunctionSpec& f, const PointSequence& seq, Window w, double eps) {
    check_positive(eps);
    if (!seq.x.modulus() || !seq.y.modulus())
        throw ModulusMismatch("cauchy_image_check needs a sequence with a cauchy-capable modulus");
    const auto n = seq.threshold(PropertyKind::Cauchy, eps);
    if (!n) throw ModulusMismatch("the sequence's modulus does not reach eps=" + expr::format_number(eps));

    const Window clipped = w.hi > std::max(w.lo, *n) ? Window(std::max(w.lo, *n), w.hi) : Window(*n, *n + w.size());
    require_in_domain(seq, f.domain(), clipped);

    ProbeReport rep;
    rep.mode = ProbeMode::CauchyImage;
    rep.function = f.descriptor();
    rep.epsilon = eps;
    rep.source = seq;
    rep.modulus_n = n;
    WindowComparison c{clipped, point_qc_defect(seq, clipped), quasi_cauchy_defect(image(f, seq), clipped)};
    rep.evaluations = (clipped.size() + 1) * (clipped.size() + 1);
    if (c.image.value >= eps) rep.verdict = ProbeVerdict::Violated;
    rep.windows.push_back(std::move(c));
    return rep;
}

namespace {

const double kDiag = 1.0 / std::sqrt(2.0);
/// Stencil directions; 0-1 move x only, 2-3 move y only.
const std::array<Point2, 8> kStencil{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {kDiag, kDiag}, {kDiag, -kDiag},
                                      {-kDiag, kDiag}, {-kDiag, -kDiag}}};

struct Candidate {
    double score = -1.0;
    Point2 base;
    int dir = -1;

    bool valid() const { return dir >= 0; }
};

/// Higher score first, then lexicographically smaller (x, y, dir).
bool before(const Candidate& a, const Candidate& b) {
    if (a.valid() != b.valid()) return a.valid();
    if (a.score != b.score) return a.score > b.score;
    if (a.base.x != b.base.x) return a.base.x < b.base.x;
    if (a.base.y != b.base.y) return a.base.y < b.base.y;
    return a.dir < b.dir;
}

struct Box {
    double x0, x1, y0, y1;
    bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

struct Best {
    Candidate joint, x_only, y_only;
    std::int64_t evaluations = 0;

    void offer(const Candidate& c) {
        if (before(c, joint)) joint = c;
        if (c.dir <= 1 && before(c, x_only)) x_only = c;
        if ((c.dir == 2 || c.dir == 3) && before(c, y_only)) y_only = c;
    }
    void absorb(const Best& o) {
        offer(o.joint);
        if (o.x_only.valid()) offer(o.x_only);
        if (o.y_only.valid()) offer(o.y_only);
        evaluations += o.evaluations;
    }
};

class PairSearch {
public:
    PairSearch(const FunctionSpec& f, double delta) : f_(f), reach_(0.9 * delta) {
        const Interval2D& D = f.domain();
        const double inset = delta / 4.0;
        box_ = Box{D.x.lo + (D.x.lo_open ? inset : 0.0), D.x.hi - (D.x.hi_open ? inset : 0.0),
                   D.y.lo + (D.y.lo_open ? inset : 0.0), D.y.hi - (D.y.hi_open ? inset : 0.0)};
        if (!(box_.x0 < box_.x1 && box_.y0 < box_.y1))
            throw std::invalid_argument("delta too large for the domain's open ends");
    }

    Point2 partner(Point2 p, int dir) const {
        return {p.x + reach_ * kStencil[static_cast<std::size_t>(dir)].x,
                p.y + reach_ * kStencil[static_cast<std::size_t>(dir)].y};
    }

    /// Evaluates every stencil partner of p that stays inside the box.
    void probe(Point2 p, Best& out, std::vector<Candidate>* all = nullptr) const {
        const double fp = f_(p);
        ++out.evaluations;
        for (int d = 0; d < static_cast<int>(kStencil.size()); ++d) {
            const Point2 q = partner(p, d);
            if (!box_.contains(q)) continue;
            const Candidate c{std::fabs(fp - f_(q)), p, d};
            ++out.evaluations;
            out.offer(c);
            if (all) all->push_back(c);
        }
    }

    const Box& box() const { return box_; }

private:
    const FunctionSpec& f_;
    double reach_;
    Box box_;
};

PairWitness to_witness(const FunctionSpec& f, const PairSearch& s, const Candidate& c, PairKind kind) {
    PairWitness w;
    w.kind = kind;
    w.p = c.base;
    w.q = s.partner(c.base, c.dir);
    w.distance = distance(w.p, w.q);
    w.gap = std::fabs(f(w.p) - f(w.q));
    return w;
}

DeltaSearch search_delta(const FunctionSpec& f, double eps, double delta, const UcConfig& cfg) {
    const PairSearch search(f, delta);
    const Box& box = search.box();
    const double span_x = box.x1 - box.x0, span_y = box.y1 - box.y0;
    const double evals_per_point = 1.0 + static_cast<double>(kStencil.size());
    const double grid_points = std::max(4.0, 0.8 * static_cast<double>(cfg.budget) / evals_per_point);

    double gx = std::ceil(span_x / (delta / 2.0)) + 1.0, gy = std::ceil(span_y / (delta / 2.0)) + 1.0;
    if (gx * gy > grid_points) {
        const double shrink = std::sqrt(grid_points / (gx * gy));
        gx = std::max(2.0, std::floor(gx * shrink));
        gy = std::max(2.0, std::floor(gy * shrink));
    }
    const auto nx = static_cast<std::int64_t>(gx), ny = static_cast<std::int64_t>(gy);
    const double px = span_x / static_cast<double>(nx - 1), py = span_y / static_cast<double>(ny - 1);
    auto grid_point = [&](std::int64_t i, std::int64_t j) {
        return Point2{i == nx - 1 ? box.x1 : box.x0 + static_cast<double>(i) * px,
                      j == ny - 1 ? box.y1 : box.y0 + static_cast<double>(j) * py};
    };

    struct Partial {
        Best best;
        std::vector<Candidate> top;
    };
    const std::size_t keep = std::max<std::size_t>(cfg.refine_candidates, 1);
    auto trim = [keep](std::vector<Candidate>& v) {
        // one entry per base point: its best direction
        std::sort(v.begin(), v.end(), before);
        std::vector<Candidate> out;
        for (const Candidate& c : v) {
            if (out.size() == keep) break;
            if (std::none_of(out.begin(), out.end(), [&](const Candidate& o) { return o.base == c.base; }))
                out.push_back(c);
        }
        v = std::move(out);
    };
    auto scan = [&](std::int64_t i0, std::int64_t i1) {
        Partial part;
        std::vector<Candidate> local;
        for (std::int64_t i = i0; i <= i1; ++i) {
            for (std::int64_t j = 0; j < ny; ++j) search.probe(grid_point(i, j), part.best, &local);
            if (local.size() > 8 * keep + 64) {
                local.insert(local.end(), part.top.begin(), part.top.end());
                trim(local);
                part.top = std::move(local);
                local.clear();
            }
        }
        local.insert(local.end(), part.top.begin(), part.top.end());
        trim(local);
        part.top = std::move(local);
        return part;
    };
    auto merge = [&](Partial a, Partial b) {
        a.best.absorb(b.best);
        a.top.insert(a.top.end(), b.top.begin(), b.top.end());
        trim(a.top);
        return a;
    };
    Partial grid = reduce_rows<Partial>(0, nx - 1, scan, merge);
    Best best = grid.best;

    // Local refinement: move each leading base point along the axes while it
    // improves, halving the step otherwise.
    for (const Candidate& start : grid.top) {
        Candidate cur = start;
        double h = std::max(px, py) / 2.0;
        for (int round = 0; round < cfg.refine_rounds && best.evaluations < cfg.budget; ++round) {
            Candidate improved = cur;
            for (const Point2 step : {Point2{-h, 0}, Point2{h, 0}, Point2{0, -h}, Point2{0, h}}) {
                const Point2 p{std::clamp(cur.base.x + step.x, box.x0, box.x1),
                               std::clamp(cur.base.y + step.y, box.y0, box.y1)};
                Best local;
                search.probe(p, local);
                best.absorb(local);
                if (local.joint.valid() && before(local.joint, improved)) improved = local.joint;
            }
            if (improved.base == cur.base && improved.dir == cur.dir)
                h /= 2.0;
            else
                cur = improved;
        }
    }

    DeltaSearch out;
    out.delta = delta;
    out.pitch = std::max(px, py);
    out.evaluations = best.evaluations;
    if (best.joint.valid()) out.joint = to_witness(f, search, best.joint, PairKind::Joint);
    if (best.x_only.valid()) out.x_only = to_witness(f, search, best.x_only, PairKind::XOnly);
    if (best.y_only.valid()) out.y_only = to_witness(f, search, best.y_only, PairKind::YOnly);
    out.violated = out.joint && out.joint->gap >= eps && out.joint->distance < delta;
    return out;
}

PairFamily coordinate_family(const std::vector<PairWitness>& pairs, const std::vector<double>& deltas,
                             const Interval& I, bool use_x) {
    std::vector<Quad> quads;
    for (const PairWitness& w : pairs) {
        const double a = use_x ? w.p.x : w.p.y, b = use_x ? w.q.x : w.q.y;
        quads.push_back(Quad{a, b, b, b});
    }
    const auto n = static_cast<std::int64_t>(quads.size());
    PairFamily pf;
    pf.quad = [quads, n](std::int64_t i, std::int64_t j) {
        return quads[static_cast<std::size_t>(std::min({i, j, n}) - 1)];
    };
    pf.interval = Interval(I.lo, I.hi);
    pf.gap_modulus = [deltas](double eps) -> std::optional<std::int64_t> {
        for (std::size_t i = 0; i < deltas.size(); ++i)
            if (deltas[i] <= eps) return static_cast<std::int64_t>(i + 1);
        return std::nullopt;
    };
    pf.descriptor = std::string(use_x ? "x" : "y") + "-coordinates of " + std::to_string(n) + " pairs";
    return pf;
}

UcBundle assemble_bundle(const FunctionSpec& f, const std::vector<PairWitness>& pairs,
                         const std::vector<double>& deltas) {
    BuildOptions opts;
    opts.band_scale = 2.0 * std::sqrt(2.0);
    const PairFamily fx = coordinate_family(pairs, deltas, f.domain().x, true);
    const PairFamily fy = coordinate_family(pairs, deltas, f.domain().y, false);
    auto [wx, wy] = build_qc_witness_pair(fx, fy, opts);

    UcBundle b{pairs,
               PointSequence{wx.witness.sequence, wy.witness.sequence},
               DoubleSequence([](IndexPair) { return 0.0; }, ""),
               wx.witness.layout,
               {},
               {}};
    b.image = image(f, b.witness);
    const auto n = static_cast<std::int64_t>(pairs.size());
    for (std::int64_t i = 1; i <= n; ++i) b.anchors.push_back(wx.embedding.anchor(i, i));
    const std::int64_t hi = b.layout->start(n + 1) - 1;
    for (std::int64_t K = 1; K <= n; ++K) {
        const Window w(b.layout->start(K) - 1, hi);
        b.blocks.push_back({w, point_qc_defect(b.witness, w), quasi_cauchy_defect(b.image, w)});
    }
    return b;
}

} // namespace

ProbeReport uc_falsify(const FunctionSpec& f, double eps, const std::vector<double>& deltas, const UcConfig& cfg) {
    check_positive(eps);
    if (deltas.empty()) throw std::invalid_argument("delta schedule is empty");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw std::invalid_argument("deltas must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1])) throw std::invalid_argument("delta schedule must strictly decrease");
    }
    if (cfg.budget < 16) throw std::invalid_argument("search budget too small");

    ProbeReport rep;
    rep.mode = ProbeMode::UcFalsify;
    rep.function = f.descriptor();
    rep.epsilon = eps;
    bool all = true;
    for (const double delta : deltas) {
        rep.searches.push_back(search_delta(f, eps, delta, cfg));
        rep.evaluations += rep.searches.back().evaluations;
        all = all && rep.searches.back().violated;
    }
    if (!all) return rep;

    rep.verdict = ProbeVerdict::Violated;
    if (cfg.build_witness) {
        std::vector<PairWitness> pairs;
        for (const DeltaSearch& s : rep.searches) pairs.push_back(*s.joint);
        rep.bundle = assemble_bundle(f, pairs, deltas);
    }
    return rep;
}

namespace {

std::string mismatch(const std::string& what, double stored, double recomputed) {
    return what + ": stored " + expr::format_number(stored) + ", recomputed " + expr::format_number(recomputed);
}

std::optional<std::string> recheck_pair(const FunctionSpec& f, const PairWitness& w, double delta) {
    const double gap = std::fabs(f(w.p) - f(w.q));
    if (gap != w.gap) return mismatch("pair gap", w.gap, gap);
    const double d = distance(w.p, w.q);
    if (d != w.distance) return mismatch("pair distance", w.distance, d);
    if (!(d < delta)) return "pair distance " + expr::format_number(d) + " is not below delta " + expr::format_number(delta);
    return std::nullopt;
}

std::optional<std::string> recheck_comparison(const FunctionSpec& f, const PointSequence& seq, const WindowComparison& c) {
    if (c.source.witness && c.source.witness->second) {
        const double v = distance(seq(c.source.witness->first), seq(*c.source.witness->second));
        if (v != c.source.value) return mismatch("source defect", c.source.value, v);
    }
    if (c.image.witness && c.image.witness->second) {
        const double v = std::fabs(f(seq(c.image.witness->first)) - f(seq(*c.image.witness->second)));
        if (v != c.image.value) return mismatch("image defect", c.image.value, v);
    }
    return std::nullopt;
}

} // namespace

Reverification reverify(const ProbeReport& report, const FunctionSpec& f) {
    auto failed = [](std::string why) { return Reverification{false, std::move(why)}; };

    if (report.target) {
        const double fL = f(*report.target);
        for (const Approach& a : report.approaches)
            for (const WindowSample& s : a.image_defects)
                if (s.defect.witness) {
                    const double v = std::fabs(f(a.sequence(s.defect.witness->first)) - fL);
                    if (v != s.defect.value) return failed(mismatch(a.strategy + " image defect", s.defect.value, v));
                }
    }
    if (report.source)
        for (const WindowComparison& c : report.windows)
            if (auto why = recheck_comparison(f, *report.source, c)) return failed(*why);

    for (const DeltaSearch& s : report.searches) {
        for (const auto* w : {&s.joint, &s.x_only, &s.y_only})
            if (*w)
                if (auto why = recheck_pair(f, **w, s.delta)) return failed(*why);
        if (s.violated && !(s.joint && s.joint->gap >= report.epsilon))
            return failed("search at delta " + expr::format_number(s.delta) + " claims a violation without a pair");
    }

    if (report.bundle) {
        const UcBundle& b = *report.bundle;
        for (std::size_t i = 0; i < b.pairs.size(); ++i) {
            const IndexPair at = b.anchors[i];
            if (!(b.witness(at) == b.pairs[i].p) || !(b.witness(IndexPair(at.k, at.l + 1)) == b.pairs[i].q))
                return failed("pair " + std::to_string(i + 1) + " is not embedded at " + to_string(at));
        }
        for (const WindowComparison& c : b.blocks)
            if (auto why = recheck_comparison(f, b.witness, c)) return failed(*why);
    }
    return Reverification{};
}

} // namespace dseq

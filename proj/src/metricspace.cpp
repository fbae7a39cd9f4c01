#include "dseq/metricspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "dseq/detail/scan.hpp"
#include "dseq/harmonic.hpp"
#include "dseq/parallel.hpp"

namespace dseq {

std::string to_string(const Point& p) {
    if (const auto* s = std::get_if<std::string>(&p)) return "\"" + *s + "\"";
    const auto& v = std::get<std::vector<double>>(p);
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + expr::format_number(v[i]);
    return out + ")";
}

namespace spaces {

DistanceRule euclid2() {
    return {"euclid2", [](const Point& a, const Point& b) {
                const auto* u = std::get_if<std::vector<double>>(&a);
                const auto* v = std::get_if<std::vector<double>>(&b);
                if (!u || !v || u->size() != 2 || v->size() != 2)
                    throw std::invalid_argument("euclid2 needs points with two coordinates");
                return std::hypot((*u)[0] - (*v)[0], (*u)[1] - (*v)[1]);
            }};
}

DistanceRule lcp() {
    return {"lcp", [](const Point& a, const Point& b) {
                const auto* u = std::get_if<std::string>(&a);
                const auto* v = std::get_if<std::string>(&b);
                if (!u || !v) throw std::invalid_argument("lcp needs string points");
                if (*u == *v) return 0.0;
                const auto mis = std::mismatch(u->begin(), u->end(), v->begin(), v->end());
                return std::ldexp(1.0, -static_cast<int>(mis.first - u->begin()));
            }};
}

DistanceRule discrete() {
    return {"discrete", [](const Point& a, const Point& b) { return a == b ? 0.0 : 1.0; }};
}

DistanceRule zero() {
    return {"zero", [](const Point&, const Point&) { return 0.0; }};
}

} // namespace spaces

DistanceRule distance_rule(std::string_view name) {
    if (name == "euclid2") return spaces::euclid2();
    if (name == "lcp") return spaces::lcp();
    if (name == "discrete") return spaces::discrete();
    throw std::invalid_argument("unknown space '" + std::string(name) + "' (known: euclid2, lcp, discrete)");
}

std::vector<std::string> registered_spaces() { return {"euclid2", "lcp", "discrete"}; }

namespace {

bool leq(double a, double b) {
    if (a <= b) return true;
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    return a - b <= kAxiomSlack * std::max({1.0, std::fabs(a), std::fabs(b)});
}

} // namespace

AxiomReport validate_axioms(const DistanceRule& d, std::span<const Point> sample) {
    if (sample.size() < 3) throw std::invalid_argument("axiom checks need at least 3 sample points");
    std::vector<Point> pts(sample.begin(), sample.end());
    std::sort(pts.begin(), pts.end());
    const std::size_t n = pts.size();

    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d(pts[i], pts[j]);
            if (std::isnan(v) || v < 0.0)
                throw DomainError("distance " + expr::format_number(v) + " between " + to_string(pts[i]) + " and " +
                                  to_string(pts[j]) + " is not a non-negative number");
            m[i * n + j] = v;
        }
    auto D = [&](std::size_t i, std::size_t j) { return m[i * n + j]; };

    AxiomReport rep;
    rep.sample_size = n;
    auto fail = [&](AxiomFlag& flag, const char* axiom, std::initializer_list<std::size_t> idx) {
        if (!flag.holds) return;
        flag.holds = false;
        flag.axiom = axiom;
        for (std::size_t i : idx) flag.witness.push_back(pts[i]);
    };

    for (std::size_t i = 0; i < n; ++i)
        if (D(i, i) != 0.0) fail(rep.pseudometric, "reflexivity", {i});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!(leq(D(i, j), D(j, i)) && leq(D(j, i), D(i, j)))) fail(rep.pseudometric, "symmetry", {i, j});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                if (!leq(D(i, j), D(i, k) + D(k, j))) fail(rep.pseudometric, "triangle", {i, j, k});
                if (!leq(D(i, j), std::max(D(i, k), D(k, j)))) fail(rep.ultrametric, "strong-triangle", {i, j, k});
            }

    if (!rep.pseudometric.holds) rep.metric = rep.pseudometric;
    for (std::size_t i = 0; i < n && rep.metric.holds; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(D(i, j))) {
                fail(rep.metric, "finiteness", {i, j});
                break;
            }
            if (D(i, j) == 0.0 && pts[i] != pts[j]) {
                fail(rep.metric, "separation", {i, j});
                break;
            }
        }
    if (!rep.metric.holds && rep.ultrametric.holds) rep.ultrametric = rep.metric;
    return rep;
}

Defect metric_qc_defect(const MetricDoubleSequence& seq, const DistanceRule& d, Window w) {
    return detail::neighbor_defect(w, [&](IndexPair p) { return seq(p); },
                                   [&](const Point& a, const Point& b) { return d(a, b); });
}

Defect metric_cauchy_defect(const MetricDoubleSequence& seq, const DistanceRule& d, Window w) {
    // distinct points in order of first appearance
    std::vector<Point> pts;
    std::vector<IndexPair> where;
    std::map<Point, std::size_t> seen;
    for (std::int64_t k = w.lo + 1; k <= w.hi; ++k)
        for (std::int64_t l = w.lo + 1; l <= w.hi; ++l) {
            const IndexPair p(k, l);
            Point v = seq(p);
            if (seen.emplace(v, pts.size()).second) {
                pts.push_back(std::move(v));
                where.push_back(p);
            }
        }
    if (pts.size() == 1) return Defect{0.0, Witness{where[0], where[0], 0.0}};

    const auto n = static_cast<std::int64_t>(pts.size());
    auto scan = [&](std::int64_t i0, std::int64_t i1) {
        Defect best;
        for (std::int64_t i = i0; i <= i1; ++i)
            for (std::int64_t j = i + 1; j < n; ++j) {
                const double v = d(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
                if (!best.witness || v > best.value)
                    best = Defect{v, Witness{where[static_cast<std::size_t>(i)], where[static_cast<std::size_t>(j)], v}};
            }
        return best;
    };
    auto merge = [](Defect a, Defect b) {
        if (!a.witness) return b;
        if (!b.witness) return a;
        return detail::better(std::move(a), std::move(b));
    };
    return reduce_rows<Defect>(0, n - 2, scan, merge);
}

std::vector<IndexPair> staircase_chain(IndexPair from, IndexPair to) {
    std::vector<IndexPair> chain{from};
    IndexPair cur = from;
    auto sign = [](std::int64_t v) { return (v > 0) - (v < 0); };
    while (cur != to) {
        const int dk = sign(to.k - cur.k), dl = sign(to.l - cur.l);
        // a diagonal move is a neighbour step only when both coordinates move the same way
        if (dk != 0 && dk == dl)
            cur = IndexPair(cur.k + dk, cur.l + dl);
        else if (dk != 0)
            cur = IndexPair(cur.k + dk, cur.l);
        else
            cur = IndexPair(cur.k, cur.l + dl);
        chain.push_back(cur);
    }
    return chain;
}

namespace {

std::vector<Point> window_points(const MetricDoubleSequence& seq, Window w) {
    std::vector<Point> pts;
    for (std::int64_t k = w.lo + 1; k <= w.hi + 1; ++k)
        for (std::int64_t l = w.lo + 1; l <= w.hi + 1; ++l) pts.push_back(seq(IndexPair(k, l)));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

/// Fisher-Yates on raw mt19937_64 output, reproducible across standard libraries.
std::vector<Point> capped_sample(std::vector<Point> pts, std::size_t cap, std::uint64_t seed) {
    if (pts.size() <= cap) return pts;
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < cap; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(gen() % (pts.size() - i));
        std::swap(pts[i], pts[j]);
    }
    pts.resize(cap);
    return pts;
}

} // namespace

NonIncrementalReport non_incremental_check(const DistanceRule& d, std::span<const MetricDoubleSequence> seqs,
                                           std::span<const Window> schedule, const NonIncrementalConfig& cfg) {
    NonIncrementalReport rep;
    rep.space = d.name;
    for (std::size_t s = 0; s < seqs.size(); ++s)
        for (const Window& w : schedule) {
            NonIncrementalRow row;
            row.sequence = s;
            row.window = w;
            row.cauchy = metric_cauchy_defect(seqs[s], d, w);
            row.qc = metric_qc_defect(seqs[s], d, w);
            const auto sample = capped_sample(window_points(seqs[s], w), cfg.sample_cap, cfg.seed + s);
            row.ultrametric_on_sample = sample.size() < 3 || validate_axioms(d, sample).ultrametric.holds;
            row.inequality_holds = leq(row.cauchy.value, row.qc.value);

            if (!row.inequality_holds) {
                const IndexPair p = row.cauchy.witness->first;
                const auto chain = staircase_chain(p, *row.cauchy.witness->second);
                const Point start = seqs[s](p);
                for (std::size_t i = 1; i < chain.size(); ++i) {
                    const Point a = seqs[s](chain[i - 1]), b = seqs[s](chain[i]);
                    if (!leq(d(start, b), std::max(d(start, a), d(a, b)))) {
                        row.chain_triple = {p, chain[i - 1], chain[i]};
                        const Point triple[] = {start, a, b};
                        row.triple_revalidated = !validate_axioms(d, triple).ultrametric.holds;
                        break;
                    }
                }
                if (row.triple_revalidated && !row.ultrametric_on_sample)
                    ++rep.attributed;
                else
                    ++rep.unexplained;
            }
            rep.rows.push_back(std::move(row));
        }
    return rep;
}

std::vector<Point> sample_points(std::string_view space, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto unit = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::vector<Point> out;
    const bool plane = space == "euclid2";
    if (!plane) distance_rule(space); // rejects unknown names
    for (std::size_t i = 0; i < count; ++i) {
        if (plane) {
            const double x = unit();
            out.emplace_back(std::vector<double>{x, unit()});
        } else {
            const std::size_t len = 1 + static_cast<std::size_t>(gen() % 8);
            std::string s;
            for (std::size_t c = 0; c < len; ++c) s += static_cast<char>('0' + gen() % 4);
            out.emplace_back(std::move(s));
        }
    }
    return out;
}

namespace {

char seeded_digit(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = seed * 0x9e3779b97f4a7c15ULL + a;
    h ^= h >> 33;
    h = (h + b) * 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ULL;
    h ^= h >> 33;
    return static_cast<char>('0' + h % 4);
}

} // namespace

MetricDoubleSequence lcp_sequence(std::uint64_t seed) {
    return {[seed](IndexPair p) -> Point {
                const std::int64_t m = std::min(p.k, p.l);
                std::string s;
                for (std::int64_t i = 0; i < m; ++i) s += seeded_digit(seed, 0, static_cast<std::uint64_t>(i));
                const std::uint64_t cell = static_cast<std::uint64_t>(p.k) * 1000003ULL + static_cast<std::uint64_t>(p.l);
                for (std::uint64_t i = 0; i < 2; ++i) s += seeded_digit(seed, cell, i + 1);
                return s;
            },
            "lcp-seeded(" + std::to_string(seed) + ")"};
}

MetricDoubleSequence harmonic_drift() {
    return {[](IndexPair p) -> Point {
                return std::vector<double>{harmonic(static_cast<std::uint64_t>(std::max(p.k, p.l))), 0.0};
            },
            "(H(max(k, l)), 0)"};
}

} // namespace dseq

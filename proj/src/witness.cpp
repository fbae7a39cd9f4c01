#include "dseq/witness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

namespace dseq {

double Quad::gap() const { return std::max({std::fabs(a - b), std::fabs(a - c), std::fabs(a - d)}); }

double Quad::spread() const { return std::max({gap(), std::fabs(b - c), std::fabs(d - c)}); }

namespace {

constexpr std::int64_t kMaxIndex = std::int64_t{1} << 31;
constexpr std::int64_t kMaxBands = std::int64_t{1} << 20;
constexpr std::int64_t kGapSearchLimit = std::int64_t{1} << 20;

std::vector<double> split_numbers(const std::string& line, std::size_t line_no) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
        if (cell.empty() || *end) throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace

PairFamily PairFamily::from_csv(std::istream& in, Interval interval, std::string_view gap_bound) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("pair family CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "i,j,a,b,c,d") throw std::invalid_argument("pair family CSV header must be i,j,a,b,c,d");

    std::map<std::pair<std::int64_t, std::int64_t>, Quad> cells;
    std::int64_t rows = 0, cols = 0;
    for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto v = split_numbers(line, line_no);
        if (v.size() != 6) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 6 fields");
        const auto i = static_cast<std::int64_t>(v[0]), j = static_cast<std::int64_t>(v[1]);
        if (i < 1 || j < 1 || static_cast<double>(i) != v[0] || static_cast<double>(j) != v[1])
            throw std::invalid_argument("line " + std::to_string(line_no) + ": i and j must be positive integers");
        const Quad q{v[2], v[3], v[4], v[5]};
        for (double x : {q.a, q.b, q.c, q.d})
            if (!interval.contains_closure(x))
                throw DomainError("pair value " + expr::format_number(x) + " outside " + to_string(interval),
                                  IndexPair(i, j));
        if (!cells.emplace(std::pair{i, j}, q).second)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate (i,j)");
        rows = std::max(rows, i);
        cols = std::max(cols, j);
    }
    if (cells.empty()) throw std::invalid_argument("pair family CSV has no rows");
    if (static_cast<std::int64_t>(cells.size()) != rows * cols)
        throw std::invalid_argument("pair family CSV must cover 1..n x 1..m completely");

    std::vector<Quad> table(cells.size());
    for (const auto& [ij, q] : cells) table[static_cast<std::size_t>((ij.first - 1) * cols + ij.second - 1)] = q;

    auto bound = expr::Expression::parse(gap_bound, {"i"});
    PairFamily pf;
    pf.quad = [table = std::move(table), rows, cols](std::int64_t i, std::int64_t j) {
        return table[static_cast<std::size_t>((std::min(i, rows) - 1) * cols + std::min(j, cols) - 1)];
    };
    pf.interval = interval;
    pf.gap_modulus = [bound](double eps) -> std::optional<std::int64_t> {
        for (std::int64_t i = 1; i <= kGapSearchLimit; ++i)
            if (bound(static_cast<double>(i)) < eps) return i;
        return std::nullopt;
    };
    pf.descriptor = "csv " + std::to_string(rows) + "x" + std::to_string(cols) + ", gap <= " + bound.to_string();
    return pf;
}

PairFamily PairFamily::constant(double value, Interval interval) {
    if (!interval.contains_closure(value)) throw std::invalid_argument("constant outside the interval");
    PairFamily pf;
    pf.quad = [value](std::int64_t, std::int64_t) { return Quad{value, value, value, value}; };
    pf.interval = interval;
    pf.gap_modulus = [](double) -> std::optional<std::int64_t> { return 1; };
    pf.descriptor = "constant " + expr::format_number(value);
    return pf;
}

BandLayout::BandLayout(double interval_length, double scale) : scale_(scale) {
    if (!(interval_length > 0.0) || !(scale > 0.0)) throw std::invalid_argument("band layout needs positive length and scale");
    starts_.push_back(0); // sentinel so that starts_[k] is the start of band k
    std::int64_t next = 1;
    for (std::int64_t k = 1; k <= kMaxBands && next <= kMaxIndex; ++k) {
        starts_.push_back(next);
        const double kk = static_cast<double>(k);
        next += static_cast<std::int64_t>(std::ceil(scale * kk * kk * interval_length)) + 4;
    }
    starts_.push_back(next);
}

std::int64_t BandLayout::start(std::int64_t k) const {
    if (k < 1 || k > bands() + 1) throw IndexOverflow("band " + std::to_string(k) + " is past the witness layout");
    return starts_[static_cast<std::size_t>(k)];
}

std::int64_t BandLayout::size(std::int64_t k) const {
    if (k < 1 || k > bands()) throw IndexOverflow("band " + std::to_string(k) + " is past the witness layout");
    return starts_[static_cast<std::size_t>(k + 1)] - starts_[static_cast<std::size_t>(k)];
}

std::int64_t BandLayout::band_of(std::int64_t n) const {
    if (n < 1 || n >= starts_.back())
        throw IndexOverflow("index " + std::to_string(n) + " is past the witness layout");
    const auto it = std::upper_bound(starts_.begin() + 1, starts_.end(), n);
    return static_cast<std::int64_t>(it - starts_.begin()) - 1;
}

IndexPair EmbeddingMap::anchor(std::int64_t i, std::int64_t j) const {
    return IndexPair(layout_->start(i) + 1, layout_->start(j) + 1);
}

namespace {

double cell_value(const PairFamily& pf, const BandLayout& layout, IndexPair p) {
    const std::int64_t k = layout.band_of(p.k), l = layout.band_of(p.l);
    const std::int64_t u = p.k - layout.start(k), v = p.l - layout.start(l);
    const Quad q = pf.quad(k, l);
    if (u >= 1 && u <= 2 && v >= 1 && v <= 2) {
        if (u == 1) return v == 1 ? q.a : q.b;
        return v == 1 ? q.d : q.c;
    }
    if (u <= 3 && v <= 3) return q.a;

    const double s = u <= 3 ? 0.0 : static_cast<double>(u - 3) / static_cast<double>(layout.size(k) - 3);
    const double t = v <= 3 ? 0.0 : static_cast<double>(v - 3) / static_cast<double>(layout.size(l) - 3);
    auto lerp = [](double x, double y, double w) { return x == y ? x : x + w * (y - x); };
    const double a01 = t > 0.0 ? pf.quad(k, l + 1).a : q.a;
    const double a10 = s > 0.0 ? pf.quad(k + 1, l).a : q.a;
    const double a11 = s > 0.0 && t > 0.0 ? pf.quad(k + 1, l + 1).a : (s > 0.0 ? a10 : a01);
    const double value = lerp(lerp(q.a, a01, t), lerp(a10, a11, t), s);
    return std::clamp(value, pf.interval.lo, pf.interval.hi);
}

struct SpotCheck {
    std::optional<IndexPair> spread_violation;
};

SpotCheck spot_check(const PairFamily& pf, std::int64_t n) {
    for (std::int64_t i = 1; i <= n; ++i)
        for (std::int64_t j = 1; j <= n; ++j) {
            const Quad q = pf.quad(i, j);
            for (double x : {q.a, q.b, q.c, q.d})
                if (!pf.interval.contains_closure(x))
                    throw DomainError("pair value " + expr::format_number(x) + " outside " + to_string(pf.interval),
                                      IndexPair(i, j));
        }

    SpotCheck out;
    for (const double eps : {1e-1, 1e-2, 1e-3}) {
        const auto i0 = pf.gap_modulus(eps);
        if (!i0) continue;
        for (std::int64_t i = *i0; i < *i0 + n; ++i) {
            const double g = pf.gap(i);
            if (!(g < eps))
                throw DomainError("gap " + expr::format_number(g) + " contradicts the gap modulus at eps=" +
                                      expr::format_number(eps),
                                  IndexPair(i, i));
            for (std::int64_t j = *i0; j < *i0 + n && !out.spread_violation; ++j)
                if (!(pf.quad(i, j).spread() < eps)) out.spread_violation = IndexPair(i, j);
        }
    }
    return out;
}

std::optional<Modulus> witness_modulus(const PairFamily& pf, std::shared_ptr<const BandLayout> layout) {
    return Modulus{ModulusKind::QuasiCauchy, [gap = pf.gap_modulus, layout](double eps) -> std::optional<std::int64_t> {
                       if (!(eps > 0.0)) return std::nullopt;
                       const auto i0 = gap(eps);
                       if (!i0) return std::nullopt;
                       const double from_steps = std::floor(1.0 / std::sqrt(eps)) + 1.0;
                       if (from_steps >= static_cast<double>(layout->bands())) return std::nullopt;
                       const std::int64_t K = std::max(static_cast<std::int64_t>(from_steps), *i0);
                       if (K >= layout->bands()) return std::nullopt;
                       return layout->start(K) - 1;
                   }};
}

QcWitness assemble(const PairFamily& pf, std::shared_ptr<const BandLayout> layout, std::int64_t spot) {
    const SpotCheck sc = spot_check(pf, spot);
    auto rule = [pf, layout](IndexPair p) { return cell_value(pf, *layout, p); };
    std::optional<Modulus> m;
    if (!sc.spread_violation && layout->scale() >= 2.0) m = witness_modulus(pf, layout);
    DoubleSequence seq(std::move(rule), "qc-witness(" + pf.descriptor + ")", std::move(m));
    return QcWitness{WitnessSequence{std::move(seq), layout, sc.spread_violation}, EmbeddingMap(layout)};
}

} // namespace

QcWitness build_qc_witness(const PairFamily& pf, const BuildOptions& options) {
    if (!pf.quad || !pf.gap_modulus) throw std::invalid_argument("pair family is incomplete");
    auto layout = std::make_shared<const BandLayout>(pf.interval.length(), options.band_scale);
    return assemble(pf, std::move(layout), options.spot_check);
}

std::pair<QcWitness, QcWitness> build_qc_witness_pair(const PairFamily& x, const PairFamily& y,
                                                      const BuildOptions& options) {
    if (!x.quad || !x.gap_modulus || !y.quad || !y.gap_modulus) throw std::invalid_argument("pair family is incomplete");
    auto layout = std::make_shared<const BandLayout>(std::max(x.interval.length(), y.interval.length()),
                                                     options.band_scale);
    return {assemble(x, layout, options.spot_check), assemble(y, layout, options.spot_check)};
}

EmbeddingCheck verify_embedding(const WitnessSequence& ws, const EmbeddingMap& em, const PairFamily& pf,
                                std::int64_t upto) {
    if (upto < 2) throw std::invalid_argument("verify_embedding needs upto >= 2");
    const BandLayout& layout = *ws.layout;
    auto fail = [](IndexPair cell, std::optional<IndexPair> other, std::string reason) {
        return EmbeddingCheck{false, cell, other, std::move(reason)};
    };

    for (std::int64_t i = 2; i <= upto; ++i)
        for (std::int64_t j = 2; j <= upto; ++j) {
            const IndexPair at = em.anchor(i, j);
            const Quad q = pf.quad(i, j);
            const std::pair<IndexPair, double> expected[] = {
                {at, q.a}, {IndexPair(at.k, at.l + 1), q.b}, {IndexPair(at.k + 1, at.l), q.d},
                {IndexPair(at.k + 1, at.l + 1), q.c}};
            for (const auto& [cell, want] : expected) {
                const double got = ws.sequence.eval(cell);
                if (got != want)
                    return fail(cell, std::nullopt,
                                "embedded value " + expr::format_number(got) + " != " + expr::format_number(want) +
                                    " for pair " + to_string(IndexPair(i, j)));
            }
        }

    auto is_anchor_cell = [&](IndexPair p) {
        const std::int64_t u = p.k - layout.start(layout.band_of(p.k));
        const std::int64_t v = p.l - layout.start(layout.band_of(p.l));
        return u >= 1 && u <= 2 && v >= 1 && v <= 2;
    };

    for (std::int64_t i = 2; i <= upto; ++i)
        for (std::int64_t j = 2; j <= upto; ++j) {
            const double di = static_cast<double>(i), dj = static_cast<double>(j);
            const double bound = (1.0 / (di * di) + 1.0 / (dj * dj)) / layout.scale();
            const double spread = pf.quad(i, j).spread();
            const std::int64_t r0 = layout.start(i), c0 = layout.start(j);
            const std::int64_t r1 = r0 + layout.size(i), c1 = c0 + layout.size(j);
            std::vector<double> cur, next;
            auto load = [&](std::int64_t r, std::vector<double>& row) {
                row.clear();
                for (std::int64_t c = c0; c <= c1; ++c) row.push_back(ws.sequence.eval(IndexPair(r, c)));
            };
            load(r0, cur);
            for (std::int64_t r = r0; r < r1; ++r) {
                load(r + 1, next);
                for (std::int64_t c = c0; c < c1; ++c) {
                    const auto x = static_cast<std::size_t>(c - c0);
                    const IndexPair here(r, c);
                    const std::pair<IndexPair, double> nbrs[] = {{IndexPair(r, c + 1), cur[x + 1]},
                                                                 {IndexPair(r + 1, c), next[x]},
                                                                 {IndexPair(r + 1, c + 1), next[x + 1]}};
                    for (const auto& [there, value] : nbrs) {
                        const double step = std::fabs(cur[x] - value);
                        if (is_anchor_cell(here) || is_anchor_cell(there)) {
                            if (step > spread)
                                return fail(here, there,
                                            "anchor step " + expr::format_number(step) + " exceeds the pair spread " +
                                                expr::format_number(spread));
                        } else if (!(step < bound)) {
                            return fail(here, there,
                                        "step " + expr::format_number(step) + " is not below " +
                                            expr::format_number(bound) + " in patch " + to_string(IndexPair(i, j)));
                        }
                    }
                }
                std::swap(cur, next);
            }
        }
    return EmbeddingCheck{};
}

DoubleSequence interleave_with_limit(const DoubleSequence& seq, double limit) {
    auto rule = [seq, limit](IndexPair p) {
        if (p.k % 2 == 0 || p.l % 2 == 0) return limit;
        return seq.eval(IndexPair((p.k + 1) / 2, (p.l + 1) / 2));
    };
    std::optional<Modulus> m;
    std::optional<double> declared;
    if (seq.modulus() && seq.modulus()->kind == ModulusKind::PLimit && seq.declared_limit() == limit) {
        m = Modulus{ModulusKind::PLimit, [inner = seq.modulus()->threshold](double eps) -> std::optional<std::int64_t> {
                        const auto n = inner(eps);
                        if (!n) return std::nullopt;
                        return 2 * *n;
                    }};
        declared = limit;
    }
    return DoubleSequence(std::move(rule), "interleave(" + seq.descriptor() + ", " + expr::format_number(limit) + ")",
                          std::move(m), declared);
}

} // namespace dseq

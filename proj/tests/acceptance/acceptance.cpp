#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dseq/analysis.hpp"
#include "dseq/cli.hpp"
#include "dseq/funcprobe.hpp"
#include "dseq/metricspace.hpp"
#include "dseq/subseq.hpp"
#include "dseq/witness.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace dseq;

namespace {

/// Distance allowed between a scanned harmonic step H(N+2) - H(N+1) and the
/// rational 1/(N+2): both partial sums carry rounding of a few ulp.
constexpr double kHarmonicStepTolerance = 1e-14;
/// Relative slack on the finite-scale implication inequalities.
constexpr double kImplicationSlack = 4 * 0x1.0p-52;

constexpr double kLimitCriterion1 = 5.0;
constexpr double kLimitCriterion2 = 5.0;
constexpr double kLimitCriterion4 = 30.0;
constexpr double kLimitCriterion5 = 60.0;
constexpr double kLimitCriterion7 = 10.0;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

oracle::Fn fn(const DoubleSequence& x) {
    return [x](std::int64_t k, std::int64_t l) { return x(k, l); };
}

Outcome criterion1() {
    Outcome o;
    const auto h = builtin::harmonic_max();
    double worst = 0;
    for (std::int64_t N : {10, 50, 100}) {
        const Window w(N, 4 * N);
        const double lib = quasi_cauchy_defect(h, w).value;
        const double scan = oracle::qc_defect(fn(h), N, 4 * N);
        if (lib != scan) o.fail(fmt("N=%g: library %.17g differs from scan %.17g", double(N), lib, scan));
        const double exact = 1.0 / static_cast<double>(N + 2);
        worst = std::max(worst, std::fabs(scan - exact));
        if (std::fabs(scan - exact) > kHarmonicStepTolerance)
            o.fail(fmt("N=%g: scan %.17g vs 1/(N+2) %.17g", double(N), scan, exact));

        const Window c(N, 8 * N);
        const auto v = verdict(h, Property::cauchy(), 0.5, std::span<const Window>(&c, 1));
        const double pairs = oracle::partial_sum(8 * N) - oracle::partial_sum(N + 1);
        if (v.tag != VerdictTag::FalsifiedAt || !(v.falsifier->value > 0.5) || v.falsifier->value != pairs)
            o.fail(fmt("N=%g: cauchy not falsified with defect %.17g", double(N), pairs));
    }
    const std::int64_t schedule[] = {10, 20, 40, 80, 160, 320, 640, 1280};
    const auto est = estimate_p_limit(h, schedule);
    for (std::size_t i = 1; i < est.curve.size(); ++i)
        if (est.curve[i].defect.value < est.curve[i - 1].defect.value)
            o.fail(fmt("p-limit curve decreases after N=%g", double(schedule[i - 1])));
    if (o.pass)
        o.detail = fmt("qc defect = scan, |scan - 1/(N+2)| <= %.2g; cauchy > 0.5; p-limit curve %.4f -> %.4f",
                       worst, est.curve.front().defect.value, est.curve.back().defect.value);
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto demo = dyadic_diagonal_demo();
    const auto y = demo.sequence;
    constexpr std::int64_t H = 64;
    // neighbour step of every cell of [1,64]^2, reaching into row/column 65;
    // windows are squares, so a window's defect is the max over its cells
    std::vector<double> step(static_cast<std::size_t>(H * H));
    auto cell_step = [&](std::int64_t k, std::int64_t l) {
        const double v = y(k, l);
        return std::max({std::fabs(v - y(k, l + 1)), std::fabs(v - y(k + 1, l)), std::fabs(v - y(k + 1, l + 1))});
    };
    for (std::int64_t k = 1; k <= H; ++k)
        for (std::int64_t l = 1; l <= H; ++l) step[static_cast<std::size_t>((k - 1) * H + (l - 1))] = cell_step(k, l);

    double smallest = INFINITY;
    std::int64_t windows = 0;
    for (std::int64_t lo = 0; lo < H; ++lo)
        for (std::int64_t hi = lo + 1; hi <= H; ++hi) {
            double d = 0;
            for (std::int64_t k = lo + 1; k <= hi; ++k)
                for (std::int64_t l = lo + 1; l <= hi; ++l) d = std::max(d, step[static_cast<std::size_t>((k - 1) * H + (l - 1))]);
            smallest = std::min(smallest, d);
            ++windows;
            if (d < 0.5) o.fail(fmt("window (%g,%g] has defect %.17g", double(lo), double(hi), d));
        }
    for (const auto& s : demo.report.samples)
        if (s.defect.value != oracle::qc_defect([&](std::int64_t a, std::int64_t b) { return y(a, b); }, s.window.lo, s.window.hi))
            o.fail("demo report differs from the scan oracle");
    const double parent = oracle::qc_defect(fn(builtin::harmonic_max()), 10, 20);
    if (parent != quasi_cauchy_defect(builtin::harmonic_max(), Window(10, 20)).value) o.fail("parent defect differs from scan");
    if (std::fabs(parent - 1.0 / 12.0) > kHarmonicStepTolerance) o.fail(fmt("parent defect %.17g is not 1/12", parent));
    if (o.pass)
        o.detail = fmt("%g windows up to hi=64, smallest defect %.4f; parent (10,20] defect %.6f", double(windows), smallest, parent);
    return o;
}

Outcome criterion3() {
    Outcome o;
    constexpr std::int64_t T = 64;
    std::vector<int> hits(T * T + 1, 0);
    for (std::int64_t p = 1; p <= T; ++p)
        for (std::int64_t q = 1; q <= T; ++q) {
            const auto j = spiral_position(p, q);
            if (j < 1 || j > T * T) o.fail(fmt("(%g,%g) maps outside 1..4096", double(p), double(q)));
            else ++hits[j];
        }
    for (std::int64_t j = 1; j <= T * T; ++j)
        if (hits[j] != 1) o.fail(fmt("position %g hit %g times", double(j), hits[j]));
    // the displayed corner: x1 x2 x5 x10 / x4 x3 x6 / x9 x8 x7
    const std::int64_t shown[10][3] = {{1, 1, 1}, {1, 2, 2}, {1, 3, 5}, {1, 4, 10}, {2, 1, 4},
                                       {2, 2, 3}, {2, 3, 6}, {3, 1, 9}, {3, 2, 8}, {3, 3, 7}};
    int matched = 0;
    for (const auto& e : shown) {
        if (spiral_position(e[0], e[1]) == e[2]) ++matched;
        else o.fail(fmt("(%g,%g) should hold x_%g", double(e[0]), double(e[1]), double(e[2])));
    }
    if (o.pass) o.detail = fmt("4096 cells hit 1..4096 once each; %g/10 displayed entries reproduced", matched);
    return o;
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// b, c, d on one side of a, within 1/max(i,j)^2 of it and inside [0,1].
PairFamily seeded_family(std::uint64_t seed) {
    auto quad = [seed](std::int64_t i, std::int64_t j) {
        std::uint64_t state = splitmix(seed ^ splitmix(static_cast<std::uint64_t>(i) << 32 ^ static_cast<std::uint64_t>(j)));
        auto u = [&] {
            state = splitmix(state);
            return static_cast<double>(state >> 11) * 0x1.0p-53;
        };
        const double a = 0.1 + 0.8 * u();
        const double g = 1.0 / static_cast<double>(std::max(i, j) * std::max(i, j));
        const double room = a < 0.5 ? 1.0 - a : a;
        const double side = a < 0.5 ? 1.0 : -1.0;
        const double reach = std::min(g, room);
        return Quad{a, a + side * reach * u(), a + side * reach * u(), a + side * reach * u()};
    };
    return {quad, Interval(0, 1),
            [](double eps) -> std::optional<std::int64_t> {
                return static_cast<std::int64_t>(std::floor(1.0 / std::sqrt(eps))) + 1;
            },
            "seeded family " + std::to_string(seed)};
}

Outcome criterion4() {
    Outcome o;
    double worst_ratio = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const PairFamily pf = seeded_family(seed);
        for (std::int64_t i = 1; i <= 40; ++i)
            if (pf.gap(i) > 1.0 / static_cast<double>(i * i)) o.fail("family gap exceeds 1/i^2");
        const QcWitness w = build_qc_witness(pf);
        const auto check = verify_embedding(w.witness, w.embedding, pf, 8);
        if (!check.pass) o.fail("seed " + std::to_string(seed) + ": " + check.reason);
        for (std::int64_t K : {2, 4, 8}) {
            const Window win(w.witness.beyond_block(K), w.witness.layout->start(K + 2) - 1);
            const double scan = oracle::qc_defect(fn(w.witness.sequence), win.lo, win.hi);
            const double bound = 1.0 / static_cast<double>(K * K);
            worst_ratio = std::max(worst_ratio, scan / bound);
            if (scan != quasi_cauchy_defect(w.witness.sequence, win).value) o.fail("library defect differs from scan");
            if (scan > bound)
                o.fail(fmt("seed %g, K=%g: defect %.17g above 1/K^2", double(seed), double(K), scan));
        }
    }
    if (o.pass) o.detail = fmt("20 families: embeddings verified to 8; worst defect/bound ratio %.4f", worst_ratio);
    return o;
}

double euclid_scan(const PointSequence& s, Window w) {
    double best = 0;
    for (auto k = w.lo + 1; k <= w.hi; ++k)
        for (auto l = w.lo + 1; l <= w.hi; ++l) {
            const Point2 p = s(IndexPair(k, l));
            for (const auto& off : kNeighborOffsets)
                best = std::max(best, distance(p, s(IndexPair(k + off[0], l + off[1]))));
        }
    return best;
}

Outcome criterion5() {
    Outcome o;
    const Interval2D punctured{Interval(0, 1, true, false), Interval(0, 1, true, false)};
    const auto f = FunctionSpec::parse("1/(x*y)", punctured);
    const std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
    const auto r = uc_falsify(f, 1.0, deltas);
    if (r.verdict != ProbeVerdict::Violated) o.fail("1/(x*y) not violated");
    for (const auto& s : r.searches)
        if (!s.violated) o.fail(fmt("no pair found at delta %g", s.delta));
    double source4 = NAN, image_min = INFINITY;
    if (!r.bundle || r.bundle->blocks.size() < 4) {
        o.fail("no witness bundle");
    } else {
        for (const auto& b : r.bundle->blocks) {
            const double img = oracle::qc_defect(fn(r.bundle->image), b.window.lo, b.window.hi);
            if (img != b.image.value) o.fail("image defect differs from scan");
            image_min = std::min(image_min, img);
            if (img < 1.0) o.fail(fmt("image defect %.17g below 1 on window from %g", img, double(b.window.lo)));
        }
        const auto& b4 = r.bundle->blocks[3];
        source4 = euclid_scan(r.bundle->witness, b4.window);
        if (source4 != b4.source.value) o.fail("source defect differs from scan");
        if (!(source4 < 0.1)) o.fail(fmt("source defect beyond block 4 is %.17g", source4));
    }
    if (!reverify(r, f).ok) o.fail("bundle does not re-verify");

    const Interval2D unit{Interval(0, 1), Interval(0, 1)};
    const auto g = FunctionSpec::parse("x + y", unit);
    const auto ok = uc_falsify(g, 0.01, {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
    if (ok.verdict != ProbeVerdict::NoViolationFound) o.fail("x + y reported violated");
    if (o.pass)
        o.detail = fmt("violated at 4 deltas; source beyond block 4 %.4g, image >= %.4g; x+y clean over %g evaluations",
                       source4, image_min, double(ok.evaluations));
    return o;
}

Outcome criterion6() {
    Outcome o;
    std::mt19937_64 g(6);
    auto u = [&] { return static_cast<double>(g() >> 11) * 0x1.0p-53; };
    const std::vector<std::string> kl{"k", "l"};
    int generated = 0, with_limit = 0, violations = 0;
    while (generated < 100) {
        const std::int64_t lo = static_cast<std::int64_t>(g() % 50), hi = lo + 2 + static_cast<std::int64_t>(g() % 30);
        const Window w(lo, hi);
        std::optional<DoubleSequence> x;
        if (generated % 2 == 0) {
            const double c = std::floor(u() * 10) - 5, a = std::floor(u() * 8), b = std::floor(u() * 4);
            const std::string text = expr::format_number(c) + " + " + expr::format_number(a) + "/(k^" +
                                     std::to_string(1 + g() % 3) + " + l^" + std::to_string(1 + g() % 3) + ") + " +
                                     expr::format_number(b) + "*sin(k*l)/(k*l)";
            x = from_spec(parse_sequence_spec(text), std::nullopt, c);
        } else {
            x = from_spec(expr::Expression(gen::random_tree(g, 4), kl));
        }
        try {
            const double qc = quasi_cauchy_defect(*x, w).value;
            const double cauchy = cauchy_defect(*x, w.extended()).value;
            if (qc > cauchy * (1 + kImplicationSlack)) ++violations;
            if (x->declared_limit()) {
                ++with_limit;
                const double p = p_limit_defect(*x, *x->declared_limit(), w.extended()).value;
                if (qc > 2 * p * (1 + kImplicationSlack)) ++violations;
            }
        } catch (const DomainError&) {
            continue;  // undefined somewhere on the window: draw another rule
        }
        ++generated;
    }
    if (violations) o.fail(fmt("%g violations", violations));
    else o.detail = fmt("%g sequences (%g with declared limits), zero violations", generated, with_limit);
    return o;
}

Outcome criterion7() {
    Outcome o;
    std::vector<MetricDoubleSequence> seqs;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) seqs.push_back(lcp_sequence(seed));
    std::vector<Window> schedule;
    for (std::int64_t hi = 8; hi <= 128; hi *= 2) schedule.push_back(Window(hi / 2 - 4, hi));
    const auto lcp = non_incremental_check(spaces::lcp(), seqs, schedule);
    int violations = 0;
    for (const auto& row : lcp.rows)
        if (!row.inequality_holds || row.cauchy.value > row.qc.value) ++violations;
    // independent check of one window per sequence
    const auto d = spaces::lcp();
    for (const auto& s : seqs) {
        const Window w(0, 12);
        double pairs = 0, steps = 0;
        for (auto k = 1; k <= 12; ++k)
            for (auto l = 1; l <= 12; ++l) {
                const Point p = s(IndexPair(k, l));
                for (const auto& off : kNeighborOffsets) steps = std::max(steps, d(p, s(IndexPair(k + off[0], l + off[1]))));
                for (auto a = 1; a <= 12; ++a)
                    for (auto b = 1; b <= 12; ++b) pairs = std::max(pairs, d(p, s(IndexPair(a, b))));
            }
        if (pairs != metric_cauchy_defect(s, d, w).value || steps != metric_qc_defect(s, d, w).value)
            o.fail("library metric defects differ from the scan");
        if (pairs > steps) ++violations;
    }
    if (violations) o.fail(fmt("%g LCP violations", violations));

    const MetricDoubleSequence drift[] = {harmonic_drift()};
    const auto plane = non_incremental_check(spaces::euclid2(), drift, schedule);
    int failing = 0;
    for (const auto& row : plane.rows)
        if (!row.inequality_holds) {
            ++failing;
            if (row.ultrametric_on_sample) o.fail("failing row has a holding ultrametric flag");
            if (!row.triple_revalidated) o.fail("failing row's triple does not re-validate");
        }
    if (failing == 0) o.fail("no Euclidean violation found");
    if (plane.unexplained != 0) o.fail("unexplained Euclidean rows");
    if (o.pass)
        o.detail = fmt("LCP: %g rows, zero violations; plane: %g violating rows, all attributed with re-validated triples",
                       double(lcp.rows.size()), failing);
    return o;
}

Outcome criterion8(const std::string& golden_dir) {
    Outcome o;
    int commands = 0;
    for (const auto& item : cli::gallery_items()) {
        const auto a = cli::execute(item.args), b = cli::execute(item.args);
        ++commands;
        if (a.code == cli::kError) o.fail(item.name + " failed: " + a.errors);
        if (a.report != b.report || a.code != b.code) o.fail(item.name + " is not byte-identical across runs");
    }
    const auto gallery = cli::execute({"gallery", "--dir", golden_dir});
    if (gallery.code != cli::kOk) o.fail("gallery drift: " + gallery.errors);
    if (o.pass) o.detail = fmt("%g commands byte-identical on repeat; goldens match", commands);
    return o;
}

Outcome criterion9() {
    Outcome o;
    const std::vector<std::string> kl{"k", "l"};
    std::mt19937_64 g(9);
    for (int n = 0; n < 1000; ++n) {
        const expr::Expression original(gen::random_tree(g, 5), kl);
        const auto text = original.to_string();
        try {
            if (!expr::structurally_equal(original, expr::Expression::parse(text, kl))) o.fail("round trip changed " + text);
        } catch (const ParseError& e) {
            o.fail("printed tree does not parse: " + text);
        }
    }
    const std::vector<std::pair<std::string, std::size_t>> malformed{
        {"", 0},        {"k*", 2},       {"(k", 2},        {"k + + ", 4},   {"1e", 2},
        {"k)", 1},      {"k l", 2},      {"*k", 0},        {"H(k", 3},      {"min(k,)", 6},
        {"max(,l)", 4}, {"k^^2", 2},     {"1.2.3", 3},     {"()", 1},       {"k # l", 2},
        {"k+1e+", 5},   {"((k+l)", 6},   {"k/", 2},        {"abs(k))", 6},  {"3 k", 2},
    };
    int positioned = 0;
    for (const auto& [text, offset] : malformed) {
        try {
            expr::Expression::parse(text, kl);
            o.fail("'" + text + "' parsed");
        } catch (const ParseError& e) {
            if (e.kind() != ParseErrorKind::Syntax) o.fail("'" + text + "' is not a syntax error");
            else if (e.offset() != offset) o.fail("'" + text + "' reported offset " + std::to_string(e.offset()));
            else ++positioned;
        }
    }
    if (o.pass) o.detail = fmt("1000 trees round-trip; %g/20 malformed inputs rejected at the expected offset", positioned);
    return o;
}

} // namespace

int main(int argc, char** argv) {
    const std::string golden_dir = argc > 1 ? argv[1] : "tests/golden";
    const std::map<int, double> limits{
        {1, kLimitCriterion1}, {2, kLimitCriterion2}, {4, kLimitCriterion4}, {5, kLimitCriterion5}, {7, kLimitCriterion7}};
    const std::vector<std::function<Outcome()>> criteria{
        criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7,
        [&] { return criterion8(golden_dir); }, criterion9};

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (const auto lim = limits.find(id); lim != limits.end() && secs > lim->second)
            o.fail(fmt("runtime %.2f s over the %.0f s limit", secs, lim->second));
        std::printf("criterion %d: %s - %s (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

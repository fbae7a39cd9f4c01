#include <doctest.h>

#include <cmath>
#include <random>

#include "dseq/funcprobe.hpp"
#include "../oracles.hpp"

using namespace dseq;

namespace {

const Interval2D kUnit{Interval(0, 1), Interval(0, 1)};
const Interval2D kPunctured{Interval(0, 1, true, false), Interval(0, 1, true, false)};

double image_scan(const FunctionSpec& f, const PointSequence& s, Window w) {
    return oracle::qc_defect([&](std::int64_t k, std::int64_t l) { return f(s(IndexPair(k, l))); }, w.lo, w.hi);
}

} // namespace

TEST_CASE("domains and function specs") {
    const auto d = parse_interval2d("(0,1]x(0,1]");
    CHECK(d.x.lo_open);
    CHECK_FALSE(d.contains({0.0, 0.5}));
    CHECK(d.contains({1.0, 0.5}));
    CHECK(to_string(d) == "(0,1]x(0,1]");
    CHECK_THROWS(parse_interval2d("[0,1]"));

    const auto f = FunctionSpec::parse("x + 2*y", kUnit);
    CHECK(f({0.25, 0.5}) == 1.25);
    CHECK_THROWS_AS(FunctionSpec::parse("x + k", kUnit), ParseError);

    const auto p = FunctionSpec::product("x + 1", "y^2", kUnit);
    CHECK(p.is_product());
    CHECK(p({1.0, 0.5}) == 0.5);

    const auto g = FunctionSpec::parse("log(x - y)", kUnit);
    CHECK_THROWS_AS(g({0.5, 0.5}), DomainError);
}

TEST_CASE("sequential continuity probe") {
    const auto sum = FunctionSpec::parse("x + y", kUnit);
    const auto r = seq_continuity_probe(sum, {0.5, 0.5}, {ApproachStrategy::Radial});
    CHECK(r.verdict == ProbeVerdict::NoViolationFound);
    CHECK(r.approaches.size() == 8);

    const auto fl = FunctionSpec::parse("floor(x + y)", kUnit);
    const auto v = seq_continuity_probe(fl, {0.5, 0.5}, {ApproachStrategy::Radial});
    CHECK(v.verdict == ProbeVerdict::Violated);

    const Interval2D centered{Interval(-1, 1), Interval(-1, 1)};
    const auto prod = FunctionSpec::parse("x*y", centered);
    const auto z = seq_continuity_probe(prod, {0.0, 0.0},
                                        {ApproachStrategy::Radial, ApproachStrategy::Diagonal, ApproachStrategy::Random});
    CHECK(z.verdict == ProbeVerdict::NoViolationFound);
    for (const auto& a : z.approaches)
        for (std::size_t i = 0; i < a.image_defects.size(); ++i)
            CHECK(a.image_defects[i].defect.value <= a.source_defects[i].defect.value * a.source_defects[i].defect.value + 1e-18);

    CHECK(reverify(v, fl).ok);
}

TEST_CASE("quasi-Cauchy preservation") {
    const auto sum = FunctionSpec::parse("x + y", kUnit);
    const auto c = qc_preservation_check(sum, PointSequence::from_scalar(builtin::constant(0.5)), Window(0, 20), 1e-3);
    CHECK(c.verdict == ProbeVerdict::NoViolationFound);
    CHECK(c.windows[0].image.value == 0.0);

    const Interval2D ten{Interval(0, 10), Interval(0, 10)};
    const auto sq = FunctionSpec::parse("x^2", ten);
    const auto capped = PointSequence::from_scalar(from_spec(parse_sequence_spec("min(H(max(k,l)), 10)")));
    const auto q = qc_preservation_check(sq, capped, Window(10, 20), 10.0);
    CHECK(q.windows[0].source.value == doctest::Approx(std::sqrt(2.0) / 12.0));
    CHECK(q.windows[0].image.value <= 2 * 10 * (1.0 / 12.0));
    CHECK(q.windows[0].image.value == image_scan(sq, capped, Window(10, 20)));

    const auto inv = FunctionSpec::parse("1/(x*y)", kPunctured);
    const auto toward0 = PointSequence::from_scalar(from_spec(parse_sequence_spec("1/max(k,l)")));
    const auto v = qc_preservation_check(inv, toward0, Window(10, 20), 1.0, 0.1);
    CHECK(v.verdict == ProbeVerdict::Violated);
    CHECK(v.windows[0].image.value >= 1.0);
    CHECK(reverify(v, inv).ok);

    const auto outside = PointSequence::from_scalar(builtin::constant(2.0));
    CHECK_THROWS_AS(qc_preservation_check(sum, outside, Window(0, 4), 0.1), DomainError);
}

TEST_CASE("Lipschitz images stay within the Lipschitz bound") {
    std::mt19937_64 g(9);
    const auto sum = FunctionSpec::parse("x + y", kUnit);
    const auto prod = FunctionSpec::parse("x*y", kUnit);
    for (int n = 0; n < 10; ++n) {
        const std::string a = std::to_string(1 + g() % 5), b = std::to_string(1 + g() % 7);
        const auto s = from_spec(parse_sequence_spec("(1 + sin(" + a + "*k + " + b + "*l))/2"));
        const auto ps = PointSequence::from_scalar(s);
        const Window w(static_cast<std::int64_t>(g() % 30), 40);
        const double src = point_qc_defect(ps, w).value;
        CHECK(qc_preservation_check(sum, ps, w, 1).windows[0].image.value <= std::sqrt(2.0) * std::sqrt(2.0) * src + 1e-12);
        CHECK(qc_preservation_check(prod, ps, w, 1).windows[0].image.value <= 2 * std::sqrt(2.0) * src + 1e-12);
    }
}

TEST_CASE("Cauchy image check") {
    const auto sum = FunctionSpec::parse("x + y", kUnit);
    const auto c = cauchy_image_check(sum, PointSequence::from_scalar(builtin::constant(0.25)), Window(0, 30), 1e-3);
    CHECK(c.verdict == ProbeVerdict::NoViolationFound);

    const auto inv = PointSequence::from_scalar(builtin::inverse_sum());
    const auto r = cauchy_image_check(sum, inv, Window(1000, 1100), 1e-3);
    CHECK(r.verdict == ProbeVerdict::NoViolationFound);
    CHECK(r.windows[0].image.value < 1e-3);

    const Modulus m{ModulusKind::Cauchy, [](double eps) -> std::optional<std::int64_t> {
                        return static_cast<std::int64_t>(std::ceil(1 / eps));
                    }};
    const auto diag = from_spec(parse_sequence_spec("1/max(k,l)")).with_modulus(m);
    const auto f = FunctionSpec::parse("1/(x*y)", kPunctured);
    const auto v = cauchy_image_check(f, PointSequence::from_scalar(diag), Window(10, 40), 1.0);
    CHECK(v.verdict == ProbeVerdict::Violated);

    CHECK_THROWS_AS(cauchy_image_check(sum, PointSequence::from_scalar(from_spec(parse_sequence_spec("0.5"))), Window(0, 4), 0.1),
                    ModulusMismatch);
}

TEST_CASE("uniform continuity falsifier") {
    const std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
    const auto f = FunctionSpec::parse("1/(x*y)", kPunctured);
    const auto r = uc_falsify(f, 1.0, deltas);
    REQUIRE(r.verdict == ProbeVerdict::Violated);
    for (const auto& s : r.searches) {
        REQUIRE(s.joint);
        CHECK(s.joint->distance < s.delta);
        CHECK(s.joint->gap >= 1.0);
        CHECK(kPunctured.contains(s.joint->p));
        CHECK(kPunctured.contains(s.joint->q));
    }
    REQUIRE(r.bundle);
    REQUIRE(r.bundle->blocks.size() == deltas.size());
    for (std::size_t K = 1; K <= r.bundle->blocks.size(); ++K) {
        const auto& b = r.bundle->blocks[K - 1];
        CHECK(b.image.value >= 1.0);
        CHECK(b.source.value <= std::max(1.0 / static_cast<double>(K * K), deltas[K - 1]));
        CHECK(b.source.value == point_qc_defect(r.bundle->witness, b.window).value);
    }
    CHECK(reverify(r, f).ok);

    auto tampered = r;
    tampered.searches[1].joint->gap += 1e-9;
    CHECK_FALSE(reverify(tampered, f).ok);

    const auto osc = FunctionSpec::parse("sin(1/(x + y))", kPunctured);
    CHECK(uc_falsify(osc, 1.0, deltas, {.build_witness = false}).verdict == ProbeVerdict::Violated);

    const auto sum = FunctionSpec::parse("x + y", kUnit);
    const auto ok = uc_falsify(sum, 0.01, {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}, {.budget = 200'000});
    CHECK(ok.verdict == ProbeVerdict::NoViolationFound);
    CHECK_FALSE(ok.bundle);

    CHECK_THROWS(uc_falsify(sum, 0.01, {1e-2, 1e-1}));
    CHECK_THROWS(uc_falsify(sum, 0.0, {1e-2}));
}

TEST_CASE("polynomials give no false positives above the Lipschitz scale") {
    for (const char* text : {"x + y", "x*y", "x^2 - y^2", "3*x*y + y"}) {
        const auto f = FunctionSpec::parse(text, kUnit);
        const double lip = 5.0;
        const double delta = 1e-3;
        const auto r = uc_falsify(f, 1.01 * lip * delta, {1e-2, delta}, {.budget = 100'000, .build_witness = false});
        INFO(text);
        CHECK(r.verdict == ProbeVerdict::NoViolationFound);
    }
}

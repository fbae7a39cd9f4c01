#include <doctest.h>

#include <cmath>
#include <vector>

#include "dseq/analysis.hpp"
#include "dseq/subseq.hpp"
#include "../oracles.hpp"

using namespace dseq;

TEST_CASE("spiral positions of the displayed corner") {
    CHECK(spiral_position(1, 4) == 10);
    CHECK(spiral_position(3, 2) == 8);
    CHECK(spiral_position(1, 1) == 1);
    const auto corner = oracle::spiral_corner(3);
    for (std::int64_t p = 1; p <= 3; ++p)
        for (std::int64_t q = 1; q <= 3; ++q) CHECK(spiral_position(p, q) == corner[p - 1][q - 1]);
    CHECK_THROWS(spiral_position(0, 2));
}

TEST_CASE("spiral is a shell-respecting bijection on 64x64") {
    constexpr std::int64_t T = 64;
    const auto shells = oracle::spiral_corner(T);
    std::vector<int> hits(T * T + 1, 0);
    for (std::int64_t p = 1; p <= T; ++p)
        for (std::int64_t q = 1; q <= T; ++q) {
            const std::int64_t j = spiral_position(p, q);
            const std::int64_t t = std::max(p, q);
            REQUIRE(j > (t - 1) * (t - 1));
            REQUIRE(j <= t * t);
            REQUIRE(j == shells[p - 1][q - 1]);
            ++hits[j];
            REQUIRE(spiral_cell(j) == IndexPair(p, q));
        }
    for (std::int64_t j = 1; j <= T * T; ++j) REQUIRE(hits[j] == 1);
}

TEST_CASE("spiral_cell inverts far out") {
    for (std::int64_t j : {std::int64_t{1} << 40, (std::int64_t{1} << 40) + 12345, std::int64_t{3037000499} * 3037000499})
        CHECK(spiral_position(spiral_cell(j).k, spiral_cell(j).l) == j);
    CHECK_THROWS(spiral_cell(0));
}

TEST_CASE("subsequence examples") {
    const auto c = subsequence(builtin::constant(5), IndexSelection::identity());
    CHECK(quasi_cauchy_defect(c, Window(0, 20)).value == 0.0);
    CHECK(c(7, 3) == 5.0);

    const auto enc = from_spec(parse_sequence_spec("k*10^6 + l"));
    CHECK(subsequence(enc, IndexSelection::identity())(2, 3) == 6e6 + 6);

    const auto dy = subsequence(builtin::harmonic_max(), IndexSelection::from_rules("2^j", "2^j"));
    CHECK(dy(1, 1) == oracle::partial_sum(2));
    CHECK(dy(1, 2) == oracle::partial_sum(4));
}

TEST_CASE("selection rules are validated") {
    CHECK_THROWS_AS(IndexSelection::from_rules("j/2", "j").row(1), SelectionError);
    CHECK_THROWS_AS(IndexSelection::from_rules("5 - j", "j").validate_prefix(10), SelectionError);
    CHECK_THROWS_AS(IndexSelection::from_rules("j", "1").col(2), SelectionError);
    CHECK_THROWS_AS(IndexSelection::from_rules("2^j", "j").row(60), IndexOverflow);
    const auto lists = IndexSelection::from_lists({1, 3, 7}, {2, 4, 9});
    CHECK(lists.row(3) == 7);
    CHECK(lists.col(2) == 4);
    CHECK_THROWS_AS(lists.row(4), SelectionError);
    CHECK_THROWS_AS(IndexSelection::from_lists({1, 1}, {1, 2}).validate_prefix(2), SelectionError);
    CHECK_THROWS(IndexSelection::from_rules("k", "j"));

    const auto y = subsequence(builtin::constant(1), IndexSelection::from_lists({1, 2}, {1, 2}));
    CHECK_THROWS_AS(y(2, 2), SelectionError);
}

TEST_CASE("moduli carried by subsequences") {
    const auto y = subsequence(builtin::inverse_sum(), IndexSelection::from_rules("3*j", "j^2"));
    REQUIRE(y.modulus());
    CHECK(y.declared_limit() == 0.0);
    CHECK(verdict(y, Property::p_limit(0), 1e-2, default_schedule()).tag == VerdictTag::CertifiedByModulus);

    const Modulus qc{ModulusKind::QuasiCauchy, [](double) -> std::optional<std::int64_t> { return 1; }};
    CHECK_FALSE(subsequence(builtin::harmonic_max().with_modulus(qc), IndexSelection::identity()).modulus());
}

TEST_CASE("subsequences of Cauchy sequences stay inside the covering window") {
    const auto x = from_spec(parse_sequence_spec("sin(k)/k + cos(l)/l"));
    const auto sel = IndexSelection::from_rules("2*j + 1", "3*j");
    const auto y = subsequence(x, sel);
    for (std::int64_t T : {4, 8, 12}) {
        const std::int64_t last = T * T;
        const std::int64_t cover = std::max(sel.row(last), sel.col(last));
        CHECK(cauchy_defect(y, Window(0, T)).value <= cauchy_defect(x, Window(0, cover)).value);
    }
}

TEST_CASE("dyadic diagonal demo") {
    const auto demo = dyadic_diagonal_demo();
    for (const auto& s : demo.report.samples) {
        CHECK(s.defect.value >= 0.5);
        CHECK(s.defect.value ==
              oracle::qc_defect([&](std::int64_t k, std::int64_t l) { return demo.sequence(k, l); }, s.window.lo,
                                s.window.hi));
    }
    CHECK(demo.report.samples.front().window == Window(1, 4));
    CHECK(quasi_cauchy_defect(builtin::harmonic_max(), Window(10, 20)).value < 0.1);

    // cells far beyond any integer selection still evaluate
    const Window far[] = {Window(100, 110)};
    const auto deep = dyadic_diagonal_demo(far);
    CHECK(deep.report.samples[0].defect.value >= 0.5);
    CHECK(std::isfinite(deep.sequence(110, 110)));
}

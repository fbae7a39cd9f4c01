#include <doctest.h>

#include <atomic>
#include <thread>

#include "dseq/core.hpp"
#include "../oracles.hpp"

using namespace dseq;

TEST_CASE("index pairs and windows validate") {
    CHECK_THROWS(IndexPair(0, 1));
    CHECK_THROWS(IndexPair(1, -3));
    CHECK_THROWS(Window(3, 3));
    CHECK_THROWS(Window(-1, 3));
    CHECK(Window(2, 4).size() == 2);
    CHECK(Window(2, 4).contains(IndexPair(3, 4)));
    CHECK_FALSE(Window(2, 4).contains(IndexPair(2, 4)));
    CHECK(to_string(Window(10, 20)) == "(10,20]");
}

TEST_CASE("eval of the named sequences") {
    CHECK(builtin::constant(5.0)(3, 7) == 5.0);
    CHECK(builtin::harmonic_max()(2, 3) == oracle::partial_sum(3));
    CHECK(builtin::harmonic_max()(2, 3) == doctest::Approx(11.0 / 6.0));
    CHECK(builtin::row_ramp()(4, 9) == 4.0);
    CHECK(builtin::inverse_sum()(1, 1) == 0.5);
}

TEST_CASE("harmonic-max equals the ascending partial sums on a 50x50 corner") {
    const auto x = builtin::harmonic_max();
    for (std::int64_t k = 1; k <= 50; ++k)
        for (std::int64_t l = 1; l <= 50; ++l) REQUIRE(x(k, l) == oracle::partial_sum(std::max(k, l)));
}

TEST_CASE("window_eval") {
    const auto c = window_eval(builtin::constant(5.0), Window(1, 3));
    CHECK(c.values == std::vector<double>{5, 5, 5, 5});

    const auto h = window_eval(builtin::harmonic_max(), Window(1, 3));
    const double s2 = oracle::partial_sum(2), s3 = oracle::partial_sum(3);
    CHECK(h.values == std::vector<double>{s2, s3, s3, s3});
    CHECK(h.at(IndexPair(2, 3)) == s3);

    const auto r = window_eval(builtin::row_ramp(), Window(2, 4));
    CHECK(r.values == std::vector<double>{3, 3, 4, 4});
}

TEST_CASE("domain errors carry the index") {
    const auto x = from_spec(parse_sequence_spec("log(k - 3)"));
    try {
        window_eval(x, Window(1, 5));
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        REQUIRE(e.where());
        CHECK(*e.where() == IndexPair(2, 2));
    }
}

TEST_CASE("from_spec") {
    const auto zero = from_spec(parse_sequence_spec("0"), std::nullopt, 0.0);
    CHECK(zero(9, 9) == 0.0);
    CHECK(zero.declared_limit() == 0.0);

    const auto u = builtin::unbounded_column();
    CHECK(u(7, 1) == 7.0);
    CHECK(u(7, 2) == 0.0);
    CHECK(u(1000, 1) == 1000.0);
    CHECK(u(3, 90) == 0.0);
    CHECK(u.descriptor() == "k*max(0, 2 - l)");

    CHECK_THROWS(from_spec(expr::Expression::parse("x", {"x"})));
    Modulus m{ModulusKind::PLimit, [](double) -> std::optional<std::int64_t> { return 1; }};
    CHECK_THROWS(from_spec(parse_sequence_spec("k"), m));
}

TEST_CASE("from_matrix extensions") {
    CHECK(from_matrix({{1}}, Extension::constant(0))(5, 5) == 0.0);
    const auto m = from_matrix({{1, 2}, {3, 4}}, Extension::repeat_last());
    CHECK(m(1, 2) == 2.0);
    CHECK(m(3, 1) == 3.0);
    CHECK(m(7, 9) == 4.0);
    CHECK(m(1, 5) == 2.0);
    CHECK_THROWS(from_matrix({}, Extension::repeat_last()));
    CHECK_THROWS(from_matrix({{1, 2}, {3}}, Extension::repeat_last()));
}

TEST_CASE("transpose swaps indices") {
    const auto t = transpose(builtin::row_ramp());
    CHECK(t(4, 9) == 9.0);
}

TEST_CASE("evaluation is deterministic and thread-safe") {
    const auto x = from_spec(parse_sequence_spec("sin(k*l) + H(k+l)/sqrt(k)"));
    const auto ref = window_eval(x, Window(0, 40));
    std::atomic<int> mismatches{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t)
        pool.emplace_back([&] {
            if (window_eval(x, Window(0, 40)).values != ref.values) ++mismatches;
        });
    for (auto& th : pool) th.join();
    CHECK(mismatches == 0);
}

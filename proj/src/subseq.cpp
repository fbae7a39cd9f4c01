#include "dseq/subseq.hpp"

#include <cmath>
#include <limits>

#include "dseq/harmonic.hpp"

namespace dseq {

IndexPair spiral_cell(std::int64_t j) {
    if (j < 1) throw std::invalid_argument("spiral positions start at 1");
    auto t = static_cast<std::int64_t>(std::sqrt(static_cast<double>(j)));
    while (t * t < j) ++t;
    while ((t - 1) * (t - 1) >= j) --t;
    const std::int64_t r = j - (t - 1) * (t - 1);
    if (r <= t) return IndexPair(r, t);
    return IndexPair(t, 2 * t - r);
}

IndexSelection::IndexSelection(Rule rows, Rule cols, std::string descriptor)
    : rows_(std::move(rows)), cols_(std::move(cols)), descriptor_(std::move(descriptor)) {
    if (!rows_ || !cols_) throw std::invalid_argument("selection rules must be set");
}

namespace {

IndexSelection::Rule rule_from_expression(std::string_view text) {
    auto e = expr::Expression::parse(text, {"j"});
    return [e](std::int64_t j) -> std::int64_t {
        const double v = e(static_cast<double>(j));
        if (v != std::floor(v)) throw SelectionError("selection rule gave a non-integer at j=" + std::to_string(j));
        if (v >= 9007199254740992.0) // 2^53: past this doubles skip integers
            throw IndexOverflow("selection rule exceeds the exact integer range at j=" + std::to_string(j));
        return static_cast<std::int64_t>(v);
    };
}

IndexSelection::Rule rule_from_list(std::vector<std::int64_t> values) {
    return [values = std::move(values)](std::int64_t j) -> std::int64_t {
        if (j > static_cast<std::int64_t>(values.size()))
            throw SelectionError("explicit selection has only " + std::to_string(values.size()) + " terms, j=" +
                                 std::to_string(j) + " requested");
        return values[static_cast<std::size_t>(j - 1)];
    };
}

std::string list_text(const std::vector<std::int64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

} // namespace

IndexSelection IndexSelection::from_rules(std::string_view rows, std::string_view cols) {
    auto r = rule_from_expression(rows);
    auto c = rule_from_expression(cols);
    std::string desc = "rows=" + expr::Expression::parse(rows, {"j"}).to_string() +
                       " cols=" + expr::Expression::parse(cols, {"j"}).to_string();
    return IndexSelection(std::move(r), std::move(c), std::move(desc));
}

IndexSelection IndexSelection::from_lists(std::vector<std::int64_t> rows, std::vector<std::int64_t> cols) {
    std::string desc = "rows=[" + list_text(rows) + "] cols=[" + list_text(cols) + "]";
    return IndexSelection(rule_from_list(std::move(rows)), rule_from_list(std::move(cols)), std::move(desc));
}

IndexSelection IndexSelection::identity() {
    auto id = [](std::int64_t j) { return j; };
    return IndexSelection(id, id, "rows=j cols=j");
}

std::int64_t IndexSelection::checked(const Rule& rule, std::int64_t j, const char* which) const {
    const std::int64_t v = rule(j);
    if (v < 1) throw SelectionError(std::string(which) + " index must be positive at j=" + std::to_string(j));
    if (j > 1 && rule(j - 1) >= v)
        throw SelectionError(std::string(which) + " selection is not strictly increasing at j=" + std::to_string(j));
    return v;
}

std::int64_t IndexSelection::row(std::int64_t j) const { return checked(rows_, j, "row"); }
std::int64_t IndexSelection::col(std::int64_t j) const { return checked(cols_, j, "column"); }

void IndexSelection::validate_prefix(std::int64_t n) const {
    for (std::int64_t j = 1; j <= n; ++j) {
        row(j);
        col(j);
    }
}

DoubleSequence subsequence(const DoubleSequence& seq, const IndexSelection& sel) {
    auto rule = [seq, sel](IndexPair p) {
        const std::int64_t j = spiral_position(p.k, p.l);
        return seq.eval(IndexPair(sel.row(j), sel.col(j)));
    };
    std::optional<Modulus> m;
    if (seq.modulus() && seq.modulus()->kind != ModulusKind::QuasiCauchy) m = seq.modulus();
    return DoubleSequence(std::move(rule), "subseq(" + seq.descriptor() + "; " + sel.descriptor() + ")", std::move(m),
                          m ? seq.declared_limit() : std::nullopt);
}

DyadicDemo dyadic_diagonal_demo(std::span<const Window> windows) {
    DoubleSequence y([](IndexPair p) { return harmonic_pow2(spiral_position(p.k, p.l)); },
                     "subseq(H(max(k, l)); rows=2^j cols=2^j)");
    DyadicDemo demo{y, DefectReport{Property::quasi_cauchy(), {}, std::nullopt}};
    for (const Window& w : windows) {
        Defect d = quasi_cauchy_defect(y, w);
        if (d.witness && (!demo.report.worst_witness || d.value > demo.report.worst_witness->value))
            demo.report.worst_witness = d.witness;
        demo.report.samples.push_back({w, std::move(d)});
    }
    return demo;
}

DyadicDemo dyadic_diagonal_demo() {
    const Window windows[] = {Window(1, 4), Window(10, 20), Window(16, 64)};
    return dyadic_diagonal_demo(windows);
}

} // namespace dseq

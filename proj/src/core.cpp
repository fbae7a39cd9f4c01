#include "dseq/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dseq {

std::string_view to_string(ModulusKind kind) {
    switch (kind) {
    case ModulusKind::PLimit: return "p-limit";
    case ModulusKind::Cauchy: return "cauchy";
    case ModulusKind::QuasiCauchy: return "quasi-cauchy";
    }
    return "?";
}

SequenceSpec parse_sequence_spec(std::string_view text) { return SequenceSpec::parse(text, {"k", "l"}); }

DoubleSequence::DoubleSequence(Rule rule, std::string descriptor, std::optional<Modulus> modulus,
                               std::optional<double> declared_limit)
    : rule_(std::make_shared<const Rule>(std::move(rule))), descriptor_(std::move(descriptor)),
      modulus_(std::move(modulus)), declared_limit_(declared_limit) {
    if (!*rule_) throw std::invalid_argument("sequence rule is empty");
    if (modulus_ && modulus_->kind == ModulusKind::PLimit && !declared_limit_)
        throw std::invalid_argument("a p-limit modulus needs a declared limit");
    if (modulus_ && !modulus_->threshold) throw std::invalid_argument("modulus without threshold map");
}

double DoubleSequence::eval(IndexPair idx) const {
    try {
        return (*rule_)(idx);
    } catch (const DomainError& e) {
        if (e.where()) throw;
        throw DomainError(e.what(), idx);
    }
}

DoubleSequence DoubleSequence::with_modulus(Modulus m, std::optional<double> declared_limit) const {
    DoubleSequence out = *this;
    out.modulus_ = std::move(m);
    if (declared_limit) out.declared_limit_ = declared_limit;
    if (out.modulus_->kind == ModulusKind::PLimit && !out.declared_limit_)
        throw std::invalid_argument("a p-limit modulus needs a declared limit");
    return out;
}

DoubleSequence DoubleSequence::with_descriptor(std::string descriptor) const {
    DoubleSequence out = *this;
    out.descriptor_ = std::move(descriptor);
    return out;
}

WindowMatrix window_eval(const DoubleSequence& seq, Window w) {
    WindowMatrix m{w, {}};
    const auto n = static_cast<std::size_t>(w.size());
    m.values.reserve(n * n);
    for (std::int64_t k = w.lo + 1; k <= w.hi; ++k)
        for (std::int64_t l = w.lo + 1; l <= w.hi; ++l) m.values.push_back(seq.eval(IndexPair(k, l)));
    return m;
}

DoubleSequence from_spec(const SequenceSpec& spec, std::optional<Modulus> modulus, std::optional<double> declared_limit) {
    if (spec.variables() != std::vector<std::string>{"k", "l"})
        throw std::invalid_argument("sequence specs are expressions in k and l");
    auto rule = [spec](IndexPair p) { return spec(static_cast<double>(p.k), static_cast<double>(p.l)); };
    return DoubleSequence(std::move(rule), spec.to_string(), std::move(modulus), declared_limit);
}

DoubleSequence from_matrix(const std::vector<std::vector<double>>& m, Extension ext) {
    if (m.empty() || m.front().empty()) throw std::invalid_argument("matrix must be non-empty");
    for (const auto& row : m)
        if (row.size() != m.front().size()) throw std::invalid_argument("matrix must be rectangular");

    const auto rows = static_cast<std::int64_t>(m.size());
    const auto cols = static_cast<std::int64_t>(m.front().size());
    auto rule = [m, ext, rows, cols](IndexPair p) {
        if (p.k <= rows && p.l <= cols) return m[p.k - 1][p.l - 1];
        if (ext.kind == Extension::Kind::Constant) return ext.value;
        return m[std::min(p.k, rows) - 1][std::min(p.l, cols) - 1];
    };
    std::string desc = "matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                       (ext.kind == Extension::Kind::Constant ? " + constant " + expr::format_number(ext.value)
                                                              : " + repeat-last-row-col");
    return DoubleSequence(std::move(rule), std::move(desc));
}

DoubleSequence transpose(const DoubleSequence& seq) {
    auto rule = [seq](IndexPair p) { return seq.eval(IndexPair(p.l, p.k)); };
    return DoubleSequence(std::move(rule), "transpose(" + seq.descriptor() + ")", seq.modulus(), seq.declared_limit());
}

namespace builtin {

DoubleSequence constant(double c) {
    Modulus m{ModulusKind::PLimit, [](double) -> std::optional<std::int64_t> { return 1; }};
    return DoubleSequence([c](IndexPair) { return c; }, expr::format_number(c), std::move(m), c);
}

DoubleSequence harmonic_max() { return from_spec(parse_sequence_spec("H(max(k,l))")); }

DoubleSequence row_ramp() { return from_spec(parse_sequence_spec("k")); }

DoubleSequence unbounded_column() {
    // Every entry with l >= 2 is exactly zero, so N = 1 works for any eps.
    Modulus m{ModulusKind::PLimit, [](double) -> std::optional<std::int64_t> { return 1; }};
    return from_spec(parse_sequence_spec("k*max(0, 2 - l)"), std::move(m), 0.0);
}

DoubleSequence inverse_sum() {
    Modulus m{ModulusKind::PLimit, [](double eps) -> std::optional<std::int64_t> {
                  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(1.0 / (2.0 * eps))));
              }};
    return from_spec(parse_sequence_spec("1/(k + l)"), std::move(m), 0.0);
}

} // namespace builtin

} // namespace dseq

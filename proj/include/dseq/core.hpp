#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dseq/error.hpp"
#include "dseq/expr.hpp"
#include "dseq/index.hpp"

namespace dseq {

/// Which asymptotic property a modulus speaks for.
enum class ModulusKind { PLimit, Cauchy, QuasiCauchy };

std::string_view to_string(ModulusKind kind);

/// Analytic certificate: for every eps > 0, `threshold(eps)` is an N such that
/// the property holds with tolerance eps for all k,l > N. nullopt means the
/// certificate does not reach that eps. Trusted metadata, never verified here.
struct Modulus {
    ModulusKind kind;
    std::function<std::optional<std::int64_t>(double)> threshold;
};

/// A sequence over the sequence DSL: variables k (row) and l (column).
using SequenceSpec = expr::Expression;

SequenceSpec parse_sequence_spec(std::string_view text);

/// Real double sequence x(k,l), k,l >= 1, evaluated lazily.
///
/// The rule must be pure: the same index always yields the same value. Copies
/// share the rule. Evaluation is safe from any number of threads.
class DoubleSequence {
public:
    using Rule = std::function<double(IndexPair)>;

    DoubleSequence(Rule rule, std::string descriptor, std::optional<Modulus> modulus = std::nullopt,
                   std::optional<double> declared_limit = std::nullopt);

    /// Throws DomainError carrying `idx` if the rule is undefined there.
    double eval(IndexPair idx) const;
    double operator()(std::int64_t k, std::int64_t l) const { return eval(IndexPair(k, l)); }

    const std::string& descriptor() const noexcept { return descriptor_; }
    const std::optional<Modulus>& modulus() const noexcept { return modulus_; }
    const std::optional<double>& declared_limit() const noexcept { return declared_limit_; }

    DoubleSequence with_modulus(Modulus m, std::optional<double> declared_limit = std::nullopt) const;
    DoubleSequence with_descriptor(std::string descriptor) const;

private:
    std::shared_ptr<const Rule> rule_;
    std::string descriptor_;
    std::optional<Modulus> modulus_;
    std::optional<double> declared_limit_;
};

/// Row-major values over a window: row i holds k = lo+1+i, column j holds l = lo+1+j.
struct WindowMatrix {
    Window window;
    std::vector<double> values;

    double at(IndexPair idx) const {
        return values[static_cast<std::size_t>((idx.k - window.lo - 1) * window.size() + (idx.l - window.lo - 1))];
    }
};

WindowMatrix window_eval(const DoubleSequence& seq, Window w);

DoubleSequence from_spec(const SequenceSpec& spec, std::optional<Modulus> modulus = std::nullopt,
                         std::optional<double> declared_limit = std::nullopt);

/// How a finite matrix continues past its last row/column.
struct Extension {
    enum class Kind { RepeatLastRowCol, Constant } kind = Kind::RepeatLastRowCol;
    double value = 0.0;

    static Extension repeat_last() { return {Kind::RepeatLastRowCol, 0.0}; }
    static Extension constant(double c) { return {Kind::Constant, c}; }
};

/// Rows of equal, non-zero length; entry [i][j] sits at index (i+1, j+1).
DoubleSequence from_matrix(const std::vector<std::vector<double>>& m, Extension ext);

DoubleSequence transpose(const DoubleSequence& seq);

/// Sequences that recur throughout the library, tests and gallery.
namespace builtin {

/// x(k,l) = c, P-limit c with N(eps) = 1.
DoubleSequence constant(double c);
/// x(k,l) = H(max(k,l)): quasi-Cauchy but neither Cauchy nor P-convergent.
DoubleSequence harmonic_max();
/// x(k,l) = k.
DoubleSequence row_ramp();
/// x(k,l) = k*max(0, 2-l): unbounded down column 1, zero elsewhere, P-limit 0.
DoubleSequence unbounded_column();
/// x(k,l) = 1/(k+l), P-limit 0 with N(eps) = ceil(1/(2 eps)).
DoubleSequence inverse_sum();

} // namespace builtin

} // namespace dseq

#include "dseq/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "dseq/detail/scan.hpp"
#include "dseq/parallel.hpp"

namespace dseq {

std::string to_string(const Property& p) {
    switch (p.kind) {
    case PropertyKind::QuasiCauchy: return "quasi-cauchy";
    case PropertyKind::Cauchy: return "cauchy";
    case PropertyKind::PLimit: return "p-limit(" + expr::format_number(p.parameter) + ")";
    case PropertyKind::Bounded: return "bounded(" + expr::format_number(p.parameter) + ")";
    case PropertyKind::DefinitelyDivergent: return "definitely-divergent(" + expr::format_number(p.parameter) + ")";
    }
    return "?";
}

std::string_view to_string(VerdictTag tag) {
    switch (tag) {
    case VerdictTag::ConsistentUpTo: return "consistent-up-to";
    case VerdictTag::FalsifiedAt: return "falsified-at";
    case VerdictTag::CertifiedByModulus: return "certified-by-modulus";
    }
    return "?";
}

Defect quasi_cauchy_defect(const DoubleSequence& seq, Window w) {
    return detail::neighbor_defect(
        w, [&](IndexPair p) { return seq.eval(p); }, [](double a, double b) { return std::fabs(a - b); });
}

namespace {

struct Extremes {
    double lo = 0.0, hi = 0.0;
    IndexPair at_lo, at_hi;
    bool any = false;
};

Extremes scan_extremes(const DoubleSequence& seq, Window w) {
    auto scan = [&](std::int64_t r0, std::int64_t r1) {
        Extremes e;
        for (std::int64_t k = r0; k <= r1; ++k)
            for (std::int64_t l = w.lo + 1; l <= w.hi; ++l) {
                const IndexPair p(k, l);
                const double v = seq.eval(p);
                if (!e.any || v < e.lo) e.lo = v, e.at_lo = p;
                if (!e.any || v > e.hi) e.hi = v, e.at_hi = p;
                e.any = true;
            }
        return e;
    };
    auto merge = [](Extremes a, const Extremes& b) {
        if (!b.any) return a;
        if (!a.any) return b;
        if (b.lo < a.lo) a.lo = b.lo, a.at_lo = b.at_lo;
        if (b.hi > a.hi) a.hi = b.hi, a.at_hi = b.at_hi;
        return a;
    };
    return reduce_rows<Extremes>(w.lo + 1, w.hi, scan, merge);
}

/// First cell (row-major) with the largest |x - centre|.
Defect scan_deviation(const DoubleSequence& seq, Window w, double centre) {
    auto scan = [&](std::int64_t r0, std::int64_t r1) {
        Defect best;
        for (std::int64_t k = r0; k <= r1; ++k)
            for (std::int64_t l = w.lo + 1; l <= w.hi; ++l) {
                const IndexPair p(k, l);
                const double d = std::fabs(seq.eval(p) - centre);
                if (!best.witness || d > best.value) best = Defect{d, Witness{p, std::nullopt, d}};
            }
        return best;
    };
    auto merge = [](Defect a, Defect b) {
        if (!a.witness) return b;
        if (!b.witness) return a;
        return detail::better(std::move(a), std::move(b));
    };
    return reduce_rows<Defect>(w.lo + 1, w.hi, scan, merge);
}

std::optional<Witness> first_cell(const DoubleSequence& seq, Window w, const auto& predicate) {
    for (std::int64_t k = w.lo + 1; k <= w.hi; ++k)
        for (std::int64_t l = w.lo + 1; l <= w.hi; ++l) {
            const IndexPair p(k, l);
            const double v = seq.eval(p);
            if (predicate(v)) return Witness{p, std::nullopt, v};
        }
    return std::nullopt;
}

Defect measure(const DoubleSequence& seq, const Property& p, Window w) {
    switch (p.kind) {
    case PropertyKind::QuasiCauchy: return quasi_cauchy_defect(seq, w);
    case PropertyKind::Cauchy: return cauchy_defect(seq, w);
    case PropertyKind::PLimit: return p_limit_defect(seq, p.parameter, w);
    default: throw std::invalid_argument("not a defect property: " + to_string(p));
    }
}

} // namespace

Defect cauchy_defect(const DoubleSequence& seq, Window w) {
    const Extremes e = scan_extremes(seq, w);
    const double d = e.hi - e.lo;
    const IndexPair a = std::min(e.at_lo, e.at_hi);
    const IndexPair b = std::max(e.at_lo, e.at_hi);
    return Defect{d, Witness{a, b, d}};
}

Defect p_limit_defect(const DoubleSequence& seq, double limit, Window w) { return scan_deviation(seq, w, limit); }

LimitEstimate estimate_p_limit(const DoubleSequence& seq, std::span<const std::int64_t> schedule) {
    if (schedule.empty()) throw std::invalid_argument("estimation schedule is empty");
    LimitEstimate out;
    std::int64_t previous = 0;
    for (const std::int64_t n : schedule) {
        if (n < 1 || n <= previous) throw std::invalid_argument("estimation schedule must be strictly increasing and positive");
        previous = n;
        const Window w(n, 4 * n);
        const double estimate = seq.eval(IndexPair(w.hi, w.hi));
        out.estimates.push_back(estimate);
        out.curve.push_back({w, p_limit_defect(seq, estimate, w)});
    }
    out.limit = out.estimates.back();
    return out;
}

ConvergenceVerdict boundedness_scan(const DoubleSequence& seq, Window w, double bound) {
    if (!(bound > 0.0)) throw std::invalid_argument("bound must be positive");
    const Window all(0, w.hi);
    ConvergenceVerdict v;
    v.epsilon = bound;
    v.report.property = Property::bounded(bound);
    const Defect sup = scan_deviation(seq, all, 0.0);
    v.report.samples.push_back({all, sup});
    v.report.worst_witness = sup.witness;
    if (auto hit = first_cell(seq, all, [bound](double x) { return std::fabs(x) >= bound; })) {
        v.tag = VerdictTag::FalsifiedAt;
        v.falsifier = hit;
    } else {
        v.tag = VerdictTag::ConsistentUpTo;
    }
    v.horizon = w.hi;
    return v;
}

ConvergenceVerdict definite_divergence_scan(const DoubleSequence& seq, double threshold, Window w) {
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    ConvergenceVerdict v;
    v.epsilon = threshold;
    v.report.property = Property::definitely_divergent(threshold);

    // The sample records the smallest |x| in the window: the quantity that has
    // to stay above the threshold.
    Defect smallest;
    for (std::int64_t k = w.lo + 1; k <= w.hi; ++k)
        for (std::int64_t l = w.lo + 1; l <= w.hi; ++l) {
            const IndexPair p(k, l);
            const double a = std::fabs(seq.eval(p));
            if (!smallest.witness || a < smallest.value) smallest = Defect{a, Witness{p, std::nullopt, a}};
        }
    v.report.samples.push_back({w, smallest});
    v.report.worst_witness = smallest.witness;

    if (auto hit = first_cell(seq, w, [threshold](double x) { return !(std::fabs(x) > threshold); })) {
        v.tag = VerdictTag::FalsifiedAt;
        v.falsifier = hit;
    } else {
        v.tag = VerdictTag::ConsistentUpTo;
    }
    v.horizon = w.hi;
    return v;
}

std::optional<std::int64_t> modulus_threshold(const DoubleSequence& seq, const Property& p, double eps) {
    const auto& m = seq.modulus();
    if (!m) return std::nullopt;
    switch (p.kind) {
    case PropertyKind::PLimit:
        if (m->kind != ModulusKind::PLimit)
            throw ModulusMismatch("a " + std::string(to_string(m->kind)) + " modulus cannot certify " + to_string(p));
        if (seq.declared_limit() != p.parameter) return std::nullopt;
        return m->threshold(eps);
    case PropertyKind::Cauchy:
        if (m->kind == ModulusKind::PLimit) return m->threshold(eps / 2);
        if (m->kind == ModulusKind::Cauchy) return m->threshold(eps);
        throw ModulusMismatch("a quasi-cauchy modulus cannot certify cauchy");
    case PropertyKind::QuasiCauchy:
        if (m->kind == ModulusKind::PLimit) return m->threshold(eps / 2);
        return m->threshold(eps);
    default: return std::nullopt;
    }
}

ConvergenceVerdict verdict(const DoubleSequence& seq, const Property& p, double eps, std::span<const Window> schedule) {
    if (schedule.empty()) throw std::invalid_argument("verdict needs at least one window");
    if (p.kind == PropertyKind::Bounded) return boundedness_scan(seq, schedule.back(), p.parameter);
    if (p.kind == PropertyKind::DefinitelyDivergent) return definite_divergence_scan(seq, p.parameter, schedule.back());
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");

    ConvergenceVerdict v;
    v.epsilon = eps;
    v.report.property = p;

    auto record = [&](Window w) -> const Defect& {
        v.report.samples.push_back({w, measure(seq, p, w)});
        const Defect& d = v.report.samples.back().defect;
        if (d.witness && (!v.report.worst_witness || d.value > v.report.worst_witness->value))
            v.report.worst_witness = d.witness;
        return d;
    };

    if (const auto n = modulus_threshold(seq, p, eps)) {
        v.horizon = *n;
        for (const Window& w : schedule)
            if (w.hi > std::max(w.lo, *n)) v.spot_checked.emplace_back(std::max(w.lo, *n), w.hi);
        if (v.spot_checked.empty()) v.spot_checked.emplace_back(*n, *n + schedule.back().size());
        for (const Window& w : v.spot_checked) {
            const Defect& d = record(w);
            if (d.value >= eps && !v.falsifier) v.falsifier = d.witness;
        }
        v.tag = v.falsifier ? VerdictTag::FalsifiedAt : VerdictTag::CertifiedByModulus;
        return v;
    }

    std::int64_t reach = 0;
    for (const Window& w : schedule) {
        record(w);
        reach = std::max(reach, w.hi);
    }
    const Defect& last = v.report.samples.back().defect;
    if (last.value >= eps) {
        v.tag = VerdictTag::FalsifiedAt;
        v.falsifier = last.witness;
    } else {
        v.tag = VerdictTag::ConsistentUpTo;
    }
    v.horizon = reach;
    return v;
}

std::vector<Window> default_schedule() { return {Window(16, 64), Window(64, 256), Window(256, 1024)}; }

std::vector<double> default_epsilons() { return {1e-1, 1e-2, 1e-3}; }

} // namespace dseq

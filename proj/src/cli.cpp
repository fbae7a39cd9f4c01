#include "dseq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "dseq/analysis.hpp"
#include "dseq/funcprobe.hpp"
#include "dseq/metricspace.hpp"
#include "dseq/parallel.hpp"
#include "dseq/report.hpp"
#include "dseq/subseq.hpp"
#include "dseq/witness.hpp"

namespace dseq::cli {

namespace {

using report::Json;

constexpr std::uint64_t kDefaultSeed = 20240601;

/// A user-facing input problem; reported with exit 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t from = 0;
    while (true) {
        const auto at = s.find(sep, from);
        parts.push_back(trim(s.substr(from, at == std::string_view::npos ? std::string_view::npos : at - from)));
        if (at == std::string_view::npos) break;
        from = at + 1;
    }
    return parts;
}

double parse_number(const std::string& text, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !std::isfinite(v))
        throw UsageError(std::string("bad number '") + text + "' in " + what);
    return v;
}

std::int64_t parse_integer(const std::string& text, const char* what) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size()) throw UsageError(std::string("bad integer '") + text + "' in " + what);
    return v;
}

std::vector<double> parse_decreasing(const std::string& text, const char* what) {
    std::vector<double> values;
    for (const auto& part : split(text, ',')) {
        const double v = parse_number(part, what);
        if (v <= 0) throw UsageError(std::string(what) + " values must be positive");
        if (!values.empty() && v >= values.back()) throw UsageError(std::string(what) + " must be strictly decreasing");
        values.push_back(v);
    }
    return values;
}

Window parse_window(const std::string& text, const char* what) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw UsageError(std::string("window '") + text + "' in " + what + " is not N:M");
    const auto lo = parse_integer(parts[0], what), hi = parse_integer(parts[1], what);
    if (lo < 0 || hi <= lo) throw UsageError(std::string("window '") + text + "' in " + what + " needs 0 <= N < M");
    return Window(lo, hi);
}

std::vector<Window> parse_windows(const std::string& text) {
    std::vector<Window> windows;
    for (const auto& part : split(text, ',')) {
        const Window w = parse_window(part, "--windows");
        if (!windows.empty() && (w.lo <= windows.back().lo || w.hi <= windows.back().hi))
            throw UsageError("--windows must be strictly increasing");
        windows.push_back(w);
    }
    return windows;
}

std::vector<std::int64_t> parse_schedule(const std::string& text) {
    std::vector<std::int64_t> values;
    for (const auto& part : split(text, ',')) {
        const auto v = parse_integer(part, "--schedule");
        if (v < 1) throw UsageError("--schedule values must be positive");
        if (!values.empty() && v <= values.back()) throw UsageError("--schedule must be strictly increasing");
        values.push_back(v);
    }
    return values;
}

Point2 parse_point(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError("--point needs x,y");
    return {parse_number(parts[0], "--point"), parse_number(parts[1], "--point")};
}

/// Options shared by every command.
struct Globals {
    unsigned jobs = 1;
    std::uint64_t seed = kDefaultSeed;
    std::string format = "json";
    std::string report_path;
};

/// What a command produced.
struct Result {
    int code = kOk;
    Json json;
    std::optional<std::string> csv;
};

// ---------------------------------------------------------------- sequences

struct SequenceInput {
    std::string seq;
    std::string builtin;
    std::string matrix;
    std::string extend = "repeat";
    std::string modulus;
    std::optional<double> limit;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--seq", seq, "Sequence rule in k and l");
        cmd->add_option("--builtin", builtin, "harmonic-max, row-ramp, unbounded-column, inverse-sum or constant:C");
        cmd->add_option("--matrix", matrix, "CSV file with a finite matrix");
        cmd->add_option("--extend", extend, "Matrix continuation: repeat or constant:C");
        cmd->add_option("--modulus", modulus, "KIND:EXPR with KIND p-limit, cauchy or quasi-cauchy and EXPR in eps");
        cmd->add_option("--limit", limit, "Limit L for p-limit properties and moduli");
    }

    DoubleSequence build() const;
};

DoubleSequence builtin_sequence(const std::string& name) {
    if (name == "harmonic-max") return builtin::harmonic_max();
    if (name == "row-ramp") return builtin::row_ramp();
    if (name == "unbounded-column") return builtin::unbounded_column();
    if (name == "inverse-sum") return builtin::inverse_sum();
    if (name.rfind("constant:", 0) == 0) return builtin::constant(parse_number(name.substr(9), "--builtin"));
    throw UsageError("unknown builtin '" + name +
                     "' (harmonic-max, row-ramp, unbounded-column, inverse-sum, constant:C)");
}

DoubleSequence matrix_sequence(const std::string& path, const std::string& extend) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read matrix file '" + path + "'");
    std::vector<std::vector<double>> rows;
    for (std::string line; std::getline(in, line);) {
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) row.push_back(parse_number(cell, "--matrix"));
        rows.push_back(std::move(row));
    }
    Extension ext;
    if (extend == "repeat") {
        ext = Extension::repeat_last();
    } else if (extend.rfind("constant:", 0) == 0) {
        ext = Extension::constant(parse_number(extend.substr(9), "--extend"));
    } else {
        throw UsageError("--extend must be repeat or constant:C");
    }
    try {
        return from_matrix(rows, ext);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("matrix file '") + path + "': " + e.what());
    }
}

Modulus parse_modulus(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("--modulus needs KIND:EXPR");
    const std::string kind = trim(text.substr(0, colon));
    ModulusKind k;
    if (kind == "p-limit") k = ModulusKind::PLimit;
    else if (kind == "cauchy") k = ModulusKind::Cauchy;
    else if (kind == "quasi-cauchy") k = ModulusKind::QuasiCauchy;
    else throw UsageError("unknown modulus kind '" + kind + "'");
    const auto e = expr::Expression::parse(text.substr(colon + 1), {"eps"});
    return {k, [e](double eps) -> std::optional<std::int64_t> {
                double v = 0;
                try {
                    v = e(eps);
                } catch (const DomainError&) {
                    return std::nullopt;
                }
                if (!(v < 0x1.0p53)) return std::nullopt;
                return static_cast<std::int64_t>(std::max(0.0, std::ceil(v)));
            }};
}

DoubleSequence SequenceInput::build() const {
    const int given = !seq.empty() + !builtin.empty() + !matrix.empty();
    if (given != 1) throw UsageError("give exactly one of --seq, --builtin and --matrix");
    DoubleSequence x = !seq.empty()       ? from_spec(parse_sequence_spec(seq))
                       : !builtin.empty() ? builtin_sequence(builtin)
                                          : matrix_sequence(matrix, extend);
    if (!modulus.empty()) {
        const Modulus m = parse_modulus(modulus);
        if (m.kind == ModulusKind::PLimit && !limit) throw UsageError("a p-limit modulus needs --limit");
        x = x.with_modulus(m, m.kind == ModulusKind::PLimit ? limit : x.declared_limit());
    }
    return x;
}

// ---------------------------------------------------------------- analyze

Property parse_property(const std::string& name, std::optional<double> limit, std::optional<double> bound) {
    if (name == "quasi-cauchy") return Property::quasi_cauchy();
    if (name == "cauchy") return Property::cauchy();
    if (name == "p-limit") {
        if (!limit) throw UsageError("--prop p-limit needs --limit");
        return Property::p_limit(*limit);
    }
    if (name == "bounded" || name == "definitely-divergent") {
        if (!bound || *bound <= 0) throw UsageError("--prop " + name + " needs a positive --bound");
        return name == "bounded" ? Property::bounded(*bound) : Property::definitely_divergent(*bound);
    }
    throw UsageError("unknown property '" + name + "'");
}

struct AnalyzeOptions {
    SequenceInput input;
    std::string prop = "quasi-cauchy";
    std::optional<double> bound;
    std::string eps;
    std::string windows;
};

Result run_analyze(const AnalyzeOptions& o) {
    const DoubleSequence x = o.input.build();
    const Property p = parse_property(o.prop, o.input.limit, o.bound);
    const auto windows = o.windows.empty() ? default_schedule() : parse_windows(o.windows);
    const auto epsilons = o.eps.empty() ? default_epsilons() : parse_decreasing(o.eps, "--eps");

    std::vector<ConvergenceVerdict> verdicts;
    if (p.kind == PropertyKind::Bounded) {
        verdicts.push_back(boundedness_scan(x, windows.back(), p.parameter));
    } else if (p.kind == PropertyKind::DefinitelyDivergent) {
        for (const Window& w : windows) verdicts.push_back(definite_divergence_scan(x, p.parameter, w));
    } else {
        for (double eps : epsilons) verdicts.push_back(verdict(x, p, eps, windows));
    }

    Result r;
    r.json["sequence"] = x.descriptor();
    r.json["property"] = to_string(p);
    Json arr = Json::array();
    for (const auto& v : verdicts) {
        arr.push_back(report::to_json(v));
        if (v.tag == VerdictTag::FalsifiedAt) r.code = kFalsified;
    }
    r.json["verdicts"] = arr;
    r.csv = report::defect_csv(verdicts.front().report.samples);
    return r;
}

// ---------------------------------------------------------------- estimate

struct EstimateOptions {
    SequenceInput input;
    std::string schedule = "10,100,1000";
};

Result run_estimate(const EstimateOptions& o) {
    const DoubleSequence x = o.input.build();
    const auto schedule = parse_schedule(o.schedule);
    const auto e = estimate_p_limit(x, schedule);
    Result r;
    r.json["sequence"] = x.descriptor();
    r.json["schedule"] = schedule;
    r.json["estimate"] = report::to_json(e);
    r.csv = report::defect_csv(e.curve);
    return r;
}

// ---------------------------------------------------------------- subseq

struct SubseqOptions {
    SequenceInput input;
    std::string rows;
    std::string cols;
    std::string windows;
    bool dyadic = false;
    std::int64_t corner = 4;
};

bool is_list(const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789, ") == std::string::npos;
}

std::vector<std::int64_t> parse_list(const std::string& s, const char* what) {
    std::vector<std::int64_t> v;
    for (const auto& part : split(s, ',')) v.push_back(parse_integer(part, what));
    return v;
}

Json corner_json(const DoubleSequence& y, std::int64_t T) {
    Json values = Json::array(), positions = Json::array();
    for (std::int64_t p = 1; p <= T; ++p) {
        Json vrow = Json::array(), prow = Json::array();
        for (std::int64_t q = 1; q <= T; ++q) {
            vrow.push_back(y(p, q));
            prow.push_back(spiral_position(p, q));
        }
        values.push_back(vrow);
        positions.push_back(prow);
    }
    Json j;
    j["positions"] = positions;
    j["values"] = values;
    return j;
}

Result run_subseq(const SubseqOptions& o) {
    if (o.corner < 1 || o.corner > 64) throw UsageError("--corner must be in 1..64");
    Result r;
    if (o.dyadic) {
        const auto windows = o.windows.empty() ? std::vector<Window>{} : parse_windows(o.windows);
        const auto demo = windows.empty() ? dyadic_diagonal_demo() : dyadic_diagonal_demo(windows);
        r.json["parent"] = builtin::harmonic_max().descriptor();
        r.json["selection"] = "rows 2^j, cols 2^j";
        r.json["corner"] = corner_json(demo.sequence, o.corner);
        r.json["report"] = report::to_json(demo.report);
        Json contrast;
        const Window parent_window(10, 20);
        contrast["window"] = Json::array({parent_window.lo, parent_window.hi});
        contrast["defect"] = quasi_cauchy_defect(builtin::harmonic_max(), parent_window).value;
        r.json["parent_defect"] = contrast;
        r.csv = report::defect_csv(demo.report.samples);
        return r;
    }
    if (o.rows.empty() || o.cols.empty()) throw UsageError("subseq needs --rows and --cols, or --dyadic-demo");
    if (is_list(o.rows) != is_list(o.cols)) throw UsageError("--rows and --cols must both be rules or both be lists");
    const IndexSelection sel = is_list(o.rows)
                                   ? IndexSelection::from_lists(parse_list(o.rows, "--rows"), parse_list(o.cols, "--cols"))
                                   : IndexSelection::from_rules(o.rows, o.cols);
    const DoubleSequence x = o.input.build();
    const DoubleSequence y = subsequence(x, sel);
    const auto windows = parse_windows(o.windows.empty() ? "0:4" : o.windows);
    const std::int64_t reach = std::max(o.corner, windows.back().hi + 1);
    sel.validate_prefix(reach * reach);

    DefectReport rep{Property::quasi_cauchy(), {}, std::nullopt};
    for (const Window& w : windows) {
        const Defect d = quasi_cauchy_defect(y, w);
        if (d.witness && (!rep.worst_witness || d.value > rep.worst_witness->value)) rep.worst_witness = d.witness;
        rep.samples.push_back({w, d});
    }
    r.json["parent"] = x.descriptor();
    r.json["selection"] = sel.descriptor();
    r.json["corner"] = corner_json(y, o.corner);
    r.json["report"] = report::to_json(rep);
    r.csv = report::defect_csv(rep.samples);
    return r;
}

// ---------------------------------------------------------------- witness

struct WitnessOptions {
    std::string pairs;
    std::string interval = "[0,1]";
    std::string gap = "1/i^2";
    std::string family;
    std::int64_t upto = 8;
    double band_scale = 2.0;
    std::string blocks = "2,4,8";
};

PairFamily reciprocal_family(Interval I) {
    return {[](std::int64_t i, std::int64_t j) {
                const double v = 1.0 / (static_cast<double>(i) * static_cast<double>(j));
                return Quad{0.0, v, v, v};
            },
            I,
            [](double eps) -> std::optional<std::int64_t> {
                return static_cast<std::int64_t>(std::floor(1.0 / std::sqrt(eps))) + 1;
            },
            "a=0, b=c=d=1/(i*j)"};
}

Result run_witness(const WitnessOptions& o) {
    const Interval I = parse_interval(o.interval);
    if (o.upto < 2) throw UsageError("--upto must be at least 2");
    PairFamily pf = [&] {
        if (!o.pairs.empty()) {
            if (!o.family.empty()) throw UsageError("give either --pairs or --family");
            std::ifstream in(o.pairs);
            if (!in) throw UsageError("cannot read pairs file '" + o.pairs + "'");
            return PairFamily::from_csv(in, I, o.gap);
        }
        const std::string name = o.family.empty() ? "reciprocal" : o.family;
        if (name == "reciprocal") return reciprocal_family(I);
        if (name.rfind("constant:", 0) == 0) return PairFamily::constant(parse_number(name.substr(9), "--family"), I);
        throw UsageError("unknown family '" + name + "' (reciprocal, constant:C)");
    }();

    BuildOptions bo;
    bo.band_scale = o.band_scale;
    const QcWitness w = build_qc_witness(pf, bo);
    const auto check = verify_embedding(w.witness, w.embedding, pf, o.upto);

    Result r;
    r.json["family"] = pf.descriptor;
    r.json["interval"] = to_string(pf.interval);
    r.json["band_scale"] = bo.band_scale;
    Json starts = Json::array();
    for (std::int64_t k = 1; k <= o.upto + 1; ++k) starts.push_back(w.witness.layout->start(k));
    r.json["band_starts"] = starts;
    Json anchors = Json::array();
    for (std::int64_t i = 1; i <= o.upto; ++i)
        for (std::int64_t j = 1; j <= o.upto; ++j) {
            const IndexPair a = w.embedding.anchor(i, j);
            anchors.push_back(Json::array({i, j, a.k, a.l}));
        }
    r.json["anchors"] = anchors;
    r.json["embedding"] = report::to_json(check);
    r.json["modulus_attached"] = w.witness.sequence.modulus().has_value();
    r.json["offdiagonal_violation"] =
        w.witness.offdiagonal_violation ? report::to_json(*w.witness.offdiagonal_violation) : Json();

    Json blocks = Json::array();
    for (const auto& part : split(o.blocks, ',')) {
        const auto K = parse_integer(part, "--blocks");
        if (K < 1 || K + 2 > w.witness.layout->bands()) throw UsageError("--blocks entries must be positive");
        const Window win(w.witness.beyond_block(K), w.witness.layout->start(K + 2) - 1);
        double sup_spread = 0;
        for (std::int64_t i = K; i < K + 16; ++i)
            for (std::int64_t j = K; j < K + 16; ++j) sup_spread = std::max(sup_spread, pf.quad(i, j).spread());
        const Defect d = quasi_cauchy_defect(w.witness.sequence, win);
        Json b;
        b["block"] = K;
        b["lo"] = win.lo;
        b["hi"] = win.hi;
        b["defect"] = d.value;
        b["witness"] = d.witness ? report::to_json(*d.witness) : Json();
        b["bound"] = std::max(1.0 / static_cast<double>(K * K), sup_spread);
        blocks.push_back(std::move(b));
    }
    r.json["blocks"] = blocks;
    if (!check.pass) r.code = kFalsified;
    return r;
}

// ---------------------------------------------------------------- probe

struct ProbeOptions {
    std::string fn;
    std::string product_g;
    std::string product_h;
    std::string domain = "[0,1]x[0,1]";
    std::string mode;
    double eps = 1e-2;
    std::optional<double> source_eps;
    std::string deltas = "1e-1,1e-2,1e-3,1e-4";
    std::string window = "16:64";
    std::string point;
    std::string strategies = "radial,diagonal,random";
    std::string seq;
    std::string seq_x;
    std::string seq_y;
    std::string modulus;
    std::optional<double> limit;
    std::int64_t budget = 1'000'000;
    std::string witness_out;
};

DoubleSequence probe_coordinate(const std::string& rule, const ProbeOptions& o) {
    SequenceInput in;
    if (rule.rfind("builtin:", 0) == 0) in.builtin = rule.substr(8);
    else in.seq = rule;
    in.modulus = o.modulus;
    in.limit = o.limit;
    return in.build();
}

PointSequence probe_sequence(const ProbeOptions& o) {
    if (!o.seq.empty()) {
        if (!o.seq_x.empty() || !o.seq_y.empty()) throw UsageError("give either --seq or --seq-x/--seq-y");
        return PointSequence::from_scalar(probe_coordinate(o.seq, o));
    }
    if (o.seq_x.empty() || o.seq_y.empty()) throw UsageError("this mode needs --seq or both --seq-x and --seq-y");
    return PointSequence{probe_coordinate(o.seq_x, o), probe_coordinate(o.seq_y, o)};
}

std::string witness_csv(const UcBundle& b, const FunctionSpec& f) {
    const std::int64_t n = std::min<std::int64_t>(b.layout->start(static_cast<std::int64_t>(b.pairs.size()) + 1) - 1, 128);
    std::string out = "k,l,x,y,image\n";
    for (std::int64_t k = 1; k <= n; ++k)
        for (std::int64_t l = 1; l <= n; ++l) {
            const Point2 p = b.witness(IndexPair(k, l));
            out += std::to_string(k) + "," + std::to_string(l) + "," + report::format_double(p.x) + "," +
                   report::format_double(p.y) + "," + report::format_double(f(p)) + "\n";
        }
    return out;
}

Result run_probe(const ProbeOptions& o, std::uint64_t seed) {
    const Interval2D domain = parse_interval2d(o.domain);
    const bool product = !o.product_g.empty() || !o.product_h.empty();
    if (product == !o.fn.empty()) throw UsageError("give either --fn or both --fn-x and --fn-y");
    if (product && (o.product_g.empty() || o.product_h.empty())) throw UsageError("a product needs --fn-x and --fn-y");
    const FunctionSpec f = product ? FunctionSpec::product(o.product_g, o.product_h, domain) : FunctionSpec::parse(o.fn, domain);
    if (!(o.eps > 0)) throw UsageError("--eps must be positive");

    ProbeReport rep;
    if (o.mode == "seqcont") {
        std::vector<ApproachStrategy> strategies;
        for (const auto& s : split(o.strategies, ',')) {
            if (s == "radial") strategies.push_back(ApproachStrategy::Radial);
            else if (s == "diagonal") strategies.push_back(ApproachStrategy::Diagonal);
            else if (s == "random") strategies.push_back(ApproachStrategy::Random);
            else throw UsageError("unknown strategy '" + s + "'");
        }
        const Point2 L = o.point.empty() ? Point2{(domain.x.lo + domain.x.hi) / 2, (domain.y.lo + domain.y.hi) / 2}
                                         : parse_point(o.point);
        SeqContConfig cfg;
        cfg.epsilon = o.eps;
        cfg.seed = seed;
        rep = seq_continuity_probe(f, L, strategies, cfg);
    } else if (o.mode == "qcpres") {
        rep = qc_preservation_check(f, probe_sequence(o), parse_window(o.window, "--window"), o.eps, o.source_eps);
    } else if (o.mode == "cauchyimage") {
        rep = cauchy_image_check(f, probe_sequence(o), parse_window(o.window, "--window"), o.eps);
    } else if (o.mode == "ucfalsify") {
        UcConfig cfg;
        cfg.budget = o.budget;
        rep = uc_falsify(f, o.eps, parse_decreasing(o.deltas, "--deltas"), cfg);
        if (!o.witness_out.empty() && rep.bundle) {
            std::ofstream out(o.witness_out);
            if (!out) throw UsageError("cannot write witness file '" + o.witness_out + "'");
            out << witness_csv(*rep.bundle, f);
        }
    } else {
        throw UsageError("--mode must be seqcont, qcpres, ucfalsify or cauchyimage");
    }

    Result r;
    r.json["domain"] = to_string(domain);
    r.json["probe"] = report::to_json(rep);
    if (rep.verdict == ProbeVerdict::Violated) {
        const auto check = reverify(rep, f);
        r.json["reverified"] = check.ok;
        if (!check.ok) throw std::logic_error("violated report failed re-verification: " + check.failure);
        r.code = kFalsified;
    }
    return r;
}

// ---------------------------------------------------------------- metric

struct MetricOptions {
    std::string space = "lcp";
    std::string check = "axioms";
    std::int64_t samples = 100;
    std::string windows = "0:16,16:64,64:128";
    std::int64_t sequences = 10;
};

Result run_metric(const MetricOptions& o, std::uint64_t seed) {
    const DistanceRule d = [&] {
        try {
            return distance_rule(o.space);
        } catch (const std::invalid_argument&) {
            throw UsageError("unknown space '" + o.space + "' (euclid2, lcp, discrete)");
        }
    }();
    Result r;
    r.json["space"] = o.space;
    r.json["seed"] = seed;
    if (o.check == "axioms") {
        if (o.samples < 3) throw UsageError("--samples must be at least 3");
        const auto sample = sample_points(o.space, static_cast<std::size_t>(o.samples), seed);
        r.json["report"] = report::to_json(validate_axioms(d, sample));
        return r;
    }
    if (o.check != "nonincremental") throw UsageError("--check must be axioms or nonincremental");
    if (o.sequences < 1) throw UsageError("--sequences must be positive");
    std::vector<MetricDoubleSequence> seqs;
    if (o.space == "euclid2") {
        seqs.push_back(harmonic_drift());
    } else {
        for (std::int64_t i = 0; i < o.sequences; ++i) seqs.push_back(lcp_sequence(seed + static_cast<std::uint64_t>(i)));
    }
    const auto windows = parse_windows(o.windows);
    NonIncrementalConfig cfg;
    cfg.seed = seed;
    const auto rep = non_incremental_check(d, seqs, windows, cfg);
    Json names = Json::array();
    for (const auto& s : seqs) names.push_back(s.descriptor);
    r.json["sequences"] = names;
    r.json["report"] = report::to_json(rep);
    for (const auto& row : rep.rows)
        if (!row.inequality_holds) r.code = kFalsified;
    return r;
}

// ---------------------------------------------------------------- gallery

struct GalleryOptions {
    std::string dir = "tests/golden";
    bool regenerate = false;
    std::string out;
    std::string only;
};

bool read_file(const std::filesystem::path& p, std::string& content) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    content = ss.str();
    return true;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + p.string() + "'");
    out << content;
}

Result run_gallery(const GalleryOptions& o, std::string& errors) {
    namespace fs = std::filesystem;
    const fs::path dir(o.dir);
    if (o.regenerate) fs::create_directories(dir);
    if (!o.out.empty()) fs::create_directories(o.out);

    Result r;
    Json items = Json::array();
    for (const GalleryItem& item : gallery_items()) {
        if (!o.only.empty() && item.name != o.only) continue;
        const Outcome run = execute(item.args);
        if (run.code == kError) throw std::runtime_error("gallery item " + item.name + " failed: " + run.errors);
        const fs::path golden = dir / (item.name + ".json");
        std::string status = "match";
        if (o.regenerate) {
            write_file(golden, run.report);
            status = "written";
        } else {
            std::string expected;
            if (!read_file(golden, expected)) status = "missing";
            else if (expected != run.report) status = "drift";
        }
        if (!o.out.empty()) write_file(fs::path(o.out) / (item.name + ".json"), run.report);
        if (status == "missing" || status == "drift") {
            errors += "golden " + status + ": " + item.name + " (" + golden.string() + ")\n";
            r.code = kGoldenDrift;
        }
        Json e;
        e["name"] = item.name;
        e["exit"] = run.code;
        e["status"] = status;
        items.push_back(std::move(e));
    }
    if (items.empty()) throw UsageError("no gallery item named '" + o.only + "'");
    r.json["items"] = items;
    return r;
}

// ---------------------------------------------------------------- driver

std::string render(const Result& r, const std::string& command, const Globals& g) {
    if (g.format == "csv") {
        if (!r.csv) throw UsageError("csv output is available for analyze, estimate and subseq");
        return *r.csv;
    }
    Json top;
    top["schema"] = report::kSchema;
    top["command"] = command;
    for (const auto& [key, value] : r.json.items()) top[key] = value;
    return report::dump(top);
}

} // namespace

Outcome execute(const std::vector<std::string>& args) {
    Outcome outcome;
    CLI::App app{"Finite-window analysis of double sequences"};
    app.name("dseq");
    app.require_subcommand(1);

    Globals g;
    app.add_option("--jobs", g.jobs, "Worker threads for window scans")->check(CLI::Range(1u, 256u));
    app.add_option("--seed", g.seed, "Seed for sampled spaces and randomized probes")->envname("DSEQ_SEED");
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--report", g.report_path, "Write the report to this file");

    AnalyzeOptions analyze;
    auto* a = app.add_subcommand("analyze", "Verdicts for a convergence property over scheduled windows")->fallthrough();
    analyze.input.add_to(a);
    a->add_option("--prop", analyze.prop, "quasi-cauchy, cauchy, p-limit, bounded or definitely-divergent");
    a->add_option("--bound", analyze.bound, "Bound M for bounded and definitely-divergent");
    a->add_option("--eps", analyze.eps, "Strictly decreasing tolerances, comma separated");
    a->add_option("--windows", analyze.windows, "Windows N:M, comma separated");

    EstimateOptions estimate;
    auto* e = app.add_subcommand("estimate", "Running P-limit estimate and its defect curve")->fallthrough();
    estimate.input.add_to(e);
    e->add_option("--schedule", estimate.schedule, "Strictly increasing bounds N; windows are (N,4N]");

    SubseqOptions sub;
    auto* s = app.add_subcommand("subseq", "Double subsequences in spiral arrangement")->fallthrough();
    sub.input.add_to(s);
    s->add_option("--rows", sub.rows, "Row rule in j, or a comma list");
    s->add_option("--cols", sub.cols, "Column rule in j, or a comma list");
    s->add_option("--windows", sub.windows, "Windows N:M for the quasi-Cauchy report");
    s->add_option("--corner", sub.corner, "Size of the printed corner");
    s->add_flag("--dyadic-demo", sub.dyadic, "Harmonic-max along n_j = k_j = 2^j");

    WitnessOptions wit;
    auto* w = app.add_subcommand("witness", "Quasi-Cauchy witness embedding a pair family")->fallthrough();
    w->add_option("--pairs", wit.pairs, "CSV file with header i,j,a,b,c,d");
    w->add_option("--interval", wit.interval, "Interval I, e.g. [0,1]");
    w->add_option("--gap", wit.gap, "Expression in i bounding the spread of quads beyond i");
    w->add_option("--family", wit.family, "reciprocal or constant:C");
    w->add_option("--upto", wit.upto, "Check anchors and steps for 2 <= i,j <= upto");
    w->add_option("--band-scale", wit.band_scale, "Band scale c")->check(CLI::PositiveNumber);
    w->add_option("--blocks", wit.blocks, "Blocks K whose tail defect is measured");

    ProbeOptions probe;
    auto* p = app.add_subcommand("probe", "Continuity probes for functions of two variables")->fallthrough();
    p->add_option("--fn", probe.fn, "Function of x and y");
    p->add_option("--fn-x", probe.product_g, "Factor g(x) of a product function");
    p->add_option("--fn-y", probe.product_h, "Factor h(y) of a product function");
    p->add_option("--domain", probe.domain, "Domain [a,b]x[c,d]");
    p->add_option("--mode", probe.mode, "seqcont, qcpres, ucfalsify or cauchyimage")->required();
    p->add_option("--eps", probe.eps, "Image tolerance");
    p->add_option("--source-eps", probe.source_eps, "Source tolerance for qcpres");
    p->add_option("--deltas", probe.deltas, "Strictly decreasing deltas for ucfalsify");
    p->add_option("--window", probe.window, "Window N:M for qcpres and cauchyimage");
    p->add_option("--point", probe.point, "Limit point x,y for seqcont");
    p->add_option("--strategies", probe.strategies, "radial, diagonal, random");
    p->add_option("--seq", probe.seq, "Scalar rule s; the points are (s(k,l), s(l,k))");
    p->add_option("--seq-x", probe.seq_x, "First coordinate rule");
    p->add_option("--seq-y", probe.seq_y, "Second coordinate rule");
    p->add_option("--modulus", probe.modulus, "KIND:EXPR modulus for the coordinate rules");
    p->add_option("--limit", probe.limit, "Declared limit for a p-limit modulus");
    p->add_option("--budget", probe.budget, "Evaluations per delta for ucfalsify")->check(CLI::Range(16, 1 << 30));
    p->add_option("--witness-out", probe.witness_out, "CSV file for the witness sequence corner");

    MetricOptions met;
    auto* m = app.add_subcommand("metric", "Axioms and the non-incremental property on sampled spaces")->fallthrough();
    m->add_option("--space", met.space, "euclid2, lcp or discrete");
    m->add_option("--check", met.check, "axioms or nonincremental");
    m->add_option("--samples", met.samples, "Sample size for the axiom check");
    m->add_option("--windows", met.windows, "Windows N:M for the non-incremental check");
    m->add_option("--sequences", met.sequences, "Number of generated sequences");

    GalleryOptions gal;
    auto* gl = app.add_subcommand("gallery", "Regression fixtures against golden reports")->fallthrough();
    gl->add_option("--dir", gal.dir, "Golden directory");
    gl->add_flag("--regenerate", gal.regenerate, "Rewrite the golden files");
    gl->add_option("--out", gal.out, "Also write every report to this directory");
    gl->add_option("--only", gal.only, "Run a single item");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        std::ostringstream out, errs;
        const int code = app.exit(err, out, errs);
        outcome.report = out.str();
        outcome.errors = errs.str();
        outcome.code = code == 0 ? kOk : kError;
        return outcome;
    }

    try {
        set_worker_count(g.jobs);
        Result r;
        std::string command;
        if (*a) r = run_analyze(analyze), command = "analyze";
        else if (*e) r = run_estimate(estimate), command = "estimate";
        else if (*s) r = run_subseq(sub), command = "subseq";
        else if (*w) r = run_witness(wit), command = "witness";
        else if (*p) r = run_probe(probe, g.seed), command = "probe";
        else if (*m) r = run_metric(met, g.seed), command = "metric";
        else r = run_gallery(gal, outcome.errors), command = "gallery";
        outcome.report = render(r, command, g);
        outcome.report_path = g.report_path;
        outcome.code = r.code;
    } catch (const ParseError& err) {
        outcome.errors += std::string("error: parse: ") + err.what() + "\n";
        outcome.code = kError;
    } catch (const std::exception& err) {
        outcome.errors += std::string("error: ") + err.what() + "\n";
        outcome.code = kError;
    }
    set_worker_count(1);
    return outcome;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Outcome o = execute(args);
    err << o.errors;
    if (o.code == kError || o.report.empty()) {
        out << o.report;
        return o.code;
    }
    if (!o.report_path.empty()) {
        std::ofstream file(o.report_path, std::ios::binary);
        if (!file) {
            err << "error: cannot write report '" << o.report_path << "'\n";
            return kError;
        }
        file << o.report;
    } else {
        out << o.report;
    }
    return o.code;
}

std::vector<GalleryItem> gallery_items() {
    return {
        {"harmonic-max-quasi-cauchy",
         {"analyze", "--builtin", "harmonic-max", "--prop", "quasi-cauchy", "--eps", "1e-2", "--windows", "16:64,100:200"}},
        {"harmonic-max-cauchy", {"analyze", "--builtin", "harmonic-max", "--prop", "cauchy", "--eps", "0.5", "--windows", "10:80"}},
        {"harmonic-max-estimate", {"estimate", "--builtin", "harmonic-max", "--schedule", "10,100,1000"}},
        {"unbounded-column-bounded",
         {"analyze", "--builtin", "unbounded-column", "--prop", "bounded", "--bound", "100", "--windows", "10:200"}},
        {"unbounded-column-p-limit",
         {"analyze", "--builtin", "unbounded-column", "--prop", "p-limit", "--limit", "0", "--windows", "5:50"}},
        {"spiral-corner", {"subseq", "--seq", "k*10^6 + l", "--rows", "j", "--cols", "j", "--windows", "0:4"}},
        {"dyadic-diagonal", {"subseq", "--dyadic-demo"}},
        {"metric-euclid2-axioms", {"metric", "--space", "euclid2", "--check", "axioms", "--samples", "100"}},
        {"metric-lcp-axioms", {"metric", "--space", "lcp", "--check", "axioms", "--samples", "60"}},
        {"metric-discrete-axioms", {"metric", "--space", "discrete", "--check", "axioms", "--samples", "30"}},
        {"metric-lcp-nonincremental", {"metric", "--space", "lcp", "--check", "nonincremental"}},
        {"metric-euclid2-nonincremental", {"metric", "--space", "euclid2", "--check", "nonincremental"}},
        {"witness-reciprocal", {"witness", "--family", "reciprocal", "--upto", "8"}},
        {"ucfalsify-inverse-product",
         {"probe", "--fn", "1/(x*y)", "--domain", "(0,1]x(0,1]", "--mode", "ucfalsify", "--eps", "1"}},
        {"seqcont-floor", {"probe", "--fn", "floor(x + y)", "--mode", "seqcont", "--eps", "1e-3", "--point", "0.5,0.5"}},
    };
}

} // namespace dseq::cli

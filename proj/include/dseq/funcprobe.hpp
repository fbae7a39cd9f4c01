#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dseq/analysis.hpp"
#include "dseq/core.hpp"
#include "dseq/interval.hpp"
#include "dseq/witness.hpp"

namespace dseq {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 p, Point2 q) { return std::hypot(p.x - q.x, p.y - q.y); }

/// Rectangle X x Y; the square I x I is the usual case.
struct Interval2D {
    Interval x;
    Interval y;

    bool contains(Point2 p) const noexcept { return x.contains(p.x) && y.contains(p.y); }
    bool interior(Point2 p) const noexcept { return p.x > x.lo && p.x < x.hi && p.y > y.lo && p.y < y.hi; }
};

std::string to_string(const Interval2D& d);
/// "[a,b]x[c,d]" with any mix of open and closed ends.
Interval2D parse_interval2d(std::string_view text);

/// A real function of (x, y): either a general expression in x and y, or a
/// product g(x) * h(y).
class FunctionSpec {
public:
    static FunctionSpec parse(std::string_view text, Interval2D domain);
    static FunctionSpec product(std::string_view g_of_x, std::string_view h_of_y, Interval2D domain);

    /// Throws DomainError naming the point when f is undefined there.
    double operator()(double x, double y) const;
    double operator()(Point2 p) const { return (*this)(p.x, p.y); }

    const Interval2D& domain() const noexcept { return domain_; }
    const std::string& descriptor() const noexcept { return descriptor_; }
    bool is_product() const noexcept { return product_.has_value(); }

private:
    FunctionSpec(Interval2D domain, std::string descriptor) : domain_(domain), descriptor_(std::move(descriptor)) {}

    Interval2D domain_;
    std::string descriptor_;
    std::optional<expr::Expression> general_;
    std::optional<std::pair<expr::Expression, expr::Expression>> product_;
};

/// Plane-valued double sequence p(k,l) = (x(k,l), y(k,l)).
struct PointSequence {
    DoubleSequence x;
    DoubleSequence y;

    Point2 operator()(IndexPair p) const { return {x.eval(p), y.eval(p)}; }
    std::string descriptor() const { return "(" + x.descriptor() + ", " + y.descriptor() + ")"; }

    /// (s(k,l), s(l,k)): a real sequence paired with its transpose.
    static PointSequence from_scalar(const DoubleSequence& s);

    /// Euclidean threshold for a Cauchy or quasi-Cauchy property built from
    /// the coordinate moduli at eps/sqrt(2). nullopt when either coordinate
    /// has none.
    std::optional<std::int64_t> threshold(PropertyKind kind, double eps) const;
};

/// Euclidean quasi-Cauchy defect of a plane sequence.
Defect point_qc_defect(const PointSequence& seq, Window w);

/// z(k,l) = f(p(k,l)).
DoubleSequence image(const FunctionSpec& f, const PointSequence& seq);

enum class ProbeVerdict { NoViolationFound, Violated };
std::string_view to_string(ProbeVerdict v);

enum class ApproachStrategy { Radial, Diagonal, Random };

struct SeqContConfig {
    double epsilon = 1e-3;
    /// Image defects are measured on (N, N + width] for each N; the verdict
    /// is taken on the deepest window.
    std::vector<std::int64_t> depths{16, 256, 4096, 65536};
    std::int64_t width = 32;
    std::uint64_t seed = 20240601;
};

/// One probe sequence converging to L and what f made of it.
struct Approach {
    std::string strategy;
    PointSequence sequence;
    /// Source p-limit threshold N(eps) from the analytic modulus.
    std::int64_t modulus_n = 0;
    std::vector<WindowSample> source_defects;
    std::vector<WindowSample> image_defects;
    bool violated = false;
};

enum class PairKind { Joint, XOnly, YOnly };
std::string_view to_string(PairKind k);

/// (a,b) and (abar,bbar) at distance < delta with image gap |f(p) - f(q)|.
struct PairWitness {
    PairKind kind = PairKind::Joint;
    Point2 p;
    Point2 q;
    double distance = 0.0;
    double gap = 0.0;
};

struct DeltaSearch {
    double delta = 0.0;
    double pitch = 0.0;
    std::int64_t evaluations = 0;
    std::optional<PairWitness> joint;
    std::optional<PairWitness> x_only;
    std::optional<PairWitness> y_only;
    bool violated = false;
};

/// Source and image quasi-Cauchy defects over the same window.
struct WindowComparison {
    Window window;
    Defect source;
    Defect image;
};

/// The sequence assembled from the found pairs and what f does to it.
struct UcBundle {
    std::vector<PairWitness> pairs;
    PointSequence witness;
    DoubleSequence image;
    std::shared_ptr<const BandLayout> layout;
    /// anchors[i-1] holds pair i: p at the anchor, q one column to the right.
    std::vector<IndexPair> anchors;
    /// For K = 1..n: window from block K through block n.
    std::vector<WindowComparison> blocks;
};

enum class ProbeMode { SeqCont, QcPreservation, UcFalsify, CauchyImage };
std::string_view to_string(ProbeMode m);

struct ProbeReport {
    ProbeMode mode = ProbeMode::SeqCont;
    ProbeVerdict verdict = ProbeVerdict::NoViolationFound;
    std::string function;
    double epsilon = 0.0;
    std::int64_t evaluations = 0;

    std::optional<Point2> target;            // seqcont
    std::vector<Approach> approaches;        // seqcont
    std::optional<PointSequence> source;     // qcpres, cauchyimage
    std::vector<WindowComparison> windows;   // qcpres, cauchyimage
    std::optional<std::int64_t> modulus_n;   // cauchyimage
    std::vector<DeltaSearch> searches;       // ucfalsify
    std::optional<UcBundle> bundle;          // ucfalsify, when violated
};

ProbeReport seq_continuity_probe(const FunctionSpec& f, Point2 limit, const std::vector<ApproachStrategy>& strategies,
                                 const SeqContConfig& cfg = {});

/// Violated when the image defect on w reaches eps while the source defect
/// stays below source_eps (defaults to eps).
ProbeReport qc_preservation_check(const FunctionSpec& f, const PointSequence& seq, Window w, double eps,
                                  std::optional<double> source_eps = std::nullopt);

struct UcConfig {
    /// Function evaluations allowed per delta.
    std::int64_t budget = 1'000'000;
    std::size_t refine_candidates = 8;
    int refine_rounds = 24;
    bool build_witness = true;
};

/// Grid search plus local refinement for pairs closer than delta whose images
/// differ by at least eps, for each delta of the strictly decreasing schedule.
/// Violated only when every delta yields a pair; the pairs are then embedded
/// into a quasi-Cauchy plane sequence whose image is measured block by block.
ProbeReport uc_falsify(const FunctionSpec& f, double eps, const std::vector<double>& deltas, const UcConfig& cfg = {});

/// Image quasi-Cauchy defect beyond the Cauchy threshold N(eps) of `seq`;
/// w is clipped to start past N. Throws ModulusMismatch when seq has no
/// Cauchy-capable modulus.
ProbeReport cauchy_image_check(const FunctionSpec& f, const PointSequence& seq, Window w, double eps);

struct Reverification {
    bool ok = true;
    std::string failure;
};

/// Recomputes every stored gap, distance and defect witness from scratch and
/// compares bit for bit.
Reverification reverify(const ProbeReport& report, const FunctionSpec& f);

} // namespace dseq

#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dseq/core.hpp"
#include "dseq/interval.hpp"

namespace dseq {

/// Four values that the witness places on a 2x2 block of adjacent cells:
///   a b
///   d c
struct Quad {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    /// Largest neighbour step inside the placed 2x2 block and to the
    /// surrounding a-valued cells: max(|a-b|, |a-c|, |a-d|, |b-c|, |d-c|).
    double spread() const;
    /// max(|a-b|, |a-c|, |a-d|).
    double gap() const;
};

/// Doubly indexed quadruples (a,b,c,d)_{i,j} in I with vanishing gaps.
///
/// `gap_modulus(eps)` returns an i0 such that every quad with both indices
/// >= i0 has spread below eps; nullopt when no such i0 is known for eps.
struct PairFamily {
    std::function<Quad(std::int64_t, std::int64_t)> quad;
    Interval interval;
    std::function<std::optional<std::int64_t>(double)> gap_modulus;
    std::string descriptor;

    /// max(|a-b|, |a-c|, |a-d|) on the diagonal quad (i,i).
    double gap(std::int64_t i) const { return quad(i, i).gap(); }

    /// Rows "i,j,a,b,c,d" after that header line, covering a full rectangle
    /// 1..n x 1..m; quads past the rectangle repeat the last row/column.
    /// `gap_bound` is an expression in i bounding the spread of quads with
    /// both indices >= i; i0(eps) is the first i (up to 2^20) where it
    /// drops below eps.
    static PairFamily from_csv(std::istream& in, Interval interval, std::string_view gap_bound);
    static PairFamily constant(double value, Interval interval);
};

/// Row and column bands of the witness: band k spans indices
/// [start(k), start(k) + size(k)) with size(k) = ceil(scale * k^2 * |I|) + 4.
class BandLayout {
public:
    BandLayout(double interval_length, double scale);

    std::int64_t start(std::int64_t k) const;
    std::int64_t size(std::int64_t k) const;
    /// Band holding index n; throws IndexOverflow past the tabulated range.
    std::int64_t band_of(std::int64_t n) const;
    std::int64_t bands() const noexcept { return static_cast<std::int64_t>(starts_.size()) - 2; }
    double scale() const noexcept { return scale_; }

private:
    double scale_;
    std::vector<std::int64_t> starts_;
};

/// anchor(i,j) = (start(i) + 1, start(j) + 1): the cell holding a_{i,j}.
class EmbeddingMap {
public:
    explicit EmbeddingMap(std::shared_ptr<const BandLayout> layout) : layout_(std::move(layout)) {}
    IndexPair anchor(std::int64_t i, std::int64_t j) const;

private:
    std::shared_ptr<const BandLayout> layout_;
};

/// Quasi-Cauchy sequence built from a PairFamily.
///
/// Row band k and column band l bound patch (k,l). With local offsets
/// u, v from the patch origin, the 4x4 corner u,v <= 3 holds a_{k,l}, except
/// that the anchor block u,v in {1,2} holds a b / d c. Elsewhere the patch
/// interpolates bilinearly between a_{k,l}, a_{k,l+1}, a_{k+1,l}, a_{k+1,l+1}
/// with s = max(0,u-3)/(m_k-3), t = max(0,v-3)/(n_l-3). Every neighbour step
/// that does not touch an anchor block is below 2/scale * 1/min(k,l)^2.
struct WitnessSequence {
    DoubleSequence sequence;
    std::shared_ptr<const BandLayout> layout;
    /// Set when the off-diagonal spot check found a quad beyond i0(eps) whose
    /// spread reaches eps; the sequence then carries no modulus.
    std::optional<IndexPair> offdiagonal_violation;

    /// Window lower bound N such that (N, M] starts at band K.
    std::int64_t beyond_block(std::int64_t K) const { return layout->start(K) - 1; }
};

struct BuildOptions {
    /// Band scale c in size(k) = ceil(c k^2 |I|) + 4. 2 keeps scalar steps
    /// below 1/min(k,l)^2; 2*sqrt(2) does the same for the Euclidean step of
    /// two witnesses sharing a layout.
    double band_scale = 2.0;
    /// Quads checked against I, and diagonal gaps checked against the modulus.
    std::int64_t spot_check = 8;
};

struct QcWitness {
    WitnessSequence witness;
    EmbeddingMap embedding;
};

/// Throws DomainError when a spot-checked quad leaves I or a diagonal gap
/// contradicts the gap modulus (the offending (i,i) is attached).
QcWitness build_qc_witness(const PairFamily& pf, const BuildOptions& options = {});
/// Two witnesses on one layout, e.g. the coordinates of a plane sequence.
std::pair<QcWitness, QcWitness> build_qc_witness_pair(const PairFamily& x, const PairFamily& y,
                                                      const BuildOptions& options);

struct EmbeddingCheck {
    bool pass = true;
    std::optional<IndexPair> failed_cell;
    /// The other end of a failing neighbour step.
    std::optional<IndexPair> neighbor;
    std::string reason;
};

/// Checks the anchor equalities exactly and the non-anchor step bound
/// strictly for every patch (i,j), 2 <= i,j <= upto.
EmbeddingCheck verify_embedding(const WitnessSequence& ws, const EmbeddingMap& em, const PairFamily& pf,
                                std::int64_t upto);

/// z(2i-1, 2j-1) = x(i,j); z(p,q) = L when p or q is even. A p-limit modulus
/// for L carries over with N doubled.
DoubleSequence interleave_with_limit(const DoubleSequence& seq, double limit);

} // namespace dseq

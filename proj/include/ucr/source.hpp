#pragma once

#include "ucr/rng.hpp"
#include "ucr/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace ucr {

/// Joint pmf of a two-component discrete memoryless source.
/// Immutable after construction; marginals are cached.
class JointSource {
public:
    explicit JointSource(Mat pxy);

    const Mat& pmf() const { return pxy_; }
    int alphabet_x() const { return static_cast<int>(pxy_.rows()); }
    int alphabet_y() const { return static_cast<int>(pxy_.cols()); }
    const Vec& marginal_x() const { return px_; }
    const Vec& marginal_y() const { return py_; }

    double entropy_x() const;
    double entropy_x_given_y() const;
    double mutual_information() const;

    /// Uniform X, Y = X flipped with probability p.
    static JointSource dsbs(double p);

private:
    Mat pxy_;
    Vec px_, py_;
};

/// Exact joint histogram of a tuple of equal-length sequences.
struct EmpiricalType {
    VecI counts;             // flattened row-major over dims
    std::vector<int> dims;   // per-component alphabet sizes
    int n = 0;

    int flat_index(const std::vector<int>& symbol) const;
    Vec pmf() const;
};

struct TypicalityParams {
    double delta = 0.05;  // per-cell additive slack
    int n = 0;
};

/// Joint type of equal-length sequences over the given alphabets.
EmpiricalType joint_type(const std::vector<const Seq*>& seqs, const std::vector<int>& dims);

/// Strong (robust) typicality: every cell of the joint type is within delta of
/// the reference pmf and the type vanishes outside the reference support.
bool is_jointly_typical(const std::vector<const Seq*>& seqs, const std::vector<int>& dims,
                        const Vec& reference_pmf, const TypicalityParams& params);

/// n i.i.d. draws of (x, y); output depends only on (seed, trial).
std::vector<std::pair<Seq, Seq>> sample_pairs(const JointSource& src, int n, int trials,
                                              std::uint64_t seed);

/// One pair, stream-addressable for parallel callers.
std::pair<Seq, Seq> sample_pair(const JointSource& src, int n, std::uint64_t seed,
                                std::uint64_t trial);

/// Uniformly random arrangement of the multiset with exactly n*pmf(u) copies
/// of each symbol u. The requested type must be exact.
Seq sample_fixed_type(const Vec& pmf, int n, std::uint64_t seed, std::uint64_t stream = 0);

/// Nearest blocklength-n type in total variation (largest-remainder rounding,
/// ties to the lowest symbol index).
Vec round_to_type(const Vec& pmf, int n);

}  // namespace ucr

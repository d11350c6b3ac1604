#pragma once

#include "ucr/types.hpp"

#include <cmath>

namespace ucr {

inline constexpr double kLog2e = 1.4426950408889634074;

/// x * log2(x) with the 0 log 0 = 0 convention.
inline double xlog2x(double x) {
    return x > 0.0 ? x * std::log2(x) : 0.0;
}

/// Shannon entropy in bits of any Eigen expression holding a pmf.
template <typename Derived>
double entropy_bits(const Eigen::MatrixBase<Derived>& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) h -= xlog2x(p.derived()(i));
    return h;
}

inline double binary_entropy(double p) {
    return -xlog2x(p) - xlog2x(1.0 - p);
}

/// Flip-probability of two cascaded BSCs: a * (1-b) + b * (1-a).
inline double binary_convolve(double a, double b) {
    return a * (1.0 - b) + b * (1.0 - a);
}

/// I(row variable; column variable) in bits of a joint pmf matrix.
inline double mutual_information_bits(const Mat& joint) {
    require(is_pmf(joint.reshaped()), "mutual_information: not a pmf");
    const Vec pr = joint.rowwise().sum();
    const Vec pc = joint.colwise().sum();
    double mi = 0.0;
    for (Eigen::Index i = 0; i < joint.rows(); ++i)
        for (Eigen::Index j = 0; j < joint.cols(); ++j) {
            const double p = joint(i, j);
            if (p > 0.0) mi += p * std::log2(p / (pr(i) * pc(j)));
        }
    return mi;
}

/// log(exp(a) + exp(b)) for base-2 logs.
inline double log2_sum_exp(double a, double b) {
    if (std::isinf(a) && a < 0) return b;
    if (std::isinf(b) && b < 0) return a;
    const double m = std::max(a, b);
    return m + std::log2(std::exp2(a - m) + std::exp2(b - m));
}

}  // namespace ucr

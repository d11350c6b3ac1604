#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecI = Eigen::VectorXi;

/// A finite-alphabet sequence of symbol indices.
using Seq = std::vector<int>;

inline constexpr double kPmfTol = 1e-12;

[[noreturn]] inline void fail(const std::string& msg) {
    throw std::invalid_argument(msg);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

/// Checks that every entry is nonnegative and the total mass is 1 within kPmfTol.
template <typename Derived>
bool is_pmf(const Eigen::MatrixBase<Derived>& p, double tol = kPmfTol) {
    if ((p.array() < 0.0).any()) return false;
    return std::abs(p.sum() - 1.0) <= tol;
}

/// Row-stochastic within kPmfTol.
inline bool is_stochastic(const Mat& w, double tol = kPmfTol) {
    if ((w.array() < 0.0).any()) return false;
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        if (std::abs(w.row(r).sum() - 1.0) > tol) return false;
    return true;
}

/// Row-major lexicographic order, used as a deterministic tie-break.
inline bool lex_less(const Mat& a, const Mat& b) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) < b(i, j)) return true;
            if (a(i, j) > b(i, j)) return false;
        }
    return false;
}

}  // namespace ucr

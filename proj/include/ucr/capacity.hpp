#pragma once

#include "ucr/source.hpp"
#include "ucr/spectrum.hpp"
#include "ucr/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ucr {

/// Auxiliary randomization channel P_{U|X}; rows indexed by x.
struct AuxiliaryChannel {
    Mat pu_given_x;  // |X| x |U|, row-stochastic

    int card_u() const { return static_cast<int>(pu_given_x.cols()); }

    static AuxiliaryChannel identity(int card_x, int card_u);
    static AuxiliaryChannel constant(int card_x, int card_u);
};

/// P(u, x, y) = P(u|x) P(x, y); U - X - Y Markov by construction.
/// Stored as one |X| x |Y| slice per value of u.
std::vector<Mat> induced_joint(const AuxiliaryChannel& aux, const JointSource& src);

/// (I(U;X), I(U;X) - I(U;Y)) for the induced joint.
std::pair<double, double> aux_objective(const Mat& pu_given_x, const JointSource& src);

/// I(U;Y|X) of the induced joint; zero up to rounding for any aux.
double aux_conditional_leak(const AuxiliaryChannel& aux, const JointSource& src);

struct BoundResult {
    double value_bits = 0.0;
    Mat argmax;            // P_{U|X}
    double budget_used = 0.0;  // I(U;X) - I(U;Y) at the argmax
    std::string method;
};

struct CrOptions {
    int card_u = 3;
    double grid_step = 0.05;
    std::uint64_t seed = 1;
    int restarts = 20;
    int penalty_rounds = 5;
    double penalty_init = 10.0;
    int iters_per_round = 150;
};

/// max I(U;X) over P_{U|X} subject to I(U;X) - I(U;Y) <= budget.
/// method "grid": exhaustive simplex-lattice search (the oracle);
/// method "ascent": multi-restart penalized projected gradient, repaired to
/// feasibility.
BoundResult cr_bound(const JointSource& src, double budget, const CrOptions& opt,
                     const std::string& method);

/// One lattice sweep evaluated against several budgets at once.
std::vector<BoundResult> cr_bound_grid_multi(const JointSource& src,
                                             const std::vector<double>& budgets,
                                             const CrOptions& opt);

/// Capacity-achieving input of a memoryless kernel (Blahut-Arimoto).
Vec blahut_arimoto_input(const Mat& kernel, int max_iters = 2000, double tol = 1e-12);

struct UcrBounds {
    double lower_bits = 0.0;
    double upper_bits = 0.0;
    Thresholds thresholds;  // max over the candidate input set
    BoundResult lower_result;
    BoundResult upper_result;
};

struct SpectrumConfig {
    std::vector<int> blocklengths;
    int trials = 1000;
    std::uint64_t seed = 1;
    double band = 0.03;
};

/// Theorem-2-style composition: spectrum thresholds of the channel feed the
/// budgets of the auxiliary-variable program. The sup over input processes is
/// approximated by the declared candidate set.
UcrBounds epsilon_ucr_bounds(const JointSource& src, const std::vector<InputProcess>& candidates,
                             const ChannelFamily& channel, double eps, const SpectrumConfig& scfg,
                             const CrOptions& opt, const std::string& method = "ascent");

}  // namespace ucr

#pragma once

#include "ucr/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ucr {

/// Derived constants of the change-of-measure converse and the admissible
/// beta sets.
struct ConverseConstants {
    double eps = 0.0, beta = 0.0, c = 0.0, mu = 0.0;
    double lambda = 0.0;  // beta + 2 beta c + beta^2
    double gamma = 0.0;   // 2 sqrt( sqrt(lambda) / (1 - sqrt(eps)) )
    double kappa = 0.0;   // eps + 1 - (1 - 4 lambda / gamma^2)^2
    bool in_b1 = false;   // 0 < beta < 1 and eps < kappa + beta < 1
    bool in_b2 = false;   // 0 < lambda < 1
    bool in_b = false;
};

ConverseConstants constants(double eps, double beta, double c, double mu = 0.0);

/// Explicit pmf over a small product space, flattened with the last variable
/// fastest; n is the nominal blocklength used for rate normalization.
struct DiscreteJoint {
    std::vector<int> card;
    Vec pmf;
    int n = 1;

    long atoms() const { return pmf.size(); }
    std::vector<int> decode(long flat) const;
};

struct CheckResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// Exact var[(1/n) log2(1/P_K)] against lambda(beta). Throws when the
/// cardinality or uniformity hypotheses fail.
CheckResult variance_bound_check(const Vec& p_k, int n, double c, double beta);

/// Smallest n on the grid for which the variance bound holds, or -1.
int smallest_passing_n(const Vec& p_k, double c, double beta, const std::vector<int>& n_grid);

/// Mass of the Chebyshev set L against 1 - 4 lambda / gamma^2.
CheckResult set_L_mass(const Vec& p_k, int n, const ConverseConstants& k);

struct SetDResult {
    double mass = 0.0;
    double bound_asymptotic = 0.0;  // (1 - 4 lambda/gamma^2)^2
    double bound_finite_n = 0.0;    // (1 - 2^{-n gamma/2})(1 - 4 lambda/gamma^2)
    bool pass = false;              // against the finite-n bound
};

/// Mass of the Markov set D for a joint P_{K,Y} (rows: k, cols: y).
SetDResult set_D_mass(const Mat& p_ky, int n, const ConverseConstants& k);

double event_mass(const DiscreteJoint& base, const std::vector<char>& in_s);

/// P restricted to S and renormalized; throws when P[S] = 0.
DiscreteJoint change_of_measure(const DiscreteJoint& base, const std::vector<char>& in_s);

/// D(tilted || base) in bits; both must share the layout.
double relative_entropy_bits(const DiscreteJoint& tilted, const DiscreteJoint& base);

/// Variables (x, y, z); K = phi[x]. Verifies
/// H(K|Y) <= n gamma + log2(1/beta) + H(K~|Y~) after gating S inside S3 and
/// P[S] >= beta.
CheckResult lemma3_check(const DiscreteJoint& joint_xyz, const std::vector<int>& phi,
                         const std::vector<char>& in_s, const ConverseConstants& k);

/// Variables (x, y, z); K = phi[x], T = lambda[x], channel `kernel` (t -> z).
/// Verifies (1/n) I(K~; Z~ | Y~) <= cap + mu + (1/n) log2(1/beta) after the
/// factorization, S1-inclusion and mass gates.
CheckResult lemma4_check(const DiscreteJoint& joint_xyz, const std::vector<int>& phi,
                         const std::vector<int>& lambda, const Mat& kernel,
                         const std::vector<char>& in_s, double density_cap,
                         const ConverseConstants& k);

struct TelescopeResult {
    double lhs = 0.0;       // I(S;X^n|R) - I(S;Y^n|R)
    double sum_form = 0.0;  // telescoped per-coordinate sum
    double j_form = 0.0;    // n [ I(S;X_J|V) - I(S;Y_J|V) ]
};

/// Variables (S, R, X_1..X_n, Y_1..Y_n).
TelescopeResult telescoping_identity(const DiscreteJoint& joint, int n);

struct SingleLetterResult {
    double h_k = 0.0;
    double n_i_ux = 0.0;        // n I(U; X_J)
    double h_k_given_y = 0.0;   // H(K | Y^n)
    double n_i_gap = 0.0;       // n [ I(U;X_J) - I(U;Y_J) ]
    bool pass = false;
};

/// Variables (K, X_1..X_n, Y_1..Y_n) with K deterministic given X^n.
SingleLetterResult single_letterize(const DiscreteJoint& joint, int n);

/// Seeded generator-driven run of every lemma check on gated fixtures;
/// theorem checks must come back with zero failures.
struct SuiteReport {
    struct Entry {
        std::string name;
        int fixtures = 0;
        int failures = 0;
        double max_identity_error = 0.0;
    };
    std::vector<Entry> entries;
    bool ok = true;
};

SuiteReport run_verification_suite(std::uint64_t seed, int fixtures_per_lemma = 100);

}  // namespace ucr

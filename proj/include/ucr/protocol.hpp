#pragma once

#include "ucr/capacity.hpp"
#include "ucr/source.hpp"
#include "ucr/spectrum.hpp"
#include "ucr/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ucr {

/// N1 x N2 array of fixed-type words plus the fallback word u0.
struct Codebook {
    std::vector<Seq> words;  // row-major (i, j), each of exact type p_u
    Seq u0;
    int n1 = 0, n2 = 0;
    int n = 0;
    Vec p_u;       // the exact blocklength-n type all words share
    double mu = 0.0;

    const Seq& word(int i, int j) const {  // 1-based (i, j)
        return words[static_cast<std::size_t>(i - 1) * n2 + (j - 1)];
    }
    /// |K| = N1 N2 + 1.
    long key_space() const { return static_cast<long>(n1) * n2 + 1; }
};

struct ProtocolConfig {
    JointSource src;
    AuxiliaryChannel aux;
    ChannelFamily channel;
    int n = 100;
    double mu = 0.02;
    double delta = 0.05;  // typicality slack
    int trials = 1000;
    std::uint64_t seed = 1;
    // Explicit small sizes; unset means the reference auto-size formula.
    std::optional<int> n1;
    std::optional<int> n2;
    long size_cap = 1 << 16;
    // Transmission sub-config.
    Vec code_input_pmf;        // empty = uniform over the channel input alphabet
    double channel_budget = 1.0;  // declared rate budget for the rate check (bits)
    // Definition-2 targets.
    double eps_target = 0.05;
    double beta_target = 0.1;
    double delta_target = 0.1;
    double c_target = 2.0;
    double h_target = 0.0;
};

/// Reference sizing N1 = floor(2^{n[I(U;X)-I(U;Y)+3mu]}), N2 = floor(2^{n[I(U;Y)-2mu]}).
std::pair<long, long> auto_size(const JointSource& src, const AuxiliaryChannel& aux, int n,
                                double mu);

Codebook build_codebook(const ProtocolConfig& cfg);

/// Joint (u, x) reference pmf P(u|x) P_X(x), flattened over dims {|U|, |X|}.
Vec ux_reference(const JointSource& src, const AuxiliaryChannel& aux);
/// Joint (u, y) reference pmf, flattened over dims {|U|, |Y|}.
Vec uy_reference(const JointSource& src, const AuxiliaryChannel& aux);

struct EncodeResult {
    Seq word;   // chosen word or u0
    int bin = 0;    // row index i, or N1+1 for u0
    bool fallback = false;
};

/// First (lexicographic (i, j)) word jointly UX-typical with x^n, else u0.
EncodeResult encode_phi(const Seq& xn, const Codebook& cb, const Vec& ux_ref, int card_x,
                        double delta);

int bin_index(const Seq& xn, const Codebook& cb, const Vec& ux_ref, int card_x, double delta);

/// One channel use carrying bin index i in {1..N1+1}; returns the decoded index.
int transmit_index(int i, const TransmissionCode& code, const ChannelFamily& channel,
                   std::uint64_t seed, std::uint64_t stream, bool* rate_warning = nullptr,
                   double channel_budget = 1.0);

/// The unique word in row i_tilde jointly UY-typical with y^n; u0 on none or
/// several, and row N1+1 decodes straight to u0.
Seq decode_psi(const Seq& yn, int i_tilde, const Codebook& cb, const Vec& uy_ref, int card_y,
               double delta);

struct ProtocolResult {
    double p_disagree = 0.0;
    double p_disagree_half_width = 0.0;
    double entropy_rate = 0.0;       // Miller-Madow corrected H(K)/n
    double cardinality_rate = 0.0;   // log|K| / n
    double uniformity_gap = 0.0;     // |entropy_rate - cardinality_rate|
    long key_space = 0;
    // Counted per-trial event rates backing the error decomposition.
    double p_typicality_fail = 0.0;
    double p_row_collision = 0.0;
    double p_channel_error = 0.0;
    bool cond1_error = false;       // P[K != L] <= eps
    bool cond2_cardinality = false; // log|K|/n <= c
    bool cond3_uniformity = false;  // gap <= beta
    bool cond4_rate = false;        // entropy rate > H - delta
    bool estimator_warning = false; // trials < 30 |K|
    bool rate_warning = false;      // log(N1+1)/n exceeded the declared budget
};

struct TrialEvent {
    int trial = 0;
    int bin_sent = 0;
    int bin_decoded = 0;
    long k_index = 0;  // 0..N1*N2-1 for words, N1*N2 for u0
    long l_index = 0;
    bool typicality_fail = false;
    bool row_collision = false;
    bool channel_error = false;
};

ProtocolResult run_protocol(const ProtocolConfig& cfg, std::vector<TrialEvent>* log = nullptr);

}  // namespace ucr

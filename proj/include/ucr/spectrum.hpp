#pragma once

#include "ucr/rng.hpp"
#include "ucr/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace ucr {

/// A sequence of per-blocklength channel kernels W_n.
class ChannelFamily {
public:
    struct Memoryless {
        Mat kernel;  // |T| x |Z|, row-stochastic
    };
    struct Mixed {
        double weight = 0.5;  // mass on kernel_a
        Mat kernel_a;
        Mat kernel_b;
    };
    /// Per-blocklength single-letter kernels applied memorylessly at that n.
    struct CustomPerN {
        std::map<int, Mat> kernels;
    };

    explicit ChannelFamily(Memoryless m);
    explicit ChannelFamily(Mixed m);
    explicit ChannelFamily(CustomPerN c);

    static ChannelFamily bsc(double p);
    static ChannelFamily noiseless(int alphabet);
    static ChannelFamily mixed_bsc(double weight, double pa, double pb);

    int input_alphabet() const { return input_; }
    int output_alphabet() const { return output_; }
    bool is_mixed() const { return std::holds_alternative<Mixed>(variant_); }
    const std::variant<Memoryless, Mixed, CustomPerN>& variant() const { return variant_; }

    /// Single-letter kernel in force at blocklength n (mixture component picked
    /// by `component` for Mixed channels).
    const Mat& kernel_at(int n, int component = 0) const;
    double mixture_weight() const;

    /// One block transmission; deterministic in (seed, stream).
    Seq transmit(const Seq& input, std::uint64_t seed, std::uint64_t stream) const;

    /// log2 W_n(z^n | t^n).
    double log2_block_prob(const Seq& input, const Seq& output) const;

private:
    std::variant<Memoryless, Mixed, CustomPerN> variant_;
    int input_ = 0, output_ = 0;
};

/// Channel input process T = {T^n}.
class InputProcess {
public:
    struct IID {
        Vec pmf;
    };
    /// Per-blocklength single-letter pmf applied i.i.d. at that n.
    struct PerN {
        std::map<int, Vec> pmfs;
    };

    explicit InputProcess(IID iid);
    explicit InputProcess(PerN per_n);
    static InputProcess uniform(int alphabet);

    const Vec& pmf_at(int n) const;
    Seq sample(int n, std::uint64_t seed, std::uint64_t stream) const;
    /// log2 P_{T^n}(t^n).
    double log2_block_prob(const Seq& input, int n) const;

private:
    std::variant<IID, PerN> variant_;
};

/// Empirical spectrum of the normalized information density per blocklength.
struct SpectrumEstimate {
    std::vector<int> blocklengths;          // ascending
    std::vector<std::vector<double>> samples;  // sorted, one list per blocklength
    int trials = 0;
    /// +inf densities are remapped to 1 + the max finite sample of their list.
    double overflow_sentinel(std::size_t which) const;
};

/// (1/n) i(t^n; z^n) in bits per symbol; +inf when the output is impossible
/// under the channel given the input.
double information_density(const Seq& input, const Seq& output, const InputProcess& process,
                           const ChannelFamily& channel);

SpectrumEstimate estimate_spectrum(const InputProcess& process, const ChannelFamily& channel,
                                   const std::vector<int>& blocklengths, int trials,
                                   std::uint64_t seed);

struct Thresholds {
    double l_hat = 0.0;  // sup{R : F(R) < eps}
    double u_hat = 0.0;  // sup{R : F(R) <= eps}
    /// Conservative limsup stand-in: max of the per-n values over the top two
    /// configured blocklengths.
    double l_hat_top2 = 0.0;
    double u_hat_top2 = 0.0;
};

/// Quantile inversion of the largest-n empirical CDF. `band` widens the
/// epsilon probe to [eps - band, eps + band] so that a plateau of the CDF at
/// eps (a discontinuity point of the thresholds) is resolved to the flanking
/// atoms instead of a coin flip on sampling noise.
Thresholds thresholds_from_spectrum(const SpectrumEstimate& est, double eps, double band = 0.0);

/// Deterministic codeword/decoding-region family with exhaustive ML decoding.
struct TransmissionCode {
    std::vector<Seq> codewords;  // message ell -> codeword, 1-based externally
    int n = 0;

    int size() const { return static_cast<int>(codewords.size()); }
    /// Returns the decoded message in {1, ..., size()} (argmax likelihood,
    /// ties to the lowest index).
    int decode(const Seq& output, const ChannelFamily& channel) const;
};

inline constexpr int kMaxMlMessages = 4096;

TransmissionCode build_random_code(const ChannelFamily& channel, int n, int num_messages,
                                   const Vec& input_pmf, std::uint64_t seed);

struct CodeErrorEstimate {
    double max_error = 0.0;
    double half_width = 0.0;     // normal-approx CI on the worst message
    double avg_error = 0.0;
    std::vector<double> per_message;
};

CodeErrorEstimate measure_code_error(const TransmissionCode& code, const ChannelFamily& channel,
                                     int trials_per_message, std::uint64_t seed);

}  // namespace ucr

#include "ucr/spectrum.hpp"

#include "ucr/info.hpp"
#include "ucr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ucr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_kernel(const Mat& k, const char* what) {
    require(k.rows() >= 1 && k.cols() >= 1, std::string(what) + ": empty kernel");
    require(is_stochastic(k), std::string(what) + ": rows must sum to 1");
}

Seq sample_product(const Mat& kernel, const Seq& input, CounterRng& rng) {
    Seq out(input.size());
    for (std::size_t i = 0; i < input.size(); ++i)
        out[i] = rng.next_categorical(kernel.row(input[i]).transpose());
    return out;
}

double log2_product(const Mat& kernel, const Seq& input, const Seq& output) {
    double acc = 0.0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double w = kernel(input[i], output[i]);
        if (w <= 0.0) return -kInf;
        acc += std::log2(w);
    }
    return acc;
}

double log2_iid(const Vec& pmf, const Seq& seq) {
    double acc = 0.0;
    for (int s : seq) {
        if (pmf(s) <= 0.0) return -kInf;
        acc += std::log2(pmf(s));
    }
    return acc;
}

}  // namespace

ChannelFamily::ChannelFamily(Memoryless m) : variant_(std::move(m)) {
    const auto& k = std::get<Memoryless>(variant_).kernel;
    check_kernel(k, "ChannelFamily");
    input_ = static_cast<int>(k.rows());
    output_ = static_cast<int>(k.cols());
}

ChannelFamily::ChannelFamily(Mixed m) : variant_(std::move(m)) {
    const auto& mx = std::get<Mixed>(variant_);
    check_kernel(mx.kernel_a, "ChannelFamily(mixed a)");
    check_kernel(mx.kernel_b, "ChannelFamily(mixed b)");
    require(mx.kernel_a.rows() == mx.kernel_b.rows() && mx.kernel_a.cols() == mx.kernel_b.cols(),
            "ChannelFamily: mixture components must share alphabets");
    require(mx.weight > 0.0 && mx.weight < 1.0, "ChannelFamily: mixture weight must be in (0,1)");
    input_ = static_cast<int>(mx.kernel_a.rows());
    output_ = static_cast<int>(mx.kernel_a.cols());
}

ChannelFamily::ChannelFamily(CustomPerN c) : variant_(std::move(c)) {
    const auto& tbl = std::get<CustomPerN>(variant_).kernels;
    require(!tbl.empty(), "ChannelFamily: empty per-n table");
    for (const auto& [n, k] : tbl) {
        require(n >= 1, "ChannelFamily: blocklength must be >= 1");
        check_kernel(k, "ChannelFamily(per-n)");
        require(k.rows() == tbl.begin()->second.rows() && k.cols() == tbl.begin()->second.cols(),
                "ChannelFamily: per-n kernels must share alphabets");
    }
    input_ = static_cast<int>(tbl.begin()->second.rows());
    output_ = static_cast<int>(tbl.begin()->second.cols());
}

ChannelFamily ChannelFamily::bsc(double p) {
    require(p >= 0.0 && p <= 1.0, "bsc: crossover out of range");
    Mat k(2, 2);
    k << 1.0 - p, p, p, 1.0 - p;
    return ChannelFamily(Memoryless{std::move(k)});
}

ChannelFamily ChannelFamily::noiseless(int alphabet) {
    return ChannelFamily(Memoryless{Mat::Identity(alphabet, alphabet)});
}

ChannelFamily ChannelFamily::mixed_bsc(double weight, double pa, double pb) {
    Mat a(2, 2), b(2, 2);
    a << 1.0 - pa, pa, pa, 1.0 - pa;
    b << 1.0 - pb, pb, pb, 1.0 - pb;
    return ChannelFamily(Mixed{weight, std::move(a), std::move(b)});
}

const Mat& ChannelFamily::kernel_at(int n, int component) const {
    if (const auto* m = std::get_if<Memoryless>(&variant_)) return m->kernel;
    if (const auto* mx = std::get_if<Mixed>(&variant_))
        return component == 0 ? mx->kernel_a : mx->kernel_b;
    const auto& tbl = std::get<CustomPerN>(variant_).kernels;
    const auto it = tbl.find(n);
    require(it != tbl.end(), "ChannelFamily: no kernel configured for this blocklength");
    return it->second;
}

double ChannelFamily::mixture_weight() const {
    const auto* mx = std::get_if<Mixed>(&variant_);
    return mx ? mx->weight : 1.0;
}

Seq ChannelFamily::transmit(const Seq& input, std::uint64_t seed, std::uint64_t stream) const {
    CounterRng rng(seed, stream);
    if (const auto* mx = std::get_if<Mixed>(&variant_)) {
        const int comp = rng.next_double() < mx->weight ? 0 : 1;
        return sample_product(comp == 0 ? mx->kernel_a : mx->kernel_b, input, rng);
    }
    return sample_product(kernel_at(static_cast<int>(input.size())), input, rng);
}

double ChannelFamily::log2_block_prob(const Seq& input, const Seq& output) const {
    require(input.size() == output.size(), "channel: length mismatch");
    if (const auto* mx = std::get_if<Mixed>(&variant_)) {
        const double la = std::log2(mx->weight) + log2_product(mx->kernel_a, input, output);
        const double lb = std::log2(1.0 - mx->weight) + log2_product(mx->kernel_b, input, output);
        return log2_sum_exp(la, lb);
    }
    return log2_product(kernel_at(static_cast<int>(input.size())), input, output);
}

InputProcess::InputProcess(IID iid) : variant_(std::move(iid)) {
    require(is_pmf(std::get<IID>(variant_).pmf), "InputProcess: not a pmf");
}

InputProcess::InputProcess(PerN per_n) : variant_(std::move(per_n)) {
    const auto& tbl = std::get<PerN>(variant_).pmfs;
    require(!tbl.empty(), "InputProcess: empty per-n table");
    for (const auto& [n, p] : tbl) require(is_pmf(p), "InputProcess: not a pmf");
}

InputProcess InputProcess::uniform(int alphabet) {
    return InputProcess(IID{Vec::Constant(alphabet, 1.0 / alphabet)});
}

const Vec& InputProcess::pmf_at(int n) const {
    if (const auto* iid = std::get_if<IID>(&variant_)) return iid->pmf;
    const auto& tbl = std::get<PerN>(variant_).pmfs;
    const auto it = tbl.find(n);
    require(it != tbl.end(), "InputProcess: no pmf configured for this blocklength");
    return it->second;
}

Seq InputProcess::sample(int n, std::uint64_t seed, std::uint64_t stream) const {
    const Vec& pmf = pmf_at(n);
    CounterRng rng(seed, stream);
    Seq out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = rng.next_categorical(pmf);
    return out;
}

double InputProcess::log2_block_prob(const Seq& input, int n) const {
    return log2_iid(pmf_at(n), input);
}

double information_density(const Seq& input, const Seq& output, const InputProcess& process,
                           const ChannelFamily& channel) {
    const int n = static_cast<int>(input.size());
    require(n >= 1 && output.size() == input.size(), "information_density: bad block");
    const Vec& pt = process.pmf_at(n);
    for (int t : input)
        require(pt(t) > 0.0, "information_density: zero-probability input sequence");

    double log_cond;        // log2 P_{Z^n | T^n}(z | t)
    double log_out;         // log2 P_{Z^n}(z)
    if (channel.is_mixed()) {
        const auto& mx = std::get<ChannelFamily::Mixed>(channel.variant());
        const double lw = std::log2(mx.weight);
        const double lw1 = std::log2(1.0 - mx.weight);
        log_cond = log2_sum_exp(lw + log2_product(mx.kernel_a, input, output),
                                lw1 + log2_product(mx.kernel_b, input, output));
        const Vec pza = mx.kernel_a.transpose() * pt;
        const Vec pzb = mx.kernel_b.transpose() * pt;
        log_out = log2_sum_exp(lw + log2_iid(pza, output), lw1 + log2_iid(pzb, output));
    } else {
        const Mat& k = channel.kernel_at(n);
        log_cond = log2_product(k, input, output);
        const Vec pz = k.transpose() * pt;
        log_out = log2_iid(pz, output);
    }
    if (std::isinf(log_cond)) return kInf;  // impossible output given input
    return (log_cond - log_out) / n;
}

double SpectrumEstimate::overflow_sentinel(std::size_t which) const {
    const auto& v = samples.at(which);
    double max_finite = 0.0;
    for (double x : v)
        if (std::isfinite(x)) max_finite = std::max(max_finite, x);
    return 1.0 + max_finite;
}

SpectrumEstimate estimate_spectrum(const InputProcess& process, const ChannelFamily& channel,
                                   const std::vector<int>& blocklengths, int trials,
                                   std::uint64_t seed) {
    require(trials >= 100, "estimate_spectrum: need at least 100 trials");
    require(!blocklengths.empty(), "estimate_spectrum: no blocklengths");

    SpectrumEstimate est;
    est.blocklengths = blocklengths;
    std::sort(est.blocklengths.begin(), est.blocklengths.end());
    est.trials = trials;
    est.samples.resize(est.blocklengths.size());

    for (std::size_t bi = 0; bi < est.blocklengths.size(); ++bi) {
        const int n = est.blocklengths[bi];
        std::vector<double>& vals = est.samples[bi];
        vals.assign(static_cast<std::size_t>(trials), 0.0);
        const std::uint64_t base = static_cast<std::uint64_t>(bi) * (2ull * trials);
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
            const std::uint64_t stream = base + 2 * t;
            const Seq tn = process.sample(n, seed, stream);
            const Seq zn = channel.transmit(tn, seed, stream + 1);
            vals[t] = information_density(tn, zn, process, channel);
        });
        // Overflow sentinel: above every finite sample, so it affects no CDF
        // query below it.
        double max_finite = 0.0;
        bool any_inf = false;
        for (double v : vals) {
            if (std::isfinite(v)) max_finite = std::max(max_finite, v);
            else any_inf = true;
        }
        if (any_inf)
            for (double& v : vals)
                if (!std::isfinite(v)) v = 1.0 + max_finite;
        std::sort(vals.begin(), vals.end());
    }
    return est;
}

namespace {

// sup{R : F(R) < eps} and sup{R : F(R) <= eps} of an empirical CDF.
std::pair<double, double> invert_cdf(const std::vector<double>& sorted, double eps_lo,
                                     double eps_hi) {
    const auto m = static_cast<std::ptrdiff_t>(sorted.size());
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::ceil(eps_lo * m)) - 1;
    k = std::clamp<std::ptrdiff_t>(k, 0, m - 1);
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(std::floor(eps_hi * m));
    j = std::clamp<std::ptrdiff_t>(j, 0, m - 1);
    return {sorted[static_cast<std::size_t>(k)], sorted[static_cast<std::size_t>(j)]};
}

}  // namespace

Thresholds thresholds_from_spectrum(const SpectrumEstimate& est, double eps, double band) {
    require(eps > 0.0 && eps < 1.0, "thresholds: epsilon must be in (0,1)");
    require(band >= 0.0 && band < 1.0, "thresholds: bad band");
    require(!est.samples.empty(), "thresholds: empty estimate");

    const double lo = std::max(eps - band, 1e-12);
    const double hi = std::min(eps + band, 1.0 - 1e-12);

    Thresholds th;
    const auto& top = est.samples.back();
    std::tie(th.l_hat, th.u_hat) = invert_cdf(top, lo, hi);
    th.l_hat_top2 = th.l_hat;
    th.u_hat_top2 = th.u_hat;
    if (est.samples.size() >= 2) {
        const auto [l2, u2] = invert_cdf(est.samples[est.samples.size() - 2], lo, hi);
        th.l_hat_top2 = std::max(th.l_hat_top2, l2);
        th.u_hat_top2 = std::max(th.u_hat_top2, u2);
    }
    return th;
}

int TransmissionCode::decode(const Seq& output, const ChannelFamily& channel) const {
    int best = 1;
    double best_ll = -kInf;
    for (int ell = 0; ell < size(); ++ell) {
        const double ll = channel.log2_block_prob(codewords[static_cast<std::size_t>(ell)], output);
        if (ll > best_ll) {
            best_ll = ll;
            best = ell + 1;
        }
    }
    return best;
}

TransmissionCode build_random_code(const ChannelFamily& channel, int n, int num_messages,
                                   const Vec& input_pmf, std::uint64_t seed) {
    require(num_messages >= 1, "build_random_code: need at least one message");
    require(num_messages <= kMaxMlMessages, "build_random_code: message budget exceeded");
    require(is_pmf(input_pmf), "build_random_code: input pmf malformed");
    require(input_pmf.size() == channel.input_alphabet(),
            "build_random_code: pmf/alphabet mismatch");

    TransmissionCode code;
    code.n = n;
    code.codewords.reserve(static_cast<std::size_t>(num_messages));
    for (int ell = 0; ell < num_messages; ++ell) {
        CounterRng rng(seed, static_cast<std::uint64_t>(ell));
        Seq w(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = rng.next_categorical(input_pmf);
        code.codewords.push_back(std::move(w));
    }
    return code;
}

CodeErrorEstimate measure_code_error(const TransmissionCode& code, const ChannelFamily& channel,
                                     int trials_per_message, std::uint64_t seed) {
    require(trials_per_message >= 1, "measure_code_error: need trials");
    const int m = code.size();
    CodeErrorEstimate out;
    out.per_message.assign(static_cast<std::size_t>(m), 0.0);

    parallel_for(static_cast<std::size_t>(m), [&](std::size_t ell) {
        int errors = 0;
        for (int t = 0; t < trials_per_message; ++t) {
            const std::uint64_t stream = ell * static_cast<std::uint64_t>(trials_per_message) + t;
            const Seq z = channel.transmit(code.codewords[ell], seed, stream);
            if (code.decode(z, channel) != static_cast<int>(ell) + 1) ++errors;
        }
        out.per_message[ell] = static_cast<double>(errors) / trials_per_message;
    });

    for (double e : out.per_message) {
        out.max_error = std::max(out.max_error, e);
        out.avg_error += e / m;
    }
    out.half_width =
        1.96 * std::sqrt(out.max_error * (1.0 - out.max_error) / trials_per_message);
    return out;
}

}  // namespace ucr

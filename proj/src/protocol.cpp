#include "ucr/protocol.hpp"

#include "ucr/info.hpp"
#include "ucr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ucr {

namespace {

// Stream-id layout per trial; codebook streams live below kTrialStreamBase.
constexpr std::uint64_t kTrialStreamBase = 1ull << 20;
constexpr std::uint64_t kStreamsPerTrial = 4;

Vec u_marginal(const JointSource& src, const AuxiliaryChannel& aux) {
    return aux.pu_given_x.transpose() * src.marginal_x();
}

}  // namespace

std::pair<long, long> auto_size(const JointSource& src, const AuxiliaryChannel& aux, int n,
                                double mu) {
    require(mu > 0.0, "auto_size: mu must be positive");
    const auto [iux, gap] = aux_objective(aux.pu_given_x, src);
    const double iuy = iux - gap;
    const auto floor_exp2 = [](double e) -> long {
        if (e >= 62.0) return std::numeric_limits<long>::max();
        return static_cast<long>(std::floor(std::exp2(e)));
    };
    return {floor_exp2(n * (gap + 3.0 * mu)), floor_exp2(n * (iuy - 2.0 * mu))};
}

Vec ux_reference(const JointSource& src, const AuxiliaryChannel& aux) {
    const int cu = aux.card_u();
    const int cx = src.alphabet_x();
    Vec ref(cu * cx);
    for (int u = 0; u < cu; ++u)
        for (int x = 0; x < cx; ++x)
            ref(u * cx + x) = aux.pu_given_x(x, u) * src.marginal_x()(x);
    return ref;
}

Vec uy_reference(const JointSource& src, const AuxiliaryChannel& aux) {
    const int cu = aux.card_u();
    const int cy = src.alphabet_y();
    Vec ref = Vec::Zero(cu * cy);
    for (int u = 0; u < cu; ++u)
        for (int x = 0; x < src.alphabet_x(); ++x)
            for (int y = 0; y < cy; ++y)
                ref(u * cy + y) += aux.pu_given_x(x, u) * src.pmf()(x, y);
    return ref;
}

Codebook build_codebook(const ProtocolConfig& cfg) {
    long n1, n2;
    if (cfg.n1 && cfg.n2) {
        n1 = *cfg.n1;
        n2 = *cfg.n2;
        require(n1 >= 1 && n2 >= 1, "build_codebook: explicit sizes must be >= 1");
    } else {
        std::tie(n1, n2) = auto_size(cfg.src, cfg.aux, cfg.n, cfg.mu);
        require(n1 >= 1 && n2 >= 1, "build_codebook: degenerate auto-size (N1 or N2 is 0)");
    }
    require(n1 <= cfg.size_cap / n2, "build_codebook: N1*N2 exceeds the size cap");

    Codebook cb;
    cb.n1 = static_cast<int>(n1);
    cb.n2 = static_cast<int>(n2);
    cb.n = cfg.n;
    cb.mu = cfg.mu;
    cb.p_u = round_to_type(u_marginal(cfg.src, cfg.aux), cfg.n);

    const std::size_t total = static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2);
    cb.words.reserve(total);
    for (std::size_t w = 0; w < total; ++w)
        cb.words.push_back(sample_fixed_type(cb.p_u, cfg.n, cfg.seed, w));

    for (int attempt = 0; attempt < 100; ++attempt) {
        Seq candidate = sample_fixed_type(cb.p_u, cfg.n, cfg.seed, total + attempt);
        if (std::find(cb.words.begin(), cb.words.end(), candidate) == cb.words.end()) {
            cb.u0 = std::move(candidate);
            return cb;
        }
    }
    fail("build_codebook: could not draw u0 distinct from all words (degenerate type)");
}

EncodeResult encode_phi(const Seq& xn, const Codebook& cb, const Vec& ux_ref, int card_x,
                        double delta) {
    const int cu = static_cast<int>(ux_ref.size()) / card_x;
    const TypicalityParams params{delta, cb.n};
    for (int i = 1; i <= cb.n1; ++i)
        for (int j = 1; j <= cb.n2; ++j) {
            const Seq& w = cb.word(i, j);
            if (is_jointly_typical({&w, &xn}, {cu, card_x}, ux_ref, params))
                return {w, i, false};
        }
    return {cb.u0, cb.n1 + 1, true};
}

int bin_index(const Seq& xn, const Codebook& cb, const Vec& ux_ref, int card_x, double delta) {
    return encode_phi(xn, cb, ux_ref, card_x, delta).bin;
}

int transmit_index(int i, const TransmissionCode& code, const ChannelFamily& channel,
                   std::uint64_t seed, std::uint64_t stream, bool* rate_warning,
                   double channel_budget) {
    require(i >= 1 && i <= code.size(), "transmit_index: bin index outside the code");
    if (rate_warning) {
        const double rate = std::log2(static_cast<double>(code.size())) / code.n;
        *rate_warning = rate > channel_budget;
    }
    const Seq z = channel.transmit(code.codewords[static_cast<std::size_t>(i - 1)], seed, stream);
    return code.decode(z, channel);
}

Seq decode_psi(const Seq& yn, int i_tilde, const Codebook& cb, const Vec& uy_ref, int card_y,
               double delta) {
    require(i_tilde >= 1 && i_tilde <= cb.n1 + 1, "decode_psi: bin index out of range");
    if (i_tilde == cb.n1 + 1) return cb.u0;
    const int cu = static_cast<int>(uy_ref.size()) / card_y;
    const TypicalityParams params{delta, cb.n};
    const Seq* unique = nullptr;
    for (int j = 1; j <= cb.n2; ++j) {
        const Seq& w = cb.word(i_tilde, j);
        if (is_jointly_typical({&w, &yn}, {cu, card_y}, uy_ref, params)) {
            if (unique) return cb.u0;  // several
            unique = &w;
        }
    }
    return unique ? *unique : cb.u0;
}

ProtocolResult run_protocol(const ProtocolConfig& cfg, std::vector<TrialEvent>* log) {
    require(cfg.n >= 1 && cfg.trials >= 1, "run_protocol: bad config");
    require(cfg.eps_target > 0.0 && cfg.eps_target < 1.0, "run_protocol: bad epsilon target");

    const Codebook cb = build_codebook(cfg);
    const Vec ux_ref = ux_reference(cfg.src, cfg.aux);
    const Vec uy_ref = uy_reference(cfg.src, cfg.aux);

    const int num_messages = cb.n1 + 1;
    Vec code_pmf = cfg.code_input_pmf;
    if (code_pmf.size() == 0)
        code_pmf = Vec::Constant(cfg.channel.input_alphabet(),
                                 1.0 / cfg.channel.input_alphabet());
    const TransmissionCode code =
        build_random_code(cfg.channel, cfg.n, num_messages, code_pmf, cfg.seed ^ 0xc0debeefull);

    const double code_rate = std::log2(static_cast<double>(num_messages)) / cfg.n;

    // Canonical value id per codeword: duplicated sequences carry one id for
    // the entropy estimate.
    std::map<Seq, long> canonical;
    std::vector<long> word_value(cb.words.size());
    for (std::size_t w = 0; w < cb.words.size(); ++w) {
        const auto [it, inserted] = canonical.try_emplace(cb.words[w], static_cast<long>(w));
        word_value[w] = it->second;
    }
    const long u0_value = static_cast<long>(cb.words.size());

    std::vector<TrialEvent> events(static_cast<std::size_t>(cfg.trials));
    parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t t) {
        const std::uint64_t base = kTrialStreamBase + kStreamsPerTrial * t;
        auto [xn, yn] = sample_pair(cfg.src, cfg.n, cfg.seed, base);

        const EncodeResult enc = encode_phi(xn, cb, ux_ref, cfg.src.alphabet_x(), cfg.delta);
        const int i_tilde =
            transmit_index(enc.bin, code, cfg.channel, cfg.seed, base + 1, nullptr,
                           cfg.channel_budget);
        const Seq L = decode_psi(yn, i_tilde, cb, uy_ref, cfg.src.alphabet_y(), cfg.delta);

        TrialEvent& ev = events[t];
        ev.trial = static_cast<int>(t);
        ev.bin_sent = enc.bin;
        ev.bin_decoded = i_tilde;
        ev.channel_error = i_tilde != enc.bin;

        const TypicalityParams params{cfg.delta, cb.n};
        if (enc.fallback) {
            // no UX-typical codeword: counted against the typicality term
            ev.typicality_fail = true;
        } else {
            ev.typicality_fail = !is_jointly_typical({&enc.word, &yn},
                                                     {cfg.aux.card_u(), cfg.src.alphabet_y()},
                                                     uy_ref, params);
            // Another entry in the sent row also typical with y^n.
            int typical_in_row = 0;
            for (int j = 1; j <= cb.n2; ++j)
                if (is_jointly_typical({&cb.word(enc.bin, j), &yn},
                                       {cfg.aux.card_u(), cfg.src.alphabet_y()}, uy_ref, params))
                    ++typical_in_row;
            ev.row_collision = typical_in_row > (ev.typicality_fail ? 0 : 1);
        }

        long k_value = u0_value, l_value = u0_value;
        if (!enc.fallback) {
            for (int i = 1; i <= cb.n1 && k_value == u0_value; ++i)
                for (int j = 1; j <= cb.n2; ++j)
                    if (cb.word(i, j) == enc.word) {
                        k_value = word_value[static_cast<std::size_t>((i - 1) * cb.n2 + (j - 1))];
                        break;
                    }
        }
        if (L != cb.u0) {
            const auto it = canonical.find(L);
            if (it != canonical.end()) l_value = it->second;
        }
        ev.k_index = k_value;
        ev.l_index = l_value;
    });

    ProtocolResult res;
    res.key_space = cb.key_space();
    res.cardinality_rate = std::log2(static_cast<double>(res.key_space)) / cfg.n;
    res.rate_warning = code_rate > cfg.channel_budget;

    std::map<long, long> k_counts;
    long disagree = 0, typ_fail = 0, collision = 0, chan_err = 0;
    for (const TrialEvent& ev : events) {
        if (ev.k_index != ev.l_index) ++disagree;
        if (ev.typicality_fail) ++typ_fail;
        if (ev.row_collision) ++collision;
        if (ev.channel_error) ++chan_err;
        ++k_counts[ev.k_index];
    }
    const double trials = static_cast<double>(cfg.trials);
    res.p_disagree = disagree / trials;
    res.p_disagree_half_width =
        1.96 * std::sqrt(res.p_disagree * (1.0 - res.p_disagree) / trials);
    res.p_typicality_fail = typ_fail / trials;
    res.p_row_collision = collision / trials;
    res.p_channel_error = chan_err / trials;

    double h = 0.0;
    for (const auto& [value, count] : k_counts) h -= xlog2x(count / trials);
    // Miller-Madow bias correction.
    h += static_cast<double>(k_counts.size() - 1) / (2.0 * trials * std::log(2.0));
    res.entropy_rate = h / cfg.n;
    res.uniformity_gap = std::abs(res.entropy_rate - res.cardinality_rate);

    res.cond1_error = res.p_disagree <= cfg.eps_target;
    res.cond2_cardinality = res.cardinality_rate <= cfg.c_target;
    res.cond3_uniformity = res.uniformity_gap <= cfg.beta_target;
    res.cond4_rate = res.entropy_rate > cfg.h_target - cfg.delta_target;
    res.estimator_warning = cfg.trials < 30 * res.key_space;

    if (log) *log = std::move(events);
    return res;
}

}  // namespace ucr

#include "ucr/info.hpp"
#include "ucr/protocol.hpp"

#include <doctest.h>

#include <cmath>

using namespace ucr;

namespace {

ProtocolConfig degenerate_config() {
    Mat pxy = Mat::Zero(2, 2);
    pxy(0, 0) = 0.5;
    pxy(1, 1) = 0.5;
    ProtocolConfig cfg{JointSource{pxy}, AuxiliaryChannel::identity(2, 2),
                      ChannelFamily::noiseless(2)};
    cfg.n = 200;
    cfg.n1 = 4;
    cfg.n2 = 8;
    cfg.delta = 0.05;
    cfg.trials = 500;
    cfg.seed = 31;
    return cfg;
}

}  // namespace

TEST_CASE("reference sizing matches the closed-form exponents") {
    auto src = JointSource::dsbs(0.11);
    Mat pu(2, 2);
    pu << 0.8, 0.2, 0.2, 0.8;
    AuxiliaryChannel aux{pu};
    const double i_ux = 1.0 - binary_entropy(0.2);
    const double i_uy = 1.0 - binary_entropy(binary_convolve(0.2, 0.11));
    const int n = 60;
    const double mu = 0.02;
    auto [n1, n2] = auto_size(src, aux, n, mu);
    CHECK(n1 == static_cast<long>(std::floor(std::exp2(n * (i_ux - i_uy + 3 * mu)))));
    CHECK(n2 == static_cast<long>(std::floor(std::exp2(n * (i_uy - 2 * mu)))));
    CHECK(n1 >= 1);
    CHECK(n2 >= 1);
}

TEST_CASE("codebooks carry exact-type words and a distinct fallback") {
    auto cfg = degenerate_config();
    auto cb = build_codebook(cfg);
    CHECK(cb.n1 == 4);
    CHECK(cb.n2 == 8);
    CHECK(cb.key_space() == 33);
    for (const Seq& w : cb.words) {
        int ones = 0;
        for (int v : w) ones += v;
        CHECK(ones == 100);  // the rounded uniform type at n=200
    }
    for (const Seq& w : cb.words) CHECK(w != cb.u0);
}

TEST_CASE("oversized explicit codebooks are rejected") {
    auto cfg = degenerate_config();
    cfg.n1 = 1 << 12;
    cfg.n2 = 1 << 12;
    CHECK_THROWS_AS(build_codebook(cfg), std::invalid_argument);
}

TEST_CASE("encoder picks the first typical word and falls back to u0") {
    auto cfg = degenerate_config();
    auto cb = build_codebook(cfg);
    Vec ux = ux_reference(cfg.src, cfg.aux);
    // the codeword itself is typical with the x-sequence it equals
    const Seq& w = cb.word(2, 3);
    auto enc = encode_phi(w, cb, ux, 2, cfg.delta);
    CHECK_FALSE(enc.fallback);
    CHECK(enc.bin == 2);
    CHECK(enc.word == w);
    // an all-zeros x-sequence matches no balanced word under U = X
    Seq zeros(cb.n, 0);
    auto miss = encode_phi(zeros, cb, ux, 2, cfg.delta);
    CHECK(miss.fallback);
    CHECK(miss.bin == cb.n1 + 1);
}

TEST_CASE("decoder returns the unique typical row entry or u0") {
    auto cfg = degenerate_config();
    auto cb = build_codebook(cfg);
    Vec uy = uy_reference(cfg.src, cfg.aux);
    const Seq& w = cb.word(3, 1);
    CHECK(decode_psi(w, 3, cb, uy, 2, cfg.delta) == w);
    Seq zeros(cb.n, 0);
    CHECK(decode_psi(zeros, 3, cb, uy, 2, cfg.delta) == cb.u0);
    CHECK(decode_psi(w, cb.n1 + 1, cb, uy, 2, cfg.delta) == cb.u0);
}

TEST_CASE("index transmission over a noiseless channel is lossless") {
    auto ch = ChannelFamily::noiseless(2);
    auto code = build_random_code(ch, 40, 5, Vec::Constant(2, 0.5), 77);
    for (int i = 1; i <= 5; ++i) CHECK(transmit_index(i, code, ch, 3, i) == i);
}

TEST_CASE("degenerate identity-helper run collapses to the fallback key") {
    auto cfg = degenerate_config();
    std::vector<TrialEvent> events;
    auto r = run_protocol(cfg, &events);
    CHECK(r.key_space == 33);
    CHECK(r.p_disagree == 0.0);
    CHECK(r.p_typicality_fail == 1.0);
    CHECK(r.entropy_rate == 0.0);
    CHECK(static_cast<int>(events.size()) == cfg.trials);
}

TEST_CASE("error decomposition dominates the disagreement estimate") {
    ProtocolConfig cfg{JointSource::dsbs(0.05), AuxiliaryChannel::identity(2, 2),
                      ChannelFamily::bsc(0.1)};
    cfg.n = 30;
    cfg.n1 = 3;
    cfg.n2 = 4;
    cfg.delta = 0.3;  // loose typicality so all events actually occur
    cfg.trials = 2000;
    cfg.seed = 41;
    std::vector<TrialEvent> events;
    auto r = run_protocol(cfg, &events);
    for (const auto& ev : events)
        if (ev.k_index != ev.l_index)
            CHECK((ev.typicality_fail || ev.row_collision || ev.channel_error));
    CHECK(r.p_disagree <=
          r.p_typicality_fail + r.p_row_collision + r.p_channel_error + 1e-12);
}

TEST_CASE("runs are deterministic in the seed") {
    auto cfg = degenerate_config();
    cfg.trials = 100;
    std::vector<TrialEvent> a, b;
    run_protocol(cfg, &a);
    run_protocol(cfg, &b);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].k_index == b[i].k_index);
        CHECK(a[i].l_index == b[i].l_index);
    }
}

TEST_CASE("estimator warning fires when trials are scarce") {
    auto cfg = degenerate_config();
    cfg.trials = 200;  // below 30 |K| = 990
    auto r = run_protocol(cfg);
    CHECK(r.estimator_warning);
    CHECK(r.cardinality_rate == doctest::Approx(std::log2(33.0) / 200));
}

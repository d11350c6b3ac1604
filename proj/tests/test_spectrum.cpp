#include "ucr/info.hpp"
#include "ucr/spectrum.hpp"

#include <doctest.h>

#include <cmath>

using namespace ucr;

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / v.size());
}

}  // namespace

TEST_CASE("noiseless channel density is exactly one bit per symbol") {
    auto ch = ChannelFamily::noiseless(2);
    auto in = InputProcess::uniform(2);
    auto est = estimate_spectrum(in, ch, {50}, 200, 3);
    for (double s : est.samples[0]) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("channel with identical rows carries zero information") {
    Mat k(2, 2);
    k << 0.6, 0.4, 0.6, 0.4;
    ChannelFamily ch{ChannelFamily::Memoryless{k}};
    auto est = estimate_spectrum(InputProcess::uniform(2), ch, {80}, 200, 4);
    for (double s : est.samples[0]) CHECK(std::abs(s) < 1e-12);
}

TEST_CASE("symmetric binary channel density concentrates on its capacity") {
    auto ch = ChannelFamily::bsc(0.25);
    auto est = estimate_spectrum(InputProcess::uniform(2), ch, {2000}, 2000, 5);
    CHECK(std::abs(mean_of(est.samples[0]) - (1.0 - binary_entropy(0.25))) < 0.01);
}

TEST_CASE("density spread shrinks like n^{-1/2}") {
    auto ch = ChannelFamily::bsc(0.25);
    auto a = estimate_spectrum(InputProcess::uniform(2), ch, {400}, 2000, 6);
    auto b = estimate_spectrum(InputProcess::uniform(2), ch, {1600}, 2000, 6);
    const double ratio = sd_of(a.samples[0]) / sd_of(b.samples[0]);
    CHECK(ratio > 2.0 / 1.5);
    CHECK(ratio < 2.0 * 1.5);
}

TEST_CASE("averaged channel splits into two mass atoms") {
    auto ch = ChannelFamily::mixed_bsc(0.3, 0.25, 0.05);
    auto est = estimate_spectrum(InputProcess::uniform(2), ch, {1500}, 2000, 7);
    const double atom_a = 1.0 - binary_entropy(0.25);
    const double atom_b = 1.0 - binary_entropy(0.05);
    const double midpoint = 0.5 * (atom_a + atom_b);
    int below = 0;
    double mean_a = 0.0, mean_b = 0.0;
    for (double s : est.samples[0]) {
        if (s < midpoint) {
            ++below;
            mean_a += s;
        } else {
            mean_b += s;
        }
    }
    mean_a /= below;
    mean_b /= est.trials - below;
    CHECK(std::abs(below / 2000.0 - 0.3) < 0.03);
    CHECK(std::abs(mean_a - atom_a) < 0.01);
    CHECK(std::abs(mean_b - atom_b) < 0.01);
}

TEST_CASE("threshold inversion on a hand-built sample list") {
    SpectrumEstimate est;
    est.blocklengths = {10};
    est.samples = {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}};
    est.trials = 10;
    auto th = thresholds_from_spectrum(est, 0.35, 0.0);
    // 35% of the mass sits at or below the value reported as u_hat
    CHECK(th.l_hat == doctest::Approx(0.4));
    CHECK(th.u_hat == doctest::Approx(0.4));
    auto wide = thresholds_from_spectrum(est, 0.35, 0.1);
    CHECK(wide.l_hat <= th.l_hat);
    CHECK(wide.u_hat >= th.u_hat);
}

TEST_CASE("epsilon band straddles a two-atom plateau") {
    SpectrumEstimate est;
    est.blocklengths = {10};
    est.samples = {std::vector<double>(1000)};
    est.trials = 1000;
    for (int i = 0; i < 1000; ++i) est.samples[0][i] = i < 300 ? 0.19 : 0.71;
    auto th = thresholds_from_spectrum(est, 0.3, 0.03);
    CHECK(th.l_hat == doctest::Approx(0.19));
    CHECK(th.u_hat == doctest::Approx(0.71));
    auto low = thresholds_from_spectrum(est, 0.1, 0.03);
    CHECK(low.l_hat == doctest::Approx(0.19));
    CHECK(low.u_hat == doctest::Approx(0.19));
    auto high = thresholds_from_spectrum(est, 0.5, 0.03);
    CHECK(high.l_hat == doctest::Approx(0.71));
    CHECK(high.u_hat == doctest::Approx(0.71));
}

TEST_CASE("impossible outputs map to the overflow sentinel") {
    Mat k(2, 2);  // the second input can never produce symbol 0
    k << 1.0, 0.0, 0.0, 1.0;
    ChannelFamily ch{ChannelFamily::Memoryless{k}};
    Seq in{0}, out{1};
    CHECK(std::isinf(information_density(in, out, InputProcess::uniform(2), ch)));
}

TEST_CASE("spectrum estimation is deterministic and respects trial floor") {
    auto ch = ChannelFamily::bsc(0.1);
    auto a = estimate_spectrum(InputProcess::uniform(2), ch, {100}, 150, 9);
    auto b = estimate_spectrum(InputProcess::uniform(2), ch, {100}, 150, 9);
    CHECK(a.samples[0] == b.samples[0]);
    CHECK_THROWS_AS(estimate_spectrum(InputProcess::uniform(2), ch, {100}, 50, 9),
                    std::invalid_argument);
}

TEST_CASE("repetition code error matches the exact binomial tail") {
    auto ch = ChannelFamily::bsc(0.25);
    TransmissionCode code;
    code.n = 11;
    code.codewords = {Seq(11, 0), Seq(11, 1)};
    auto err = measure_code_error(code, ch, 20000, 10);
    // majority decoding fails iff at least 6 of 11 symbols flip
    double exact = 0.0;
    for (int k = 6; k <= 11; ++k) {
        double c = 1.0;
        for (int i = 0; i < k; ++i) c = c * (11 - i) / (i + 1);
        exact += c * std::pow(0.25, k) * std::pow(0.75, 11 - k);
    }
    CHECK(err.max_error == doctest::Approx(exact).epsilon(0.15));
    CHECK(err.avg_error == doctest::Approx(exact).epsilon(0.15));
}

TEST_CASE("random codes with few messages decode reliably on a clean channel") {
    auto ch = ChannelFamily::bsc(0.02);
    auto code = build_random_code(ch, 60, 4, Vec::Constant(2, 0.5), 11);
    auto err = measure_code_error(code, ch, 500, 12);
    CHECK(err.max_error < 0.05);
    CHECK(err.max_error <= err.avg_error * code.size() + 1e-12);
}

TEST_CASE("mixed channel block probability uses both components") {
    auto ch = ChannelFamily::mixed_bsc(0.3, 0.25, 0.05);
    Seq in{0, 0}, out{0, 0};
    const double direct = std::log2(0.3 * 0.75 * 0.75 + 0.7 * 0.95 * 0.95);
    CHECK(ch.log2_block_prob(in, out) == doctest::Approx(direct).epsilon(1e-12));
}

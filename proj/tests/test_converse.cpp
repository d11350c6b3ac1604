#include "ucr/converse.hpp"
#include "ucr/info.hpp"
#include "ucr/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace ucr;

TEST_CASE("derived constants at a hand-computed point") {
    auto k = constants(0.25, 0.01, 1.0);
    CHECK(k.lambda == doctest::Approx(0.0301).epsilon(1e-12));
    // 4 lambda / gamma^2 = sqrt(lambda) (1 - sqrt(eps)) = sqrt(0.0301) * 0.5
    CHECK(4.0 * k.lambda / (k.gamma * k.gamma) ==
          doctest::Approx(std::sqrt(0.0301) * 0.5).epsilon(1e-12));
}

TEST_CASE("lambda-gamma identity holds across the parameter box") {
    CounterRng rng(1, 0);
    for (int f = 0; f < 100; ++f) {
        const double eps = 0.02 + 0.95 * rng.next_double();
        const double beta = 0.005 + 0.3 * rng.next_double();
        const double c = 0.05 + 3.0 * rng.next_double();
        auto k = constants(eps, beta, c);
        CHECK(std::abs(4.0 * k.lambda / (k.gamma * k.gamma) -
                       std::sqrt(k.lambda) * (1.0 - std::sqrt(eps))) < 1e-12);
    }
}

TEST_CASE("variance bound accepts uniform keys and rejects bad hypotheses") {
    Vec uniform = Vec::Constant(4, 0.25);
    auto r = variance_bound_check(uniform, 8, 0.25, 0.05);
    CHECK(r.lhs == doctest::Approx(0.0));
    CHECK(r.pass);
    // cardinality hypothesis: 2 > 2^{c n} with tiny c
    CHECK_THROWS_AS(variance_bound_check(uniform, 8, 0.01, 0.05), std::invalid_argument);
    // uniformity hypothesis: a lopsided pmf is not within beta of log|K|
    Vec skew(3);
    skew << 0.98, 0.01, 0.01;
    CHECK_THROWS_AS(variance_bound_check(skew, 4, 1.0, 0.01), std::invalid_argument);
    Vec tiny = Vec::Constant(2, 0.5);
    CHECK_THROWS_AS(variance_bound_check(tiny, 4, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("smallest passing n scans the grid in order") {
    Vec p(3);
    p << 0.4, 0.35, 0.25;
    const double c = std::log2(3.0) / 8.0;
    int n = smallest_passing_n(p, c, 0.08, {1, 2, 4, 8, 16});
    CHECK(n == 8);  // earlier n fail the cardinality gate for this c
}

TEST_CASE("chebyshev set keeps nearly all mass for uniform keys") {
    Vec uniform = Vec::Constant(4, 0.25);
    auto k = constants(0.1, 0.05, 0.25, 0.01);
    auto r = set_L_mass(uniform, 8, k);
    CHECK(r.lhs == doctest::Approx(1.0));
    CHECK(r.pass);
}

TEST_CASE("markov set mass obeys the finite-n bound") {
    Vec p_k = Vec::Constant(3, 1.0 / 3.0);
    Mat ky(3, 3);
    ky << 0.2, 0.1, 1.0 / 30, 0.05, 0.2, 1.0 / 12, 0.1, 0.1, 2.0 / 15;
    ky /= ky.sum();
    auto k = constants(0.1, 0.08, std::log2(3.0) / 10.0);
    auto r = set_D_mass(ky, 10, k);
    const double shrink = 1.0 - 4.0 * k.lambda / (k.gamma * k.gamma);
    CHECK(r.bound_asymptotic == doctest::Approx(shrink * shrink));
    CHECK(r.bound_finite_n ==
          doctest::Approx((1.0 - std::exp2(-10.0 * k.gamma / 2.0)) * shrink));
    CHECK(r.mass >= r.bound_finite_n - 1e-9);
    CHECK(r.pass);
}

TEST_CASE("conditioning pays exactly the log-probability of the event") {
    CounterRng rng(5, 0);
    for (int f = 0; f < 50; ++f) {
        DiscreteJoint d;
        d.card = {2, 3, 2};
        Vec p(12);
        for (int i = 0; i < 12; ++i) p(i) = rng.next_double() + 0.01;
        d.pmf = p / p.sum();
        std::vector<char> mask(12, 0);
        for (int i = 0; i < 12; ++i) mask[i] = rng.next_double() < 0.5;
        mask[3] = 1;
        auto tilted = change_of_measure(d, mask);
        CHECK(std::abs(relative_entropy_bits(tilted, d) +
                       std::log2(event_mass(d, mask))) < 1e-9);
        CHECK(tilted.pmf.sum() == doctest::Approx(1.0));
    }
    DiscreteJoint d;
    d.card = {2};
    d.pmf = Vec::Constant(2, 0.5);
    CHECK_THROWS_AS(change_of_measure(d, {0, 0}), std::invalid_argument);
}

TEST_CASE("entropy-transfer check passes on a full-set conditioning") {
    DiscreteJoint d;
    d.card = {3, 2, 2};
    Vec p(12);
    for (int i = 0; i < 12; ++i) p(i) = 1.0 + 0.05 * ((i * 7) % 5);
    d.pmf = p / p.sum();
    d.n = 2;
    std::vector<int> phi{0, 1, 1};
    auto k = constants(0.25, 0.1, 1.0);
    std::vector<char> all(12, 1);
    auto r = lemma3_check(d, phi, all, k);  // with gamma this large, S3 is everything
    CHECK(r.pass);
    CHECK(r.lhs <= r.rhs + 1e-12);
}

TEST_CASE("entropy-transfer gates reject undersized events") {
    DiscreteJoint d;
    d.card = {2, 2, 2};
    d.pmf = Vec::Constant(8, 0.125);
    std::vector<int> phi{0, 1};
    auto k = constants(0.25, 0.5, 1.0);
    std::vector<char> small(8, 0);
    small[0] = 1;  // P[S] = 0.125 < beta = 0.5
    CHECK_THROWS_AS(lemma3_check(d, phi, small, k), std::invalid_argument);
}

TEST_CASE("density-transfer check on a noiseless channel is trivial") {
    // Z = T and the helper output is constant: the tilted information is zero
    DiscreteJoint d;
    d.card = {2, 2, 2};
    d.pmf = Vec::Zero(8);
    std::vector<int> phi{0, 0}, lambda{0, 1};
    Mat kernel = Mat::Identity(2, 2);
    Mat p_xy = Mat::Constant(2, 2, 0.25);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) d.pmf((x * 2 + y) * 2 + lambda[x]) = p_xy(x, y);
    std::vector<char> all(8, 1);
    auto k = constants(0.25, 0.1, 1.0);
    auto r = lemma4_check(d, phi, lambda, kernel, all, 1.0, k);
    CHECK(r.pass);
    CHECK(r.lhs == doctest::Approx(0.0));  // the key is constant
}

TEST_CASE("density-transfer rejects joints that skip the channel") {
    DiscreteJoint d;
    d.card = {2, 2, 2};
    Vec p(8);
    for (int i = 0; i < 8; ++i) p(i) = i + 1.0;
    d.pmf = p / p.sum();  // generic joint: cannot factor through any kernel
    std::vector<int> phi{0, 1}, lambda{0, 1};
    Mat kernel(2, 2);
    kernel << 0.7, 0.3, 0.3, 0.7;
    std::vector<char> all(8, 1);
    CHECK_THROWS_AS(lemma4_check(d, phi, lambda, kernel, all, 2.0, constants(0.25, 0.1, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("three forms of the information difference coincide") {
    CounterRng rng(9, 0);
    for (int f = 0; f < 50; ++f) {
        const int n = 2;
        DiscreteJoint d;
        d.card = {2, 2, 2, 2, 2, 2};
        Vec p(64);
        for (int i = 0; i < 64; ++i) p(i) = rng.next_double() + 0.01;
        d.pmf = p / p.sum();
        d.n = n;
        auto t = telescoping_identity(d, n);
        CHECK(std::abs(t.lhs - t.sum_form) < 1e-9);
        CHECK(std::abs(t.lhs - t.j_form) < 1e-9);
    }
}

TEST_CASE("independent s zeroes every telescoping form") {
    DiscreteJoint d;
    d.card = {2, 2, 2, 2, 2, 2};
    Vec rest(32);
    for (int i = 0; i < 32; ++i) rest(i) = (i % 3) + 1.0;
    rest /= rest.sum();
    d.pmf = Vec(64);
    for (int s = 0; s < 2; ++s)
        for (int i = 0; i < 32; ++i) d.pmf(s * 32 + i) = 0.5 * rest(i);
    d.n = 2;
    auto t = telescoping_identity(d, 2);
    CHECK(std::abs(t.lhs) < 1e-12);
    CHECK(std::abs(t.sum_form) < 1e-12);
    CHECK(std::abs(t.j_form) < 1e-12);
}

TEST_CASE("single-letter reduction on a correlated product source") {
    // K = X1 xor X2 over two DSBS(0.2) coordinates
    const double q = 0.2;
    Mat pair(2, 2);
    pair << 0.5 * (1 - q), 0.5 * q, 0.5 * q, 0.5 * (1 - q);
    DiscreteJoint d;
    d.card = {2, 2, 2, 2, 2};
    d.pmf = Vec::Zero(32);
    d.n = 2;
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2) {
                    const int k = x1 ^ x2;
                    const int a = (((k * 2 + x1) * 2 + x2) * 2 + y1) * 2 + y2;
                    d.pmf(a) = pair(x1, y1) * pair(x2, y2);
                }
    auto r = single_letterize(d, 2);
    CHECK(r.h_k == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.pass);
    CHECK(std::abs(r.n_i_gap - r.h_k_given_y) < 1e-9);
    CHECK(r.h_k <= r.n_i_ux + 1e-9);
}

TEST_CASE("single-letter reduction rejects a stochastic key") {
    DiscreteJoint d;
    d.card = {2, 2, 2};  // (k, x, y) with n = 1 and K random given X
    Vec p(8);
    for (int i = 0; i < 8; ++i) p(i) = 1.0;
    d.pmf = p / p.sum();
    d.n = 1;
    CHECK_THROWS_AS(single_letterize(d, 1), std::invalid_argument);
}

TEST_CASE("constant key collapses every single-letter quantity") {
    Mat pair(2, 2);
    pair << 0.4, 0.1, 0.2, 0.3;
    DiscreteJoint d;
    d.card = {1, 2, 2, 2, 2};
    d.pmf = Vec::Zero(16);
    d.n = 2;
    for (int a = 0; a < 16; ++a) {
        const int x1 = a >> 3, x2 = (a >> 2) & 1, y1 = (a >> 1) & 1, y2 = a & 1;
        d.pmf(a) = pair(x1, y1) * pair(x2, y2);
    }
    auto r = single_letterize(d, 2);
    CHECK(r.h_k == doctest::Approx(0.0));
    CHECK(std::abs(r.n_i_gap - r.h_k_given_y) < 1e-9);
    CHECK(r.h_k_given_y == doctest::Approx(0.0));
}

TEST_CASE("full suite reports the configured fixture counts with no failures") {
    auto report = run_verification_suite(2024, 25);
    CHECK(report.ok);
    for (const auto& e : report.entries) {
        CHECK(e.failures == 0);
        CHECK(e.fixtures == 25);
        CHECK(e.max_identity_error < 1e-9);
    }
}

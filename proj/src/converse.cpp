#include "ucr/converse.hpp"

#include "ucr/info.hpp"
#include "ucr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace ucr {
namespace {

constexpr double kTol = 1e-9;

// Joint pmf over labelled columns; all entropic quantities are computed by
// exact enumeration over the atoms.
struct AtomTable {
    std::vector<double> p;
    std::vector<std::vector<long>> vals;  // one row of column values per atom

    void add(double prob, std::vector<long> row) {
        if (prob <= 0.0) return;
        p.push_back(prob);
        vals.push_back(std::move(row));
    }

    double entropy(const std::vector<int>& cols) const {
        std::map<std::vector<long>, double> mass;
        std::vector<long> key(cols.size());
        for (std::size_t a = 0; a < p.size(); ++a) {
            for (std::size_t c = 0; c < cols.size(); ++c) key[c] = vals[a][cols[c]];
            mass[key] += p[a];
        }
        double h = 0.0;
        for (const auto& [_, m] : mass) h -= xlog2x(m);
        return h;
    }

    // I(A; B | C)
    double cmi(std::vector<int> a, std::vector<int> b, std::vector<int> c) const {
        auto cat = [](std::vector<int> u, const std::vector<int>& v) {
            u.insert(u.end(), v.begin(), v.end());
            return u;
        };
        return entropy(cat(a, c)) + entropy(cat(b, c)) - entropy(cat(cat(a, b), c)) -
               entropy(c);
    }
};

AtomTable table_of(const DiscreteJoint& d) {
    AtomTable t;
    for (long a = 0; a < d.atoms(); ++a) {
        auto idx = d.decode(a);
        t.add(d.pmf(a), std::vector<long>(idx.begin(), idx.end()));
    }
    return t;
}

void check_joint(const DiscreteJoint& d) {
    long total = 1;
    for (int c : d.card) {
        require(c >= 1, "joint cardinalities must be positive");
        total *= c;
    }
    require(d.pmf.size() == total, "pmf length does not match cardinalities");
    require(is_pmf(d.pmf), "joint is not a pmf");
    require(d.n >= 1, "blocklength must be positive");
}

Mat ky_marginal(const DiscreteJoint& joint_xyz, const std::vector<int>& phi, int card_k) {
    Mat ky = Mat::Zero(card_k, joint_xyz.card[1]);
    for (long a = 0; a < joint_xyz.atoms(); ++a) {
        auto idx = joint_xyz.decode(a);
        ky(phi[idx[0]], idx[1]) += joint_xyz.pmf(a);
    }
    return ky;
}

double conditional_entropy_rows(const Mat& joint) {
    return entropy_bits(joint.reshaped()) - entropy_bits(Vec(joint.colwise().sum()));
}

}  // namespace

std::vector<int> DiscreteJoint::decode(long flat) const {
    std::vector<int> idx(card.size());
    for (int v = static_cast<int>(card.size()) - 1; v >= 0; --v) {
        idx[v] = static_cast<int>(flat % card[v]);
        flat /= card[v];
    }
    return idx;
}

ConverseConstants constants(double eps, double beta, double c, double mu) {
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    require(beta > 0.0, "beta must be positive");
    require(c > 0.0, "c must be positive");
    ConverseConstants k;
    k.eps = eps;
    k.beta = beta;
    k.c = c;
    k.mu = mu;
    k.lambda = beta + 2.0 * beta * c + beta * beta;
    k.gamma = 2.0 * std::sqrt(std::sqrt(k.lambda) / (1.0 - std::sqrt(eps)));
    const double shrink = 1.0 - 4.0 * k.lambda / (k.gamma * k.gamma);
    k.kappa = eps + 1.0 - shrink * shrink;
    k.in_b1 = beta < 1.0 && eps < k.kappa + beta && k.kappa + beta < 1.0;
    k.in_b2 = k.lambda < 1.0;
    k.in_b = k.in_b1 && k.in_b2;
    return k;
}

CheckResult variance_bound_check(const Vec& p_k, int n, double c, double beta) {
    require(is_pmf(p_k), "P_K is not a pmf");
    require(p_k.size() >= 3, "key alphabet must have at least 3 values");
    require(n >= 1, "n must be positive");
    const double log_card = std::log2(static_cast<double>(p_k.size()));
    require(log_card <= c * n + kTol, "cardinality exceeds 2^{cn}");
    const double h = entropy_bits(p_k);
    require(std::abs(h / n - log_card / n) <= beta + kTol,
            "entropy rate is not within beta of the cardinality rate");

    double mean = 0.0, second = 0.0;
    for (long i = 0; i < p_k.size(); ++i) {
        if (p_k(i) <= 0.0) continue;
        const double v = -std::log2(p_k(i)) / n;
        mean += p_k(i) * v;
        second += p_k(i) * v * v;
    }
    CheckResult r;
    r.lhs = std::max(0.0, second - mean * mean);
    r.rhs = beta + 2.0 * beta * c + beta * beta;
    r.pass = r.lhs <= r.rhs + kTol;
    return r;
}

int smallest_passing_n(const Vec& p_k, double c, double beta,
                       const std::vector<int>& n_grid) {
    for (int n : n_grid) {
        try {
            if (variance_bound_check(p_k, n, c, beta).pass) return n;
        } catch (const std::invalid_argument&) {
        }
    }
    return -1;
}

CheckResult set_L_mass(const Vec& p_k, int n, const ConverseConstants& k) {
    auto var = variance_bound_check(p_k, n, k.c, k.beta);
    require(var.pass, "variance hypothesis fails for P_K");
    const double h_rate = entropy_bits(p_k) / n;
    CheckResult r;
    for (long i = 0; i < p_k.size(); ++i) {
        if (p_k(i) <= 0.0) continue;
        if (-std::log2(p_k(i)) / n >= h_rate - k.gamma / 2.0 - kTol) r.lhs += p_k(i);
    }
    r.rhs = 1.0 - 4.0 * k.lambda / (k.gamma * k.gamma);
    r.pass = r.lhs >= r.rhs - kTol;
    return r;
}

SetDResult set_D_mass(const Mat& p_ky, int n, const ConverseConstants& k) {
    require(is_pmf(p_ky), "P_{K,Y} is not a pmf");
    Vec p_k = p_ky.rowwise().sum();
    auto var = variance_bound_check(p_k, n, k.c, k.beta);
    require(var.pass, "variance hypothesis fails for the key marginal");

    Vec p_y = p_ky.colwise().sum();
    const double h_kgy = conditional_entropy_rows(p_ky);
    SetDResult r;
    for (long y = 0; y < p_ky.cols(); ++y) {
        if (p_y(y) <= 0.0) continue;
        for (long key = 0; key < p_ky.rows(); ++key) {
            if (p_ky(key, y) <= 0.0) continue;
            const double cond = p_ky(key, y) / p_y(y);
            if (-std::log2(cond) / n >= h_kgy / n - k.gamma - kTol)
                r.mass += p_ky(key, y);
        }
    }
    const double shrink = 1.0 - 4.0 * k.lambda / (k.gamma * k.gamma);
    r.bound_asymptotic = shrink * shrink;
    r.bound_finite_n = (1.0 - std::exp2(-n * k.gamma / 2.0)) * shrink;
    r.pass = r.mass >= r.bound_finite_n - kTol;
    return r;
}

double event_mass(const DiscreteJoint& base, const std::vector<char>& in_s) {
    check_joint(base);
    require(static_cast<long>(in_s.size()) == base.atoms(), "event mask size mismatch");
    double m = 0.0;
    for (long a = 0; a < base.atoms(); ++a)
        if (in_s[a]) m += base.pmf(a);
    return m;
}

DiscreteJoint change_of_measure(const DiscreteJoint& base, const std::vector<char>& in_s) {
    const double mass = event_mass(base, in_s);
    require(mass > 0.0, "conditioning event has zero probability");
    DiscreteJoint out = base;
    for (long a = 0; a < base.atoms(); ++a)
        out.pmf(a) = in_s[a] ? base.pmf(a) / mass : 0.0;
    return out;
}

double relative_entropy_bits(const DiscreteJoint& tilted, const DiscreteJoint& base) {
    require(tilted.card == base.card, "layouts differ");
    double d = 0.0;
    for (long a = 0; a < base.atoms(); ++a) {
        if (tilted.pmf(a) <= 0.0) continue;
        require(base.pmf(a) > 0.0, "tilted measure is not dominated");
        d += tilted.pmf(a) * std::log2(tilted.pmf(a) / base.pmf(a));
    }
    return d;
}

CheckResult lemma3_check(const DiscreteJoint& joint_xyz, const std::vector<int>& phi,
                         const std::vector<char>& in_s, const ConverseConstants& k) {
    check_joint(joint_xyz);
    require(joint_xyz.card.size() == 3, "expected variables (x, y, z)");
    require(static_cast<long>(phi.size()) == joint_xyz.card[0], "phi size mismatch");
    const int card_k = 1 + *std::max_element(phi.begin(), phi.end());
    const int n = joint_xyz.n;

    Mat ky = ky_marginal(joint_xyz, phi, card_k);
    Vec p_y = ky.colwise().sum();
    const double h_kgy = conditional_entropy_rows(ky);

    // membership in the Markov set D for (phi(x), y)
    auto in_d = [&](int key, int y) {
        if (p_y(y) <= 0.0 || ky(key, y) <= 0.0) return false;
        return -std::log2(ky(key, y) / p_y(y)) / n >= h_kgy / n - k.gamma - kTol;
    };
    for (long a = 0; a < joint_xyz.atoms(); ++a) {
        if (!in_s[a] || joint_xyz.pmf(a) <= 0.0) continue;
        auto idx = joint_xyz.decode(a);
        require(in_d(phi[idx[0]], idx[1]), "S escapes the Markov set");
    }
    require(event_mass(joint_xyz, in_s) >= k.beta - kTol, "P[S] is below beta");

    DiscreteJoint tilted = change_of_measure(joint_xyz, in_s);
    Mat ky_t = ky_marginal(tilted, phi, card_k);

    CheckResult r;
    r.lhs = h_kgy;
    r.rhs = n * k.gamma + std::log2(1.0 / k.beta) + conditional_entropy_rows(ky_t);
    r.pass = r.lhs <= r.rhs + kTol;
    return r;
}

CheckResult lemma4_check(const DiscreteJoint& joint_xyz, const std::vector<int>& phi,
                         const std::vector<int>& lambda, const Mat& kernel,
                         const std::vector<char>& in_s, double density_cap,
                         const ConverseConstants& k) {
    check_joint(joint_xyz);
    require(joint_xyz.card.size() == 3, "expected variables (x, y, z)");
    require(static_cast<long>(phi.size()) == joint_xyz.card[0], "phi size mismatch");
    require(static_cast<long>(lambda.size()) == joint_xyz.card[0], "lambda size mismatch");
    require(is_stochastic(kernel), "kernel is not a channel");
    require(kernel.cols() == joint_xyz.card[2], "kernel output alphabet mismatch");
    const int n = joint_xyz.n;

    // the z-marginal and the Markov factorization P(z | x, y) = W(z | lambda(x))
    Mat p_xy = Mat::Zero(joint_xyz.card[0], joint_xyz.card[1]);
    Vec p_z = Vec::Zero(joint_xyz.card[2]);
    for (long a = 0; a < joint_xyz.atoms(); ++a) {
        auto idx = joint_xyz.decode(a);
        p_xy(idx[0], idx[1]) += joint_xyz.pmf(a);
        p_z(idx[2]) += joint_xyz.pmf(a);
    }
    for (long a = 0; a < joint_xyz.atoms(); ++a) {
        auto idx = joint_xyz.decode(a);
        const double expect = p_xy(idx[0], idx[1]) * kernel(lambda[idx[0]], idx[2]);
        require(std::abs(joint_xyz.pmf(a) - expect) <= 1e-10,
                "joint does not factor through the channel");
    }

    const double threshold = density_cap + k.mu;
    for (long a = 0; a < joint_xyz.atoms(); ++a) {
        if (!in_s[a] || joint_xyz.pmf(a) <= 0.0) continue;
        auto idx = joint_xyz.decode(a);
        const double w = kernel(lambda[idx[0]], idx[2]);
        require(w > 0.0 && p_z(idx[2]) > 0.0, "density undefined on S");
        const double density = std::log2(w / p_z(idx[2])) / n;
        require(density <= threshold + kTol, "S escapes the capped-density set");
    }
    require(event_mass(joint_xyz, in_s) >= k.beta - kTol, "P[S] is below beta");

    DiscreteJoint tilted = change_of_measure(joint_xyz, in_s);
    AtomTable t;
    for (long a = 0; a < tilted.atoms(); ++a) {
        auto idx = tilted.decode(a);
        t.add(tilted.pmf(a), {phi[idx[0]], idx[1], idx[2]});
    }
    CheckResult r;
    r.lhs = t.cmi({0}, {2}, {1}) / n;
    r.rhs = threshold + std::log2(1.0 / k.beta) / n;
    r.pass = r.lhs <= r.rhs + kTol;
    return r;
}

TelescopeResult telescoping_identity(const DiscreteJoint& joint, int n) {
    check_joint(joint);
    require(static_cast<long>(joint.card.size()) == 2 + 2 * n,
            "expected variables (s, r, x_1..x_n, y_1..y_n)");
    AtomTable t = table_of(joint);
    const int s = 0, r = 1;
    auto xcol = [&](int i) { return 2 + i; };          // 0-based coordinate
    auto ycol = [&](int i) { return 2 + n + i; };

    TelescopeResult out;
    std::vector<int> xs, ys;
    for (int i = 0; i < n; ++i) {
        xs.push_back(xcol(i));
        ys.push_back(ycol(i));
    }
    out.lhs = t.cmi({s}, xs, {r}) - t.cmi({s}, ys, {r});

    for (int i = 0; i < n; ++i) {
        std::vector<int> side{r};
        for (int j = 0; j < i; ++j) side.push_back(xcol(j));
        for (int j = i + 1; j < n; ++j) side.push_back(ycol(j));
        out.sum_form += t.cmi({s}, {xcol(i)}, side) - t.cmi({s}, {ycol(i)}, side);
    }

    // uniform time index J folded into the conditioning variable
    AtomTable ext;
    std::map<std::vector<long>, long> v_ids;
    for (std::size_t a = 0; a < t.p.size(); ++a) {
        for (int i = 0; i < n; ++i) {
            std::vector<long> v{i, t.vals[a][r]};
            for (int j = 0; j < i; ++j) v.push_back(t.vals[a][xcol(j)]);
            for (int j = i + 1; j < n; ++j) v.push_back(t.vals[a][ycol(j)]);
            auto [it, _] = v_ids.emplace(v, static_cast<long>(v_ids.size()));
            ext.add(t.p[a] / n,
                    {t.vals[a][s], t.vals[a][xcol(i)], t.vals[a][ycol(i)], it->second});
        }
    }
    out.j_form = n * (ext.cmi({0}, {1}, {3}) - ext.cmi({0}, {2}, {3}));
    return out;
}

SingleLetterResult single_letterize(const DiscreteJoint& joint, int n) {
    check_joint(joint);
    require(static_cast<long>(joint.card.size()) == 1 + 2 * n,
            "expected variables (k, x_1..x_n, y_1..y_n)");
    AtomTable t = table_of(joint);
    auto xcol = [&](int i) { return 1 + i; };
    auto ycol = [&](int i) { return 1 + n + i; };

    // K must be a function of X^n
    {
        std::map<std::vector<long>, long> seen;
        for (std::size_t a = 0; a < t.p.size(); ++a) {
            std::vector<long> x(n);
            for (int i = 0; i < n; ++i) x[i] = t.vals[a][xcol(i)];
            auto [it, fresh] = seen.emplace(x, t.vals[a][0]);
            require(fresh || it->second == t.vals[a][0], "K is not a function of X^n");
        }
    }

    // the pair sequence must be i.i.d. so that (X_{<J}, Y_{>J}, J) is
    // independent of (X_J, Y_J); the information difference collapses to
    // H(K|Y^n) only then
    {
        const int cx = joint.card[1], cy = joint.card[1 + n];
        for (int i = 1; i < n; ++i)
            require(joint.card[1 + i] == cx && joint.card[1 + n + i] == cy,
                    "coordinate alphabets must agree");
        std::map<std::vector<long>, double> seq_mass;
        Mat pair = Mat::Zero(cx, cy);
        for (std::size_t a = 0; a < t.p.size(); ++a) {
            std::vector<long> xy(2 * n);
            for (int i = 0; i < n; ++i) {
                xy[i] = t.vals[a][xcol(i)];
                xy[n + i] = t.vals[a][ycol(i)];
            }
            seq_mass[xy] += t.p[a];
            for (int i = 0; i < n; ++i)
                pair(xy[i], xy[n + i]) += t.p[a] / n;
        }
        for (const auto& [xy, mass] : seq_mass) {
            double prod = 1.0;
            for (int i = 0; i < n; ++i) prod *= pair(xy[i], xy[n + i]);
            require(std::abs(mass - prod) <= 1e-9,
                    "pair sequence is not i.i.d. across coordinates");
        }
    }

    std::vector<int> ys;
    for (int i = 0; i < n; ++i) ys.push_back(ycol(i));
    SingleLetterResult r;
    r.h_k = t.entropy({0});
    std::vector<int> ky{0};
    ky.insert(ky.end(), ys.begin(), ys.end());
    r.h_k_given_y = t.entropy(ky) - t.entropy(ys);

    // U = (K, X_{<J}, Y_{>J}, J), single-letter pair (X_J, Y_J)
    AtomTable ext;
    std::map<std::vector<long>, long> u_ids;
    for (std::size_t a = 0; a < t.p.size(); ++a) {
        for (int i = 0; i < n; ++i) {
            std::vector<long> u{i, t.vals[a][0]};
            for (int j = 0; j < i; ++j) u.push_back(t.vals[a][xcol(j)]);
            for (int j = i + 1; j < n; ++j) u.push_back(t.vals[a][ycol(j)]);
            auto [it, _] = u_ids.emplace(u, static_cast<long>(u_ids.size()));
            ext.add(t.p[a] / n, {it->second, t.vals[a][xcol(i)], t.vals[a][ycol(i)]});
        }
    }
    r.n_i_ux = n * ext.cmi({0}, {1}, {});
    r.n_i_gap = r.n_i_ux - n * ext.cmi({0}, {2}, {});
    r.pass = r.h_k <= r.n_i_ux + kTol && std::abs(r.n_i_gap - r.h_k_given_y) <= kTol;
    return r;
}

namespace {

Vec random_near_uniform(CounterRng& rng, int card, double spread) {
    Vec p(card);
    for (int i = 0; i < card; ++i) p(i) = 1.0 + spread * (2.0 * rng.next_double() - 1.0);
    return p / p.sum();
}

DiscreteJoint random_joint(CounterRng& rng, std::vector<int> card, int n, double spread) {
    long total = 1;
    for (int c : card) total *= c;
    DiscreteJoint d;
    d.card = std::move(card);
    d.pmf = random_near_uniform(rng, static_cast<int>(total), spread);
    d.n = n;
    return d;
}

}  // namespace

SuiteReport run_verification_suite(std::uint64_t seed, int fixtures_per_lemma) {
    SuiteReport report;
    auto push = [&](std::string name, int fixtures, int failures, double max_err) {
        report.entries.push_back({std::move(name), fixtures, failures, max_err});
        if (failures > 0) report.ok = false;
    };

    {  // closed-form relation between lambda, gamma and the Chebyshev deficit
        CounterRng rng(seed, 1);
        int fail = 0;
        double max_err = 0.0;
        for (int f = 0; f < fixtures_per_lemma; ++f) {
            const double eps = 0.05 + 0.9 * rng.next_double();
            const double beta = 0.01 + 0.2 * rng.next_double();
            const double c = 0.1 + 2.0 * rng.next_double();
            auto k = constants(eps, beta, c);
            const double err = std::abs(4.0 * k.lambda / (k.gamma * k.gamma) -
                                        std::sqrt(k.lambda) * (1.0 - std::sqrt(eps)));
            max_err = std::max(max_err, err);
            if (err > kTol) ++fail;
            if (k.in_b1 && !(eps < k.kappa + beta && k.kappa + beta < 1.0)) ++fail;
        }
        push("constants-identity", fixtures_per_lemma, fail, max_err);
    }

    {  // variance bound and the Chebyshev set on near-uniform keys
        CounterRng rng(seed, 2);
        int fail_var = 0, fail_l = 0;
        for (int f = 0; f < fixtures_per_lemma; ++f) {
            const int card = 3 + static_cast<int>(rng.next_below(3));
            const int n = 8 + static_cast<int>(rng.next_below(9));
            Vec p_k = random_near_uniform(rng, card, 0.2);
            const double log_card = std::log2(static_cast<double>(card));
            const double c = log_card / n;
            const double beta =
                std::max(0.05, 1.2 * std::abs(entropy_bits(p_k) - log_card) / n);
            if (!variance_bound_check(p_k, n, c, beta).pass) ++fail_var;
            auto k = constants(0.1, beta, c, 0.01);
            auto l = set_L_mass(p_k, n, k);
            if (!l.pass) ++fail_l;
        }
        push("variance-bound", fixtures_per_lemma, fail_var, 0.0);
        push("chebyshev-set", fixtures_per_lemma, fail_l, 0.0);
    }

    {  // Markov set mass against the finite-n bound
        CounterRng rng(seed, 3);
        int fail = 0, made = 0;
        for (int attempt = 0; made < fixtures_per_lemma && attempt < 50 * fixtures_per_lemma;
             ++attempt) {
            const int ck = 3 + static_cast<int>(rng.next_below(2));
            const int cy = 2 + static_cast<int>(rng.next_below(3));
            Vec p_k = random_near_uniform(rng, ck, 0.2);
            Mat ky(ck, cy);
            for (int i = 0; i < ck; ++i)
                ky.row(i) = p_k(i) * random_near_uniform(rng, cy, 0.6).transpose();
            const int n = 8 + static_cast<int>(rng.next_below(9));
            const double log_card = std::log2(static_cast<double>(ck));
            const double c = log_card / n;
            const double beta =
                std::max(0.05, 1.2 * std::abs(entropy_bits(p_k) - log_card) / n);
            try {
                auto d = set_D_mass(ky, n, constants(0.1, beta, c));
                ++made;
                if (!d.pass) ++fail;
            } catch (const std::invalid_argument&) {
            }
        }
        push("markov-set", made, fail + (made - fixtures_per_lemma != 0 ? 1 : 0), 0.0);
    }

    {  // divergence cost of conditioning equals -log2 P[S]
        CounterRng rng(seed, 4);
        int fail = 0;
        double max_err = 0.0;
        for (int f = 0; f < fixtures_per_lemma; ++f) {
            auto d = random_joint(rng, {3, 3, 2}, 1, 0.9);
            std::vector<char> mask(d.atoms(), 0);
            for (long a = 0; a < d.atoms(); ++a) mask[a] = rng.next_double() < 0.4;
            if (event_mass(d, mask) <= 0.0) mask[0] = 1;
            auto tilted = change_of_measure(d, mask);
            const double err = std::abs(relative_entropy_bits(tilted, d) +
                                        std::log2(event_mass(d, mask)));
            max_err = std::max(max_err, err);
            if (err > kTol) ++fail;
        }
        push("change-of-measure", fixtures_per_lemma, fail, max_err);
    }

    {  // entropy transfer under conditioning on the Markov set
        CounterRng rng(seed, 5);
        int fail = 0, made = 0;
        for (int attempt = 0; made < fixtures_per_lemma && attempt < 50 * fixtures_per_lemma;
             ++attempt) {
            auto d = random_joint(rng, {4, 3, 2}, 1 + static_cast<int>(rng.next_below(3)),
                                  0.9);
            std::vector<int> phi(4);
            for (auto& v : phi) v = static_cast<int>(rng.next_below(3));
            auto k = constants(0.25, 0.01, 1.0);
            // S = everything inside the Markov set, thinned at random
            Mat ky = ky_marginal(d, phi, 3);
            Vec p_y = ky.colwise().sum();
            const double h_kgy = conditional_entropy_rows(ky);
            std::vector<char> mask(d.atoms(), 0);
            for (long a = 0; a < d.atoms(); ++a) {
                auto idx = d.decode(a);
                const int key = phi[idx[0]];
                if (p_y(idx[1]) <= 0.0 || ky(key, idx[1]) <= 0.0) continue;
                const bool in_d = -std::log2(ky(key, idx[1]) / p_y(idx[1])) / d.n >=
                                  h_kgy / d.n - k.gamma - kTol;
                mask[a] = in_d && rng.next_double() < 0.85;
            }
            if (event_mass(d, mask) < k.beta) continue;
            ++made;
            if (!lemma3_check(d, phi, mask, k).pass) ++fail;
        }
        push("conditioned-entropy-bound", made, fail + (made - fixtures_per_lemma != 0 ? 1 : 0),
             0.0);
    }

    {  // conditional information under conditioning on a capped-density set
        CounterRng rng(seed, 6);
        int fail = 0, made = 0;
        for (int attempt = 0; made < fixtures_per_lemma && attempt < 50 * fixtures_per_lemma;
             ++attempt) {
            const int cx = 3, cy = 2, cz = 3, ct = 2;
            Mat p_xy(cx, cy);
            {
                Vec flat = random_near_uniform(rng, cx * cy, 0.9);
                for (int x = 0; x < cx; ++x)
                    for (int y = 0; y < cy; ++y) p_xy(x, y) = flat(x * cy + y);
            }
            Mat kernel(ct, cz);
            for (int t = 0; t < ct; ++t)
                kernel.row(t) = random_near_uniform(rng, cz, 0.9).transpose();
            std::vector<int> phi(cx), lambda(cx);
            for (auto& v : phi) v = static_cast<int>(rng.next_below(2));
            for (auto& v : lambda) v = static_cast<int>(rng.next_below(ct));

            DiscreteJoint d;
            d.card = {cx, cy, cz};
            d.pmf = Vec::Zero(cx * cy * cz);
            d.n = 1;
            Vec p_z = Vec::Zero(cz);
            for (int x = 0; x < cx; ++x)
                for (int y = 0; y < cy; ++y)
                    for (int z = 0; z < cz; ++z) {
                        const double m = p_xy(x, y) * kernel(lambda[x], z);
                        d.pmf((x * cy + y) * cz + z) = m;
                        p_z(z) += m;
                    }

            // cap at the 70th percentile of the density; S = everything under it
            std::vector<double> densities;
            for (int x = 0; x < cx; ++x)
                for (int z = 0; z < cz; ++z)
                    if (kernel(lambda[x], z) > 0.0)
                        densities.push_back(std::log2(kernel(lambda[x], z) / p_z(z)));
            std::sort(densities.begin(), densities.end());
            const double cap = densities[(7 * densities.size()) / 10];
            std::vector<char> mask(d.atoms(), 0);
            for (long a = 0; a < d.atoms(); ++a) {
                auto idx = d.decode(a);
                mask[a] = std::log2(kernel(lambda[idx[0]], idx[2]) / p_z(idx[2])) <=
                          cap + kTol;
            }
            auto k = constants(0.25, 0.05, 1.0);
            if (event_mass(d, mask) < k.beta) continue;
            ++made;
            if (!lemma4_check(d, phi, lambda, kernel, mask, cap, k).pass) ++fail;
        }
        push("conditioned-density-bound", made,
             fail + (made - fixtures_per_lemma != 0 ? 1 : 0), 0.0);
    }

    {  // three routes to the same information difference
        CounterRng rng(seed, 7);
        int fail = 0;
        double max_err = 0.0;
        for (int f = 0; f < fixtures_per_lemma; ++f) {
            const int n = 2;
            auto d = random_joint(rng, {2, 2, 2, 2, 2, 2}, n, 0.95);
            auto t = telescoping_identity(d, n);
            const double err = std::max(std::abs(t.lhs - t.sum_form),
                                        std::abs(t.lhs - t.j_form));
            max_err = std::max(max_err, err);
            if (err > kTol) ++fail;
        }
        push("telescoping-identity", fixtures_per_lemma, fail, max_err);
    }

    {  // single-letter variable preserves the key entropy bounds
        CounterRng rng(seed, 8);
        int fail = 0;
        double max_err = 0.0;
        for (int f = 0; f < fixtures_per_lemma; ++f) {
            const int n = 2;
            std::vector<int> phi(4);
            for (auto& v : phi) v = static_cast<int>(rng.next_below(3));
            Vec pair = random_near_uniform(rng, 4, 0.95);  // single-letter (x, y) pmf
            DiscreteJoint d;
            d.card = {3, 2, 2, 2, 2};
            d.pmf = Vec::Zero(3 * 16);
            d.n = n;
            for (int a = 0; a < 16; ++a) {
                const int x1 = a >> 3, x2 = (a >> 2) & 1, y1 = (a >> 1) & 1, y2 = a & 1;
                const int x = (x1 << 1) | x2;
                d.pmf(phi[x] * 16 + a) = pair(x1 * 2 + y1) * pair(x2 * 2 + y2);
            }
            auto r = single_letterize(d, n);
            const double err = std::abs(r.n_i_gap - r.h_k_given_y);
            max_err = std::max(max_err, err);
            if (!r.pass || err > kTol) ++fail;
        }
        push("single-letterization", fixtures_per_lemma, fail, max_err);
    }

    return report;
}

}  // namespace ucr

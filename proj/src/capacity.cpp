#include "ucr/capacity.hpp"

#include "ucr/info.hpp"
#include "ucr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ucr {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kValueTie = 1e-12;

void check_aux(const Mat& a, const JointSource& src) {
    require(a.rows() == src.alphabet_x(), "aux: row count must match |X|");
    require(is_stochastic(a, 1e-9), "aux: rows must sum to 1");
}

/// Euclidean projection of v onto the probability simplex.
Vec project_simplex(const Vec& v) {
    const Eigen::Index m = v.size();
    std::vector<double> u(v.data(), v.data() + m);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        css += u[static_cast<std::size_t>(i)];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0.0) {
            rho = static_cast<int>(i + 1);
            theta = t;
        }
    }
    (void)rho;
    return (v.array() - theta).cwiseMax(0.0);
}

Mat project_rows(Mat m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        m.row(r) = project_simplex(m.row(r).transpose()).transpose();
    return m;
}

/// All lattice rows (compositions of `steps` into `parts`), lexicographic.
void enumerate_rows(int steps, int parts, std::vector<Vec>& out) {
    std::vector<int> comp(static_cast<std::size_t>(parts), 0);
    const std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == parts - 1) {
            comp[static_cast<std::size_t>(pos)] = left;
            Vec row(parts);
            for (int i = 0; i < parts; ++i)
                row(i) = static_cast<double>(comp[static_cast<std::size_t>(i)]) / steps;
            out.push_back(std::move(row));
            return;
        }
        for (int c = 0; c <= left; ++c) {
            comp[static_cast<std::size_t>(pos)] = c;
            rec(pos + 1, left - c);
        }
    };
    rec(0, steps);
}

struct GridBest {
    double value = -1.0;
    double budget_used = 0.0;
    std::vector<int> combo;  // row index per x; empty = none yet
};

}  // namespace

AuxiliaryChannel AuxiliaryChannel::identity(int card_x, int card_u) {
    require(card_u >= card_x, "identity aux: need |U| >= |X|");
    Mat a = Mat::Zero(card_x, card_u);
    for (int x = 0; x < card_x; ++x) a(x, x) = 1.0;
    return {a};
}

AuxiliaryChannel AuxiliaryChannel::constant(int card_x, int card_u) {
    Mat a = Mat::Zero(card_x, card_u);
    a.col(0).setOnes();
    return {a};
}

std::vector<Mat> induced_joint(const AuxiliaryChannel& aux, const JointSource& src) {
    check_aux(aux.pu_given_x, src);
    std::vector<Mat> slices;
    slices.reserve(static_cast<std::size_t>(aux.card_u()));
    for (int u = 0; u < aux.card_u(); ++u) {
        Mat slice = src.pmf();
        for (Eigen::Index x = 0; x < slice.rows(); ++x) slice.row(x) *= aux.pu_given_x(x, u);
        slices.push_back(std::move(slice));
    }
    return slices;
}

std::pair<double, double> aux_objective(const Mat& pu_given_x, const JointSource& src) {
    check_aux(pu_given_x, src);
    const Vec& px = src.marginal_x();
    const Mat& pxy = src.pmf();
    const int cu = static_cast<int>(pu_given_x.cols());

    Vec pu = Vec::Zero(cu);
    double h_u_given_x = 0.0;
    for (Eigen::Index x = 0; x < pxy.rows(); ++x) {
        pu += px(x) * pu_given_x.row(x).transpose();
        h_u_given_x += px(x) * entropy_bits(pu_given_x.row(x).transpose());
    }
    Mat puy = Mat::Zero(cu, pxy.cols());
    for (Eigen::Index x = 0; x < pxy.rows(); ++x)
        puy += pu_given_x.row(x).transpose() * pxy.row(x);

    const double h_u = entropy_bits(pu);
    const double h_y = entropy_bits(src.marginal_y());
    const double h_uy = entropy_bits(puy.reshaped());
    const double i_ux = h_u - h_u_given_x;
    const double i_uy = h_u + h_y - h_uy;
    return {i_ux, i_ux - i_uy};
}

double aux_conditional_leak(const AuxiliaryChannel& aux, const JointSource& src) {
    // I(U;Y|X) = H(U|X) + H(Y|X) - H(UY|X) of the induced joint.
    const auto slices = induced_joint(aux, src);
    const Vec& px = src.marginal_x();
    double leak = 0.0;
    for (int x = 0; x < src.alphabet_x(); ++x) {
        if (px(x) <= 0.0) continue;
        Mat cond(aux.card_u(), src.alphabet_y());
        for (int u = 0; u < aux.card_u(); ++u) cond.row(u) = slices[static_cast<std::size_t>(u)].row(x);
        cond /= px(x);
        leak += px(x) * mutual_information_bits(cond);
    }
    return leak;
}

std::vector<BoundResult> cr_bound_grid_multi(const JointSource& src,
                                             const std::vector<double>& budgets,
                                             const CrOptions& opt) {
    for (double b : budgets) require(b >= 0.0, "cr_bound: budget must be >= 0");
    require(opt.card_u >= 2, "cr_bound: need |U| >= 2");
    const int steps = std::max(1, static_cast<int>(std::lround(1.0 / opt.grid_step)));
    const int nx = src.alphabet_x();
    const int ny = src.alphabet_y();
    const Vec& px = src.marginal_x();
    const Mat& pxy = src.pmf();
    const double h_y = entropy_bits(src.marginal_y());

    std::vector<Vec> rows;
    enumerate_rows(steps, opt.card_u, rows);
    const std::size_t nrows = rows.size();
    std::vector<double> row_entropy(nrows);
    for (std::size_t r = 0; r < nrows; ++r) row_entropy[r] = entropy_bits(rows[r]);

    const std::size_t nb = budgets.size();
    const int workers = 64;  // fixed chunk count keeps the merge order stable
    const std::size_t chunk = (nrows + workers - 1) / workers;
    std::vector<std::vector<GridBest>> local(
        static_cast<std::size_t>(workers), std::vector<GridBest>(nb));

    parallel_for(static_cast<std::size_t>(workers), [&](std::size_t w) {
        const std::size_t lo = w * chunk, hi = std::min(nrows, lo + chunk);
        if (lo >= hi) return;
        std::vector<GridBest>& best = local[w];
        std::vector<int> combo(static_cast<std::size_t>(nx), 0);
        Vec pu(opt.card_u);
        Mat puy(opt.card_u, ny);

        // Odometer over combo[1..nx-1]; combo[0] ranges over this chunk.
        const auto evaluate = [&]() {
            pu.setZero();
            puy.setZero();
            double h_cond = 0.0;
            for (int x = 0; x < nx; ++x) {
                const Vec& row = rows[static_cast<std::size_t>(combo[static_cast<std::size_t>(x)])];
                pu += px(x) * row;
                puy += row * pxy.row(x);
                h_cond += px(x) * row_entropy[static_cast<std::size_t>(combo[static_cast<std::size_t>(x)])];
            }
            const double h_u = entropy_bits(pu);
            const double i_ux = h_u - h_cond;
            const double g = entropy_bits(puy.reshaped()) - h_y - h_cond;
            for (std::size_t b = 0; b < nb; ++b) {
                if (g > budgets[b] + kFeasTol) continue;
                GridBest& gb = best[b];
                if (i_ux > gb.value + kValueTie ||
                    (std::abs(i_ux - gb.value) <= kValueTie &&
                     (gb.combo.empty() || combo < gb.combo))) {
                    gb.value = i_ux;
                    gb.budget_used = g;
                    gb.combo = combo;
                }
            }
        };

        for (std::size_t r0 = lo; r0 < hi; ++r0) {
            combo[0] = static_cast<int>(r0);
            std::fill(combo.begin() + 1, combo.end(), 0);
            while (true) {
                evaluate();
                int pos = nx - 1;
                while (pos >= 1) {
                    if (++combo[static_cast<std::size_t>(pos)] < static_cast<int>(nrows)) break;
                    combo[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 1) break;
            }
        }
    });

    std::vector<BoundResult> out(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        GridBest merged;
        for (const auto& loc : local) {
            const GridBest& gb = loc[b];
            if (gb.combo.empty()) continue;
            if (gb.value > merged.value + kValueTie ||
                (std::abs(gb.value - merged.value) <= kValueTie &&
                 (merged.combo.empty() || gb.combo < merged.combo)))
                merged = gb;
        }
        require(!merged.combo.empty(), "cr_bound: grid found no feasible point");
        BoundResult& res = out[b];
        res.value_bits = merged.value;
        res.budget_used = merged.budget_used;
        res.method = "grid";
        res.argmax.resize(nx, opt.card_u);
        for (int x = 0; x < nx; ++x)
            res.argmax.row(x) = rows[static_cast<std::size_t>(merged.combo[static_cast<std::size_t>(x)])].transpose();
    }
    return out;
}

namespace {

/// Blend toward the constant channel until the rate constraint holds.
std::pair<double, Mat> repair_feasibility(const Mat& p, const JointSource& src, double budget) {
    const auto [iux, g] = aux_objective(p, src);
    if (g <= budget + kFeasTol) return {iux, p};
    const Mat constant = AuxiliaryChannel::constant(static_cast<int>(p.rows()),
                                                    static_cast<int>(p.cols()))
                             .pu_given_x;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Mat blend = (1.0 - mid) * p + mid * constant;
        if (aux_objective(blend, src).second <= budget + 0.5 * kFeasTol)
            hi = mid;
        else
            lo = mid;
    }
    const Mat blend = (1.0 - hi) * p + hi * constant;
    return {aux_objective(blend, src).first, blend};
}

double penalized(const Mat& p, const JointSource& src, double budget, double w) {
    const auto [iux, g] = aux_objective(p, src);
    const double viol = std::max(0.0, g - budget);
    return iux - w * viol * viol;
}

BoundResult cr_bound_ascent(const JointSource& src, double budget, const CrOptions& opt) {
    const int nx = src.alphabet_x();
    const int cu = opt.card_u;

    std::vector<Mat> inits;
    inits.push_back(AuxiliaryChannel::constant(nx, cu).pu_given_x);
    if (cu >= nx) inits.push_back(AuxiliaryChannel::identity(nx, cu).pu_given_x);
    inits.push_back(Mat::Constant(nx, cu, 1.0 / cu));
    CounterRng rng(opt.seed, 0x6372ull);
    while (static_cast<int>(inits.size()) < opt.restarts) {
        Mat m(nx, cu);
        for (Eigen::Index x = 0; x < nx; ++x) {
            for (Eigen::Index u = 0; u < cu; ++u)
                m(x, u) = -std::log(1.0 - rng.next_double());
            m.row(x) /= m.row(x).sum();
        }
        inits.push_back(std::move(m));
    }

    BoundResult best;
    best.value_bits = -1.0;
    best.method = "ascent";
    const auto consider = [&](const Mat& p) {
        const auto [value, repaired] = repair_feasibility(p, src, budget);
        if (value > best.value_bits) {
            best.value_bits = value;
            best.argmax = repaired;
            best.budget_used = aux_objective(repaired, src).second;
        }
    };

    const double h = 1e-5;
    for (const Mat& init : inits) {
        consider(init);
        Mat p = init;
        double w = opt.penalty_init;
        for (int round = 0; round < opt.penalty_rounds; ++round, w *= 10.0) {
            double lr = 0.1;
            double fp = penalized(p, src, budget, w);
            for (int it = 0; it < opt.iters_per_round && lr > 1e-10; ++it) {
                Mat grad(nx, cu);
                for (Eigen::Index x = 0; x < nx; ++x)
                    for (Eigen::Index u = 0; u < cu; ++u) {
                        Mat pp = p, pm = p;
                        pp(x, u) += h;
                        pm(x, u) = std::max(0.0, pm(x, u) - h);
                        grad(x, u) = (penalized(project_rows(pp), src, budget, w) -
                                      penalized(project_rows(pm), src, budget, w)) /
                                     (2.0 * h);
                    }
                const Mat cand = project_rows(p + lr * grad);
                const double fc = penalized(cand, src, budget, w);
                if (fc > fp) {
                    p = cand;
                    fp = fc;
                    lr *= 1.2;
                } else {
                    lr *= 0.5;
                }
            }
            consider(p);
        }
    }
    return best;
}

}  // namespace

BoundResult cr_bound(const JointSource& src, double budget, const CrOptions& opt,
                     const std::string& method) {
    require(budget >= 0.0, "cr_bound: budget must be >= 0");
    require(opt.card_u >= 2, "cr_bound: need |U| >= 2");
    if (method == "grid") return cr_bound_grid_multi(src, {budget}, opt).front();
    require(method == "ascent", "cr_bound: unknown method");
    return cr_bound_ascent(src, budget, opt);
}

Vec blahut_arimoto_input(const Mat& kernel, int max_iters, double tol) {
    require(is_stochastic(kernel), "blahut_arimoto: kernel rows must sum to 1");
    const Eigen::Index nt = kernel.rows();
    Vec p = Vec::Constant(nt, 1.0 / static_cast<double>(nt));
    for (int it = 0; it < max_iters; ++it) {
        const Vec q = kernel.transpose() * p;
        Vec score(nt);  // exp of per-input divergence to the output marginal
        for (Eigen::Index t = 0; t < nt; ++t) {
            double d = 0.0;
            for (Eigen::Index z = 0; z < kernel.cols(); ++z) {
                const double w = kernel(t, z);
                if (w > 0.0) d += w * std::log(w / q(z));
            }
            score(t) = std::exp(d);
        }
        Vec next = p.cwiseProduct(score);
        next /= next.sum();
        const double delta = (next - p).cwiseAbs().maxCoeff();
        p = next;
        if (delta < tol) break;
    }
    return p;
}

UcrBounds epsilon_ucr_bounds(const JointSource& src, const std::vector<InputProcess>& candidates,
                             const ChannelFamily& channel, double eps, const SpectrumConfig& scfg,
                             const CrOptions& opt, const std::string& method) {
    require(eps > 0.0 && eps < 1.0, "epsilon_ucr_bounds: epsilon must be in (0,1)");
    require(!candidates.empty(), "epsilon_ucr_bounds: need at least one input candidate");

    UcrBounds out;
    bool first = true;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto est = estimate_spectrum(candidates[c], channel, scfg.blocklengths, scfg.trials,
                                           scfg.seed + 0x1000ull * c);
        const Thresholds th = thresholds_from_spectrum(est, eps, scfg.band);
        if (first) {
            out.thresholds = th;
            first = false;
        } else {
            out.thresholds.l_hat = std::max(out.thresholds.l_hat, th.l_hat);
            out.thresholds.u_hat = std::max(out.thresholds.u_hat, th.u_hat);
            out.thresholds.l_hat_top2 = std::max(out.thresholds.l_hat_top2, th.l_hat_top2);
            out.thresholds.u_hat_top2 = std::max(out.thresholds.u_hat_top2, th.u_hat_top2);
        }
    }

    const double lower_budget = std::max(0.0, out.thresholds.l_hat);
    const double upper_budget = std::max(0.0, out.thresholds.u_hat);
    out.lower_result = cr_bound(src, lower_budget, opt, method);
    out.upper_result = cr_bound(src, upper_budget, opt, method);
    out.lower_bits = out.lower_result.value_bits;
    out.upper_bits = out.upper_result.value_bits;
    require(out.lower_bits <= out.upper_bits + kFeasTol,
            "epsilon_ucr_bounds: lower bound exceeded upper bound");
    return out;
}

}  // namespace ucr

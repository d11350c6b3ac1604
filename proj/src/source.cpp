#include "ucr/source.hpp"

#include "ucr/info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ucr {

JointSource::JointSource(Mat pxy) : pxy_(std::move(pxy)) {
    require(pxy_.rows() >= 1 && pxy_.cols() >= 1, "JointSource: empty alphabet");
    require((pxy_.array() >= 0.0).all(), "JointSource: negative entry");
    require(std::abs(pxy_.sum() - 1.0) <= kPmfTol, "JointSource: mass != 1");
    px_ = pxy_.rowwise().sum();
    py_ = pxy_.colwise().sum();
    require(std::abs(px_.sum() - 1.0) <= kPmfTol && std::abs(py_.sum() - 1.0) <= kPmfTol,
            "JointSource: malformed marginals");
}

double JointSource::entropy_x() const { return entropy_bits(px_); }

double JointSource::entropy_x_given_y() const {
    double h = 0.0;
    for (Eigen::Index y = 0; y < pxy_.cols(); ++y) {
        if (py_(y) <= 0.0) continue;
        for (Eigen::Index x = 0; x < pxy_.rows(); ++x) {
            const double p = pxy_(x, y);
            if (p > 0.0) h -= p * std::log2(p / py_(y));
        }
    }
    return h;
}

double JointSource::mutual_information() const { return mutual_information_bits(pxy_); }

JointSource JointSource::dsbs(double p) {
    require(p >= 0.0 && p <= 1.0, "dsbs: flip probability out of range");
    Mat j(2, 2);
    j << (1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0;
    return JointSource(j);
}

int EmpiricalType::flat_index(const std::vector<int>& symbol) const {
    int idx = 0;
    for (std::size_t d = 0; d < dims.size(); ++d) idx = idx * dims[d] + symbol[d];
    return idx;
}

Vec EmpiricalType::pmf() const {
    return counts.cast<double>() / static_cast<double>(n);
}

EmpiricalType joint_type(const std::vector<const Seq*>& seqs, const std::vector<int>& dims) {
    require(!seqs.empty() && seqs.size() == dims.size(), "joint_type: arity mismatch");
    const std::size_t n = seqs.front()->size();
    for (const Seq* s : seqs)
        require(s->size() == n, "joint_type: sequence length mismatch");

    int cells = 1;
    for (int d : dims) cells *= d;
    EmpiricalType type;
    type.dims = dims;
    type.n = static_cast<int>(n);
    type.counts = VecI::Zero(cells);
    for (std::size_t i = 0; i < n; ++i) {
        int idx = 0;
        for (std::size_t d = 0; d < seqs.size(); ++d) {
            const int sym = (*seqs[d])[i];
            require(sym >= 0 && sym < dims[d], "joint_type: symbol out of alphabet");
            idx = idx * dims[d] + sym;
        }
        ++type.counts(idx);
    }
    return type;
}

bool is_jointly_typical(const std::vector<const Seq*>& seqs, const std::vector<int>& dims,
                        const Vec& reference_pmf, const TypicalityParams& params) {
    require(params.delta > 0.0, "typicality: delta must be positive");
    const EmpiricalType type = joint_type(seqs, dims);
    require(reference_pmf.size() == type.counts.size(), "typicality: pmf shape mismatch");
    const double inv_n = 1.0 / static_cast<double>(type.n);
    for (Eigen::Index a = 0; a < reference_pmf.size(); ++a) {
        const double freq = type.counts(a) * inv_n;
        if (reference_pmf(a) == 0.0 && type.counts(a) > 0) return false;
        if (std::abs(freq - reference_pmf(a)) > params.delta) return false;
    }
    return true;
}

std::pair<Seq, Seq> sample_pair(const JointSource& src, int n, std::uint64_t seed,
                                std::uint64_t trial) {
    require(n >= 1, "sample_pair: n must be >= 1");
    const Mat& pxy = src.pmf();
    const int ny = src.alphabet_y();
    Vec flat = pxy.transpose().reshaped();  // row-major (x, y) order
    CounterRng rng(seed, trial);
    Seq xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int joint = rng.next_categorical(flat);
        xs[static_cast<std::size_t>(i)] = joint / ny;
        ys[static_cast<std::size_t>(i)] = joint % ny;
    }
    return {std::move(xs), std::move(ys)};
}

std::vector<std::pair<Seq, Seq>> sample_pairs(const JointSource& src, int n, int trials,
                                              std::uint64_t seed) {
    require(n >= 1 && trials >= 1, "sample_pairs: n and trials must be >= 1");
    std::vector<std::pair<Seq, Seq>> out;
    out.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t)
        out.push_back(sample_pair(src, n, seed, static_cast<std::uint64_t>(t)));
    return out;
}

Seq sample_fixed_type(const Vec& pmf, int n, std::uint64_t seed, std::uint64_t stream) {
    require(is_pmf(pmf, 1e-9), "sample_fixed_type: not a pmf");
    Seq seq;
    seq.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index u = 0; u < pmf.size(); ++u) {
        const double exact = pmf(u) * n;
        const long count = std::lround(exact);
        require(std::abs(exact - static_cast<double>(count)) <= 1e-9,
                "sample_fixed_type: non-integral type request");
        seq.insert(seq.end(), static_cast<std::size_t>(count), static_cast<int>(u));
    }
    require(static_cast<int>(seq.size()) == n, "sample_fixed_type: counts do not sum to n");

    CounterRng rng(seed, stream);
    for (std::size_t i = seq.size(); i > 1; --i)
        std::swap(seq[i - 1], seq[rng.next_below(i)]);
    return seq;
}

Vec round_to_type(const Vec& pmf, int n) {
    require(is_pmf(pmf, 1e-9), "round_to_type: not a pmf");
    require(n >= 1, "round_to_type: n must be >= 1");
    const Eigen::Index m = pmf.size();
    VecI counts(m);
    std::vector<std::pair<double, int>> remainders;  // (-remainder, symbol)
    int assigned = 0;
    for (Eigen::Index u = 0; u < m; ++u) {
        const double exact = pmf(u) * n;
        counts(u) = static_cast<int>(std::floor(exact));
        assigned += counts(u);
        remainders.emplace_back(-(exact - std::floor(exact)), static_cast<int>(u));
    }
    std::sort(remainders.begin(), remainders.end());  // largest remainder, then lowest index
    for (int k = 0; k < n - assigned; ++k) ++counts(remainders[static_cast<std::size_t>(k)].second);
    return counts.cast<double>() / static_cast<double>(n);
}

}  // namespace ucr

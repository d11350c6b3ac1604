#include "ucr/lab.hpp"

#include "ucr/converse.hpp"
#include "ucr/parallel.hpp"
#include "ucr/protocol.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ucr::lab {
namespace {

namespace fs = std::filesystem;

double need_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw SchemaError("missing or non-numeric field: " + key);
    return j[key].get<double>();
}

std::uint64_t need_seed(const json& j) {
    if (!j.contains("seed") || !j["seed"].is_number_integer() ||
        (j["seed"].is_number_integer() && !j["seed"].is_number_unsigned() &&
         j["seed"].get<long long>() < 0))
        throw SchemaError("config must carry a nonnegative integer seed");
    return j["seed"].get<std::uint64_t>();
}

std::vector<double> epsilon_grid(const json& cfg) {
    std::vector<double> eps;
    if (!cfg.contains("epsilon")) throw SchemaError("missing field: epsilon");
    const json& e = cfg["epsilon"];
    if (e.is_number()) {
        eps.push_back(e.get<double>());
    } else if (e.is_array()) {
        for (const auto& v : e) {
            if (!v.is_number()) throw SchemaError("epsilon entries must be numbers");
            eps.push_back(v.get<double>());
        }
    } else {
        throw SchemaError("epsilon must be a number or an array");
    }
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0 && eps[i] < 1.0)) throw SchemaError("epsilon values must lie in (0,1)");
        if (i > 0 && eps[i] < eps[i - 1]) throw SchemaError("epsilon grid must be sorted ascending");
    }
    return eps;
}

std::vector<int> blocklength_grid(const json& cfg) {
    if (!cfg.contains("blocklengths") || !cfg["blocklengths"].is_array() ||
        cfg["blocklengths"].empty())
        throw SchemaError("missing or empty field: blocklengths");
    std::vector<int> ns;
    for (const auto& v : cfg["blocklengths"]) {
        if (!v.is_number_integer() || v.get<int>() < 1)
            throw SchemaError("blocklengths must be positive integers");
        ns.push_back(v.get<int>());
    }
    return ns;
}

Mat parse_matrix(const json& rows) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array())
        throw SchemaError("expected a matrix (array of arrays)");
    Mat m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size()) throw SchemaError("ragged matrix");
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c].get<double>();
    }
    return m;
}

json round_tree(json v) {
    if (v.is_number_float()) return json(rounded(v.get<double>()));
    if (v.is_object())
        for (auto& [_, child] : v.items()) child = round_tree(child);
    if (v.is_array())
        for (auto& child : v) child = round_tree(child);
    return v;
}

void write_json(const fs::path& path, json result) {
    result["schema"] = kSchema;
    write_text_atomic(path.string(), round_tree(std::move(result)).dump(2) + "\n");
}

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

fs::path out_dir_of(const json& cfg, const RunOverrides& ov) {
    fs::path dir = ov.out_dir ? *ov.out_dir
                              : cfg.value("out", std::string("results"));
    fs::create_directories(dir);
    return dir;
}

// --- jobs -----------------------------------------------------------------

int job_spectrum(const json& cfg, const fs::path& dir, std::ostream& log) {
    auto channel = parse_channel(cfg.at("channel"));
    auto input = parse_input(cfg.contains("input") ? cfg["input"] : json(), channel);
    auto ns = blocklength_grid(cfg);
    const int trials = static_cast<int>(need_number(cfg, "trials"));
    const std::uint64_t seed = need_seed(cfg);
    const double band = cfg.value("band", 0.03);

    auto est = estimate_spectrum(input, channel, ns, trials, seed);

    std::ostringstream csv;
    csv << "n,density_bits\n";
    for (std::size_t b = 0; b < est.blocklengths.size(); ++b)
        for (double s : est.samples[b])
            csv << est.blocklengths[b] << ',' << csv_num(s) << '\n';
    write_text_atomic((dir / "spectrum_samples.csv").string(), csv.str());

    json thresholds = json::array();
    for (double eps : epsilon_grid(cfg)) {
        auto th = thresholds_from_spectrum(est, eps, band);
        thresholds.push_back({{"epsilon", eps},
                              {"l_hat", th.l_hat},
                              {"u_hat", th.u_hat},
                              {"l_hat_top2", th.l_hat_top2},
                              {"u_hat_top2", th.u_hat_top2}});
    }
    json result = {{"job", "spectrum"},
                   {"seed", seed},
                   {"trials", trials},
                   {"blocklengths", ns},
                   {"band", band},
                   {"thresholds", thresholds}};
    write_json(dir / "spectrum.json", result);
    log << "spectrum: " << thresholds.size() << " epsilon points, " << trials
        << " trials/blocklength -> " << (dir / "spectrum.json").string() << "\n";
    return 0;
}

int job_bounds(const json& cfg, const fs::path& dir, std::ostream& log) {
    auto src = parse_source(cfg.at("source"));
    auto channel = parse_channel(cfg.at("channel"));
    std::vector<InputProcess> candidates;
    candidates.push_back(parse_input(cfg.contains("input") ? cfg["input"] : json(), channel));

    SpectrumConfig scfg;
    scfg.blocklengths = blocklength_grid(cfg);
    scfg.trials = static_cast<int>(need_number(cfg, "trials"));
    scfg.seed = need_seed(cfg);
    scfg.band = cfg.value("band", 0.03);

    CrOptions opt;
    opt.card_u = cfg.value("card_u", 3);
    opt.grid_step = cfg.value("grid_step", 0.05);
    opt.seed = scfg.seed;
    const std::string method = cfg.value("method", std::string("ascent"));

    json rows = json::array();
    for (double eps : epsilon_grid(cfg)) {
        auto b = epsilon_ucr_bounds(src, candidates, channel, eps, scfg, opt, method);
        rows.push_back({{"epsilon", eps},
                        {"lower_bits", b.lower_bits},
                        {"upper_bits", b.upper_bits},
                        {"l_hat", b.thresholds.l_hat},
                        {"u_hat", b.thresholds.u_hat}});
        log << "bounds: epsilon=" << eps << " lower_bits=" << rounded(b.lower_bits)
            << " upper_bits=" << rounded(b.upper_bits) << "\n";
    }
    json result = {{"job", "bounds"}, {"seed", scfg.seed}, {"bounds", rows}};
    write_json(dir / "bounds.json", result);
    return 0;
}

int job_simulate(const json& cfg, const fs::path& dir, std::ostream& log) {
    ProtocolConfig pc{parse_source(cfg.at("source")),
                      AuxiliaryChannel{parse_matrix(cfg.at("aux"))},
                      parse_channel(cfg.at("channel"))};
    pc.n = static_cast<int>(need_number(cfg, "n"));
    pc.mu = cfg.value("mu", 0.02);
    pc.delta = cfg.value("delta", 0.05);
    pc.trials = static_cast<int>(need_number(cfg, "trials"));
    pc.seed = need_seed(cfg);
    if (cfg.contains("n1")) pc.n1 = cfg["n1"].get<int>();
    if (cfg.contains("n2")) pc.n2 = cfg["n2"].get<int>();
    if (cfg.contains("channel_budget")) pc.channel_budget = cfg["channel_budget"].get<double>();
    pc.eps_target = cfg.value("eps_target", pc.eps_target);
    pc.beta_target = cfg.value("beta_target", pc.beta_target);
    pc.delta_target = cfg.value("delta_target", pc.delta_target);
    pc.c_target = cfg.value("c_target", pc.c_target);
    pc.h_target = cfg.value("h_target", pc.h_target);

    std::vector<TrialEvent> events;
    auto r = run_protocol(pc, &events);

    std::ostringstream csv;
    csv << "trial,bin_sent,bin_decoded,k_index,l_index,typicality_fail,row_collision,"
           "channel_error\n";
    for (const auto& e : events)
        csv << e.trial << ',' << e.bin_sent << ',' << e.bin_decoded << ',' << e.k_index << ','
            << e.l_index << ',' << int(e.typicality_fail) << ',' << int(e.row_collision) << ','
            << int(e.channel_error) << '\n';
    write_text_atomic((dir / "protocol_events.csv").string(), csv.str());

    json result = {{"job", "simulate"},
                   {"seed", pc.seed},
                   {"n", pc.n},
                   {"trials", pc.trials},
                   {"key_space", r.key_space},
                   {"p_disagree", r.p_disagree},
                   {"p_disagree_half_width", r.p_disagree_half_width},
                   {"p_typicality_fail", r.p_typicality_fail},
                   {"p_row_collision", r.p_row_collision},
                   {"p_channel_error", r.p_channel_error},
                   {"entropy_rate", r.entropy_rate},
                   {"cardinality_rate", r.cardinality_rate},
                   {"uniformity_gap", r.uniformity_gap},
                   {"cond_error", r.cond1_error},
                   {"cond_cardinality", r.cond2_cardinality},
                   {"cond_uniformity", r.cond3_uniformity},
                   {"cond_rate", r.cond4_rate},
                   {"estimator_warning", r.estimator_warning},
                   {"rate_warning", r.rate_warning}};
    write_json(dir / "protocol.json", result);
    log << "simulate: |K|=" << r.key_space << " p_disagree=" << rounded(r.p_disagree) << " +/- "
        << rounded(r.p_disagree_half_width) << "\n";
    return 0;
}

int job_verify(const json& cfg, const fs::path& dir, std::ostream& log) {
    const std::uint64_t seed = need_seed(cfg);
    const int fixtures = cfg.value("fixtures", 100);
    auto report = run_verification_suite(seed, fixtures);
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"name", e.name},
                           {"fixtures", e.fixtures},
                           {"failures", e.failures},
                           {"max_identity_error", e.max_identity_error}});
        log << "verify: " << e.name << " " << (e.fixtures - e.failures) << "/" << e.fixtures
            << (e.failures == 0 ? " ok" : " FAILED") << "\n";
    }
    json result = {{"job", "verify"}, {"seed", seed}, {"ok", report.ok}, {"lemmas", entries}};
    write_json(dir / "verify.json", result);
    if (!report.ok) throw VerifyError("lemma suite reported gated failures");
    return 0;
}

int job_sweep(const json& cfg, const fs::path& dir, std::ostream& log) {
    auto src = parse_source(cfg.at("source"));
    auto channel = parse_channel(cfg.at("channel"));
    std::vector<InputProcess> candidates;
    candidates.push_back(parse_input(cfg.contains("input") ? cfg["input"] : json(), channel));

    SpectrumConfig scfg;
    scfg.blocklengths = blocklength_grid(cfg);
    scfg.trials = static_cast<int>(need_number(cfg, "trials"));
    scfg.seed = need_seed(cfg);
    scfg.band = cfg.value("band", 0.03);
    CrOptions opt;
    opt.card_u = cfg.value("card_u", 3);
    opt.seed = scfg.seed;
    const std::string method = cfg.value("method", std::string("ascent"));

    std::ostringstream csv;
    csv << "epsilon,l_hat,u_hat,lower_bits,upper_bits\n";
    json rows = json::array();
    for (double eps : epsilon_grid(cfg)) {
        auto b = epsilon_ucr_bounds(src, candidates, channel, eps, scfg, opt, method);
        csv << csv_num(eps) << ',' << csv_num(b.thresholds.l_hat) << ','
            << csv_num(b.thresholds.u_hat) << ',' << csv_num(b.lower_bits) << ','
            << csv_num(b.upper_bits) << '\n';
        rows.push_back({{"epsilon", eps},
                        {"l_hat", b.thresholds.l_hat},
                        {"u_hat", b.thresholds.u_hat},
                        {"lower_bits", b.lower_bits},
                        {"upper_bits", b.upper_bits}});
    }
    write_text_atomic((dir / "sweep.csv").string(), csv.str());
    write_json(dir / "sweep.json", json{{"job", "sweep"}, {"seed", scfg.seed}, {"rows", rows}});
    log << "sweep: " << rows.size() << " epsilon points -> " << (dir / "sweep.csv").string()
        << "\n";
    return 0;
}

}  // namespace

double rounded(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read config: " + path);
    json cfg = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (cfg.is_discarded()) throw SchemaError("config is not valid JSON: " + path);
    if (!cfg.is_object()) throw SchemaError("config must be a JSON object");
    return cfg;
}

JointSource parse_source(const json& spec) {
    if (spec.is_object() && spec.contains("dsbs")) return JointSource::dsbs(spec["dsbs"].get<double>());
    if (spec.is_object() && spec.contains("pmf")) {
        try {
            return JointSource(parse_matrix(spec["pmf"]));
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("bad source pmf: ") + e.what());
        }
    }
    throw SchemaError("source must carry either \"dsbs\" or \"pmf\"");
}

ChannelFamily parse_channel(const json& spec) {
    if (!spec.is_object() || !spec.contains("type"))
        throw SchemaError("channel must carry a type");
    const std::string type = spec["type"].get<std::string>();
    try {
        if (type == "bsc") return ChannelFamily::bsc(need_number(spec, "p"));
        if (type == "noiseless")
            return ChannelFamily::noiseless(static_cast<int>(need_number(spec, "alphabet")));
        if (type == "mixed_bsc")
            return ChannelFamily::mixed_bsc(need_number(spec, "weight"), need_number(spec, "pa"),
                                            need_number(spec, "pb"));
        if (type == "kernel")
            return ChannelFamily(ChannelFamily::Memoryless{parse_matrix(spec.at("matrix"))});
        if (type == "mixed")
            return ChannelFamily(ChannelFamily::Mixed{need_number(spec, "weight"),
                                                      parse_matrix(spec.at("a")),
                                                      parse_matrix(spec.at("b"))});
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("bad channel spec: ") + e.what());
    }
    throw SchemaError("unknown channel type: " + type);
}

InputProcess parse_input(const json& spec, const ChannelFamily& channel) {
    if (spec.is_null() || (spec.is_object() && spec.empty()))
        return InputProcess::uniform(channel.input_alphabet());
    if (spec.is_object() && spec.contains("pmf")) {
        const auto& arr = spec["pmf"];
        if (!arr.is_array()) throw SchemaError("input pmf must be an array");
        Vec p(arr.size());
        for (std::size_t i = 0; i < arr.size(); ++i) p(i) = arr[i].get<double>();
        try {
            return InputProcess(InputProcess::IID{p});
        } catch (const std::invalid_argument& e) {
            throw SchemaError(std::string("bad input pmf: ") + e.what());
        }
    }
    if (spec.is_object() && spec.value("type", std::string()) == "uniform")
        return InputProcess::uniform(channel.input_alphabet());
    throw SchemaError("input must be empty, {\"type\":\"uniform\"} or {\"pmf\":[...]}");
}

int run_job(json cfg, const RunOverrides& ov, std::ostream& log) {
    try {
        if (ov.seed) cfg["seed"] = *ov.seed;
        thread_budget() = ov.threads;
        if (!cfg.contains("job") || !cfg["job"].is_string())
            throw SchemaError("config must carry a job name");
        const std::string job = cfg["job"].get<std::string>();
        const fs::path dir = out_dir_of(cfg, ov);
        if (job == "spectrum") return job_spectrum(cfg, dir, log);
        if (job == "bounds") return job_bounds(cfg, dir, log);
        if (job == "simulate") return job_simulate(cfg, dir, log);
        if (job == "verify") return job_verify(cfg, dir, log);
        if (job == "sweep") return job_sweep(cfg, dir, log);
        throw SchemaError("unknown job: " + job);
    } catch (const SchemaError& e) {
        log << "error (schema): " << e.what() << "\n";
        return 2;
    } catch (const VerifyError& e) {
        log << "error (verification): " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        log << "error (numeric): " << e.what() << "\n";
        return 3;
    }
}

int run_job(const std::string& config_path, const RunOverrides& ov, std::ostream& log) {
    try {
        return run_job(load_config(config_path), ov, log);
    } catch (const SchemaError& e) {
        log << "error (schema): " << e.what() << "\n";
        return 2;
    }
}

}  // namespace ucr::lab

#pragma once

#include "ucr/capacity.hpp"
#include "ucr/source.hpp"
#include "ucr/spectrum.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace ucr::lab {

using json = nlohmann::json;

inline constexpr const char* kSchema = "ucr-lab/1";

/// Config/schema problems; mapped to exit code 2.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// A gated lemma-suite failure; mapped to exit code 4.
struct VerifyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Double squeezed through %.12g so that serialized results are stable.
double rounded(double v);

/// Whole-file write via temp + rename in the destination directory.
void write_text_atomic(const std::string& path, const std::string& content);

json load_config(const std::string& path);

JointSource parse_source(const json& spec);
ChannelFamily parse_channel(const json& spec);
InputProcess parse_input(const json& spec, const ChannelFamily& channel);

struct RunOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;  // 0 = hardware default
};

/// Executes the job named in the config ("spectrum", "bounds", "simulate",
/// "verify", "sweep"), writes result files, prints a one-line summary per job,
/// and returns the process exit code (0 ok, 2 schema, 3 numeric, 4 lemma
/// gate).
int run_job(const std::string& config_path, const RunOverrides& overrides, std::ostream& log);

/// Same, but starting from an already-parsed config (used by tests).
int run_job(json config, const RunOverrides& overrides, std::ostream& log);

}  // namespace ucr::lab

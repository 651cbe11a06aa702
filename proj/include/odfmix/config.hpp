#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odfmix/grid.hpp"
#include "odfmix/io.hpp"
#include "odfmix/tempering.hpp"

namespace odfmix {

/// Everything a command needs to run reproducibly. Relative paths are taken
/// relative to the working directory.
struct RunConfig {
    std::filesystem::path data;
    CsvFormat format = CsvFormat::Quaternion;
    std::string crystal = "cubic-24";   ///< catalog name or group file
    std::string specimen = "cyclic-2";
    std::optional<std::uint64_t> seed;
    Hyperparams hyper;
    SamplerConfig sampler;  ///< seed and forced_uniform are mirrored from above
    std::vector<double> ladder = TemperatureLadder::standard().temps();
    SwapRule swap_rule = SwapRule::Corrected;
    std::optional<std::filesystem::path> table;
    std::filesystem::path out = "odfmix-out";
    std::size_t ppd_draws = 0;    ///< 0: ten times the number of observations
    std::optional<double> kappa;  ///< fixed kernel concentration for kde and ppd
    GridSpec grid;
    std::string generator = "santafe";
    std::size_t simulate_n = 10000;
    std::optional<MixtureState> simulate_state;
};

/// What a command reads, for validation.
enum class Command { Fit, PtFit, Ppd, Kde, Simulate, Table, Export, Report };

/// Parses a JSON run config over the defaults. Collects every problem
/// (syntax, unknown keys, wrong types) and throws ConfigError listing all.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Semantic problems for the given command: ranges, orderings, missing seed,
/// missing or unreadable files, unknown symmetry groups. Empty when valid.
std::vector<std::string> config_problems(const RunConfig& c, Command command);

/// Throws ConfigError when config_problems() is non-empty.
void validate_config(const RunConfig& c, Command command);

/// Catalog name, or a file listing the elements.
SymmetryGroup resolve_group(const std::string& name_or_path);

/// Canonical JSON of the full effective config (every field, fixed key order).
std::string canonical_config_json(const RunConfig& c);
/// FNV-1a of canonical_config_json().
std::uint64_t config_hash(const RunConfig& c);
std::string hex64(std::uint64_t v);

/// Machine-readable record of a run: enough to repeat it exactly.
struct Manifest {
    std::string command;
    const RunConfig* config = nullptr;
    std::vector<std::string> outputs;
    std::string table_provenance;
    /// Extra command-specific fields as (key, JSON text).
    std::vector<std::pair<std::string, std::string>> extra;
};

std::string manifest_json(const Manifest& m);

}  // namespace odfmix

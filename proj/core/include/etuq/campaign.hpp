#pragma once

#include "etuq/sparse_grid.hpp"
#include "etuq/uq.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace etuq {

struct CampaignConfig {
    std::filesystem::path model;
    std::string method = "compare";  ///< mc | sg | tt | compare
    std::size_t mc_samples = 20000;
    std::uint64_t mc_seed = 20240917;
    std::vector<int> sg_levels{1, 2};
    Growth sg_growth = Growth::smolyak;
    std::vector<int> tt_levels{1};
    std::vector<int> tt_sweeps{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double tt_tolerance = 1e-10;
    std::size_t tt_rank_cap = 64;
    std::uint64_t tt_seed = 1;
    std::filesystem::path output = "results";
    int threads = 1;
    /// Reference moments for error columns when no MC run is part of the campaign.
    std::optional<MomentEstimate> reference;

    /// Throws ConfigError.
    void validate() const;
};

/// Relative paths inside the document are resolved against `base`.
CampaignConfig campaign_config_from_json(const std::string& text, const std::filesystem::path& base = {});
CampaignConfig load_campaign_config(const std::filesystem::path& path);

/// One manifest line; level and sweeps are -1 and errors NaN when not applicable.
struct ManifestRow {
    std::string method;
    int level = -1;
    int sweeps = -1;
    std::size_t solver_calls = 0;
    double mean = 0.0;
    double std = 0.0;
    double rel_err_mean = 0.0;
    double rel_err_std = 0.0;
};

inline constexpr const char* kManifestHeader =
    "method,level,sweeps,solver_calls,mean_K,std_K,rel_err_mean_pct,rel_err_std_pct";

void write_manifest(std::ostream& os, const std::vector<ManifestRow>& rows);
/// Throws ConfigError on a malformed manifest.
std::vector<ManifestRow> read_manifest(std::istream& is);

/// Aligned table sorted by method, level, sweeps; errors below 1.0 print as "<1.0".
std::string render_report(std::vector<ManifestRow> rows);

struct CampaignResult {
    std::vector<ManifestRow> rows;
    std::vector<MomentEstimate> estimates;
};

/// Runs the configured estimators against `oracle`, writing manifest.csv and
/// runs/*.json under config.output as rows complete. `compare` runs the MC
/// reference first, then every SG level and every TT (level, sweeps) pair.
CampaignResult run_campaign(const CampaignConfig& config, QoIOracle& oracle, const RandomVector& rv,
                            std::ostream* log = nullptr);

/// Loads the model named by the config and runs the campaign on it.
CampaignResult run_campaign(const CampaignConfig& config, std::ostream* log = nullptr);

} // namespace etuq

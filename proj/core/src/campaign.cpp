#include "etuq/campaign.hpp"

#include "etuq/error.hpp"
#include "etuq/model_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace etuq {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
T read(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

} // namespace

void CampaignConfig::validate() const {
    if (method != "mc" && method != "sg" && method != "tt" && method != "compare")
        throw ConfigError("method must be one of mc, sg, tt, compare (got '" + method + "')");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (output.empty()) throw ConfigError("output directory must be set");
    const bool mc = method == "mc" || method == "compare";
    const bool sg = method == "sg" || method == "compare";
    const bool tt = method == "tt" || method == "compare";
    if (mc && mc_samples < 2) throw ConfigError("mc.samples must be >= 2");
    if (sg) {
        if (sg_levels.empty()) throw ConfigError("sg.levels must not be empty");
        for (int l : sg_levels)
            if (l < 0) throw ConfigError("sg.levels must be >= 0");
    }
    if (tt) {
        if (tt_levels.empty()) throw ConfigError("tt.levels must not be empty");
        if (tt_sweeps.empty()) throw ConfigError("tt.sweeps must not be empty");
        for (int l : tt_levels)
            if (l < 1) throw ConfigError("tt.levels must be >= 1");
        for (int s : tt_sweeps)
            if (s < 1) throw ConfigError("tt.sweeps must be >= 1");
        if (!(tt_tolerance > 0.0)) throw ConfigError("tt.tolerance must be positive");
        if (tt_rank_cap < 1) throw ConfigError("tt.rank_cap must be >= 1");
    }
    if (reference && (reference->mean == 0.0 || !(reference->std > 0.0)))
        throw ConfigError("reference mean must be nonzero and std positive");
}

CampaignConfig campaign_config_from_json(const std::string& text, const std::filesystem::path& base) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("campaign config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("campaign config: expected an object");
    CampaignConfig c;
    if (!root.contains("model")) throw ConfigError("campaign config: missing key 'model'");
    auto resolve = [&](const std::filesystem::path& p) { return p.is_relative() && !base.empty() ? base / p : p; };
    c.model = resolve(read<std::string>(root, "model", "", "config"));
    c.method = read<std::string>(root, "method", c.method, "config");
    c.output = resolve(read<std::string>(root, "output", c.output.string(), "config"));
    c.threads = read<int>(root, "threads", c.threads, "config");
    if (root.contains("mc")) {
        const json& m = root.at("mc");
        c.mc_samples = read<std::size_t>(m, "samples", c.mc_samples, "mc");
        c.mc_seed = read<std::uint64_t>(m, "seed", c.mc_seed, "mc");
    }
    if (root.contains("sg")) {
        const json& s = root.at("sg");
        c.sg_levels = read<std::vector<int>>(s, "levels", c.sg_levels, "sg");
        const std::string growth = read<std::string>(s, "growth", "smolyak", "sg");
        if (growth == "smolyak")
            c.sg_growth = Growth::smolyak;
        else if (growth == "total_degree")
            c.sg_growth = Growth::total_degree;
        else
            throw ConfigError("sg.growth must be smolyak or total_degree");
    }
    if (root.contains("tt")) {
        const json& t = root.at("tt");
        c.tt_levels = read<std::vector<int>>(t, "levels", c.tt_levels, "tt");
        c.tt_sweeps = read<std::vector<int>>(t, "sweeps", c.tt_sweeps, "tt");
        c.tt_tolerance = read<double>(t, "tolerance", c.tt_tolerance, "tt");
        c.tt_rank_cap = read<std::size_t>(t, "rank_cap", c.tt_rank_cap, "tt");
        c.tt_seed = read<std::uint64_t>(t, "seed", c.tt_seed, "tt");
    }
    if (root.contains("reference")) {
        MomentEstimate ref;
        ref.method = "reference";
        ref.mean = read<double>(root.at("reference"), "mean_K", 0.0, "reference");
        ref.std = read<double>(root.at("reference"), "std_K", 0.0, "reference");
        c.reference = ref;
    }
    c.validate();
    return c;
}

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open campaign config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return campaign_config_from_json(ss.str(), path.parent_path());
}

namespace {

std::string format_double(double v, int decimals) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string format_int(long long v) { return v < 0 ? std::string() : std::to_string(v); }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    if (s.empty()) return kNaN;
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw ConfigError(where + ": trailing characters in '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError(where + ": not a number: '" + s + "'");
    }
}

long long parse_int(const std::string& s, const std::string& where) {
    if (s.empty()) return -1;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size() || v < 0) throw ConfigError(where + ": invalid integer '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError(where + ": invalid integer '" + s + "'");
    }
}

} // namespace

void write_manifest(std::ostream& os, const std::vector<ManifestRow>& rows) {
    os << kManifestHeader << '\n';
    for (const auto& r : rows)
        os << r.method << ',' << format_int(r.level) << ',' << format_int(r.sweeps) << ',' << r.solver_calls << ','
           << format_double(r.mean, 10) << ',' << format_double(r.std, 10) << ',' << format_double(r.rel_err_mean, 6)
           << ',' << format_double(r.rel_err_std, 6) << '\n';
}

std::vector<ManifestRow> read_manifest(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("manifest: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kManifestHeader) throw ConfigError("manifest: unexpected header '" + line + "'");
    std::vector<ManifestRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        const std::string where = "manifest line " + std::to_string(lineno);
        if (f.size() != 8) throw ConfigError(where + ": expected 8 fields");
        ManifestRow r;
        r.method = f[0];
        if (r.method.empty()) throw ConfigError(where + ": empty method");
        r.level = static_cast<int>(parse_int(f[1], where));
        r.sweeps = static_cast<int>(parse_int(f[2], where));
        const long long calls = parse_int(f[3], where);
        if (calls < 0) throw ConfigError(where + ": solver_calls missing");
        r.solver_calls = static_cast<std::size_t>(calls);
        r.mean = parse_double(f[4], where);
        r.std = parse_double(f[5], where);
        if (std::isnan(r.mean) || std::isnan(r.std)) throw ConfigError(where + ": mean_K and std_K are required");
        r.rel_err_mean = parse_double(f[6], where);
        r.rel_err_std = parse_double(f[7], where);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string render_report(std::vector<ManifestRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ManifestRow& a, const ManifestRow& b) {
        if (a.method != b.method) return a.method < b.method;
        if (a.level != b.level) return a.level < b.level;
        if (a.sweeps != b.sweeps) return a.sweeps < b.sweeps;
        return a.solver_calls < b.solver_calls;
    });
    auto err = [](double v) {
        if (std::isnan(v)) return std::string("-");
        if (v < 1.0) return std::string("<1.0");
        return format_double(v, 2);
    };
    const std::vector<std::string> head{"method", "level", "sweeps", "calls", "mean [K]", "std [K]", "err mean [%]",
                                        "err std [%]"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        cells.push_back({r.method, r.level < 0 ? "-" : std::to_string(r.level),
                         r.sweeps < 0 ? "-" : std::to_string(r.sweeps), std::to_string(r.solver_calls),
                         format_double(r.mean, 2), format_double(r.std, 2), err(r.rel_err_mean), err(r.rel_err_std)});
    }
    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
        for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << "  ";
            if (c == 0)
                os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
            else
                os << std::right << std::setw(static_cast<int>(width[c])) << row[c];
        }
        os << '\n';
    };
    emit(head);
    std::size_t total = 0;
    for (auto w : width) total += w;
    os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    for (const auto& row : cells) emit(row);
    return os.str();
}

namespace {

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Recorder {
public:
    Recorder(const CampaignConfig& config, std::ostream* log) : config_(config), log_(log) {
        std::filesystem::create_directories(config.output / "runs");
        flush();
    }

    void add(const MomentEstimate& est, const std::optional<MomentEstimate>& reference, double seconds,
             const GreedyCrossDiagnostics* diag) {
        ManifestRow row;
        row.method = est.method;
        row.level = est.level;
        row.sweeps = est.sweeps;
        row.solver_calls = est.solver_calls;
        row.mean = est.mean;
        row.std = est.std;
        row.rel_err_mean = kNaN;
        row.rel_err_std = kNaN;
        if (reference) {
            const RelativeErrors e = relative_errors(est, *reference);
            row.rel_err_mean = e.mean_pct;
            row.rel_err_std = e.std_pct;
        }
        result.rows.push_back(row);
        result.estimates.push_back(est);
        flush();

        json doc = json::parse(estimate_json(est));
        doc["rel_err_mean_pct"] = reference ? json(row.rel_err_mean) : json(nullptr);
        doc["rel_err_std_pct"] = reference ? json(row.rel_err_std) : json(nullptr);
        doc["metadata"] = {{"finished_utc", utc_now()}, {"wall_seconds", seconds}, {"threads", config_.threads},
                           {"model", config_.model.string()}};
        if (diag) doc["cross"] = json::parse(diagnostics_json(*diag));
        std::string name = est.method;
        if (est.level >= 0) name += "_l" + std::to_string(est.level);
        if (est.sweeps >= 0) name += "_s" + std::to_string(est.sweeps);
        std::ofstream(config_.output / "runs" / (name + ".json")) << doc.dump(2) << '\n';
        if (log_) {
            *log_ << std::left << std::setw(14) << name << " calls=" << est.solver_calls << " mean=" << std::fixed
                  << std::setprecision(4) << est.mean << " std=" << est.std << std::defaultfloat << " ("
                  << std::setprecision(3) << seconds << " s)\n";
            log_->flush();
        }
    }

    CampaignResult result;

private:
    void flush() {
        std::ofstream out(config_.output / "manifest.csv");
        if (!out) throw ConfigError("cannot write " + (config_.output / "manifest.csv").string());
        write_manifest(out, result.rows);
    }

    const CampaignConfig& config_;
    std::ostream* log_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

CampaignResult run_campaign(const CampaignConfig& config, QoIOracle& oracle, const RandomVector& rv,
                            std::ostream* log) {
    config.validate();
    oracle.set_threads(config.threads);
    Recorder rec(config, log);
    std::optional<MomentEstimate> reference = config.reference;

    const bool all = config.method == "compare";
    if (all || config.method == "mc") {
        const auto t0 = std::chrono::steady_clock::now();
        const MomentEstimate mc = mc_estimate(oracle, rv, config.mc_samples, config.mc_seed);
        if (all || !reference) reference = mc;
        rec.add(mc, reference, seconds_since(t0), nullptr);
    }
    if (all || config.method == "sg") {
        for (int level : config.sg_levels) {
            const auto t0 = std::chrono::steady_clock::now();
            const MomentEstimate est = sg_estimate(oracle, rv, level, config.sg_growth);
            rec.add(est, reference, seconds_since(t0), nullptr);
        }
    }
    if (all || config.method == "tt") {
        for (int level : config.tt_levels)
            for (int sweeps : config.tt_sweeps) {
                TTEstimateOptions opt;
                opt.level = level;
                opt.sweeps = sweeps;
                opt.tolerance = config.tt_tolerance;
                opt.rank_cap = config.tt_rank_cap;
                opt.seed = config.tt_seed;
                GreedyCrossDiagnostics diag;
                const auto t0 = std::chrono::steady_clock::now();
                const MomentEstimate est = tt_estimate(oracle, rv, opt, &diag);
                rec.add(est, reference, seconds_since(t0), &diag);
            }
    }
    return std::move(rec.result);
}

CampaignResult run_campaign(const CampaignConfig& config, std::ostream* log) {
    config.validate();
    auto model = std::make_shared<const ETModel>(load_model(config.model));
    const RandomVector rv = RandomVector::uniform(model->wires.size(), model->elongation_support);
    QoIOracle oracle(rv.dim(), make_transient_qoi(model), config.threads);
    return run_campaign(config, oracle, rv, log);
}

} // namespace etuq

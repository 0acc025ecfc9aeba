// Command-line front end: UQ campaigns on the electrothermal desk model.

#include "etuq/campaign.hpp"
#include "etuq/error.hpp"
#include "etuq/model_io.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int run(const std::string& config_path, const std::string& method, const std::string& out, long long seed,
        int threads, bool quiet) {
    etuq::CampaignConfig config = etuq::load_campaign_config(config_path);
    if (!method.empty()) config.method = method;
    if (!out.empty()) config.output = out;
    if (seed >= 0) config.mc_seed = static_cast<std::uint64_t>(seed);
    if (threads != 0) config.threads = threads;
    config.validate();
    const auto result = etuq::run_campaign(config, quiet ? nullptr : &std::cerr);
    std::cout << etuq::render_report(result.rows);
    return 0;
}

int report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw etuq::ConfigError("cannot open manifest " + path);
    std::cout << etuq::render_report(etuq::read_manifest(in));
    return 0;
}

int transient(const std::string& model_path, const std::vector<double>& delta, const std::string& trace) {
    auto model = std::make_shared<const etuq::ETModel>(etuq::load_model(model_path));
    std::vector<double> d = delta;
    if (d.empty()) d.assign(model->wires.size(), model->elongation_support.midpoint());
    if (d.size() == 1) d.assign(model->wires.size(), d.front());
    etuq::ElectroThermalSolver solver(model);
    const auto res = solver.run_transient(d);
    if (res.outside_support) std::cerr << "warning: delta outside the model's elongation support\n";
    if (!trace.empty()) {
        std::ofstream out(trace);
        if (!out) throw etuq::ConfigError("cannot write " + trace);
        etuq::write_trace_csv(out, res.trace);
    }
    std::cout.precision(10);
    std::cout << "T_max = " << res.t_max << " K\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uncertainty quantification for electrothermal bondwire models"};
    app.require_subcommand(1);

    std::string config_path;
    std::string method;
    std::string out;
    long long seed = -1;
    int threads = 0;
    bool quiet = false;
    auto* run_cmd = app.add_subcommand("run", "Run an MC / SG / TT campaign from a JSON config");
    run_cmd->add_option("--config", config_path, "Campaign config (JSON)")->required()->envname("ETUQ_CONFIG");
    run_cmd->add_option("--method", method, "mc, sg, tt or compare (overrides the config)")
        ->check(CLI::IsMember({"mc", "sg", "tt", "compare"}))
        ->envname("ETUQ_METHOD");
    run_cmd->add_option("--out", out, "Output directory (overrides the config)")->envname("ETUQ_OUT");
    run_cmd->add_option("--seed", seed, "Monte Carlo seed (overrides the config)")->envname("ETUQ_SEED");
    run_cmd->add_option("--threads", threads, "Thread budget; 0 keeps the config value")
        ->check(CLI::NonNegativeNumber)
        ->envname("ETUQ_THREADS");
    run_cmd->add_flag("--quiet", quiet, "No progress lines on stderr");

    std::string manifest;
    auto* report_cmd = app.add_subcommand("report", "Print a manifest as a table");
    report_cmd->add_option("manifest", manifest, "manifest.csv")->required();

    std::string model_path;
    std::vector<double> delta;
    std::string trace;
    auto* transient_cmd = app.add_subcommand("transient", "Run one transient and print T_max");
    transient_cmd->add_option("--model", model_path, "Model definition (JSON)")->required();
    transient_cmd->add_option("--delta", delta, "Relative elongations (one value or one per wire)");
    transient_cmd->add_option("--trace", trace, "Write the wire temperature trace as CSV");

    std::string desk_out;
    etuq::DeskOptions desk;
    auto* desk_cmd = app.add_subcommand("desk-model", "Write the built-in desk model definition");
    desk_cmd->add_option("--out", desk_out, "Destination (default: stdout)");
    desk_cmd->add_option("--nodes-xy", desk.nodes_xy, "Nodes along x and y (odd)");
    desk_cmd->add_option("--nodes-z", desk.nodes_z, "Nodes along z");
    desk_cmd->add_option("--wires-per-side", desk.wires_per_side, "1 or 3");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) return run(config_path, method, out, seed, threads, quiet);
        if (*report_cmd) return report(manifest);
        if (*transient_cmd) return transient(model_path, delta, trace);
        if (*desk_cmd) {
            const std::string text = etuq::desk_model_json(desk);
            if (desk_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream(desk_out) << text;
            }
            return 0;
        }
    } catch (const etuq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}

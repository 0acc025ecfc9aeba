#include "etuq/model_io.hpp"

#include "etuq/error.hpp"

#include "json.hpp"

#include <fstream>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace etuq {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return j.at(key);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
    try {
        return require(j, key, where).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    return get<T>(j, key, where);
}

std::size_t node_id(const CartesianGrid& grid, const json& ijk, const std::string& where) {
    std::array<std::size_t, 3> c{};
    try {
        c = ijk.get<std::array<std::size_t, 3>>();
        return grid.node(c[0], c[1], c[2]);
    } catch (const json::exception& e) {
        throw ConfigError(where + ": node must be [i, j, k]: " + e.what());
    } catch (const DomainError&) {
        throw ConfigError(where + ": node outside the grid");
    }
}

} // namespace

ETModel model_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model: invalid JSON: ") + e.what());
    }
    const int version = get<int>(root, "schema_version", "model");
    if (version != kModelSchemaVersion)
        throw ConfigError("model: unsupported schema_version " + std::to_string(version));

    const json& g = require(root, "grid", "model");
    const auto nodes = get<std::array<std::size_t, 3>>(g, "nodes", "grid");
    const auto spacing = get<std::array<double, 3>>(g, "spacing", "grid");
    std::optional<CartesianGrid> grid;
    try {
        grid.emplace(nodes, spacing);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }

    std::vector<Material> materials;
    std::map<std::string, std::size_t> material_id;
    for (const auto& m : require(root, "materials", "model")) {
        Material mat;
        mat.name = get<std::string>(m, "name", "materials[]");
        const std::string where = "materials." + mat.name;
        mat.sigma_ref = get<double>(m, "sigma_ref", where);
        mat.alpha_sigma = get_or<double>(m, "alpha_sigma", 0.0, where);
        mat.lambda_ref = get<double>(m, "lambda_ref", where);
        mat.alpha_lambda = get_or<double>(m, "alpha_lambda", 0.0, where);
        mat.rho_c = get<double>(m, "rho_c", where);
        mat.t_ref = get_or<double>(m, "t_ref", 293.0, where);
        if (!material_id.emplace(mat.name, materials.size()).second)
            throw ConfigError("materials: duplicate name '" + mat.name + "'");
        materials.push_back(std::move(mat));
    }
    auto material_of = [&](const std::string& name, const std::string& where) {
        auto it = material_id.find(name);
        if (it == material_id.end()) throw ConfigError(where + ": unknown material '" + name + "'");
        return it->second;
    };

    const json& regions = require(root, "regions", "model");
    std::vector<std::size_t> cell_material(grid->cell_count(),
                                           material_of(get<std::string>(regions, "default", "regions"), "regions"));
    if (regions.contains("blocks")) {
        for (const auto& b : regions.at("blocks")) {
            const auto mat = material_of(get<std::string>(b, "material", "regions.blocks[]"), "regions.blocks[]");
            const auto lo = get<std::array<std::size_t, 3>>(b, "cells_min", "regions.blocks[]");
            const auto hi = get<std::array<std::size_t, 3>>(b, "cells_max", "regions.blocks[]");
            for (int d = 0; d < 3; ++d)
                if (lo[d] > hi[d] || hi[d] + 1 >= nodes[d]) throw ConfigError("regions.blocks[]: cell range outside grid");
            for (std::size_t z = lo[2]; z <= hi[2]; ++z)
                for (std::size_t y = lo[1]; y <= hi[1]; ++y)
                    for (std::size_t x = lo[0]; x <= hi[0]; ++x) cell_material[grid->cell(x, y, z)] = mat;
        }
    }

    std::vector<Bondwire> wires;
    if (root.contains("wires")) {
        for (const auto& w : root.at("wires")) {
            const std::string where = "wires[" + std::to_string(wires.size()) + "]";
            const json& ends = require(w, "nodes", where);
            if (!ends.is_array() || ends.size() != 2) throw ConfigError(where + ".nodes: need two nodes");
            Bondwire bw;
            bw.node_a = node_id(*grid, ends[0], where);
            bw.node_b = node_id(*grid, ends[1], where);
            bw.area = get<double>(w, "area", where);
            bw.min_length = get<double>(w, "min_length", where);
            bw.material = material_of(get<std::string>(w, "material", where), where);
            wires.push_back(bw);
        }
    }

    std::vector<DirichletGroup> pads;
    for (const auto& p : require(root, "pads", "model")) {
        DirichletGroup group;
        group.name = get_or<std::string>(p, "name", "pad" + std::to_string(pads.size()), "pads[]");
        const std::string where = "pads." + group.name;
        group.voltage = get<double>(p, "voltage", where);
        if (p.contains("nodes"))
            for (const auto& n : p.at("nodes")) group.nodes.push_back(node_id(*grid, n, where));
        if (p.contains("box")) {
            const json& box = p.at("box");
            if (!box.is_array() || box.size() != 2) throw ConfigError(where + ".box: need [min, max]");
            const std::size_t lo = node_id(*grid, box[0], where);
            const std::size_t hi = node_id(*grid, box[1], where);
            const auto a = grid->node_coordinates(lo);
            const auto b = grid->node_coordinates(hi);
            for (std::size_t z = a[2]; z <= b[2]; ++z)
                for (std::size_t y = a[1]; y <= b[1]; ++y)
                    for (std::size_t x = a[0]; x <= b[0]; ++x) group.nodes.push_back(grid->node(x, y, z));
        }
        pads.push_back(std::move(group));
    }

    ETConfig config;
    if (root.contains("config")) {
        const json& c = root.at("config");
        const std::string where = "config";
        config.ambient = get_or(c, "ambient", config.ambient, where);
        config.heat_transfer = get_or(c, "heat_transfer", config.heat_transfer, where);
        config.emissivity = get_or(c, "emissivity", config.emissivity, where);
        config.stefan_boltzmann = get_or(c, "stefan_boltzmann", config.stefan_boltzmann, where);
        config.end_time = get_or(c, "end_time", config.end_time, where);
        config.steps = get_or(c, "steps", config.steps, where);
        config.newton_tolerance = get_or(c, "newton_tolerance", config.newton_tolerance, where);
        config.newton_max_iterations = get_or(c, "newton_max_iterations", config.newton_max_iterations, where);
        config.coupling_tolerance = get_or(c, "coupling_tolerance", config.coupling_tolerance, where);
        config.coupling_max_iterations = get_or(c, "coupling_max_iterations", config.coupling_max_iterations, where);
        config.electric_tolerance = get_or(c, "electric_tolerance", config.electric_tolerance, where);
    }

    Interval support{0.122, 0.218};
    if (root.contains("uncertainty")) {
        const auto s = get<std::array<double, 2>>(root.at("uncertainty"), "support", "uncertainty");
        support = Interval{s[0], s[1]};
    }

    ETModel model{std::move(*grid), std::move(materials), std::move(cell_material), std::move(wires),
                  std::move(pads),  config,               support};
    model.validate();
    return model;
}

ETModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

void write_trace_csv(std::ostream& os, const WireTrace& trace) {
    os << "step,time,wire,T_bw\n";
    const auto old = os.precision(17);
    for (std::size_t s = 0; s < trace.wire_temperatures.size(); ++s)
        for (std::size_t j = 0; j < trace.wire_temperatures[s].size(); ++j)
            os << s << ',' << trace.times.at(s) << ',' << j << ',' << trace.wire_temperatures[s][j] << '\n';
    os.precision(old);
}

std::vector<double> desk_pad_voltages(int wire_count) {
    // One wire driven harder than the rest keeps the hottest wire fixed over
    // the whole support.
    std::vector<double> v(static_cast<std::size_t>(wire_count), 0.050);
    if (!v.empty()) v[0] = 0.080;
    return v;
}

std::string desk_model_json(const DeskOptions& o) {
    if (o.nodes_xy < 9 || o.nodes_xy % 2 == 0) throw ConfigError("desk model: nodes_xy must be odd and >= 9");
    if (o.nodes_z < 3) throw ConfigError("desk model: nodes_z must be >= 3");
    if (o.wires_per_side != 1 && o.wires_per_side != 3) throw ConfigError("desk model: wires_per_side must be 1 or 3");
    const int n = static_cast<int>(o.nodes_xy);
    const int nz = static_cast<int>(o.nodes_z);
    const int c = (n - 1) / 2;
    const int hw = std::max(2, static_cast<int>(std::lround((n - 1) / 5.0)));
    const int gap = std::max(1, (c - hw) / 2);
    const int top = nz - 1;
    const int chip_bottom = std::max(0, nz - 3);
    const int wire_count = 4 * o.wires_per_side;
    const std::vector<double> volts = o.pad_voltages.empty() ? desk_pad_voltages(wire_count) : o.pad_voltages;
    if (volts.size() != static_cast<std::size_t>(wire_count))
        throw ConfigError("desk model: need one pad voltage per wire");

    json root;
    root["schema_version"] = kModelSchemaVersion;
    root["grid"] = {{"nodes", {n, n, nz}},
                    {"spacing", {o.board_xy / (n - 1), o.board_xy / (n - 1), o.board_z / (nz - 1)}}};
    root["materials"] = json::array({
        {{"name", "epoxy"}, {"sigma_ref", 1e-8}, {"alpha_sigma", 0.0}, {"lambda_ref", 0.8},
         {"alpha_lambda", 0.0}, {"rho_c", 1.7e6 * o.rho_c_scale}, {"t_ref", 293.0}},
        {{"name", "silicon"}, {"sigma_ref", 1e6}, {"alpha_sigma", 1e-3}, {"lambda_ref", 148.0},
         {"alpha_lambda", 1.5e-3}, {"rho_c", 1.63e6 * o.rho_c_scale}, {"t_ref", 293.0}},
        {{"name", "gold"}, {"sigma_ref", 4.1e7}, {"alpha_sigma", 3.7e-3}, {"lambda_ref", 315.0},
         {"alpha_lambda", 1e-4}, {"rho_c", 2.49e6 * o.rho_c_scale}, {"t_ref", 293.0}},
    });
    root["regions"] = {{"default", "epoxy"},
                       {"blocks", json::array({{{"material", "silicon"},
                                                {"cells_min", {c - hw, c - hw, chip_bottom}},
                                                {"cells_max", {c + hw - 1, c + hw - 1, nz - 2}}}})}};

    // Side s is side 0 rotated by s quarter turns about the board centre.
    auto rotate = [&](int x, int y, int s) {
        for (int k = 0; k < s; ++k) {
            const int nx = c - (y - c);
            const int ny = c + (x - c);
            x = nx;
            y = ny;
        }
        return std::array<int, 2>{x, y};
    };
    const std::vector<int> offsets = o.wires_per_side == 1 ? std::vector<int>{0} : std::vector<int>{-hw / 2, 0, hw / 2};
    json wires = json::array();
    json pads = json::array();
    for (int j = 0; j < wire_count; ++j) {
        const int side = j % 4;
        const int off = offsets[static_cast<std::size_t>(j / 4)];
        const auto chip = rotate(c + off, c - hw, side);
        const auto pad = rotate(c + off, c - hw - gap, side);
        wires.push_back({{"nodes", {{chip[0], chip[1], top}, {pad[0], pad[1], top}}},
                         {"area", 7.85e-9},
                         {"min_length", 1e-3},
                         {"material", "gold"}});
        pads.push_back({{"name", "pad" + std::to_string(j)},
                        {"voltage", volts[static_cast<std::size_t>(j)]},
                        {"nodes", {{pad[0], pad[1], top}}}});
    }
    pads.push_back({{"name", "ground"},
                    {"voltage", 0.0},
                    {"box", {{c - hw, c - hw, chip_bottom}, {c + hw, c + hw, chip_bottom}}}});
    root["wires"] = wires;
    root["pads"] = pads;
    const ETConfig& k = o.config;
    root["config"] = {{"ambient", k.ambient},
                      {"heat_transfer", k.heat_transfer},
                      {"emissivity", k.emissivity},
                      {"stefan_boltzmann", k.stefan_boltzmann},
                      {"end_time", k.end_time},
                      {"steps", k.steps},
                      {"newton_tolerance", k.newton_tolerance},
                      {"newton_max_iterations", k.newton_max_iterations},
                      {"coupling_tolerance", k.coupling_tolerance},
                      {"coupling_max_iterations", k.coupling_max_iterations},
                      {"electric_tolerance", k.electric_tolerance}};
    root["uncertainty"] = {{"support", {0.122, 0.218}}};
    return root.dump(2) + "\n";
}

ETModel desk_model(const DeskOptions& options) { return model_from_json(desk_model_json(options)); }

} // namespace etuq

#pragma once

#include "etuq/fit.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace etuq {

inline constexpr int kModelSchemaVersion = 1;

/// Parses a model definition; throws ConfigError with the offending key.
ETModel model_from_json(const std::string& text);
ETModel load_model(const std::filesystem::path& path);

/// CSV with columns step,time,wire,T_bw.
void write_trace_csv(std::ostream& os, const WireTrace& trace);

/// Parameters of the shipped desk model: an epoxy board with a silicon chip
/// block in its top layers, grounded at the chip bottom, and wires running
/// from chip-edge nodes to single-node pads, arranged with 4-fold rotational
/// symmetry. Wire j sits on side j % 4.
struct DeskOptions {
    std::size_t nodes_xy = 13;  ///< odd
    std::size_t nodes_z = 4;
    double board_xy = 10e-3;  ///< m
    double board_z = 1e-3;    ///< m
    int wires_per_side = 3;   ///< 1 or 3
    std::vector<double> pad_voltages;  ///< one per wire; empty selects the default drive
    double rho_c_scale = 1.0;
    ETConfig config{};
};

/// Default drive: pad voltages of the shipped model.
std::vector<double> desk_pad_voltages(int wire_count);

std::string desk_model_json(const DeskOptions& options = {});
ETModel desk_model(const DeskOptions& options = {});

} // namespace etuq

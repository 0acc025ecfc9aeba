#include "etuq/tt_io.hpp"

#include "etuq/error.hpp"

#include "json.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

namespace etuq {

namespace {

constexpr std::array<char, 8> kMagic{'E', 'T', 'U', 'Q', 'T', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little, "binary TT container assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value)
{
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out.write(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& in)
{
    char bytes[sizeof(T)];
    if (!in.read(bytes, sizeof(T))) {
        throw ConfigError("read_tt_binary: truncated stream");
    }
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

std::vector<TTCore> allocate(const std::vector<std::uint64_t>& dims, const std::vector<std::uint64_t>& ranks)
{
    if (dims.empty() || ranks.size() != dims.size() + 1) {
        throw ConfigError("TT container: ranks must have N+1 entries");
    }
    std::vector<TTCore> cores;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        if (dims[n] == 0 || ranks[n] == 0 || ranks[n + 1] == 0 || ranks[n] > 1u << 20 || ranks[n + 1] > 1u << 20) {
            throw ConfigError("TT container: invalid dims or ranks");
        }
        cores.emplace_back(static_cast<Eigen::Index>(ranks[n]), dims[n], static_cast<Eigen::Index>(ranks[n + 1]));
    }
    return cores;
}

} // namespace

std::string tt_to_json(const TTTensor& tt)
{
    nlohmann::json doc;
    doc["format"] = "etuq-tt";
    doc["version"] = kTTFormatVersion;
    doc["dims"] = tt.dims();
    std::vector<long long> ranks;
    for (auto r : tt.ranks()) {
        ranks.push_back(static_cast<long long>(r));
    }
    doc["ranks"] = ranks;
    auto& cores = doc["cores"] = nlohmann::json::array();
    for (const auto& core : tt.cores()) {
        std::vector<double> payload;
        payload.reserve(static_cast<std::size_t>(core.rank_left() * core.rank_right()) * core.modes());
        for (Eigen::Index a = 0; a < core.rank_left(); ++a) {
            for (std::size_t i = 0; i < core.modes(); ++i) {
                for (Eigen::Index b = 0; b < core.rank_right(); ++b) {
                    payload.push_back(core(a, i, b));
                }
            }
        }
        cores.push_back(std::move(payload));
    }
    return doc.dump();
}

TTTensor tt_from_json(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        if (doc.at("format") != "etuq-tt") {
            throw ConfigError("tt_from_json: not an etuq-tt document");
        }
        if (doc.at("version").get<int>() != kTTFormatVersion) {
            throw ConfigError("tt_from_json: unsupported version");
        }
        const auto dims = doc.at("dims").get<std::vector<std::uint64_t>>();
        const auto ranks = doc.at("ranks").get<std::vector<std::uint64_t>>();
        auto cores = allocate(dims, ranks);
        const auto& payloads = doc.at("cores");
        if (payloads.size() != cores.size()) {
            throw ConfigError("tt_from_json: core count mismatch");
        }
        for (std::size_t n = 0; n < cores.size(); ++n) {
            const auto payload = payloads[n].get<std::vector<double>>();
            TTCore& core = cores[n];
            if (payload.size() != static_cast<std::size_t>(core.rank_left() * core.rank_right()) * core.modes()) {
                throw ConfigError("tt_from_json: payload size mismatch in core " + std::to_string(n));
            }
            std::size_t p = 0;
            for (Eigen::Index a = 0; a < core.rank_left(); ++a) {
                for (std::size_t i = 0; i < core.modes(); ++i) {
                    for (Eigen::Index b = 0; b < core.rank_right(); ++b) {
                        core(a, i, b) = payload[p++];
                    }
                }
            }
        }
        return TTTensor(std::move(cores));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("tt_from_json: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("tt_from_json: ") + e.what());
    }
}

void write_tt_binary(std::ostream& out, const TTTensor& tt)
{
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kTTFormatVersion);
    put<std::uint32_t>(out, 0);
    put<std::uint64_t>(out, tt.order());
    for (auto d : tt.dims()) {
        put<std::uint64_t>(out, d);
    }
    for (auto r : tt.ranks()) {
        put<std::uint64_t>(out, static_cast<std::uint64_t>(r));
    }
    for (const auto& core : tt.cores()) {
        for (Eigen::Index a = 0; a < core.rank_left(); ++a) {
            for (std::size_t i = 0; i < core.modes(); ++i) {
                for (Eigen::Index b = 0; b < core.rank_right(); ++b) {
                    put<double>(out, core(a, i, b));
                }
            }
        }
    }
}

TTTensor read_tt_binary(std::istream& in)
{
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw ConfigError("read_tt_binary: bad magic");
    }
    if (get<std::uint32_t>(in) != kTTFormatVersion) {
        throw ConfigError("read_tt_binary: unsupported version");
    }
    get<std::uint32_t>(in);
    const auto order = get<std::uint64_t>(in);
    if (order == 0 || order > 4096) {
        throw ConfigError("read_tt_binary: implausible order");
    }
    std::vector<std::uint64_t> dims(order);
    std::vector<std::uint64_t> ranks(order + 1);
    for (auto& d : dims) {
        d = get<std::uint64_t>(in);
    }
    for (auto& r : ranks) {
        r = get<std::uint64_t>(in);
    }
    auto cores = allocate(dims, ranks);
    for (auto& core : cores) {
        for (Eigen::Index a = 0; a < core.rank_left(); ++a) {
            for (std::size_t i = 0; i < core.modes(); ++i) {
                for (Eigen::Index b = 0; b < core.rank_right(); ++b) {
                    core(a, i, b) = get<double>(in);
                }
            }
        }
    }
    try {
        return TTTensor(std::move(cores));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("read_tt_binary: ") + e.what());
    }
}

} // namespace etuq

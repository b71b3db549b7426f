#include "opbmo/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "opbmo/errors.hpp"

namespace opbmo {

using nlohmann::json;

namespace {

constexpr char kSchema[] = "opbmo-symbol/1";
constexpr char kConvention[] = "left-plus";
constexpr char kMagic[8] = {'O', 'P', 'B', 'M', 'O', 'M', 'A', 'T'};
constexpr std::uint32_t kDumpVersion = 1;

json matrix_to_json(const Mat& M) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            row.push_back(json::array({M(r, c).real(), M(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const json& j, const std::string& where, int rows, int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw IoError(where + ": expected " + std::to_string(rows) + " rows");
    Mat M(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw IoError(where + "/" + std::to_string(r) + ": expected " + std::to_string(cols) +
                          " entries");
        for (int c = 0; c < cols; ++c) {
            const json& e = row[c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw IoError(where + "/" + std::to_string(r) + "/" + std::to_string(c) +
                              ": expected an [re, im] pair");
            M(r, c) = Cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return M;
}

/// Shape of a JSON matrix node, for inferring the symbol's value shape.
std::pair<int, int> matrix_shape(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
        throw IoError(where + ": expected a nonempty matrix");
    return {static_cast<int>(j.size()), static_cast<int>(j[0].size())};
}

}  // namespace

std::string symbol_to_json(const HaarSymbol& B) {
    check_haar(B);
    json out;
    out["schema"] = kSchema;
    out["depth"] = B.cfg.depth;
    out["dim"] = B.cfg.dim;
    out["convention"] = kConvention;
    out["mean"] = matrix_to_json(B.mean);
    json coeffs = json::array();
    for (const auto& I : enumerate_intervals(B.cfg)) {
        json c;
        c["level"] = I.level;
        c["pos"] = I.pos;
        c["matrix"] = matrix_to_json(B.coeff(I));
        coeffs.push_back(std::move(c));
    }
    out["coeffs"] = std::move(coeffs);
    return out.dump(2) + "\n";
}

HaarSymbol symbol_from_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(origin + ": " + e.what());
    }
    auto require = [&](const char* key) -> const json& {
        if (!j.contains(key)) throw IoError(origin + ": /" + key + " missing");
        return j[key];
    };
    if (require("schema").get<std::string>() != kSchema)
        throw IoError(origin + ": /schema: expected \"" + kSchema + "\"");
    if (require("convention").get<std::string>() != kConvention)
        throw IoError(origin + ": /convention: expected \"" + kConvention + "\"");
    const json& jd = require("depth");
    const json& jn = require("dim");
    if (!jd.is_number_integer() || !jn.is_number_integer())
        throw IoError(origin + ": /depth and /dim must be integers");
    TreeConfig cfg{jd.get<int>(), jn.get<int>()};
    try {
        check_config(cfg);
    } catch (const std::invalid_argument& e) {
        throw IoError(origin + ": " + e.what());
    }

    const auto [rows, cols] = matrix_shape(require("mean"), origin + ": /mean");
    if (rows != cfg.dim || (cols != cfg.dim && cols != 1))
        throw IoError(origin + ": /mean: shape " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " does not fit dim " + std::to_string(cfg.dim));
    HaarSymbol B = zero_haar(cfg, rows, cols);
    B.mean = matrix_from_json(j["mean"], origin + ": /mean", rows, cols);

    const json& coeffs = require("coeffs");
    if (!coeffs.is_array()) throw IoError(origin + ": /coeffs must be an array");
    std::set<int> seen;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const std::string where = origin + ": /coeffs/" + std::to_string(k);
        const json& c = coeffs[k];
        if (!c.contains("level") || !c.contains("pos") || !c.contains("matrix"))
            throw IoError(where + ": needs level, pos, matrix");
        const DyadicIndex I{c["level"].get<int>(), c["pos"].get<int>()};
        try {
            check_index(cfg, I);
        } catch (const std::invalid_argument& e) {
            throw IoError(where + ": " + e.what());
        }
        if (!seen.insert(interval_rank(I)).second)
            throw IoError(where + ": duplicate interval");
        B.coeff(I) = matrix_from_json(c["matrix"], where + "/matrix", rows, cols);
    }
    return B;
}

HaarSymbol read_symbol_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return symbol_from_json(buf.str(), path);
}

void write_symbol_json(const std::string& path, const HaarSymbol& B) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << symbol_to_json(B);
    if (!out) throw IoError(path + ": write failed");
}

void write_matrix_dump(const std::string& path, const Mat& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    char header[32] = {};
    std::memcpy(header, kMagic, 8);
    const std::uint32_t meta[3] = {kDumpVersion, static_cast<std::uint32_t>(M.rows()),
                                   static_cast<std::uint32_t>(M.cols())};
    std::memcpy(header + 8, meta, sizeof meta);
    out.write(header, sizeof header);
    for (Eigen::Index c = 0; c < M.cols(); ++c)
        for (Eigen::Index r = 0; r < M.rows(); ++r) {
            const double re = M(r, c).real(), im = M(r, c).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof re);
            out.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
    if (!out) throw IoError(path + ": write failed");
}

Mat read_matrix_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open");
    char header[32];
    if (!in.read(header, sizeof header)) throw IoError(path + ": truncated header");
    if (std::memcmp(header, kMagic, 8) != 0) throw IoError(path + ": bad magic");
    std::uint32_t meta[3];
    std::memcpy(meta, header + 8, sizeof meta);
    if (meta[0] != kDumpVersion) throw IoError(path + ": unsupported version");
    Mat M(meta[1], meta[2]);
    for (Eigen::Index c = 0; c < M.cols(); ++c)
        for (Eigen::Index r = 0; r < M.rows(); ++r) {
            double re, im;
            if (!in.read(reinterpret_cast<char*>(&re), sizeof re) ||
                !in.read(reinterpret_cast<char*>(&im), sizeof im))
                throw IoError(path + ": truncated data");
            M(r, c) = Cplx(re, im);
        }
    return M;
}

}  // namespace opbmo

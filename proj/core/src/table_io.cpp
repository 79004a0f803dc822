#include "kinetic/table_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "kinetic/report.hpp"

namespace kinetic {

static_assert(std::endian::native == std::endian::little, "array files are written little-endian");

namespace {
constexpr char kMagic[8] = {'K', 'I', 'N', 'A', 'R', 'R', '1', '\n'};
}

void save_array(const std::string& path, const Eigen::MatrixXd& data, nlohmann::json header) {
    header["rows"] = data.rows();
    header["cols"] = data.cols();
    header["dtype"] = "f64le";
    header["layout"] = "row-major";
    header["code_version"] = code_version();
    const std::string text = header.dump();
    const std::uint64_t len = text.size();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TableIOError("cannot write " + path);
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(text.data(), static_cast<std::streamsize>(len));
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = data;
    out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
    if (!out) throw TableIOError("short write to " + path);
}

ArrayFile load_array(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TableIOError("cannot read " + path);
    char magic[8];
    std::uint64_t len = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw TableIOError(path + ": not an array file");
    if (len > (1u << 26)) throw TableIOError(path + ": header too large");
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    ArrayFile f;
    try {
        f.header = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw TableIOError(path + ": bad header: " + e.what());
    }
    if (f.header.value("dtype", "") != "f64le") throw TableIOError(path + ": unsupported dtype");
    const auto rows = f.header.at("rows").get<Eigen::Index>(), cols = f.header.at("cols").get<Eigen::Index>();
    if (rows < 0 || cols < 0) throw TableIOError(path + ": negative shape");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
    in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
    if (!in) throw TableIOError(path + ": truncated data");
    f.data = rm;
    return f;
}

} // namespace kinetic

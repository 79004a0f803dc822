#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace kinetic {

class TableIOError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File layout: the 8 bytes "KINARR1\n", a little-endian uint64 header length,
// the JSON header, then rows * cols little-endian doubles in row-major order.
// The header always carries "rows", "cols", "dtype" and "code_version"; any
// caller metadata (grid, c_k, C0, quadrature errors) rides along.
struct ArrayFile {
    nlohmann::json header;
    Eigen::MatrixXd data;
};

void save_array(const std::string& path, const Eigen::MatrixXd& data, nlohmann::json header = nlohmann::json::object());
ArrayFile load_array(const std::string& path);

} // namespace kinetic

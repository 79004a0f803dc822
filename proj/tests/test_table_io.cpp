#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kinetic/table_io.hpp"

using namespace kinetic;

TEST_CASE("array file round trip") {
    const auto path = (std::filesystem::temp_directory_path() / "kinetic_array_test.bin").string();
    Eigen::MatrixXd a(3, 4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = 0.1 * i - j + 1e-17 * (i + j);
    save_array(path, a, {{"grid", {{"n", 8}, {"vmax", 4.0}}}, {"c_k", 1.5957691216057308}});
    const ArrayFile f = load_array(path);
    CHECK(f.data == a);
    CHECK(f.header.at("rows") == 3);
    CHECK(f.header.at("grid").at("n") == 8);
    CHECK(f.header.at("c_k").get<double>() == 1.5957691216057308);
    std::ofstream(path, std::ios::binary) << "garbage";
    CHECK_THROWS_AS(load_array(path), TableIOError);
    std::remove(path.c_str());
}

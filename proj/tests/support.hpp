#pragma once

#include <filesystem>
#include <string>

#include "pivlp/pivotal_dist.hpp"

namespace testing_support {

// Small but adequate table for decision-logic tests.
inline const pivlp::WQuantileTable& small_table() {
    static const pivlp::WQuantileTable t = pivlp::build_table(pivlp::default_alphas(), 20000, 500, 7);
    return t;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("pivlp_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing_support

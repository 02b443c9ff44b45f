#pragma once

#include <stdexcept>
#include <string>

namespace slr {

// error taxonomy maps 1:1 onto CLI exit codes (see cli.hpp)
struct config_error : std::runtime_error {
    explicit config_error(const std::string& m) : std::runtime_error(m) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& m) : std::runtime_error(m) {}
};

struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& m) : std::runtime_error(m) {}
};

// a grouping produced a cluster/bin with fewer than 2 rows; callers may skip, not abort
struct min_group_size_error : data_error {
    int group;
    int size;
    min_group_size_error(int g, int s)
        : data_error("group " + std::to_string(g) + " has " + std::to_string(s) +
                     " member(s); need at least 2 for a covariance"),
          group(g), size(s) {}
};

} // namespace slr

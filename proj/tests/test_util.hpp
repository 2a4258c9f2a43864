#pragma once

#include <optional>
#include <vector>

#include "tokencast/common.hpp"

namespace tokencast::test {

inline constexpr std::nullopt_t kMissing = std::nullopt;

inline std::vector<Obs> obs(const std::vector<double>& values) {
    return {values.begin(), values.end()};
}

} // namespace tokencast::test

#pragma once

#include <json.hpp>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pdsq/model.hpp"

namespace pdsq::detail {

/// Round-trip decimal form of a double (17 significant digits, trimmed).
std::string format_real(double x);

nlohmann::json distribution_to_json(const Distribution& d);
nlohmann::json params_to_json(const ModelParams& params);

/// Atomically replaces the manifest with the given completed (index, key) list.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::uint64_t, std::string>>& done);

}  // namespace pdsq::detail

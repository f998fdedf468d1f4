#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace ksnbc::harness {

[[nodiscard]] std::string sha256_file(const std::string& path);
[[nodiscard]] std::string utc_timestamp();

/// Writes `content` to a sibling temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

/// Adds a "files" inventory ({path, bytes, sha256} per entry, paths relative
/// to `dir`) to `body` and writes dir/manifest.json atomically.
void write_manifest(const std::string& dir, nlohmann::json body, const std::vector<std::string>& files);

struct InventoryCheck {
  std::size_t checked = 0;
  std::vector<std::string> mismatched;  ///< missing files or checksum differences
  [[nodiscard]] bool ok() const { return mismatched.empty(); }
};

/// Recomputes every checksum listed in dir/manifest.json.
[[nodiscard]] InventoryCheck verify_manifest(const std::string& dir);
[[nodiscard]] nlohmann::json read_manifest(const std::string& dir);

}  // namespace ksnbc::harness

#include "ksnbc/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "ksnbc/error.hpp"

namespace ksnbc::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path + " for checksumming");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 initialisation failed");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw Error("write to " + tmp + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp + " into place: " + ec.message());
}

void write_manifest(const std::string& dir, json body, const std::vector<std::string>& files) {
  json inventory = json::array();
  for (const auto& rel : files) {
    const fs::path p = fs::path(dir) / rel;
    inventory.push_back({{"path", rel}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p.string())}});
  }
  body["files"] = std::move(inventory);
  write_atomic((fs::path(dir) / "manifest.json").string(), body.dump(2) + "\n");
}

json read_manifest(const std::string& dir) {
  const fs::path p = fs::path(dir) / "manifest.json";
  std::ifstream in(p);
  if (!in) throw Error("no manifest.json in " + dir);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(p.string() + ": " + e.what());
  }
}

InventoryCheck verify_manifest(const std::string& dir) {
  const json manifest = read_manifest(dir);
  InventoryCheck check;
  if (!manifest.contains("files")) return check;
  for (const auto& entry : manifest["files"]) {
    const std::string rel = entry.at("path");
    const fs::path p = fs::path(dir) / rel;
    ++check.checked;
    if (!fs::exists(p) || sha256_file(p.string()) != entry.at("sha256").get<std::string>())
      check.mismatched.push_back(rel);
  }
  return check;
}

}  // namespace ksnbc::harness

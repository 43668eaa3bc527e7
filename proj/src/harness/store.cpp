#include "fcp/harness/store.hpp"

#include <algorithm>
#include <cstdlib>

#include "fcp/common/error.hpp"
#include "fcp/common/hash.hpp"
#include "fcp/common/io.hpp"

namespace fcp::harness {

namespace fs = std::filesystem;

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "objects");
  fs::create_directories(root_ / "index");
}

ArtifactStore ArtifactStore::from_env() {
  const char* env = std::getenv(kEnvVar);
  return ArtifactStore(env && *env ? fs::path(env) : fs::path("fcp-store"));
}

fs::path ArtifactStore::object_path(const std::string& id) const {
  if (id.size() != 64 || id.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw ValidationError("malformed artifact id '" + id + "'");
  }
  return root_ / "objects" / id.substr(0, 2) / id;
}

std::string ArtifactStore::put(std::string_view bytes) {
  const std::string id = sha256_hex(bytes);
  const auto path = object_path(id);
  if (!fs::exists(path)) write_file_atomic(path, bytes);
  return id;
}

std::string ArtifactStore::put_json(const nlohmann::json& j) { return put(j.dump()); }

std::string ArtifactStore::get(const std::string& id) const {
  const auto path = object_path(id);
  if (!fs::exists(path)) throw NotFound("no artifact " + id + " in " + root_.string());
  return read_file(path);
}

nlohmann::json ArtifactStore::get_json(const std::string& id) const {
  try {
    return nlohmann::json::parse(get(id));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("artifact " + id + " is not JSON: " + e.what());
  }
}

bool ArtifactStore::contains(const std::string& id) const {
  try {
    return fs::exists(object_path(id));
  } catch (const ValidationError&) {
    return false;
  }
}

bool ArtifactStore::remove(const std::string& id) { return fs::remove(object_path(id)); }

std::vector<std::string> ArtifactStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::recursive_directory_iterator(root_ / "objects")) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.size() == 64) ids.push_back(name);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::optional<std::string> ArtifactStore::lookup(const std::string& key) const {
  const auto path = root_ / "index" / sha256_hex(key);
  if (!fs::exists(path)) return std::nullopt;
  return read_file(path);
}

void ArtifactStore::bind(const std::string& key, const std::string& id) {
  write_file_atomic(root_ / "index" / sha256_hex(key), id);
}

}  // namespace fcp::harness

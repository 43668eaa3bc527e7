#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace fcp::harness {

// Content-addressed artifact directory.
//
//   <root>/objects/<id[0:2]>/<id>   artifact bytes, id = SHA-256 of the bytes
//   <root>/index/<sha256(key)>      stage key -> artifact id
//
// Every write goes through a temporary file and a rename, so concurrent
// writers never expose partial files; identical content maps to the same id
// and is never rewritten.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path root);

  // Root from $FCP_STORE, falling back to ./fcp-store.
  static ArtifactStore from_env();
  static constexpr const char* kEnvVar = "FCP_STORE";

  const std::filesystem::path& root() const { return root_; }

  std::string put(std::string_view bytes);
  std::string put_json(const nlohmann::json& j);
  // Throws NotFound for unknown ids.
  std::string get(const std::string& id) const;
  nlohmann::json get_json(const std::string& id) const;
  bool contains(const std::string& id) const;
  // Deletes an artifact (used to force a stage to recompute).
  bool remove(const std::string& id);
  std::vector<std::string> list() const;

  std::optional<std::string> lookup(const std::string& key) const;
  void bind(const std::string& key, const std::string& id);

  std::filesystem::path object_path(const std::string& id) const;

 private:
  std::filesystem::path root_;
};

}  // namespace fcp::harness

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lmeval/backend.hpp"

namespace lmeval {

/// Deterministic fixture-backed backend: a pure function of
/// (fixtures, request). Fixtures are keyed by the canonical request hash.
class MockBackend final : public Backend {
 public:
  MockBackend() = default;

  static MockBackend load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  void add(const BackendRequest& request, BackendResponse response);
  void add_hashed(std::string hash, BackendResponse response);

  /// Throws MissingFixtureError naming the request hash when no fixture
  /// matches, and Error when logprobs were requested but the fixture has
  /// none.
  BackendResponse complete(const BackendRequest& request) override;

  std::string name() const override { return "mock"; }
  std::size_t size() const { return fixtures_.size(); }

 private:
  std::map<std::string, BackendResponse> fixtures_;
};

}  // namespace lmeval

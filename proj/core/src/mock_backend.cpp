#include "lmeval/mock_backend.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lmeval/error.hpp"

namespace lmeval {

using ordered_json = nlohmann::ordered_json;

MockBackend MockBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(fmt::format("cannot open fixtures file '{}'", path.string()));
  }
  MockBackend backend;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = ordered_json::parse(line);
      BackendResponse response;
      response.text = j.at("text").get<std::string>();
      if (auto it = j.find("token_logprobs"); it != j.end() && !it->is_null()) {
        std::vector<TokenLogprobs> positions;
        for (const auto& entry : *it) {
          positions.push_back(entry.get<TokenLogprobs>());
        }
        response.token_logprobs = std::move(positions);
      }
      validate_response(response);
      backend.add_hashed(j.at("request_hash").get<std::string>(),
                         std::move(response));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), lineno, e.what());
    } catch (const Error& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return backend;
}

void MockBackend::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(fmt::format("cannot write fixtures file '{}'", path.string()));
  }
  // fixtures_ is an ordered map, so output order is stable.
  for (const auto& [hash, response] : fixtures_) {
    ordered_json j;
    j["request_hash"] = hash;
    j["text"] = response.text;
    if (response.token_logprobs) {
      auto positions = ordered_json::array();
      for (const auto& entry : *response.token_logprobs) {
        positions.push_back(entry);
      }
      j["token_logprobs"] = std::move(positions);
    }
    out << j.dump() << '\n';
  }
}

void MockBackend::add(const BackendRequest& request, BackendResponse response) {
  validate_response(response);
  fixtures_[request_hash(request)] = std::move(response);
}

void MockBackend::add_hashed(std::string hash, BackendResponse response) {
  validate_response(response);
  fixtures_[std::move(hash)] = std::move(response);
}

BackendResponse MockBackend::complete(const BackendRequest& request) {
  validate_request(request);
  const std::string hash = request_hash(request);
  auto it = fixtures_.find(hash);
  if (it == fixtures_.end()) {
    throw MissingFixtureError(hash);
  }
  if (request.want_logprobs && !it->second.token_logprobs) {
    throw Error(fmt::format(
        "mock backend: fixture {} has no logprobs but the request wants them",
        hash));
  }
  return it->second;
}

}  // namespace lmeval

#include "ert/prompt/llm_client.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

#include "ert/common/error.hpp"

namespace ert::prompt {

HttpLlmClient::HttpLlmClient(std::string endpoint, std::string token_env, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  const auto scheme_end = endpoint_.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("LLM endpoint must be an http URL: " + endpoint_);
  const auto path_start = endpoint_.find('/', scheme_end + 3);
  scheme_host_ = endpoint_.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);
  if (const char* tok = std::getenv(token_env.c_str()); tok && *tok) token_ = tok;
}

std::string HttpLlmClient::complete(const std::string& prompt) {
  AuditEntry entry;
  entry.request = prompt;
  auto record = [&] {
    std::lock_guard<std::mutex> lock(mu_);
    audit_.push_back(entry);
  };

  httplib::Client cli(scheme_host_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  cli.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (token_) headers.emplace("Authorization", "Bearer " + *token_);

  const std::string body = nlohmann::json{{"prompt", prompt}}.dump();
  auto res = cli.Post(path_, headers, body, "application/json");
  if (!res) {
    entry.error = "transport: " + httplib::to_string(res.error());
    record();
    throw TransportError(entry.error);
  }
  if (res->status != 200) {
    entry.error = "http status " + std::to_string(res->status);
    record();
    throw TransportError(entry.error);
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    entry.response = j.at("text").get<std::string>();
  } catch (const std::exception& e) {
    entry.error = std::string("bad reply: ") + e.what();
    record();
    throw TransportError(entry.error);
  }
  record();
  return entry.response;
}

std::vector<AuditEntry> HttpLlmClient::audit_log() const {
  std::lock_guard<std::mutex> lock(mu_);
  return audit_;
}

}  // namespace ert::prompt

#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace ert::prompt {

// Text-completion endpoint. Implementations throw TransportError on failure.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

struct AuditEntry {
  std::string request;
  std::string response;  // empty when the call failed
  std::string error;
};

// HTTP POST {"prompt": ...} -> {"text": ...}. The bearer token is read from
// the environment variable named by `token_env` when present.
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(std::string endpoint, std::string token_env = "ERT_LLM_TOKEN",
                         std::chrono::seconds timeout = std::chrono::seconds(30));

  std::string complete(const std::string& prompt) override;

  std::vector<AuditEntry> audit_log() const;
  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
  std::string scheme_host_;
  std::string path_;
  std::optional<std::string> token_;
  std::chrono::seconds timeout_;
  mutable std::mutex mu_;
  std::vector<AuditEntry> audit_;
};

}  // namespace ert::prompt

#pragma once

#include <chrono>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ert/victim/victim.hpp"

namespace ert::victim {

// Newline-delimited JSON messages. Frames travel as base64 PNG.
nlohmann::ordered_json encode_reset(const sim::TaskSpec& task, const std::string& prompt_text);
nlohmann::ordered_json encode_observe(const Frame& frame, int step);
nlohmann::ordered_json encode_reply(const std::optional<sim::StepAction>& action);
nlohmann::ordered_json encode_error(const std::string& message);

// Parses an action or noop reply. Throws ProtocolError on anything else.
std::optional<sim::StepAction> decode_reply(const std::string& line);
// Decodes the frame carried by an observe message. Throws ProtocolError.
Frame decode_observe(const nlohmann::json& msg);

// Server side: one reply line per observe line, none for reset. Malformed
// input gets an error reply and the loop continues. Returns at end of input.
void bridge_serve(std::istream& in, std::ostream& out, Victim& victim);

// Bidirectional line transport.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void send_line(const std::string& line) = 0;
  // Throws TransportError on timeout or a closed stream.
  virtual std::string receive_line(std::chrono::milliseconds timeout) = 0;
};

// "exec:<shell command>" runs a child process speaking on stdin/stdout;
// "tcp:<host>:<port>" connects to a listening adapter.
std::unique_ptr<LineChannel> open_channel(const std::string& endpoint);

// Serves one TCP connection on 127.0.0.1:port (0 picks a free port; the
// bound port is reported through on_listen before blocking in accept).
void bridge_serve_tcp(int port, Victim& victim, const std::function<void(int)>& on_listen = {});

inline constexpr std::chrono::seconds kBridgeTimeout{60};

// Victim living behind the bridge. Transport and protocol failures surface
// as VictimError.
class BridgeVictim : public Victim {
 public:
  explicit BridgeVictim(std::string endpoint, std::chrono::milliseconds timeout = kBridgeTimeout);
  BridgeVictim(std::unique_ptr<LineChannel> channel, std::string endpoint,
               std::chrono::milliseconds timeout = kBridgeTimeout);

  void reset(const sim::TaskSpec& task, const std::string& prompt_text) override;
  std::optional<sim::StepAction> act(const Observation& obs) override;
  std::string name() const override { return "bridge(" + endpoint_ + ")"; }

 private:
  std::unique_ptr<LineChannel> channel_;
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

}  // namespace ert::victim

#include "ert/victim/bridge.hpp"

#include <arpa/inet.h>
#include <csignal>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "ert/common/codec.hpp"
#include "ert/common/error.hpp"

namespace ert::victim {

namespace {

std::array<double, 3> triple(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw ProtocolError(std::string("reply is missing \"") + field + "\"");
  const auto& a = j.at(field);
  if (!a.is_array() || a.size() != 3) throw ProtocolError(std::string("\"") + field + "\" must be [x, y, rot]");
  std::array<double, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!a[i].is_number()) throw ProtocolError(std::string("\"") + field + "\" holds a non-number");
    v[i] = a[i].get<double>();
  }
  return v;
}

// Handles one inbound line; returns the reply line, if any.
std::optional<std::string> handle(const std::string& line, Victim& victim, std::string& prompt,
                                  std::vector<HistoryEntry>& history) {
  nlohmann::json msg;
  try {
    msg = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    return encode_error("malformed JSON").dump();
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
    return encode_error("message needs a string \"type\"").dump();
  const std::string type = msg["type"];
  try {
    if (type == "reset") {
      const auto task = sim::task_from_json(msg.at("task"));
      prompt = msg.at("prompt").get<std::string>();
      history.clear();
      victim.reset(task, prompt);
      return std::nullopt;
    }
    if (type == "observe") {
      Observation obs;
      obs.frame = decode_observe(msg);
      obs.prompt_text = prompt;
      obs.history = history;
      obs.step = msg.at("step").get<int>();
      const auto a = victim.act(obs);
      history.push_back({frame_digest(obs.frame), a});
      return encode_reply(a).dump();
    }
  } catch (const std::exception& e) {
    return encode_error(e.what()).dump();
  }
  return encode_error("unknown message type \"" + type + "\"").dump();
}

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) {
      const ssize_t m = ::write(fd, data.data() + off, data.size() - off);
      if (m < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(m);
      continue;
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("send failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

class FdReader {
 public:
  explicit FdReader(int fd) : fd_(fd) {}

  // Next line, or nullopt at end of stream.
  std::optional<std::string> next(std::optional<std::chrono::milliseconds> timeout) {
    const auto deadline = timeout ? std::chrono::steady_clock::now() + *timeout : std::chrono::steady_clock::time_point::max();
    for (;;) {
      const auto nl = buf_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return line;
      }
      if (eof_) {
        if (buf_.empty()) return std::nullopt;
        std::string line;
        line.swap(buf_);
        return line;
      }
      int wait_ms = -1;
      if (timeout) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) throw TransportError("timed out waiting for the victim");
        wait_ms = static_cast<int>(left.count());
      }
      pollfd p{fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, wait_ms);
      if (r < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (r == 0) throw TransportError("timed out waiting for the victim");
      char chunk[65536];
      const ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0)
        eof_ = true;
      else
        buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buf_;
  bool eof_ = false;
};

class ProcessChannel : public LineChannel {
 public:
  explicit ProcessChannel(const std::string& command) : reader_(-1) {
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) throw TransportError("pipe failed");
    pid_ = ::fork();
    if (pid_ < 0) throw TransportError("fork failed");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
    reader_ = FdReader(out_);
    std::signal(SIGPIPE, SIG_IGN);
  }
  ~ProcessChannel() override {
    ::close(in_);
    ::close(out_);
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
      ::usleep(10000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }
  void send_line(const std::string& line) override { write_all(in_, line + "\n"); }
  std::string receive_line(std::chrono::milliseconds timeout) override {
    auto l = reader_.next(timeout);
    if (!l) throw TransportError("victim process closed its output");
    return *l;
  }

 private:
  pid_t pid_ = -1;
  int in_ = -1, out_ = -1;
  FdReader reader_;
};

class TcpChannel : public LineChannel {
 public:
  TcpChannel(const std::string& host, const std::string& port) : reader_(-1) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || !res)
      throw TransportError("cannot resolve " + host + ":" + port);
    for (addrinfo* a = res; a; a = a->ai_next) {
      fd_ = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd_ < 0) continue;
      if (::connect(fd_, a->ai_addr, a->ai_addrlen) == 0) break;
      ::close(fd_);
      fd_ = -1;
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw TransportError("cannot connect to " + host + ":" + port);
    reader_ = FdReader(fd_);
  }
  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }
  void send_line(const std::string& line) override { write_all(fd_, line + "\n"); }
  std::string receive_line(std::chrono::milliseconds timeout) override {
    auto l = reader_.next(timeout);
    if (!l) throw TransportError("victim closed the connection");
    return *l;
  }

 private:
  int fd_ = -1;
  FdReader reader_;
};

}  // namespace

nlohmann::ordered_json encode_reset(const sim::TaskSpec& task, const std::string& prompt_text) {
  nlohmann::ordered_json j;
  j["type"] = "reset";
  j["task"] = sim::to_json(task);
  j["prompt"] = prompt_text;
  return j;
}

nlohmann::ordered_json encode_observe(const Frame& frame, int step) {
  nlohmann::ordered_json j;
  j["type"] = "observe";
  j["rgb_png_b64"] = base64_encode(encode_frame_rgb(frame));
  j["seg_png_b64"] = base64_encode(encode_frame_seg(frame));
  j["step"] = step;
  return j;
}

nlohmann::ordered_json encode_reply(const std::optional<sim::StepAction>& action) {
  nlohmann::ordered_json j;
  if (!action) {
    j["type"] = "noop";
    return j;
  }
  j["type"] = "action";
  j["pick"] = {action->pick.x, action->pick.y, action->pick_rot};
  j["place"] = {action->place.x, action->place.y, action->place_rot};
  return j;
}

nlohmann::ordered_json encode_error(const std::string& message) {
  nlohmann::ordered_json j;
  j["type"] = "error";
  j["message"] = message;
  return j;
}

std::optional<sim::StepAction> decode_reply(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("reply is not valid JSON");
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw ProtocolError("reply lacks a type");
  const std::string type = j["type"];
  if (type == "noop") return std::nullopt;
  if (type == "error") throw ProtocolError("victim reported an error: " + j.value("message", std::string("?")));
  if (type != "action") throw ProtocolError("unexpected reply type \"" + type + "\"");
  const auto pick = triple(j, "pick");
  const auto place = triple(j, "place");
  return sim::StepAction::make({pick[0], pick[1]}, pick[2], {place[0], place[1]}, place[2]);
}

Frame decode_observe(const nlohmann::json& msg) {
  try {
    return decode_frame(base64_decode(msg.at("rgb_png_b64").get<std::string>()),
                        base64_decode(msg.at("seg_png_b64").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("observe message: ") + e.what());
  } catch (const ParseError& e) {
    throw ProtocolError(std::string("observe payload: ") + e.what());
  }
}

void bridge_serve(std::istream& in, std::ostream& out, Victim& victim) {
  std::string prompt;
  std::vector<HistoryEntry> history;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (auto reply = handle(line, victim, prompt, history)) out << *reply << '\n' << std::flush;
  }
}

void bridge_serve_tcp(int port, Victim& victim, const std::function<void(int)>& on_listen) {
  const int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (lfd < 0) throw TransportError("socket failed");
  int one = 1;
  ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(lfd, 1) != 0) {
    ::close(lfd);
    throw TransportError("cannot listen on port " + std::to_string(port));
  }
  socklen_t len = sizeof addr;
  ::getsockname(lfd, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listen) on_listen(ntohs(addr.sin_port));
  const int fd = ::accept(lfd, nullptr, nullptr);
  ::close(lfd);
  if (fd < 0) throw TransportError("accept failed");
  std::string prompt;
  std::vector<HistoryEntry> history;
  FdReader reader(fd);
  try {
    while (auto line = reader.next(std::nullopt)) {
      if (line->empty()) continue;
      if (auto reply = handle(*line, victim, prompt, history)) write_all(fd, *reply + "\n");
    }
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

std::unique_ptr<LineChannel> open_channel(const std::string& endpoint) {
  if (endpoint.rfind("exec:", 0) == 0) return std::make_unique<ProcessChannel>(endpoint.substr(5));
  if (endpoint.rfind("tcp:", 0) == 0) {
    const std::string rest = endpoint.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw ConfigError("tcp endpoint needs host:port");
    return std::make_unique<TcpChannel>(rest.substr(0, colon), rest.substr(colon + 1));
  }
  throw ConfigError("endpoint must start with exec: or tcp:");
}

BridgeVictim::BridgeVictim(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  try {
    channel_ = open_channel(endpoint_);
  } catch (const TransportError& e) {
    throw VictimError(e.what());
  }
}

BridgeVictim::BridgeVictim(std::unique_ptr<LineChannel> channel, std::string endpoint, std::chrono::milliseconds timeout)
    : channel_(std::move(channel)), endpoint_(std::move(endpoint)), timeout_(timeout) {}

void BridgeVictim::reset(const sim::TaskSpec& task, const std::string& prompt_text) {
  try {
    channel_->send_line(encode_reset(task, prompt_text).dump());
  } catch (const TransportError& e) {
    throw VictimError(e.what());
  }
}

std::optional<sim::StepAction> BridgeVictim::act(const Observation& obs) {
  try {
    channel_->send_line(encode_observe(obs.frame, obs.step).dump());
    return decode_reply(channel_->receive_line(timeout_));
  } catch (const TransportError& e) {
    throw VictimError(e.what());
  } catch (const ProtocolError& e) {
    throw VictimError(e.what());
  }
}

}  // namespace ert::victim

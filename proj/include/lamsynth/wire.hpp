#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lamsynth/policy.hpp"

namespace lamsynth {

inline constexpr int kProtocolVersion = 1;

// Little-endian float32 arrays as base64 text.
std::string encode_floats(std::span<const float> xs);
std::vector<float> decode_floats(std::string_view text);

struct Endpoint {
  std::string host;
  int port = 0;

  // "host:port"; throws ConfigError.
  static Endpoint parse(std::string_view text);
};

// Blocking newline-delimited TCP stream. Failures throw PolicyError.
class LineConnection {
 public:
  LineConnection() = default;
  explicit LineConnection(int fd, double timeout_s = 30);
  static LineConnection connect(const Endpoint& endpoint, double timeout_s = 30);
  ~LineConnection();
  LineConnection(LineConnection&& o) noexcept;
  LineConnection& operator=(LineConnection&& o) noexcept;

  bool open() const { return fd_ >= 0; }
  void send(const nlohmann::json& message);
  nlohmann::json receive();
  void close();

 private:
  int fd_ = -1;
  std::string buffer_;
};

// Listening socket on 127.0.0.1, for policy servers written in C++.
class LineListener {
 public:
  explicit LineListener(int port = 0);  // 0 picks a free port
  ~LineListener();
  LineListener(const LineListener&) = delete;
  LineListener& operator=(const LineListener&) = delete;

  int port() const { return port_; }
  LineConnection accept(double timeout_s = 30);

 private:
  int fd_ = -1;
  int port_ = 0;
};

// The hello message a client sends: protocol version, layout and tuple
// table hashes and the op table.
nlohmann::json hello_message();

// Policy served by another process. The handshake happens in the
// constructor and a mismatch of version, layout hash or tuple hash is
// refused with PolicyError.
class ExternalPolicy final : public Policy {
 public:
  explicit ExternalPolicy(const Endpoint& endpoint, double timeout_s = 30);
  ~ExternalPolicy() override;

  std::string_view name() const override { return "external"; }
  bool wants_signatures() const override { return true; }
  void begin(const Task& task, const ReducedSignature& io) override;
  void observe(const ValuePool& pool, std::span<const std::size_t> updated) override;
  void score(const StepContext& ctx, std::span<const int> valid, std::vector<double>& scores) override;
  bool proposes() const override { return propose_mode_; }
  std::vector<std::vector<int>> propose(const OpDescriptor& op, std::size_t n) override;
  void end() override;

 private:
  nlohmann::json request(nlohmann::json message, std::string_view reply_type);

  LineConnection conn_;
  bool propose_mode_ = false;
  nlohmann::json pending_ = nlohmann::json::array();
};

}  // namespace lamsynth

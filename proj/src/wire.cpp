#include "lamsynth/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include "lamsynth/executor.hpp"
#include "lamsynth/signature.hpp"

namespace lamsynth {
namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64(const unsigned char* data, std::size_t n) {
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  for (std::size_t i = 0; i < n; i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < n) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < n) chunk |= data[i + 2];
    out += kAlphabet[(chunk >> 18) & 63];
    out += kAlphabet[(chunk >> 12) & 63];
    out += i + 1 < n ? kAlphabet[(chunk >> 6) & 63] : '=';
    out += i + 2 < n ? kAlphabet[chunk & 63] : '=';
  }
  return out;
}

std::vector<unsigned char> unbase64(std::string_view text) {
  if (text.size() % 4 != 0) throw std::invalid_argument("base64 length is not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t chunk = 0;
    int pad = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const char c = text[i + j];
      std::uint32_t v = 0;
      if (c == '=') {
        ++pad;
      } else {
        const auto p = kAlphabet.find(c);
        if (p == std::string_view::npos || pad) throw std::invalid_argument("bad base64 character");
        v = static_cast<std::uint32_t>(p);
      }
      chunk = (chunk << 6) | v;
    }
    out.push_back(static_cast<unsigned char>(chunk >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>(chunk >> 8));
    if (pad < 1) out.push_back(static_cast<unsigned char>(chunk));
  }
  return out;
}

std::string_view type_name(BaseType t) { return to_string(t); }

nlohmann::json value_record(const ValuePool& pool, std::size_t i) {
  const ValueEntry& e = pool[i];
  nlohmann::ordered_json j;
  j["index"] = i;
  j["weight"] = e.weight();
  j["arity"] = e.term.arity();
  j["result"] = type_name(e.type().result);
  if (e.is_token())
    j["token"] = token_name(e.term.token_value());
  else
    j["token"] = nullptr;
  if (e.signature)
    j["signature"] = encode_floats(*e.signature);
  else
    j["signature"] = nullptr;
  return j;
}

}  // namespace

std::string encode_floats(std::span<const float> xs) {
  std::vector<unsigned char> bytes(xs.size() * 4);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &xs[i], 4);
    for (std::size_t b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return base64(bytes.data(), bytes.size());
}

std::vector<float> decode_floats(std::string_view text) {
  const std::vector<unsigned char> bytes = unbase64(text);
  if (bytes.size() % 4 != 0) throw std::invalid_argument("float array byte length is not a multiple of 4");
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (std::size_t b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    std::memcpy(&out[i], &bits, 4);
  }
  return out;
}

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
    throw ConfigError("policy endpoint must look like host:port, got '" + std::string(text) + "'");
  Endpoint e;
  e.host = std::string(text.substr(0, colon));
  try {
    std::size_t used = 0;
    const std::string port(text.substr(colon + 1));
    e.port = std::stoi(port, &used);
    if (used != port.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("bad port in policy endpoint '" + std::string(text) + "'");
  }
  if (e.port <= 0 || e.port > 65535) throw ConfigError("port out of range in '" + std::string(text) + "'");
  return e;
}

LineConnection::LineConnection(int fd, double timeout_s) : fd_(fd) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout_s);
  tv.tv_usec = static_cast<suseconds_t>((timeout_s - std::floor(timeout_s)) * 1e6);
  setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  int one = 1;
  setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

LineConnection LineConnection::connect(const Endpoint& endpoint, double timeout_s) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(endpoint.port);
  if (getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &found) != 0 || !found)
    throw PolicyError("cannot resolve policy host '" + endpoint.host + "'");
  std::string last = "no address";
  for (addrinfo* a = found; a; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      freeaddrinfo(found);
      return LineConnection(fd, timeout_s);
    }
    last = std::strerror(errno);
    ::close(fd);
  }
  freeaddrinfo(found);
  throw PolicyError("cannot connect to policy server " + endpoint.host + ":" + port + ": " + last);
}

LineConnection::~LineConnection() { close(); }

LineConnection::LineConnection(LineConnection&& o) noexcept : fd_(o.fd_), buffer_(std::move(o.buffer_)) { o.fd_ = -1; }

LineConnection& LineConnection::operator=(LineConnection&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = std::exchange(o.fd_, -1);
    buffer_ = std::move(o.buffer_);
  }
  return *this;
}

void LineConnection::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void LineConnection::send(const nlohmann::json& message) {
  if (fd_ < 0) throw PolicyError("policy connection is closed");
  const std::string line = message.dump() + "\n";
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw PolicyError(std::string("policy connection send failed: ") + std::strerror(errno));
    sent += static_cast<std::size_t>(n);
  }
}

nlohmann::json LineConnection::receive() {
  if (fd_ < 0) throw PolicyError("policy connection is closed");
  std::size_t nl;
  while ((nl = buffer_.find('\n')) == std::string::npos) {
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) throw PolicyError("policy server timed out");
    if (n <= 0) throw PolicyError("policy server closed the connection");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  const std::string line = buffer_.substr(0, nl);
  buffer_.erase(0, nl + 1);
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw PolicyError(std::string("malformed message from policy server: ") + e.what());
  }
}

LineListener::LineListener(int port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw PolicyError("cannot create socket");
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 4) != 0) {
    ::close(fd_);
    throw PolicyError(std::string("cannot listen: ") + std::strerror(errno));
  }
  socklen_t len = sizeof addr;
  getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

LineListener::~LineListener() {
  if (fd_ >= 0) ::close(fd_);
}

LineConnection LineListener::accept(double timeout_s) {
  pollfd p{fd_, POLLIN, 0};
  if (::poll(&p, 1, static_cast<int>(timeout_s * 1000)) <= 0) throw PolicyError("no client connected");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw PolicyError(std::string("accept failed: ") + std::strerror(errno));
  return LineConnection(fd, timeout_s);
}

nlohmann::json hello_message() {
  nlohmann::ordered_json j;
  j["type"] = "hello";
  j["version"] = kProtocolVersion;
  j["layout_hash"] = layout_hash();
  j["tuple_hash"] = tuple_table_hash();
  nlohmann::ordered_json ops = nlohmann::ordered_json::array();
  for (const OpDescriptor& op : op_table()) {
    nlohmann::ordered_json o;
    o["name"] = op.name;
    nlohmann::ordered_json slots = nlohmann::ordered_json::array();
    for (const FunctionType& s : op.slot_types()) slots.push_back({{"arity", s.arity}, {"result", type_name(s.result)}});
    o["slots"] = std::move(slots);
    o["result"] = type_name(op.result);
    ops.push_back(std::move(o));
  }
  j["ops"] = std::move(ops);
  return j;
}

ExternalPolicy::ExternalPolicy(const Endpoint& endpoint, double timeout_s)
    : conn_(LineConnection::connect(endpoint, timeout_s)) {
  const nlohmann::json reply = request(hello_message(), "hello");
  auto field = [&](const char* key) -> std::string {
    if (!reply.contains(key)) throw PolicyError(std::string("policy hello lacks '") + key + "'");
    return reply[key].is_string() ? reply[key].get<std::string>() : reply[key].dump();
  };
  if (field("version") != std::to_string(kProtocolVersion))
    throw PolicyError("policy server speaks protocol version " + field("version") + ", expected " +
                      std::to_string(kProtocolVersion));
  if (field("layout_hash") != layout_hash())
    throw PolicyError("signature layout mismatch: server " + field("layout_hash") + ", engine " + layout_hash());
  if (reply.contains("tuple_hash") && field("tuple_hash") != tuple_table_hash())
    throw PolicyError("tuple table mismatch: server " + field("tuple_hash") + ", engine " + tuple_table_hash());
  const std::string mode = reply.value("mode", "score");
  if (mode != "score" && mode != "propose") throw PolicyError("unknown policy mode '" + mode + "'");
  propose_mode_ = mode == "propose";
}

ExternalPolicy::~ExternalPolicy() {
  try {
    if (conn_.open()) conn_.send({{"type", "bye"}});
  } catch (const PolicyError&) {
  }
}

nlohmann::json ExternalPolicy::request(nlohmann::json message, std::string_view reply_type) {
  conn_.send(message);
  nlohmann::json reply = conn_.receive();
  const std::string type = reply.value("type", "");
  if (type == "error") throw PolicyError("policy server error: " + reply.value("message", std::string("unspecified")));
  if (type != reply_type) throw PolicyError("expected '" + std::string(reply_type) + "' from policy server, got '" + type + "'");
  return reply;
}

void ExternalPolicy::begin(const Task& task, const ReducedSignature& io) {
  pending_ = nlohmann::json::array();
  request({{"type", "begin"}, {"task", task.name}, {"io_signature", encode_floats(io)}}, "ok");
}

void ExternalPolicy::observe(const ValuePool& pool, std::span<const std::size_t> updated) {
  for (std::size_t i : updated) pending_.push_back(value_record(pool, i));
}

void ExternalPolicy::score(const StepContext& ctx, std::span<const int> valid, std::vector<double>& scores) {
  nlohmann::ordered_json m;
  m["type"] = "score";
  m["op"] = ctx.op->name;
  m["prefix"] = std::vector<int>(ctx.prefix.begin(), ctx.prefix.end());
  m["slot"] = ctx.slot;
  m["variable"] = ctx.variable;
  m["valid"] = std::vector<int>(valid.begin(), valid.end());
  m["new_values"] = std::exchange(pending_, nlohmann::json::array());
  const nlohmann::json reply = request(m, "scores");
  try {
    scores = reply.at("scores").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw PolicyError(std::string("bad scores from policy server: ") + e.what());
  }
}

std::vector<std::vector<int>> ExternalPolicy::propose(const OpDescriptor& op, std::size_t n) {
  nlohmann::ordered_json m;
  m["type"] = "propose";
  m["op"] = op.name;
  m["n"] = n;
  m["new_values"] = std::exchange(pending_, nlohmann::json::array());
  const nlohmann::json reply = request(m, "proposals");
  try {
    return reply.at("sequences").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw PolicyError(std::string("bad proposals from policy server: ") + e.what());
  }
}

void ExternalPolicy::end() { pending_ = nlohmann::json::array(); }

}  // namespace lamsynth

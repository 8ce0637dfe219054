// Copyright 2026 The Tripart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tripart/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include "tripart/error.hpp"

namespace tripart {

namespace {

constexpr std::uint32_t kMaxConfigText = 1u << 20;
constexpr std::size_t kHandshakeFixed = 4 + 1 + 1 + 4 + 4;

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  if (left.count() <= 0) return 0;
  return static_cast<int>(std::min<long long>(left.count(), 1 << 30));
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

sockaddr_in resolve(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(ep.host.c_str(), nullptr, &hints, &res);
  if (rc != 0 || res == nullptr) {
    throw TransportError("cannot resolve " + ep.host + ": " +
                         ::gai_strerror(rc));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, res->ai_addr, sizeof(addr));
  ::freeaddrinfo(res);
  addr.sin_port = htons(ep.port);
  return addr;
}

std::map<std::string, std::string> parse_lines(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string role_name(std::uint8_t role) {
  return role == kClientRole ? "client" : "party " + std::to_string(role);
}

Handshake read_handshake(Socket& s, Clock::time_point deadline) {
  std::uint8_t head[kHandshakeFixed];
  s.read_all(head, sizeof(head), deadline);
  if (std::memcmp(head, kHandshakeMagic.data(), 4) != 0) {
    throw HandshakeError("bad handshake magic");
  }
  Handshake h;
  h.version = head[4];
  h.role = head[5];
  const std::uint32_t hash = get_u32_le(head + 6);
  const std::uint32_t len = get_u32_le(head + 10);
  if (len > kMaxConfigText) {
    throw HandshakeError("config text of " + std::to_string(len) +
                         " bytes exceeds limit");
  }
  h.config_text.resize(len);
  s.read_all(reinterpret_cast<std::uint8_t*>(h.config_text.data()), len,
             deadline);
  if (h.config_hash() != hash) {
    throw HandshakeError("config hash does not match the transmitted text");
  }
  return h;
}

void validate_peer(const Handshake& mine, const Handshake& theirs) {
  if (theirs.version != mine.version) {
    throw HandshakeError("protocol version mismatch: peer speaks version " +
                         std::to_string(theirs.version) + ", expected " +
                         std::to_string(mine.version));
  }
  if (theirs.config_hash() != mine.config_hash()) {
    const std::string key =
        first_config_difference(mine.config_text, theirs.config_text);
    throw HandshakeError("config hash mismatch with " + role_name(theirs.role) +
                         ": field '" + key + "' differs");
  }
}

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw ArgumentError("endpoint '" + text + "' is not host:port");
  }
  Endpoint ep;
  ep.host = text.substr(0, colon);
  try {
    std::size_t used = 0;
    const unsigned long port = std::stoul(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1 || port > 65535) throw 0;
    ep.port = static_cast<std::uint16_t>(port);
  } catch (...) {
    throw ArgumentError("endpoint '" + text + "' has an invalid port");
  }
  return ep;
}

std::uint32_t Handshake::config_hash() const {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(config_text.data()),
              static_cast<uInt>(config_text.size())));
}

Bytes Handshake::encode() const {
  Bytes out(kHandshakeFixed + config_text.size());
  std::memcpy(out.data(), kHandshakeMagic.data(), 4);
  out[4] = version;
  out[5] = role;
  put_u32_le(&out[6], config_hash());
  put_u32_le(&out[10], static_cast<std::uint32_t>(config_text.size()));
  std::memcpy(out.data() + kHandshakeFixed, config_text.data(),
              config_text.size());
  return out;
}

std::string first_config_difference(const std::string& a,
                                    const std::string& b) {
  const auto ka = parse_lines(a);
  const auto kb = parse_lines(b);
  auto ia = ka.begin();
  auto ib = kb.begin();
  while (ia != ka.end() || ib != kb.end()) {
    if (ia == ka.end()) return ib->first;
    if (ib == kb.end()) return ia->first;
    if (ia->first != ib->first) return std::min(ia->first, ib->first);
    if (ia->second != ib->second) return ia->first;
    ++ia;
    ++ib;
  }
  return a == b ? "" : "<text>";
}

Socket::~Socket() { close(); }

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = o.fd_;
    o.fd_ = -1;
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::write_all(const std::uint8_t* data, std::size_t n,
                       Clock::time_point deadline) {
  std::size_t off = 0;
  while (off < n) {
    pollfd pfd{fd_, POLLOUT, 0};
    const int pr = ::poll(&pfd, 1, remaining_ms(deadline));
    if (pr == 0) throw TransportError("write timed out");
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("poll failed: ") + std::strerror(errno));
    }
    const ssize_t w =
        ::send(fd_, data + off, n - off, MSG_NOSIGNAL | MSG_DONTWAIT);
    if (w < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
      throw TransportError(std::string("write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(w);
  }
}

void Socket::read_all(std::uint8_t* data, std::size_t n,
                      Clock::time_point deadline) {
  std::size_t off = 0;
  while (off < n) {
    pollfd pfd{fd_, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, remaining_ms(deadline));
    if (pr == 0) throw TransportError("read timed out");
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("poll failed: ") + std::strerror(errno));
    }
    const ssize_t r = ::recv(fd_, data + off, n - off, MSG_DONTWAIT);
    if (r == 0) throw TransportError("peer closed");
    if (r < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
      throw TransportError(std::string("read failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(r);
  }
}

void Socket::write_frame(const Bytes& payload, Clock::time_point deadline) {
  Bytes frame(kFrameHeaderBytes + payload.size());
  put_u32_le(frame.data(), static_cast<std::uint32_t>(payload.size()));
  std::memcpy(frame.data() + kFrameHeaderBytes, payload.data(), payload.size());
  write_all(frame.data(), frame.size(), deadline);
}

Bytes Socket::read_frame(Clock::time_point deadline) {
  std::uint8_t head[kFrameHeaderBytes];
  read_all(head, sizeof(head), deadline);
  Bytes payload(get_u32_le(head));
  read_all(payload.data(), payload.size(), deadline);
  return payload;
}

Listener::Listener(const Endpoint& ep) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError("socket() failed");
  sock_ = Socket(fd);
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = resolve(ep);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw TransportError("cannot bind " + ep.str() + ": " +
                         std::strerror(errno));
  }
  if (::listen(fd, 8) != 0) {
    throw TransportError("cannot listen on " + ep.str());
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Socket Listener::accept(Clock::time_point deadline) {
  for (;;) {
    pollfd pfd{sock_.fd(), POLLIN, 0};
    const int pr = ::poll(&pfd, 1, remaining_ms(deadline));
    if (pr == 0) throw TransportError("accept timed out");
    if (pr < 0 && errno == EINTR) continue;
    const int fd = ::accept(sock_.fd(), nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw TransportError(std::string("accept failed: ") +
                           std::strerror(errno));
    }
    set_nodelay(fd);
    return Socket(fd);
  }
}

Socket connect_with_retry(const Endpoint& ep, Clock::time_point deadline) {
  const sockaddr_in addr = resolve(ep);
  for (;;) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("socket() failed");
    Socket s(fd);
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr),
                  sizeof(addr)) == 0) {
      set_nodelay(fd);
      return s;
    }
    if (Clock::now() >= deadline) {
      throw TransportError("connect timeout to " + ep.str());
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

Handshake handshake_as_connector(Socket& s, const Handshake& mine,
                                 std::optional<std::uint8_t> expected_role,
                                 Clock::time_point deadline) {
  const Bytes hello = mine.encode();
  s.write_all(hello.data(), hello.size(), deadline);
  Handshake theirs = read_handshake(s, deadline);
  validate_peer(mine, theirs);
  if (expected_role && theirs.role != *expected_role) {
    throw HandshakeError("expected " + role_name(*expected_role) +
                         ", reached " + role_name(theirs.role));
  }
  return theirs;
}

Handshake handshake_as_acceptor(Socket& s, const Handshake& mine,
                                Clock::time_point deadline) {
  Handshake theirs = read_handshake(s, deadline);
  const Bytes reply = mine.encode();
  s.write_all(reply.data(), reply.size(), deadline);
  validate_peer(mine, theirs);
  return theirs;
}

TcpChannel::TcpChannel(int self, std::array<Socket, 3> peers,
                       std::chrono::milliseconds timeout)
    : self_(self), peers_(std::move(peers)), timeout_(timeout) {}

void TcpChannel::send(int to, Bytes payload) {
  if (to < 0 || to > 2 || to == self_) {
    throw ArgumentError("party " + std::to_string(self_) + " has no link to " +
                        std::to_string(to));
  }
  const std::uint64_t seq = send_seq_[to]++;
  pump_until(to, kFrameHeaderBytes + payload.size(), &payload, seq);
  written_ += kFrameHeaderBytes + payload.size();
}

Bytes TcpChannel::recv(int from) {
  if (from < 0 || from > 2 || from == self_) {
    throw ArgumentError("party " + std::to_string(self_) + " has no link to " +
                        std::to_string(from));
  }
  const std::uint64_t seq = recv_seq_[from]++;
  const auto deadline = Clock::now() + timeout_;
  auto frame_ready = [&] {
    const Inbox& in = inbox_[from];
    if (in.data.size() - in.head < kFrameHeaderBytes) return false;
    const std::uint32_t len = get_u32_le(&in.data[in.head]);
    return in.data.size() - in.head >= kFrameHeaderBytes + len;
  };
  while (!frame_ready()) {
    if (inbox_[from].eof) throw TransportError("peer closed", self_, from, seq);
    poll_once(-1, nullptr, nullptr, deadline, from, seq);
  }
  Inbox& in = inbox_[from];
  const std::uint32_t len = get_u32_le(&in.data[in.head]);
  const auto begin = in.data.begin() + static_cast<std::ptrdiff_t>(
                                           in.head + kFrameHeaderBytes);
  Bytes payload(begin, begin + len);
  in.head += kFrameHeaderBytes + len;
  if (in.head == in.data.size()) {
    in.data.clear();
    in.head = 0;
  } else if (in.head > (1u << 20)) {
    in.data.erase(in.data.begin(),
                  in.data.begin() + static_cast<std::ptrdiff_t>(in.head));
    in.head = 0;
  }
  return payload;
}

void TcpChannel::pump_until(int to, std::size_t total, const Bytes* payload,
                            std::uint64_t seq) {
  Bytes frame(total);
  put_u32_le(frame.data(), static_cast<std::uint32_t>(payload->size()));
  std::memcpy(frame.data() + kFrameHeaderBytes, payload->data(),
              payload->size());
  const auto deadline = Clock::now() + timeout_;
  std::size_t off = 0;
  while (off < frame.size()) {
    poll_once(to, &frame, &off, deadline, to, seq);
  }
}

// One poll over every peer: drains readable sockets into their inboxes so
// that a blocked write can never deadlock against a peer that is itself
// blocked writing, and writes as much of `frame` to `write_to` as fits.
void TcpChannel::poll_once(int write_to, const Bytes* frame, std::size_t* off,
                           Clock::time_point deadline, int peer,
                           std::uint64_t seq) {
  std::vector<pollfd> fds;
  std::vector<int> who;
  for (int p = 0; p < 3; ++p) {
    if (p == self_ || !peers_[p].valid()) continue;
    short ev = inbox_[p].eof ? 0 : POLLIN;
    if (p == write_to) ev |= POLLOUT;
    if (ev == 0) continue;
    fds.push_back(pollfd{peers_[p].fd(), ev, 0});
    who.push_back(p);
  }
  const int pr = ::poll(fds.data(), fds.size(), remaining_ms(deadline));
  if (pr == 0) {
    throw TransportError(write_to >= 0 ? "send timed out" : "receive timed out",
                         self_, peer, seq);
  }
  if (pr < 0) {
    if (errno == EINTR) return;
    throw TransportError(std::string("poll failed: ") + std::strerror(errno),
                         self_, peer, seq);
  }
  std::uint8_t buf[1 << 16];
  for (std::size_t i = 0; i < fds.size(); ++i) {
    const int p = who[i];
    if (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t r = ::recv(fds[i].fd, buf, sizeof(buf), MSG_DONTWAIT);
      if (r > 0) {
        inbox_[p].data.insert(inbox_[p].data.end(), buf, buf + r);
      } else if (r == 0) {
        inbox_[p].eof = true;
      } else if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
        inbox_[p].eof = true;
      }
    }
    if (p == write_to && (fds[i].revents & POLLOUT)) {
      const ssize_t w = ::send(fds[i].fd, frame->data() + *off,
                               frame->size() - *off, MSG_NOSIGNAL | MSG_DONTWAIT);
      if (w > 0) {
        *off += static_cast<std::size_t>(w);
      } else if (w < 0 && errno != EAGAIN && errno != EWOULDBLOCK &&
                 errno != EINTR) {
        throw TransportError(std::string("write failed: ") +
                                 std::strerror(errno),
                             self_, peer, seq);
      }
    }
  }
  if (write_to >= 0 && inbox_[write_to].eof && *off < frame->size()) {
    throw TransportError("peer closed", self_, peer, seq);
  }
}

PartyLinks establish_party_links(int id, const std::array<Endpoint, 3>& eps,
                                 const Handshake& mine, bool expect_client,
                                 std::chrono::milliseconds timeout,
                                 Listener* listener) {
  if (id < 0 || id > 2) {
    throw ArgumentError("party id " + std::to_string(id) + " outside {0, 1, 2}");
  }
  const auto deadline = Clock::now() + timeout;
  std::unique_ptr<Listener> own;
  if (listener == nullptr) {
    own = std::make_unique<Listener>(eps[id]);
    listener = own.get();
  }
  std::array<Socket, 3> peers;
  PartyLinks links;
  for (int j = 0; j < id; ++j) {
    Socket s = connect_with_retry(eps[j], deadline);
    handshake_as_connector(s, mine, static_cast<std::uint8_t>(j), deadline);
    peers[j] = std::move(s);
  }
  int pending = (2 - id) + (expect_client ? 1 : 0);
  while (pending > 0) {
    Socket s = listener->accept(deadline);
    const Handshake theirs = handshake_as_acceptor(s, mine, deadline);
    if (theirs.role == kClientRole && expect_client && !links.client.valid()) {
      links.client = std::move(s);
    } else if (theirs.role > id && theirs.role <= 2 &&
               !peers[theirs.role].valid()) {
      peers[theirs.role] = std::move(s);
    } else {
      throw HandshakeError("unexpected connection from " +
                           role_name(theirs.role));
    }
    --pending;
  }
  links.channel = std::make_unique<TcpChannel>(id, std::move(peers), timeout);
  return links;
}

std::array<Socket, 3> connect_client(const std::array<Endpoint, 3>& eps,
                                     const Handshake& mine,
                                     std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  std::array<Socket, 3> out;
  for (int j = 0; j < 3; ++j) {
    out[j] = connect_with_retry(eps[j], deadline);
    handshake_as_connector(out[j], mine, static_cast<std::uint8_t>(j),
                           deadline);
  }
  return out;
}

}  // namespace tripart

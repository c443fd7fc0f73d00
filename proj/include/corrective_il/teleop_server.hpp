// Copyright 2026 The Corrective IL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORRECTIVE_IL_TELEOP_SERVER_HPP_
#define CORRECTIVE_IL_TELEOP_SERVER_HPP_

#include <atomic>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <sys/socket.h>

#include <boost/asio.hpp>

#include "corrective_il/teleop.hpp"

namespace corrective_il {

namespace teleop_detail {

using boost::asio::ip::tcp;

// Blocking frame I/O on a connected socket. ReadFrame returns nullopt on a
// clean or abrupt disconnect.
inline std::optional<json> ReadFrame(tcp::socket& sock) {
  std::array<unsigned char, 4> header;
  boost::system::error_code ec;
  boost::asio::read(sock, boost::asio::buffer(header), ec);
  if (ec) return std::nullopt;
  const std::uint32_t n = DecodeFrameLength(header);
  if (n > kMaxFrameBytes) throw ValidationError("frame too large");
  std::string body(n, '\0');
  boost::asio::read(sock, boost::asio::buffer(body), ec);
  if (ec) return std::nullopt;
  json msg = json::parse(body, nullptr, false);
  if (msg.is_discarded() || !msg.is_object()) {
    throw ValidationError("frame payload is not a JSON object");
  }
  return msg;
}

inline bool WriteFrame(tcp::socket& sock, const json& msg) {
  const std::string frame = EncodeFrame(msg);
  boost::system::error_code ec;
  boost::asio::write(sock, boost::asio::buffer(frame), ec);
  return !ec;
}

}  // namespace teleop_detail

// Accepts connections on a loopback TCP port and runs one TeleopSession per
// connection on its own thread. A session whose connection drops mid-episode
// records nothing for that episode.
class TeleopServer {
 public:
  using tcp = boost::asio::ip::tcp;
  using LogFn = std::function<void(const std::string&)>;

  TeleopServer(TeleopOptions opts, DemoStore& store, LogFn log = nullptr)
      : opts_(std::move(opts)), store_(store), log_(std::move(log)) {}

  ~TeleopServer() { Stop(); }

  // Binds to 127.0.0.1:port (0 picks a free port) and returns the bound port.
  std::uint16_t Listen(std::uint16_t port) {
    acceptor_.emplace(io_, tcp::endpoint(boost::asio::ip::address_v4::loopback(), port));
    port_ = acceptor_->local_endpoint().port();
    return port_;
  }

  // Accept loop; returns after Stop().
  void Serve() {
    while (!stopping_) {
      auto sock = std::make_shared<tcp::socket>(io_);
      boost::system::error_code ec;
      acceptor_->accept(*sock, ec);
      if (stopping_) break;
      if (ec) continue;
      std::lock_guard lock(mu_);
      sockets_.push_back(sock);
      const std::uint64_t id = next_session_++;
      workers_.emplace_back([this, sock, id] { RunSession(*sock, id); });
    }
  }

  void Stop() {
    if (stopping_.exchange(true)) return;
    boost::system::error_code ec;
    if (acceptor_ && port_ != 0) {
      // Wake a blocked accept() with a throwaway connection.
      tcp::socket poke(io_);
      poke.connect({boost::asio::ip::address_v4::loopback(), port_}, ec);
    }
    std::list<std::jthread> workers;
    {
      std::lock_guard lock(mu_);
      for (auto& s : sockets_) ::shutdown(s->native_handle(), SHUT_RDWR);
      workers.swap(workers_);
    }
  }

  int sessions_started() const { return static_cast<int>(next_session_); }

 private:
  void Log(const std::string& line) {
    if (log_) log_(line);
  }

  void RunSession(tcp::socket& sock, std::uint64_t id) {
    TeleopSession session(opts_, store_, id);
    Log("session " + std::to_string(id) + " connected");
    try {
      while (!session.closed()) {
        auto msg = teleop_detail::ReadFrame(sock);
        if (!msg) break;
        bool ok = true;
        for (const auto& reply : session.Handle(*msg)) {
          ok = ok && teleop_detail::WriteFrame(sock, reply);
        }
        if (!ok) break;
      }
    } catch (const std::exception& e) {
      teleop_detail::WriteFrame(sock, {{"kind", "error"}, {"code", "protocol"},
                                       {"message", e.what()}});
    }
    if (session.episode_active()) {
      Log("session " + std::to_string(id) + " dropped mid-episode; episode discarded");
    }
    Log("session " + std::to_string(id) + " closed after " +
        std::to_string(session.recorded()) + " recorded demos");
    boost::system::error_code ec;
    sock.shutdown(tcp::socket::shutdown_both, ec);
  }

  TeleopOptions opts_;
  DemoStore& store_;
  LogFn log_;
  boost::asio::io_context io_;
  std::optional<tcp::acceptor> acceptor_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> next_session_{0};
  std::mutex mu_;
  std::list<std::shared_ptr<tcp::socket>> sockets_;
  std::list<std::jthread> workers_;
};

}  // namespace corrective_il

#endif  // CORRECTIVE_IL_TELEOP_SERVER_HPP_

#pragma once

#include <memory>
#include <string>
#include <thread>

#include "aqs/backends.hpp"

namespace httplib {
class Server;
}

namespace aqs {

// Serves a BackendSuite over the single-endpoint JSON inference protocol.
// Every response is HTTP 200 carrying either an ok or an error envelope;
// backend exceptions become error envelopes, so a running stub never
// produces transport-level failures.
class StubServer {
 public:
  explicit StubServer(BackendSuite suite);
  ~StubServer();

  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  // Binds an ephemeral localhost port, serves on a background thread, and
  // returns once the server accepts connections.
  int start();

  // Serves on a fixed host/port in the calling thread; returns after stop().
  void run(const std::string& host, int port);

  void stop();

  int port() const { return port_; }
  std::string endpoint() const;

 private:
  void install_handler();

  BackendSuite suite_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace aqs

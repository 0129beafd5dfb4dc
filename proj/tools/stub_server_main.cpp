#include <cstdio>
#include <string>

#include "aqs/mock_backends.hpp"
#include "aqs/stub_server.hpp"

#include "CLI11.hpp"

// Serves the deterministic mock suite over the JSON inference protocol so
// the remote backend can be exercised without any model runtime.
int main(int argc, char** argv) {
  CLI::App app{"Mock inference stub server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port to listen on")
      ->check(CLI::Range(1, 65535));
  CLI11_PARSE(app, argc, argv);

  aqs::StubServer server(aqs::make_mock_suite());
  std::printf("serving on http://%s:%d\n", host.c_str(), port);
  std::fflush(stdout);
  try {
    server.run(host, port);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

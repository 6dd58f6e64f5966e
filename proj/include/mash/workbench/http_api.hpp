#pragma once

#include <memory>
#include <string>

#include "mash/workbench/workbench.hpp"

namespace httplib {
class Server;
}

namespace mash {

/// JSON-over-HTTP front end for a Workbench. Every response body is JSON;
/// errors carry {error, message, diagnostics?} with the status from
/// http_status().
class ApiServer {
 public:
  explicit ApiServer(Workbench& workbench);
  ~ApiServer();

  /// Binds without serving. Port 0 picks a free port. Returns the bound
  /// port; throws PortInUse when the address is taken.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires bind().
  void serve();
  void stop();
  bool running() const;

 private:
  void routes();

  Workbench& wb_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace mash

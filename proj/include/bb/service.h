#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>

#include "bb/errors.h"
#include "bb/pipeline.h"

namespace bb {

struct HttpResult {
  int status = 200;
  std::string body;
};

// HTTP status for an engine error kind.
int http_status_for(ErrorKind kind);

// Routes requests to the engine. Stateless apart from the shared engine, so
// one instance serves concurrent requests.
class Service {
 public:
  explicit Service(std::shared_ptr<const Engine> engine) : engine_(std::move(engine)) {}

  HttpResult handle(const std::string& method, const std::string& path, const std::string& body) const;

  // Blocks until stop() or a bind failure (IoError). `on_ready` receives the
  // bound port.
  void serve(const std::string& host, int port, std::size_t threads,
             const std::function<void(int)>& on_ready = {});
  void stop();

 private:
  std::shared_ptr<const Engine> engine_;
  std::atomic<void*> server_{nullptr};
};

}  // namespace bb

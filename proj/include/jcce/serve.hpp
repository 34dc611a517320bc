#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "jcce/model.hpp"

namespace httplib {
class Server;
}

namespace jcce {

// Round-trip-exact decimal for scores; shared by the CLI and the HTTP
// service so both emit identical text for identical doubles.
std::string format_score(double value);

// Read-only recommendation service over an immutable model snapshot. The
// snapshot is swapped atomically: every request scores against exactly one
// model. Request handling is exposed directly so tests can drive it without
// sockets; run() serves it over HTTP/1.1.
class RecommendService {
 public:
  RecommendService() = default;
  explicit RecommendService(std::shared_ptr<const JcceModel> model);
  ~RecommendService();

  void swap_model(std::shared_ptr<const JcceModel> model);
  std::shared_ptr<const JcceModel> snapshot() const;

  // POST /recommend {"context": {name: value...}, "k": n}. Returns the HTTP
  // status and fills the JSON response body: 200 with the ranked list, 400
  // for malformed requests or unknown attributes, 422 for contexts the model
  // cannot score, 503 without a snapshot.
  int handle_recommend(const std::string& body, std::string& response) const;
  // GET /health: 200 with snapshot metadata, 503 without a snapshot.
  int handle_health(std::string& response) const;

  // Blocks until stop() is called from another thread.
  void run(const std::string& host, int port);
  void stop();

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const JcceModel> model_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace jcce

#include "jcce/serve.hpp"

#include <map>

#include "httplib.h"
#include "json.hpp"

namespace jcce {

std::string format_score(double value) {
  return nlohmann::json(value).dump();  // shortest round-trip decimal
}

RecommendService::RecommendService(std::shared_ptr<const JcceModel> model)
    : model_(std::move(model)) {}

RecommendService::~RecommendService() = default;

void RecommendService::swap_model(std::shared_ptr<const JcceModel> model) {
  std::lock_guard<std::mutex> lock(mutex_);
  model_ = std::move(model);
}

std::shared_ptr<const JcceModel> RecommendService::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return model_;
}

namespace {

std::string error_body(const std::string& message) {
  nlohmann::json j;
  j["error"] = message;
  return j.dump() + "\n";
}

}  // namespace

int RecommendService::handle_recommend(const std::string& body,
                                       std::string& response) const {
  const auto model = snapshot();
  if (!model) {
    response = error_body("no model loaded");
    return 503;
  }
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    response = error_body(std::string("bad request json: ") + e.what());
    return 400;
  }
  if (!req.is_object() || !req.contains("context") ||
      !req["context"].is_object()) {
    response = error_body("request needs a \"context\" object");
    return 400;
  }
  size_t k = 10;
  if (req.contains("k")) {
    if (!req["k"].is_number_integer() || req["k"].get<int64_t>() < 1) {
      response = error_body("\"k\" must be a positive integer");
      return 400;
    }
    k = static_cast<size_t>(req["k"].get<int64_t>());
  }
  std::map<std::string, std::string> attrs;
  for (const auto& [name, value] : req["context"].items()) {
    if (!value.is_string()) {
      response = error_body("context attribute '" + name +
                            "' must be a string value");
      return 400;
    }
    attrs[name] = value.get<std::string>();
  }
  try {
    const SparseVec context = model->features().encode_context_query(attrs);
    const auto ranked = model->recommend(context, k);
    nlohmann::json out;
    out["model_version"] = kModelVersion;
    out["ranked"] = nlohmann::json::array();
    for (const auto& item : ranked) {
      nlohmann::json entry;
      entry["content_id"] = item.genre;
      entry["score"] = item.score;
      out["ranked"].push_back(entry);
    }
    response = out.dump() + "\n";
    return 200;
  } catch (const ConfigError& e) {
    response = error_body(e.what());
    return 400;
  } catch (const DataError& e) {
    response = error_body(e.what());
    return 422;
  }
}

int RecommendService::handle_health(std::string& response) const {
  const auto model = snapshot();
  nlohmann::json j;
  if (!model) {
    j["status"] = "unavailable";
    response = j.dump() + "\n";
    return 503;
  }
  j["status"] = "ok";
  j["model_version"] = kModelVersion;
  j["catalog_size"] = model->catalog().size();
  response = j.dump() + "\n";
  return 200;
}

void RecommendService::run(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  server_->Post("/recommend",
                [this](const httplib::Request& req, httplib::Response& res) {
                  std::string body;
                  res.status = handle_recommend(req.body, body);
                  res.set_content(body, "application/json");
                });
  server_->Get("/health",
               [this](const httplib::Request&, httplib::Response& res) {
                 std::string body;
                 res.status = handle_health(body);
                 res.set_content(body, "application/json");
               });
  if (!server_->listen(host, port))
    throw IoError("cannot listen on " + host + ":" + std::to_string(port));
}

void RecommendService::stop() {
  if (server_) server_->stop();
}

}  // namespace jcce

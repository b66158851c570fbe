#include "folmt/chat.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "folmt/errors.hpp"

namespace folmt {

namespace {

// Failures worth another attempt.
class TransientError : public TransportError {
 public:
  using TransportError::TransportError;
};

template <class T>
T field(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("SUT field '") + key + "' has the wrong type");
  }
}

// Finds the end of the balanced object starting at `open`, honoring strings.
std::size_t object_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\')
        ++i;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"')
      in_string = true;
    else if (c == '{')
      ++depth;
    else if (c == '}' && --depth == 0)
      return i;
  }
  return std::string_view::npos;
}

}  // namespace

SutConfig sut_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("SUT entry must be an object");
  SutConfig s;
  s.name = field<std::string>(j, "name", "");
  if (s.name.empty()) throw ConfigError("SUT field 'name' is required");
  s.kind = field<std::string>(j, "kind", s.kind);
  if (s.kind != "http" && s.kind != "mock") throw ConfigError("SUT field 'kind' must be \"http\" or \"mock\"");
  s.endpoint = field<std::string>(j, "endpoint", "");
  s.model_id = field<std::string>(j, "model_id", "");
  s.api_key_env = field<std::string>(j, "api_key_env", "");
  s.temperature = field<double>(j, "temperature", s.temperature);
  s.temperature_supported = field<bool>(j, "temperature_supported", s.temperature_supported);
  s.max_concurrency = field<std::size_t>(j, "max_concurrency", s.max_concurrency);
  s.timeout_seconds = field<double>(j, "timeout_seconds", s.timeout_seconds);
  s.max_retries = field<int>(j, "max_retries", s.max_retries);
  s.backoff_seconds = field<double>(j, "backoff_seconds", s.backoff_seconds);
  s.policy = field<std::string>(j, "policy", s.policy);
  if (s.kind == "http") {
    if (s.endpoint.empty()) throw ConfigError("SUT '" + s.name + "': field 'endpoint' is required");
    if (s.model_id.empty()) throw ConfigError("SUT '" + s.name + "': field 'model_id' is required");
  }
  if (s.max_concurrency == 0 || s.max_concurrency > 4096)
    throw ConfigError("SUT '" + s.name + "': field 'max_concurrency' must be in 1..4096");
  if (s.max_retries < 0) throw ConfigError("SUT '" + s.name + "': field 'max_retries' must be non-negative");
  return s;
}

nlohmann::json sut_to_json(const SutConfig& s) {
  return {{"name", s.name},
          {"kind", s.kind},
          {"endpoint", s.endpoint},
          {"model_id", s.model_id},
          {"api_key_env", s.api_key_env},
          {"temperature", s.temperature},
          {"temperature_supported", s.temperature_supported},
          {"max_concurrency", s.max_concurrency},
          {"timeout_seconds", s.timeout_seconds},
          {"max_retries", s.max_retries},
          {"backoff_seconds", s.backoff_seconds},
          {"policy", s.policy}};
}

HttpChatClient::HttpChatClient(SutConfig config)
    : config_(std::move(config)),
      slots_(static_cast<std::ptrdiff_t>(config_.max_concurrency)),
      sleeper_([](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); }) {
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key) throw ConfigError("environment variable " + config_.api_key_env + " is not set");
    api_key_ = key;
  }
  const auto scheme = config_.endpoint.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint must be an absolute http(s) URL: " + config_.endpoint);
  const auto slash = config_.endpoint.find('/', scheme + 3);
  base_ = config_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(const ChatRequest& request) {
  nlohmann::json body = {{"model", config_.model_id}, {"messages", nlohmann::json::array()}};
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (config_.temperature_supported) body["temperature"] = config_.temperature;
  const std::string payload = body.dump();

  slots_.acquire();
  struct Release {
    std::counting_semaphore<4096>& s;
    ~Release() { s.release(); }
  } release{slots_};

  for (int attempt_no = 0;; ++attempt_no) {
    try {
      return attempt(payload);
    } catch (const TransientError& e) {
      if (attempt_no >= config_.max_retries)
        throw TransportError(std::string(e.what()) + " (gave up after " + std::to_string(attempt_no + 1) +
                             " attempts)");
      sleeper_(config_.backoff_seconds * std::pow(2.0, attempt_no));
    }
  }
}

std::string HttpChatClient::attempt(const std::string& body) {
  httplib::Client cli(base_);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const auto start = std::chrono::steady_clock::now();
  auto res = cli.Post(path_, headers, body, "application/json");
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!res) {
    std::ostringstream msg;
    msg << config_.name << ": request failed after " << elapsed << " s: " << httplib::to_string(res.error());
    throw TransientError(msg.str());
  }
  const int status = res->status;
  if (status == 401 || status == 403) throw AuthError(config_.name + ": HTTP " + std::to_string(status));
  if (status == 429) {
    double retry_after = 0;
    if (res->has_header("Retry-After")) {
      try {
        retry_after = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    throw RateLimited(config_.name + ": HTTP 429", retry_after);
  }
  if (status >= 500) throw TransientError(config_.name + ": HTTP " + std::to_string(status));
  if (status != 200) throw TransportError(config_.name + ": HTTP " + std::to_string(status) + ": " + res->body);

  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw MalformedResponse(config_.name + ": response body is not JSON");
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return content.is_string() ? content.get<std::string>() : std::string();
  } catch (const nlohmann::json::exception&) {
    throw MalformedResponse(config_.name + ": response has no choices[0].message.content");
  }
}

std::optional<nlohmann::json> extract_json_object(std::string_view text, std::string_view required_key) {
  for (auto open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
    const auto close = object_end(text, open);
    if (close == std::string_view::npos) continue;
    auto j = nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains(std::string(required_key))) return j;
  }
  return std::nullopt;
}

}  // namespace folmt

#ifndef FOLMT_CHAT_HPP
#define FOLMT_CHAT_HPP

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace folmt {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
};

// Anything that turns a chat request into assistant text.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Connection settings for one model endpoint.
struct SutConfig {
  std::string name;
  // "http" talks to a chat-completions endpoint; "mock" uses the scripted
  // reasoner with `policy`.
  std::string kind = "http";
  // Full URL of the chat-completions route.
  std::string endpoint;
  std::string model_id;
  // Name of the environment variable holding the key; never the key itself.
  std::string api_key_env;
  double temperature = 0.0;
  // Some reasoning endpoints reject the temperature field.
  bool temperature_supported = true;
  std::size_t max_concurrency = 4;
  double timeout_seconds = 60.0;
  int max_retries = 3;
  double backoff_seconds = 1.0;
  std::string policy = "gold";
};

// Throws ConfigError naming the offending field.
SutConfig sut_from_json(const nlohmann::json& j);
nlohmann::json sut_to_json(const SutConfig& sut);

// Client for an OpenAI-style /chat/completions route. Transient failures
// (connection errors, timeouts, 5xx) are retried with exponential backoff;
// 401/403 raise AuthError and 429 raises RateLimited at once. At most
// max_concurrency requests are in flight per client.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(SutConfig config);
  ~HttpChatClient() override;

  std::string complete(const ChatRequest& request) override;

  // Replaces the backoff sleep, for tests.
  void set_sleeper(std::function<void(double)> sleeper) { sleeper_ = std::move(sleeper); }
  const SutConfig& config() const noexcept { return config_; }

 private:
  std::string attempt(const std::string& body);

  SutConfig config_;
  std::string api_key_;
  std::string base_;
  std::string path_;
  std::counting_semaphore<4096> slots_;
  std::function<void(double)> sleeper_;
};

// First balanced {...} in `text` that parses as a JSON object containing
// `required_key`. Surrounding prose and code fences are skipped.
std::optional<nlohmann::json> extract_json_object(std::string_view text, std::string_view required_key);

}  // namespace folmt

#endif  // FOLMT_CHAT_HPP

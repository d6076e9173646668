#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "clinact/categories.hpp"

namespace clinact {

/// All model calls run at temperature 0; deterministic by construction.
inline constexpr double kTemperature = 0.0;

struct BackendRequest {
  std::string system;
  std::string user;
  int max_output_tokens = 4096;
  std::chrono::milliseconds timeout{0};  // 0: use the backend's default
  std::string model;                     // empty: use the backend's default
};

struct BackendResponse {
  std::string text;  // raw output, byte-exact, never trimmed
  std::chrono::milliseconds latency{0};
  int attempts = 1;
  std::string backend_id;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse complete(const BackendRequest& request) = 0;
  virtual std::string id() const = 0;
};

/// One keyword rule of the offline oracle. Exclusion rules are evaluated
/// first; any match forces Non-Actionable. Otherwise every matching category
/// rule contributes its label.
struct OracleRule {
  std::string pattern;  // case-insensitive regular expression
  bool exclusion = false;
  std::optional<ActionCategory> category;
};

const std::vector<OracleRule>& oracle_rules();

/// Applies the rule table to one sentence: (actionable, labels).
std::pair<bool, LabelSet> apply_oracle_rules(std::string_view sentence);

/// Deterministic rule-based stand-in for a remote model. A pure function of
/// the prompt text: it reads the {"index": ..., "sentence": ...} lines out of
/// the prompt and answers in the exact pipeline schema. Prompts containing
/// the stage-1 schema marker ("verdict") get verdicts; everything else gets
/// label lists.
class OracleBackend : public Backend {
 public:
  BackendResponse complete(const BackendRequest& request) override;
  std::string id() const override { return "oracle"; }
};

/// Blocking token bucket; refills continuously at rate_per_minute.
class TokenBucket {
 public:
  TokenBucket(double rate_per_minute, double capacity);
  void acquire();

 private:
  double rate_per_second_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_refill_;
  std::mutex mutex_;
};

struct RemoteBackendConfig {
  std::string endpoint;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;                     // sent as a bearer token when set
  int max_transport_retries = 3;           // retries after the first attempt
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds backoff_base{250};
  bool backoff_sleep = true;               // tests disable the waits
  double requests_per_minute = 0;          // 0: unlimited
  int max_in_flight = 4;
};

/// Minimal chat-completion client. Sends
///   {"model", "messages": [system, user], "temperature": 0, "max_tokens"}
/// and reads the first choice's message content. Transport failures retry
/// with exponential backoff; authentication failures do not.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(RemoteBackendConfig config);
  BackendResponse complete(const BackendRequest& request) override;
  std::string id() const override { return "remote:" + config_.model; }

 private:
  void enter_flight();
  void leave_flight();

  RemoteBackendConfig config_;
  std::unique_ptr<TokenBucket> bucket_;
  std::mutex flight_mutex_;
  std::condition_variable flight_cv_;
  int in_flight_ = 0;
};

enum class CassetteMode { kRecord, kReplay };

std::string request_hash(const BackendRequest& request);

/// Record/replay wrapper keyed by request hash. Cassette files are JSON
/// lines of {"request_hash", "response_text"}.
class CassetteBackend : public Backend {
 public:
  /// Record mode requires an inner backend; replay mode serves from the file
  /// alone and fails on a miss.
  CassetteBackend(std::filesystem::path path, CassetteMode mode,
                  Backend* inner = nullptr);
  BackendResponse complete(const BackendRequest& request) override;
  std::string id() const override;

 private:
  std::filesystem::path path_;
  CassetteMode mode_;
  Backend* inner_;
  std::map<std::string, std::string> entries_;
  std::mutex mutex_;
};

}  // namespace clinact

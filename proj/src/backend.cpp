#include "clinact/backend.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "clinact/csv.hpp"
#include "clinact/errors.hpp"

namespace clinact {

using json = nlohmann::ordered_json;

const std::vector<OracleRule>& oracle_rules() {
  // Hand-authored to reproduce the six canonical worked examples; the
  // synthetic corpus generator draws from the same trigger vocabulary.
  static const std::vector<OracleRule> rules = [] {
    std::vector<OracleRule> r;
    auto exclude = [&](const char* p) { r.push_back({p, true, {}}); };
    auto category = [&](const char* p, ActionCategory c) {
      r.push_back({p, false, c});
    };
    // Status-quo and non-specific guidance; checked before any category.
    exclude(R"(\bas needed\b)");
    exclude(R"(\bdischarged on\b)");
    exclude(R"(\b(was|were) continued on\b)");

    category(R"(\bhold\b)", ActionCategory::kMedication);
    category(R"(\brefrain from\b)", ActionCategory::kMedication);
    category(R"(\bstop taking\b)", ActionCategory::kMedication);
    category(R"(\bdiscontinu\w*)", ActionCategory::kMedication);
    category(R"(\brestart\b)", ActionCategory::kMedication);
    category(R"(\bstart taking\b)", ActionCategory::kMedication);
    category(R"(\btaper\b)", ActionCategory::kMedication);
    category(R"(\badjust the dose\b)", ActionCategory::kMedication);

    category(R"(\bconsult(ation)?\b)", ActionCategory::kAppointment);
    category(R"(\breferr(al|ed)\b)", ActionCategory::kAppointment);
    category(R"(\bappointment\b)", ActionCategory::kAppointment);
    category(R"(\bclinic visit\b)", ActionCategory::kAppointment);
    category(R"(\barrive (at|for)\b)", ActionCategory::kAppointment);
    category(R"(\bfollow up with\b)", ActionCategory::kAppointment);

    category(R"(\brepeat these tests\b)", ActionCategory::kLab);
    category(R"(\bblood work\b)", ActionCategory::kLab);
    category(R"(\blab(s|oratory)? test(s)?\b)", ActionCategory::kLab);
    category(R"(\binr\b)", ActionCategory::kLab);
    category(R"(\bpotassium\b)", ActionCategory::kLab);
    category(R"(\bcreatinine\b)", ActionCategory::kLab);

    category(R"(\bx-?rays?\b)", ActionCategory::kImaging);
    category(R"(\bmri\b)", ActionCategory::kImaging);
    category(R"(\bct scan\b)", ActionCategory::kImaging);
    category(R"(\bultrasound\b)", ActionCategory::kImaging);
    category(R"(\bechocardiogram\b)", ActionCategory::kImaging);

    category(R"(\bsuture removal\b)", ActionCategory::kProcedure);
    category(R"(\bstaples? (will be )?removed\b)", ActionCategory::kProcedure);
    category(R"(\bdressing changes?\b)", ActionCategory::kProcedure);
    category(R"(\bwound care\b)", ActionCategory::kProcedure);

    category(R"(\bavoid\b)", ActionCategory::kCaseInstructions);
    category(R"(\bdo not\b)", ActionCategory::kCaseInstructions);
    category(R"(\bweigh yourself\b)", ActionCategory::kCaseInstructions);
    category(R"(\bcall your (doctor|physician|surgeon)\b)",
             ActionCategory::kCaseInstructions);
    category(R"(\bkeep the (wound|incision)\b)",
             ActionCategory::kCaseInstructions);
    category(R"(\bmonitor your\b)", ActionCategory::kCaseInstructions);

    category(R"(\bpending at (the time of )?discharge\b)",
             ActionCategory::kOtherContextual);
    category(R"(\bwas faxed to\b)", ActionCategory::kOtherContextual);
    category(R"(\bfor your records\b)", ActionCategory::kOtherContextual);
    category(R"(\bcontact number\b)", ActionCategory::kOtherContextual);
    return r;
  }();
  return rules;
}

namespace {

const std::vector<std::regex>& compiled_rules() {
  static const std::vector<std::regex>* compiled = [] {
    auto* v = new std::vector<std::regex>;
    for (const OracleRule& rule : oracle_rules()) {
      v->emplace_back(rule.pattern,
                      std::regex::ECMAScript | std::regex::icase);
    }
    return v;
  }();
  return *compiled;
}

}  // namespace

std::pair<bool, LabelSet> apply_oracle_rules(std::string_view sentence) {
  const auto& rules = oracle_rules();
  const auto& res = compiled_rules();
  const std::string text(sentence);
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].exclusion && std::regex_search(text, res[i])) {
      return {false, {}};
    }
  }
  LabelSet labels;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (!rules[i].exclusion && std::regex_search(text, res[i])) {
      labels.insert(*rules[i].category);
    }
  }
  return {!labels.empty(), labels};
}

BackendResponse OracleBackend::complete(const BackendRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  // Sentences are embedded one JSON object per line by the renderer.
  std::vector<std::pair<int, std::string>> sentences;
  std::istringstream lines(request.user);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("{\"index\":", 0) != 0) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("index") || !j.contains("sentence")) {
      continue;
    }
    sentences.emplace_back(j["index"].get<int>(),
                           j["sentence"].get<std::string>());
  }
  const bool stage1 = request.user.find("\"verdict\"") != std::string::npos;
  json results = json::array();
  for (const auto& [index, text] : sentences) {
    auto [actionable, labels] = apply_oracle_rules(text);
    json entry;
    entry["index"] = index;
    if (stage1) {
      entry["verdict"] = actionable ? "Actionable" : "Non-Actionable";
    } else {
      entry["labels"] = to_display_names(labels);
    }
    results.push_back(std::move(entry));
  }
  json payload;
  payload["results"] = std::move(results);

  BackendResponse resp;
  resp.text = payload.dump();
  resp.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  resp.attempts = 1;
  resp.backend_id = id();
  return resp;
}

TokenBucket::TokenBucket(double rate_per_minute, double capacity)
    : rate_per_second_(rate_per_minute / 60.0),
      capacity_(capacity),
      tokens_(capacity),
      last_refill_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed =
        std::chrono::duration<double>(now - last_refill_).count();
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_second_);
    last_refill_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double deficit = (1.0 - tokens_) / rate_per_second_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(deficit));
    lock.lock();
  }
}

RemoteBackend::RemoteBackend(RemoteBackendConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw ConfigError("remote backend requires an endpoint URL");
  }
  if (config_.model.empty()) {
    throw ConfigError("remote backend requires a model identifier");
  }
  if (config_.requests_per_minute > 0) {
    bucket_ = std::make_unique<TokenBucket>(config_.requests_per_minute,
                                            config_.requests_per_minute);
  }
}

void RemoteBackend::enter_flight() {
  std::unique_lock lock(flight_mutex_);
  flight_cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
  ++in_flight_;
}

void RemoteBackend::leave_flight() {
  {
    std::lock_guard lock(flight_mutex_);
    --in_flight_;
  }
  flight_cv_.notify_one();
}

BackendResponse RemoteBackend::complete(const BackendRequest& request) {
  json body;
  body["model"] = request.model.empty() ? config_.model : request.model;
  body["messages"] = json::array();
  body["messages"].push_back({{"role", "system"}, {"content", request.system}});
  body["messages"].push_back({{"role", "user"}, {"content", request.user}});
  body["temperature"] = 0;
  body["max_tokens"] = request.max_output_tokens;
  const std::string payload = body.dump();

  const auto timeout =
      request.timeout.count() > 0 ? request.timeout : config_.timeout;
  const auto start = std::chrono::steady_clock::now();

  enter_flight();
  struct FlightGuard {
    RemoteBackend* self;
    ~FlightGuard() { self->leave_flight(); }
  } guard{this};

  std::string last_error;
  bool last_was_timeout = false;
  for (int attempt = 0; attempt <= config_.max_transport_retries; ++attempt) {
    if (attempt > 0 && config_.backoff_sleep) {
      std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
    }
    if (bucket_) bucket_->acquire();

    httplib::Client client(config_.endpoint);
    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(timeout);
    client.set_connection_timeout(secs.count(), 0);
    client.set_read_timeout(secs.count(), 0);
    client.set_write_timeout(secs.count(), 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto res = client.Post(config_.path, headers, payload, "application/json");
    if (!res) {
      last_was_timeout = res.error() == httplib::Error::ConnectionTimeout ||
                         res.error() == httplib::Error::Read ||
                         res.error() == httplib::Error::Write;
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthError("backend rejected credentials (HTTP " +
                      std::to_string(res->status) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
      last_was_timeout = false;
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("backend returned HTTP " +
                           std::to_string(res->status) + ": " + res->body);
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") ||
        !parsed["choices"].is_array() || parsed["choices"].empty() ||
        !parsed["choices"][0].contains("message") ||
        !parsed["choices"][0]["message"].contains("content") ||
        !parsed["choices"][0]["message"]["content"].is_string()) {
      throw TransportError("malformed chat-completion response body");
    }
    BackendResponse out;
    out.text = parsed["choices"][0]["message"]["content"].get<std::string>();
    out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    out.attempts = attempt + 1;
    out.backend_id = id();
    return out;
  }
  const std::string what = "backend unreachable after " +
                           std::to_string(config_.max_transport_retries + 1) +
                           " attempts: " + last_error;
  if (last_was_timeout) throw TimeoutError(what);
  throw TransportError(what);
}

std::string request_hash(const BackendRequest& request) {
  // FNV-1a 64-bit over the request fields; stable across runs and platforms.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
  };
  mix(request.model);
  mix(request.system);
  mix(request.user);
  mix(std::to_string(request.max_output_tokens));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

CassetteBackend::CassetteBackend(std::filesystem::path path, CassetteMode mode,
                                 Backend* inner)
    : path_(std::move(path)), mode_(mode), inner_(inner) {
  if (mode_ == CassetteMode::kRecord && inner_ == nullptr) {
    throw ConfigError("cassette record mode needs an inner backend");
  }
  if (std::filesystem::exists(path_)) {
    std::istringstream lines(csv::read_text_file(path_));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("request_hash") ||
          !j.contains("response_text")) {
        throw ParseError(path_.string() + ": line " + std::to_string(line_no) +
                         ": malformed cassette entry");
      }
      entries_[j["request_hash"].get<std::string>()] =
          j["response_text"].get<std::string>();
    }
  } else if (mode_ == CassetteMode::kReplay) {
    throw IoError("cassette file not found: " + path_.string());
  }
}

std::string CassetteBackend::id() const {
  return mode_ == CassetteMode::kReplay
             ? "cassette"
             : (inner_ ? inner_->id() : "cassette");
}

BackendResponse CassetteBackend::complete(const BackendRequest& request) {
  const std::string hash = request_hash(request);
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(hash);
    if (it != entries_.end()) {
      BackendResponse resp;
      resp.text = it->second;
      resp.attempts = 1;
      resp.backend_id = "cassette";
      return resp;
    }
  }
  if (mode_ == CassetteMode::kReplay) {
    throw BackendError("cassette miss for request " + hash + " in " +
                       path_.string());
  }
  BackendResponse resp = inner_->complete(request);
  {
    std::lock_guard lock(mutex_);
    if (entries_.emplace(hash, resp.text).second) {
      json line;
      line["request_hash"] = hash;
      line["response_text"] = resp.text;
      std::ofstream out(path_, std::ios::binary | std::ios::app);
      if (!out) throw IoError("cannot append to cassette: " + path_.string());
      out << line.dump() << '\n';
    }
  }
  return resp;
}

}  // namespace clinact

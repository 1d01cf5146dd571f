#pragma once

#include "svag/hash.hpp"
#include "svag/prompt.hpp"
#include "svag/text.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace svag {

struct GenerationParams {
  double temperature = 0.4;
  double frequency_penalty = 0.0;
  int n = 10;
  int max_tokens = 256;
  std::vector<std::string> stop = {"endmodule"};
  double top_p = 1.0;
  double presence_penalty = 0.0;

  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

namespace detail {

// Shortest round-trippable rendering so 0.4 stays "0.4", not "0.400000".
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace detail

// Readable digest of every sampling knob; fixture files are keyed by
// (prompt_hash, params_digest), so any knob change switches fixtures.
inline std::string params_digest(const GenerationParams& p) {
  std::string d = "t" + detail::format_real(p.temperature);
  d += "_f" + detail::format_real(p.frequency_penalty);
  d += "_n" + std::to_string(p.n);
  d += "_mt" + std::to_string(p.max_tokens);
  d += "_tp" + detail::format_real(p.top_p);
  d += "_pp" + detail::format_real(p.presence_penalty);
  return d;
}

// Cartesian product, temperatures outer, penalties inner, in the given order.
inline std::vector<GenerationParams> enumerate_param_grid(const std::vector<double>& temps,
                                                          const std::vector<double>& freqs,
                                                          const GenerationParams& base = {}) {
  if (temps.empty() || freqs.empty())
    throw std::invalid_argument("parameter grid needs at least one temperature and one penalty");
  std::vector<GenerationParams> out;
  out.reserve(temps.size() * freqs.size());
  for (double t : temps)
    for (double f : freqs) {
      GenerationParams p = base;
      p.temperature = t;
      p.frequency_penalty = f;
      out.push_back(p);
    }
  return out;
}

// Timestamp pinned to the epoch for replayed batches so replayed runs are
// byte-identical; live providers stamp the actual retrieval time.
inline constexpr const char* kEpochTimestamp = "1970-01-01T00:00:00Z";

inline std::string now_utc_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CompletionBatch {
  std::string prompt_hash;
  GenerationParams params;
  std::vector<std::string> completions;  // empty iff failure non-empty
  std::string provider_id;
  std::string retrieved_at;
  std::string failure;  // human-readable note for recorded failures

  bool failed() const { return !failure.empty(); }
};

struct ProviderError : std::runtime_error {
  enum class Kind { Auth, RateLimited, Timeout, Unavailable, Contract };
  Kind kind;

  ProviderError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
  // Auth and Contract problems abort the run; the rest back off and retry.
  bool retryable() const { return kind != Kind::Auth && kind != Kind::Contract; }
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string id() const = 0;
  // Deterministic providers always return the same answer for a key, so
  // failures are final and batch timestamps are pinned for reproducibility.
  virtual bool deterministic() const { return false; }
  // Returns the completions for one (prompt, params) query, or throws
  // ProviderError. Must be safe to call from multiple threads.
  virtual std::vector<std::string> fetch(const PromptInstance& prompt,
                                         const GenerationParams& params) = 0;
};

namespace detail {

// Completions must never contain the stop string: the service truncates
// generation at it, and the repair stage's "append endmodule" rule depends on
// that. A provider that violates this is misconfigured, not unlucky.
inline void check_stop_contract(const std::vector<std::string>& completions,
                                const GenerationParams& params, const std::string& provider) {
  for (const std::string& text : completions)
    for (const std::string& stop : params.stop)
      if (!stop.empty() && text.find(stop) != std::string::npos)
        throw ProviderError(ProviderError::Kind::Contract,
                            "provider '" + provider + "' returned a completion containing the stop string \"" +
                                stop + "\"");
}

inline std::filesystem::path fixture_path(const std::filesystem::path& dir,
                                          const std::string& prompt_hash,
                                          const GenerationParams& params) {
  return dir / (prompt_hash + "_" + params_digest(params) + ".json");
}

}  // namespace detail

// Serves completions from a fixture directory written by a recording run.
// A missing fixture is an Unavailable error: the pipeline records the failure
// and moves on, mirroring how a dead remote endpoint is treated.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(std::filesystem::path fixtures) : fixtures_(std::move(fixtures)) {}

  std::string id() const override { return "replay"; }
  bool deterministic() const override { return true; }

  std::vector<std::string> fetch(const PromptInstance& prompt,
                                 const GenerationParams& params) override {
    std::filesystem::path path = detail::fixture_path(fixtures_, prompt.prompt_hash, params);
    if (!std::filesystem::exists(path))
      throw ProviderError(ProviderError::Kind::Unavailable,
                          "no fixture " + path.filename().string() + " in " + fixtures_.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path.string()));
    } catch (const std::exception& e) {
      throw ProviderError(ProviderError::Kind::Unavailable,
                          "unreadable fixture " + path.string() + ": " + e.what());
    }
    if (!j.contains("completions") || !j["completions"].is_array())
      throw ProviderError(ProviderError::Kind::Unavailable,
                          "fixture " + path.string() + " has no completions array");
    std::vector<std::string> out;
    for (const auto& c : j["completions"]) {
      if (!c.is_string())
        throw ProviderError(ProviderError::Kind::Unavailable,
                            "fixture " + path.string() + " holds a non-string completion");
      out.push_back(c.get<std::string>());
    }
    return out;
  }

 private:
  std::filesystem::path fixtures_;
};

// Wraps another provider and persists every successful batch as a replay
// fixture. Fixture writes go through a rename so a crash never leaves a
// half-written file behind.
class RecordingProvider : public Provider {
 public:
  RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path fixtures)
      : inner_(std::move(inner)), fixtures_(std::move(fixtures)) {
    std::filesystem::create_directories(fixtures_);
  }

  std::string id() const override { return "record(" + inner_->id() + ")"; }
  bool deterministic() const override { return inner_->deterministic(); }

  std::vector<std::string> fetch(const PromptInstance& prompt,
                                 const GenerationParams& params) override {
    std::vector<std::string> completions = inner_->fetch(prompt, params);
    nlohmann::json j;
    j["prompt_hash"] = prompt.prompt_hash;
    j["params_digest"] = params_digest(params);
    j["completions"] = completions;
    std::filesystem::path path = detail::fixture_path(fixtures_, prompt.prompt_hash, params);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    write_file(tmp.string(), j.dump(2) + "\n");
    std::filesystem::rename(tmp, path);
    return completions;
  }

 private:
  std::shared_ptr<Provider> inner_;
  std::filesystem::path fixtures_;
};

struct RetryPolicy {
  int attempts = 5;
  int base_delay_ms = 500;  // grows 2x per attempt, with jitter; 0 in tests
  uint64_t jitter_seed = 0x5eedf00d;
};

// Issues one query with retry/backoff and wraps the result as a batch.
// Retryable errors (rate limit, timeout, outage) back off exponentially with
// jitter; when attempts run out the failure is recorded on the batch and the
// pipeline keeps going. Auth and contract errors propagate and abort the run.
inline CompletionBatch complete(Provider& provider, const PromptInstance& prompt,
                                const GenerationParams& params, const RetryPolicy& retry = {}) {
  CompletionBatch batch;
  batch.prompt_hash = prompt.prompt_hash;
  batch.params = params;
  batch.provider_id = provider.id();

  std::mt19937_64 rng(retry.jitter_seed ^ fnv1a64(prompt.prompt_hash));
  std::string last_error;
  for (int attempt = 0; attempt < retry.attempts; ++attempt) {
    if (attempt > 0 && retry.base_delay_ms > 0) {
      double jitter = 0.5 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      auto delay = std::chrono::milliseconds(
          static_cast<long>(retry.base_delay_ms * (1 << (attempt - 1)) * jitter));
      std::this_thread::sleep_for(delay);
    }
    try {
      std::vector<std::string> completions = provider.fetch(prompt, params);
      detail::check_stop_contract(completions, params, provider.id());
      batch.completions = std::move(completions);
      batch.retrieved_at = provider.deterministic() ? kEpochTimestamp : now_utc_iso8601();
      return batch;
    } catch (const ProviderError& e) {
      if (!e.retryable()) throw;
      last_error = e.what();
      // A deterministic provider's miss will not heal on a later attempt.
      if (provider.deterministic()) break;
    }
  }
  batch.failure = last_error.empty() ? "no attempts made" : last_error;
  batch.retrieved_at = provider.deterministic() ? kEpochTimestamp : now_utc_iso8601();
  return batch;
}

}  // namespace svag

// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <replaylab/explorer/bundle.hpp>

namespace replaylab::explorer {

class ExplorerError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class Clock {
  public:
    virtual ~Clock() = default;
    virtual std::uint64_t now_ms() = 0;
    virtual void sleep_ms(std::uint64_t ms) = 0;
};

class SteadyClock final : public Clock {
  public:
    std::uint64_t now_ms() override;
    void sleep_ms(std::uint64_t ms) override;
};

//! Time only moves when someone sleeps or calls advance().
class VirtualClock final : public Clock {
  public:
    std::uint64_t now_ms() override { return now_; }
    void sleep_ms(std::uint64_t ms) override { now_ += ms; }
    void advance(std::uint64_t ms) { now_ += ms; }

  private:
    std::uint64_t now_{0};
};

struct RateLimiterPolicy {
    std::uint64_t min_interval_ms{350};
    std::uint64_t pause_every{5};
    std::uint64_t pause_ms{1000};

    //! Applies EXPLORER_MIN_INTERVAL_MS, EXPLORER_PAUSE_EVERY and EXPLORER_PAUSE_MS when set.
    static RateLimiterPolicy from_env();
    static RateLimiterPolicy from_env(RateLimiterPolicy base);
};

//! Spaces requests at least min_interval_ms apart and inserts an extra pause_ms before
//! every request that follows a multiple of pause_every requests.
class RateLimiter {
  public:
    RateLimiter(RateLimiterPolicy policy, Clock& clock) : policy_(policy), clock_(clock) {}

    //! Blocks until the next request may go out; returns the grant time.
    std::uint64_t acquire();
    [[nodiscard]] std::size_t count() const { return count_; }

  private:
    RateLimiterPolicy policy_;
    Clock& clock_;
    std::size_t count_{0};
    std::uint64_t last_{0};
};

struct RetryPolicy {
    std::size_t max_retries{3};
    std::uint64_t backoff_ms{250};  // doubled after each failed attempt
};

class ExplorerClient {
  public:
    ExplorerClient(std::string base_url, RateLimiterPolicy policy, Clock& clock, RetryPolicy retry = {});

    //! Sends one query and returns the envelope, or nullopt when the body arrived truncated.
    std::optional<Json> query(const std::map<std::string, std::string>& params);

    //! Grant time of every request sent, retries included.
    [[nodiscard]] const std::vector<std::uint64_t>& request_times() const { return times_; }

  private:
    std::string base_url_;
    Clock& clock_;
    RateLimiter limiter_;
    RetryPolicy retry_;
    std::vector<std::uint64_t> times_;
};

//! Base URL from EXPLORER_URL, else the fallback.
std::string explorer_url_from_env(const std::string& fallback);

HistoricBundle fetch_bundle(ExplorerClient& client, const Address& contract, std::size_t T);
HistoricBundle fetch_bundle(const std::string& base_url, const Address& contract, std::size_t T,
                            const RateLimiterPolicy& policy);

}  // namespace replaylab::explorer

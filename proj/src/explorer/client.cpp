// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/explorer/client.hpp>

#include <chrono>
#include <cstdlib>
#include <set>
#include <thread>

#include <httplib.h>

namespace replaylab::explorer {

std::uint64_t SteadyClock::now_ms() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch()).count());
}

void SteadyClock::sleep_ms(std::uint64_t ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); }

namespace {

    void env_override(const char* name, std::uint64_t& field) {
        if (const char* v = std::getenv(name); v != nullptr && *v != '\0') field = std::stoull(v);
    }

}  // namespace

RateLimiterPolicy RateLimiterPolicy::from_env() { return from_env(RateLimiterPolicy{}); }

RateLimiterPolicy RateLimiterPolicy::from_env(RateLimiterPolicy base) {
    env_override("EXPLORER_MIN_INTERVAL_MS", base.min_interval_ms);
    env_override("EXPLORER_PAUSE_EVERY", base.pause_every);
    env_override("EXPLORER_PAUSE_MS", base.pause_ms);
    return base;
}

std::uint64_t RateLimiter::acquire() {
    if (count_ > 0) {
        std::uint64_t due = last_ + policy_.min_interval_ms;
        if (policy_.pause_every > 0 && count_ % policy_.pause_every == 0) due += policy_.pause_ms;
        const std::uint64_t now = clock_.now_ms();
        if (now < due) clock_.sleep_ms(due - now);
    }
    last_ = clock_.now_ms();
    ++count_;
    return last_;
}

std::string explorer_url_from_env(const std::string& fallback) {
    const char* v = std::getenv("EXPLORER_URL");
    return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

ExplorerClient::ExplorerClient(std::string base_url, RateLimiterPolicy policy, Clock& clock, RetryPolicy retry)
    : base_url_(std::move(base_url)), clock_(clock), limiter_(policy, clock), retry_(retry) {}

std::optional<Json> ExplorerClient::query(const std::map<std::string, std::string>& params) {
    httplib::Client http(base_url_);
    http.set_connection_timeout(2);
    http.set_read_timeout(10);
    httplib::Params p(params.begin(), params.end());
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= retry_.max_retries; ++attempt) {
        if (attempt > 0) clock_.sleep_ms(retry_.backoff_ms << (attempt - 1));
        times_.push_back(limiter_.acquire());
        auto res = http.Get("/api", p, httplib::Headers{});
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        try {
            return Json::parse(res->body);
        } catch (const Json::parse_error&) {
            return std::nullopt;
        }
    }
    throw ExplorerError("explorer request failed after " + std::to_string(retry_.max_retries) +
                        " retries: " + last_error);
}

namespace {

    class BundleFetcher {
      public:
        BundleFetcher(ExplorerClient& c, HistoricBundle& b) : client_(c), bundle_(b) {}

        //! Result array/value of a successful envelope; nullopt for "no records" or truncation.
        std::optional<Json> result(std::map<std::string, std::string> params) {
            const std::string action = params.at("action");
            auto env = client_.query(params);
            if (!env) {
                bundle_.partial = true;
                bundle_.partial_reasons.push_back(action + ": truncated response");
                return std::nullopt;
            }
            if (env->value("status", "0") != "1") {
                if (env->value("message", "") == "NOTOK") {
                    throw ExplorerError(action + ": " + env->value("result", Json("")).dump());
                }
                return std::nullopt;
            }
            return env->at("result");
        }

      private:
        ExplorerClient& client_;
        HistoricBundle& bundle_;
    };

}  // namespace

HistoricBundle fetch_bundle(ExplorerClient& client, const Address& contract, std::size_t T) {
    if (T == 0) throw std::invalid_argument("T must be positive");
    HistoricBundle b;
    b.contract_address = contract;
    b.requested_T = T;
    BundleFetcher f{client, b};
    const std::string addr = contract.hex();

    auto src = f.result({{"module", "contract"}, {"action", "getsourcecode"}, {"address", addr}});
    if (!src) {
        if (b.partial) return b;
        throw ExplorerError("no verified source for " + addr);
    }
    b.contract_name = src->at("contract_name").get<std::string>();
    b.source = src->at("source").get<std::string>();
    b.iface = chain::interface_from_json(src->at("interface"));
    b.creation.tx_hash = Hash32::from_hex(src->at("creation_tx_hash").get<std::string>());
    b.creation.internal = src->at("created_internal").get<bool>();

    if (auto ctx = f.result({{"module", "proxy"}, {"action", "eth_getTransactionByHash"}, {"txhash", b.creation.tx_hash.hex()}})) {
        const auto rec = chain::tx_record_from_json(*ctx);
        b.creation.block_number = rec.receipt.block_number;
        b.creation.timestamp = rec.timestamp;
        b.creation.gas_limit = rec.tx.gas_limit;
        if (!b.creation.internal) {
            b.creation.from = rec.tx.from;
            b.creation.args = rec.tx.args;
            b.creation.value = rec.tx.value;
        }
    }
    if (b.creation.internal) {
        // The creating call is one of the internal transactions of the creation transaction.
        bool found = false;
        if (auto its = f.result({{"module", "account"}, {"action", "txlistinternal"}, {"txhash", b.creation.tx_hash.hex()}})) {
            for (const auto& j : *its) {
                const auto it = chain::internal_tx_from_json(j);
                if (it.created == contract) {
                    b.creation.from = it.from;
                    b.creation.args = it.args;
                    b.creation.value = it.value;
                    found = true;
                }
            }
        }
        if (!found && !b.partial) throw ExplorerError("creation of " + addr + " not found in its internal trace");
    }

    if (auto list = f.result({{"module", "account"}, {"action", "txlist"}, {"address", addr}, {"limit", std::to_string(T)}})) {
        for (const auto& j : *list) b.transactions.push_back(chain::tx_record_from_json(j));
    }
    if (b.transactions.size() > T) b.transactions.resize(T);
    b.clamped = b.transactions.size() < T;

    std::set<Hash32> hashes;
    for (const auto& r : b.transactions) hashes.insert(r.tx.hash);
    if (auto logs = f.result({{"module", "logs"}, {"action", "getLogs"}, {"address", addr}})) {
        for (const auto& j : *logs) {
            auto e = chain::event_from_json(j);
            if (hashes.contains(e.tx_hash)) b.event_logs.push_back(std::move(e));
        }
    }
    for (auto& r : b.transactions) {
        for (const auto& e : b.event_logs) {
            if (e.tx_hash == r.tx.hash) r.receipt.events.push_back(e);
        }
        if (auto its = f.result({{"module", "account"}, {"action", "txlistinternal"}, {"txhash", r.tx.hash.hex()}})) {
            for (const auto& j : *its) r.receipt.internal_txs.push_back(chain::internal_tx_from_json(j));
        }
        if (!r.receipt.internal_txs.empty()) b.internal_trace[r.tx.hash] = r.receipt.internal_txs;
    }
    for (const auto& r : b.transactions) {
        for (const auto& a : {std::optional<Address>(r.tx.from), r.tx.to}) {
            if (!a || b.balances.contains({*a, r.receipt.block_number})) continue;
            auto v = f.result({{"module", "account"},
                               {"action", "balancehistory"},
                               {"address", a->hex()},
                               {"blockno", std::to_string(r.receipt.block_number)}});
            b.balances[{*a, r.receipt.block_number}] = v ? word_from_string(v->get<std::string>()) : Word{0};
        }
    }
    if (auto incoming = f.result({{"module", "account"}, {"action", "txlistinternal"}, {"address", addr}})) {
        for (const auto& j : *incoming) {
            auto it = chain::internal_tx_from_json(j);
            if (it.to == contract) b.incoming_internal.push_back(std::move(it));
        }
    }
    return b;
}

HistoricBundle fetch_bundle(const std::string& base_url, const Address& contract, std::size_t T,
                            const RateLimiterPolicy& policy) {
    SteadyClock clock;
    ExplorerClient client{base_url, policy, clock};
    return fetch_bundle(client, contract, T);
}

}  // namespace replaylab::explorer

// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include <gtest/gtest.h>

#include <harness.hpp>
#include <replaylab/scriptgen/plan.hpp>

using namespace replaylab;
using namespace replaylab::scriptgen;
using replaylab::harness::fetch;
using replaylab::harness::record;

namespace {

chain::TxRecord call_from(const Address& from, const Address& to) {
    chain::TxRecord r;
    r.tx.from = from;
    r.tx.to = to;
    r.tx.method = "ping";
    r.tx.hash = Hash32::from_word(DigestBuilder{}.add(from).finish().to_word());
    return r;
}

explorer::HistoricBundle synthetic(std::size_t senders, const std::string& source = "") {
    explorer::HistoricBundle b;
    b.contract_address = derive_address("synthetic-contract", 0);
    b.contract_name = "Target";
    b.source = source;
    b.creation.from = derive_address("synthetic-creator", 0);
    for (std::size_t i = 0; i < senders; ++i) {
        b.transactions.push_back(call_from(derive_address("synthetic-sender", i), b.contract_address));
    }
    b.requested_T = senders;
    return b;
}

// Reads a ustar archive back: name -> contents. Verifies header checksums on the way.
std::map<std::string, std::string> untar(const std::string& tar) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos + 512 <= tar.size()) {
        const char* h = tar.data() + pos;
        if (std::all_of(h, h + 512, [](char c) { return c == 0; })) break;
        unsigned sum = 0;
        for (int i = 0; i < 512; ++i) sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(h[i]);
        EXPECT_EQ(std::stoul(std::string(h + 148, 6), nullptr, 8), sum);
        EXPECT_EQ(std::string(h + 257, 5), "ustar");
        EXPECT_EQ(std::stoul(std::string(h + 136, 11), nullptr, 8), 0u);
        const std::string name(h);
        const std::size_t size = std::stoul(std::string(h + 124, 11), nullptr, 8);
        out[name] = tar.substr(pos + 512, size);
        pos += 512 + (size + 511) / 512 * 512;
    }
    return out;
}

}  // namespace

TEST(address_map, reserved_prefix_then_first_appearance) {
    auto b = synthetic(6);
    b.transactions.push_back(call_from(b.transactions[2].tx.from, b.contract_address));
    const auto r = build_address_map(b, {});
    // creator + 6 senders, with the repeat folded
    ASSERT_EQ(r.map.size(), 3u + 7u);
    EXPECT_TRUE(r.map.historic(kZeroRef).is_zero());
    EXPECT_EQ(r.map.historic(kOneRef).to_word(), Word{1});
    EXPECT_EQ(r.map.historic(kContractRef), b.contract_address);
    EXPECT_EQ(r.map.historic(3), b.creation.from);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(r.map.historic(4 + i), b.transactions[i].tx.from);
    EXPECT_FALSE(r.truncated);
    EXPECT_EQ(r.kept_transactions, 7u);
}

TEST(address_map, cap_truncates_to_a_prefix) {
    const auto b = synthetic(1005);
    const auto r = build_address_map(b, {}, 1000);
    EXPECT_TRUE(r.truncated);
    EXPECT_LE(r.map.size(), 1000u);
    EXPECT_EQ(r.kept_transactions, 1000u - 4u);
    for (std::size_t i = 0; i < r.kept_transactions; ++i) EXPECT_TRUE(r.map.find(b.transactions[i].tx.from));
    EXPECT_FALSE(r.map.find(b.transactions[r.kept_transactions].tx.from));
    const auto plan = generate_plan(b, r, {});
    EXPECT_TRUE(plan.truncated);
    EXPECT_EQ(plan.T(), r.kept_transactions);

    EXPECT_THROW(build_address_map(b, {}, 2), ScriptgenError);
    EXPECT_THROW(build_address_map(b, {}, 3), ScriptgenError);  // creator does not fit
}

TEST(address_map, sender_that_is_also_a_literal_gets_one_entry) {
    const Address lit = Address::from_hex("0x00000000000000000000000000000000000c0ffe");
    auto b = synthetic(0, "contract Target {\n    fn ping() {\n        address a = 0x00000000000000000000000000000000000c0ffe;\n    }\n}\n");
    b.transactions.push_back(call_from(lit, b.contract_address));
    const auto r = build_address_map(b, {});
    ASSERT_EQ(r.map.size(), 5u);
    EXPECT_EQ(r.map.find(lit), 4u);  // literals precede senders
}

TEST(address_map, replay_side_inverse) {
    const auto r = build_address_map(synthetic(4), {});
    const Address deployed = derive_address("deployed", 1);
    for (std::size_t ref = 0; ref < r.map.size(); ++ref) {
        EXPECT_EQ(r.map.find_replay(r.map.replay(ref, deployed), deployed), ref);
    }
    EXPECT_FALSE(r.map.find_replay(illegal_sender(0), deployed));
}

TEST(plan, minilotto_shape) {
    const auto b = fetch(record("minilotto"), "lotto", 1000);
    const auto m = build_address_map(b, {});
    const auto plan = generate_plan(b, m, {.seed = 7});
    EXPECT_EQ(plan.T(), 27u);
    EXPECT_EQ(plan.getters.size(), 7u);
    EXPECT_EQ(plan_to_json(plan).at("steps").size(), 1u + 27u + 7u);
    EXPECT_EQ(plan.deploy.from, 3u);
    for (const auto& s : plan.txs) {
        EXPECT_FALSE(s.force_fail);
        EXPECT_EQ(s.to, kContractRef);
        EXPECT_EQ(s.expected_events.size(), 1u);
        EXPECT_EQ(s.expected_events[0].params[0].value.ref, s.from);
    }
}

TEST(plan, failed_transactions_are_forced) {
    const auto rec = record("wallie");
    const auto b = fetch(rec, "wallie", 1000);
    const auto plan = generate_plan(b, build_address_map(b, {}), {});
    std::size_t forced = 0;
    std::set<Address> illegal;
    for (const auto& s : plan.txs) {
        EXPECT_EQ(s.force_fail, s.expected_status != chain::Status::kSuccess);
        forced += s.force_fail;
        illegal.insert(s.illegal_from);
        EXPECT_EQ(rec.state.account(s.illegal_from), nullptr);
        EXPECT_FALSE(plan.address_map.find(s.illegal_from));
    }
    EXPECT_GT(forced, 0u);
    EXPECT_EQ(illegal.size(), plan.T());
}

TEST(plan, deterministic_and_round_trips) {
    const auto b = fetch(record("wallie"), "wallie", 1000);
    const auto a = generate_plan(b, build_address_map(b, {}), {.seed = 3});
    const auto c = generate_plan(b, build_address_map(b, {}), {.seed = 3});
    EXPECT_EQ(render_plan(a), render_plan(c));
    const auto back = plan_from_json(Json::parse(render_plan(a)), a.source);
    EXPECT_EQ(back, a);
    EXPECT_THROW(plan_from_json(plan_to_json(a), a.source + " "), ScriptgenError);
    EXPECT_NE(render_plan(a), render_plan(generate_plan(b, build_address_map(b, {}), {.seed = 4})));
}

TEST(plan, partial_bundle_is_refused) {
    auto b = synthetic(2);
    b.partial = true;
    const auto m = build_address_map(b, {});
    EXPECT_THROW(generate_plan(b, m, {}), ScriptgenError);
    EXPECT_NO_THROW(generate_plan(b, m, {.allow_partial = true}));
}

TEST(translate, packed_words_embed_addresses) {
    const auto b = fetch(record("ledger"), "ledger", 1000);
    // the minted-to accounts never transact, so they only enter the map as discovered addresses
    std::vector<Address> discovered;
    for (std::uint64_t k = 100; k < 150; ++k) discovered.push_back(pipeline::historic_eoa(k));
    EXPECT_EQ(build_address_map(b, discovered).map.size(), build_address_map(b, {}).map.size() + 50);
    const auto plan = generate_plan(b, build_address_map(b, discovered), {});
    const Address deployed = derive_address("deployed", 9);
    std::size_t embedded = 0;
    for (std::size_t i = 0; i < plan.T(); ++i) {
        const auto& hist = b.transactions[i].tx.args;
        ASSERT_EQ(hist.size(), plan.txs[i].args.size());
        for (std::size_t k = 0; k < hist.size(); ++k) {
            const auto& a = plan.txs[i].args[k];
            if (a.type != mcl::Type::kUintArray) {
                EXPECT_EQ(historic_word(plan.address_map, a.word), hist[k].word);
                continue;
            }
            for (std::size_t j = 0; j < a.items.size(); ++j) {
                EXPECT_EQ(historic_word(plan.address_map, a.items[j]), hist[k].items[j]);
                for (const auto& e : a.items[j].embeds) {
                    ++embedded;
                    EXPECT_EQ(e.shift, 96u);
                    const Word w = resolve_word(plan.address_map, a.items[j], deployed);
                    EXPECT_EQ(Address::from_word(w >> 96), plan.address_map.replay(e.ref, deployed));
                    EXPECT_EQ(w & word_mask(96), hist[k].items[j] & word_mask(96));
                }
            }
        }
    }
    EXPECT_EQ(embedded, 50u + 1u);  // plus the packed word in the rejected call
}

TEST(translate, plain_values_pass_through) {
    const auto m = build_address_map(synthetic(3), {}).map;
    for (Word w : {Word{0}, Word{1}, Word{7}, Word{65535}, word_mask(200)}) {
        const auto t = translate_word(m, mcl::Type::kUint, w);
        EXPECT_FALSE(t.ref);
        EXPECT_TRUE(t.embeds.empty());
        EXPECT_EQ(t.residual, w);
    }
    EXPECT_EQ(translate_word(m, mcl::Type::kAddress, m.historic(4).to_word()).ref, 4u);
    // an unmapped address passes through as a literal
    const Word stranger = derive_address("stranger", 0).to_word();
    EXPECT_EQ(translate_word(m, mcl::Type::kAddress, stranger).residual, stranger);
}

TEST(getters, counter_based_arguments) {
    const auto a = getter_argument(5, "balanceOf", 0, mcl::Type::kAddress, 40);
    EXPECT_EQ(a, getter_argument(5, "balanceOf", 0, mcl::Type::kAddress, 40));
    ASSERT_TRUE(a.word.ref);
    EXPECT_LT(*a.word.ref, 40u);
    std::set<Word> seen;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        const auto u = getter_argument(seed, "f", 1, mcl::Type::kUint, 10);
        EXPECT_LT(u.word.residual, Word{65536});
        seen.insert(u.word.residual);
    }
    EXPECT_GT(seen.size(), 60u);

    // adding a getter to the source leaves existing probes unchanged
    const auto b = fetch(record("wallie"), "wallie", 1000);
    const auto m = build_address_map(b, {});
    const auto plan = generate_plan(b, m, {.seed = 11});
    auto extended = b;
    extended.iface.methods.push_back({"zzExtra", {{"x", mcl::Type::kUint}}, {mcl::Type::kUint}, true});
    const auto plan2 = generate_plan(extended, m, {.seed = 11});
    ASSERT_EQ(plan2.getters.size(), plan.getters.size() + 1);
    for (std::size_t i = 0; i < plan.getters.size(); ++i) EXPECT_EQ(plan.getters[i], plan2.getters[i]);
}

TEST(box, ustar_layout) {
    const auto b = fetch(record("minilotto"), "lotto", 5);
    const auto plan = generate_plan(b, build_address_map(b, {}), {});
    const auto genesis = genesis_config(plan, Word{1'000'000}, Word{1});
    EXPECT_EQ(genesis.at("accounts").size(), plan.address_map.size() - kReservedEntries);
    const std::string tar = test_box(plan, genesis);
    EXPECT_EQ(tar.size() % 512, 0u);
    EXPECT_EQ(tar, test_box(plan, genesis));
    const auto files = untar(tar);
    ASSERT_EQ(files.size(), 3u);
    EXPECT_EQ(files.at("contracts/MiniLotto.mcl"), plan.source);
    EXPECT_EQ(files.at("test/plan.json"), render_plan(plan));
    EXPECT_EQ(Json::parse(files.at("config/genesis.json")), genesis);
}

TEST(address_map, contracts_created_by_the_target) {
    const auto rec = record("factory");
    const auto b = fetch(rec, "factory", 1000);
    const auto m = build_address_map(b, {}).map;
    const Address deployed = derive_address("deployed-factory", 0);
    for (const char* alias : {"congress", "congress2"}) {
        const auto ref = m.find(rec.aliases.at(alias));
        ASSERT_TRUE(ref) << alias;
        const auto nonce = m.creation_nonce(*ref);
        ASSERT_TRUE(nonce);
        // oracle: the same nonce rederives the historic address from the historic creator
        EXPECT_EQ(chain::WorldState::create_address(b.contract_address, *nonce), rec.aliases.at(alias));
        EXPECT_EQ(m.replay(*ref, deployed), chain::WorldState::create_address(deployed, *nonce));
        EXPECT_EQ(m.find_replay(m.replay(*ref, deployed), deployed), ref);
    }
    const auto plan = generate_plan(b, build_address_map(b, {}), {});
    EXPECT_EQ(plan_from_json(plan_to_json(plan), plan.source), plan);
    for (const auto& acc : genesis_config(plan, 1, 0).at("accounts")) {
        EXPECT_FALSE(plan.address_map.creation_nonce(acc.at("ref").get<std::size_t>()));
    }
    AddressMap dup{b.contract_address};
    EXPECT_THROW(dup.add_created(b.contract_address, 0), ScriptgenError);
}

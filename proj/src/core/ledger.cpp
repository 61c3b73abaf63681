#include "ledger.hpp"

#include <sodium.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <unordered_set>

namespace vpass::ledger {

using nlohmann::json;

KeyPair keygen_from_seed(uint64_t seed) {
    Bytes buf;
    append_str(buf, "ledger.keypair");
    append_u64(buf, seed);
    Digest kseed = sha256(buf);
    static_assert(sizeof(Digest) == crypto_sign_SEEDBYTES);
    KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), kseed.data());
    return kp;
}

Bytes sign(const Bytes& secret_key, std::span<const uint8_t> payload) {
    if (secret_key.size() != crypto_sign_SECRETKEYBYTES)
        fail(Errc::invalid_argument, "bad secret key length");
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, payload.data(), payload.size(), secret_key.data());
    return sig;
}

bool verify_sig(const Bytes& public_key, std::span<const uint8_t> payload,
                std::span<const uint8_t> signature) {
    if (public_key.size() != crypto_sign_PUBLICKEYBYTES || signature.size() != crypto_sign_BYTES)
        return false;
    return crypto_sign_verify_detached(signature.data(), payload.data(), payload.size(),
                                       public_key.data()) == 0;
}

std::pair<std::vector<Party>, std::vector<KeyPair>> make_parties(size_t k, uint64_t seed) {
    if (k == 0) fail(Errc::invalid_argument, "need at least one party");
    std::vector<Party> parties;
    std::vector<KeyPair> keys;
    parties.reserve(k);
    keys.reserve(k);
    for (size_t i = 0; i < k; ++i) {
        KeyPair kp = keygen_from_seed(derive_seed(seed, "ledger.party", i));
        parties.push_back(Party{"party-" + std::to_string(i), kp.public_key, true});
        keys.push_back(std::move(kp));
    }
    return {std::move(parties), std::move(keys)};
}

Bytes Transaction::signing_bytes() const {
    Bytes out;
    append_str(out, type);
    append_u32(out, static_cast<uint32_t>(payload.size()));
    append_bytes(out, payload);
    return out;
}

Bytes Transaction::canonical() const {
    Bytes out = signing_bytes();
    out.push_back(party ? 1 : 0);
    if (party) append_str(out, *party);
    out.push_back(signature ? 1 : 0);
    if (signature) {
        append_u32(out, static_cast<uint32_t>(signature->size()));
        append_bytes(out, *signature);
    }
    return out;
}

Transaction Transaction::decode(ByteReader& r) {
    Transaction tx;
    tx.type = r.read_str();
    tx.payload = r.read_bytes(r.read_u32());
    uint8_t has_party = r.read_u8();
    if (has_party > 1) fail(Errc::parse, "bad party flag");
    if (has_party) tx.party = r.read_str();
    uint8_t has_sig = r.read_u8();
    if (has_sig > 1) fail(Errc::parse, "bad signature flag");
    if (has_sig) tx.signature = r.read_bytes(r.read_u32());
    return tx;
}

Bytes encode_rec_payload(const Digest& id, const std::string& record_json) {
    Bytes out;
    append_bytes(out, id);
    append_str(out, record_json);
    return out;
}

std::pair<Digest, std::string> decode_rec_payload(std::span<const uint8_t> payload) {
    ByteReader r(payload);
    Bytes idb = r.read_bytes(32);
    std::string rec = r.read_str();
    if (!r.done()) fail(Errc::parse, "trailing bytes in rec payload");
    Digest id{};
    std::copy(idb.begin(), idb.end(), id.begin());
    return {id, std::move(rec)};
}

Bytes encode_member_payload(const std::string& party_id, const Bytes& public_key) {
    Bytes out;
    append_str(out, party_id);
    append_u32(out, static_cast<uint32_t>(public_key.size()));
    append_bytes(out, public_key);
    return out;
}

std::pair<std::string, Bytes> decode_member_payload(std::span<const uint8_t> payload) {
    ByteReader r(payload);
    std::string id = r.read_str();
    Bytes pk = r.read_bytes(r.read_u32());
    if (!r.done()) fail(Errc::parse, "trailing bytes in member payload");
    return {std::move(id), std::move(pk)};
}

Bytes Block::canonical() const {
    Bytes out;
    append_u64(out, height);
    append_bytes(out, prev_hash);
    append_str(out, producer);
    append_u32(out, static_cast<uint32_t>(transactions.size()));
    for (const auto& tx : transactions) {
        Bytes enc = tx.canonical();
        append_bytes(out, enc);
    }
    return out;
}

namespace {

Block decode_block_content(ByteReader& r) {
    Block b;
    b.height = r.read_u64();
    Bytes prev = r.read_bytes(32);
    std::copy(prev.begin(), prev.end(), b.prev_hash.begin());
    b.producer = r.read_str();
    uint32_t ntx = r.read_u32();
    // every encoded transaction takes several bytes, so a count beyond the
    // remaining frame is corruption; checking before reserve keeps corrupted
    // inputs from turning into allocation failures
    if (ntx > r.remaining()) fail(Errc::parse, "transaction count exceeds frame");
    b.transactions.reserve(ntx);
    for (uint32_t i = 0; i < ntx; ++i) b.transactions.push_back(Transaction::decode(r));
    return b;
}

}  // namespace

Ledger Ledger::create(std::vector<Party> parties, bool empty_blocks) {
    if (parties.empty()) fail(Errc::invalid_argument, "membership set must be non-empty");
    std::unordered_set<std::string> ids;
    for (const auto& p : parties) {
        if (p.id.empty()) fail(Errc::invalid_argument, "empty party id");
        if (p.public_key.size() != crypto_sign_PUBLICKEYBYTES)
            fail(Errc::invalid_argument, "bad public key length for " + p.id);
        if (!ids.insert(p.id).second) fail(Errc::duplicate, "duplicate party id " + p.id);
    }
    Ledger lg;
    lg.parties_ = std::move(parties);
    lg.empty_blocks_ = empty_blocks;
    Block genesis;
    genesis.height = 0;
    genesis.prev_hash = Digest{};
    genesis.producer = lg.parties_[0].id;
    for (const auto& p : lg.parties_) {
        Transaction tx;
        tx.type = "member";
        tx.payload = encode_member_payload(p.id, p.public_key);
        genesis.transactions.push_back(std::move(tx));
    }
    genesis.hash = genesis.compute_hash();
    lg.blocks_.push_back(std::move(genesis));
    return lg;
}

const Block& Ledger::block(size_t height) const {
    if (height >= blocks_.size())
        fail(Errc::out_of_range, "block " + std::to_string(height) + " out of range (chain has " +
                                     std::to_string(blocks_.size()) + ")");
    return blocks_[height];
}

const Party* Ledger::find_party(const std::string& id) const {
    for (const auto& p : parties_)
        if (p.id == id) return &p;
    return nullptr;
}

void Ledger::check_payload(const Transaction& tx) const {
    try {
        if (tx.type == "rec") {
            decode_rec_payload(tx.payload);
        } else if (tx.type == "hscan") {
            if (tx.payload.empty()) fail(Errc::validation, "empty hscan payload");
        } else {
            fail(Errc::invalid_argument, "unknown transaction type " + tx.type);
        }
    } catch (const Error& e) {
        if (e.code() == Errc::parse)
            fail(Errc::validation, std::string("malformed payload: ") + e.what());
        throw;
    }
}

void Ledger::broadcast(const std::string& party_id, const Bytes& sk, Transaction tx) {
    if (!tx.party || *tx.party != party_id)
        fail(Errc::invalid_argument, "transaction must carry the broadcasting party");
    const Party* p = find_party(party_id);
    if (!p || !p->authorized) fail(Errc::unauthorized, party_id + " is not an authorized member");
    check_payload(tx);
    if (!tx.signature) tx.signature = sign(sk, tx.signing_bytes());
    if (!verify_sig(p->public_key, tx.signing_bytes(), *tx.signature))
        fail(Errc::bad_signature, "signature does not verify for " + party_id);
    mempool_.push_back(MempoolEntry{std::move(tx), tick_ + 1, next_seq_++});
}

void Ledger::anon_broadcast(const Bytes& sk, Transaction tx, uint64_t delay_ticks) {
    if (tx.party || tx.signature)
        fail(Errc::invalid_argument, "anonymous transaction must not carry identity");
    // a 'rec' requires identity by invariant, so only 'hscan' may go this way
    if (tx.type != "hscan")
        fail(Errc::validation, "transaction type " + tx.type + " requires identity");
    check_payload(tx);
    if (sk.size() != crypto_sign_SECRETKEYBYTES) fail(Errc::unauthorized, "bad secret key");
    Bytes pk(crypto_sign_PUBLICKEYBYTES);
    crypto_sign_ed25519_sk_to_pk(pk.data(), sk.data());
    const Party* owner = nullptr;
    for (const auto& p : parties_)
        if (p.public_key == pk) owner = &p;
    if (!owner || !owner->authorized)
        fail(Errc::unauthorized, "secret key does not belong to an authorized member");
    mempool_.push_back(MempoolEntry{std::move(tx), tick_ + 1 + delay_ticks, next_seq_++});
}

std::optional<Block> Ledger::produce_block(uint64_t tick) {
    if (tick <= tick_) fail(Errc::state, "tick must advance monotonically");
    tick_ = tick;
    std::vector<Transaction> eligible;
    std::deque<MempoolEntry> rest;
    for (auto& e : mempool_) {
        if (e.not_before_tick <= tick)
            eligible.push_back(std::move(e.tx));
        else
            rest.push_back(std::move(e));
    }
    if (eligible.empty() && !empty_blocks_) {
        mempool_ = std::move(rest);
        return std::nullopt;
    }
    mempool_ = std::move(rest);
    Block b;
    b.height = blocks_.size();
    b.prev_hash = blocks_.back().hash;
    b.producer = parties_[b.height % parties_.size()].id;
    b.transactions = std::move(eligible);
    b.hash = b.compute_hash();
    blocks_.push_back(b);
    return b;
}

VerifyReport Ledger::verify_chain() const { return verify_blocks(blocks_, parties_); }

VerifyReport Ledger::verify_blocks(const std::vector<Block>& blocks,
                                   const std::vector<Party>& parties) {
    auto violation = [](uint64_t h, std::string what) {
        return VerifyReport{false, h, std::move(what)};
    };
    if (blocks.empty()) return violation(0, "empty chain (missing genesis)");
    for (size_t h = 0; h < blocks.size(); ++h) {
        const Block& b = blocks[h];
        if (b.height != h) return violation(h, "height field mismatch");
        if (h == 0) {
            if (b.prev_hash != Digest{}) return violation(h, "genesis prevHash not zero");
        } else if (b.prev_hash != blocks[h - 1].hash) {
            return violation(h, "prevHash does not match previous block hash");
        }
        if (b.compute_hash() != b.hash) return violation(h, "stored hash does not match content");
        if (!parties.empty() && b.producer != parties[h % parties.size()].id)
            return violation(h, "producer violates round-robin order");
        for (const auto& tx : b.transactions) {
            if (tx.type == "member") {
                if (h != 0) return violation(h, "member transaction outside genesis");
                if (tx.party || tx.signature)
                    return violation(h, "member transaction carries identity");
                continue;
            }
            if (tx.type != "rec" && tx.type != "hscan")
                return violation(h, "unknown transaction type " + tx.type);
            if (tx.type == "rec" && !tx.party)
                return violation(h, "rec transaction without identity");
            if (tx.party) {
                if (!tx.signature) return violation(h, "identified transaction lacks signature");
                const Party* p = nullptr;
                for (const auto& q : parties)
                    if (q.id == *tx.party) p = &q;
                if (!p || !p->authorized)
                    return violation(h, "transaction party not an authorized member");
                if (!verify_sig(p->public_key, tx.signing_bytes(), *tx.signature))
                    return violation(h, "transaction signature does not verify");
            } else if (tx.signature) {
                return violation(h, "anonymous transaction carries a signature");
            }
        }
    }
    return VerifyReport{};
}

Bytes Ledger::encode_chain() const {
    Bytes out;
    for (const auto& b : blocks_) {
        Bytes content = b.canonical();
        append_u32(out, static_cast<uint32_t>(content.size()));
        append_bytes(out, content);
        append_bytes(out, b.hash);
    }
    return out;
}

std::vector<Block> Ledger::decode_chain(std::span<const uint8_t> bytes) {
    std::vector<Block> blocks;
    ByteReader r(bytes);
    while (!r.done()) {
        uint32_t len = r.read_u32();
        Bytes content = r.read_bytes(len);
        ByteReader cr(content);
        Block b = decode_block_content(cr);
        if (!cr.done()) fail(Errc::parse, "trailing bytes in block frame");
        Bytes hb = r.read_bytes(32);
        std::copy(hb.begin(), hb.end(), b.hash.begin());
        blocks.push_back(std::move(b));
    }
    return blocks;
}

void Ledger::save(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    {
        Bytes chain = encode_chain();
        std::ofstream out(dir + "/chain.bin", std::ios::binary);
        if (!out) fail(Errc::io, "cannot open for writing: " + dir + "/chain.bin");
        out.write(reinterpret_cast<const char*>(chain.data()),
                  static_cast<std::streamsize>(chain.size()));
        if (!out) fail(Errc::io, "write failed: " + dir + "/chain.bin");
    }
    json state;
    state["tick"] = tick_;
    state["next_seq"] = next_seq_;
    state["empty_blocks"] = empty_blocks_;
    state["parties"] = json::array();
    for (const auto& p : parties_)
        state["parties"].push_back(
            {{"id", p.id}, {"public_key", to_hex(p.public_key)}, {"authorized", p.authorized}});
    state["mempool"] = json::array();
    for (const auto& e : mempool_) {
        json tx{{"type", e.tx.type}, {"payload", to_hex(e.tx.payload)}};
        if (e.tx.party) tx["party"] = *e.tx.party;
        if (e.tx.signature) tx["signature"] = to_hex(*e.tx.signature);
        state["mempool"].push_back(
            {{"tx", tx}, {"not_before_tick", e.not_before_tick}, {"seq", e.seq}});
    }
    std::ofstream out(dir + "/ledger.json", std::ios::binary);
    if (!out) fail(Errc::io, "cannot open for writing: " + dir + "/ledger.json");
    out << state.dump(2) << '\n';
    if (!out) fail(Errc::io, "write failed: " + dir + "/ledger.json");
}

Ledger Ledger::load(const std::string& dir) {
    std::ifstream cin(dir + "/chain.bin", std::ios::binary);
    if (!cin) fail(Errc::io, "cannot open " + dir + "/chain.bin");
    Bytes chain((std::istreambuf_iterator<char>(cin)), std::istreambuf_iterator<char>());
    std::ifstream sin(dir + "/ledger.json", std::ios::binary);
    if (!sin) fail(Errc::io, "cannot open " + dir + "/ledger.json");
    json state;
    try {
        state = json::parse(sin);
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad ledger state: ") + e.what());
    }
    Ledger lg;
    try {
        lg.tick_ = state.at("tick").get<uint64_t>();
        lg.next_seq_ = state.at("next_seq").get<uint64_t>();
        lg.empty_blocks_ = state.at("empty_blocks").get<bool>();
        for (const auto& p : state.at("parties"))
            lg.parties_.push_back(Party{p.at("id").get<std::string>(),
                                        from_hex(p.at("public_key").get<std::string>()),
                                        p.at("authorized").get<bool>()});
        for (const auto& e : state.at("mempool")) {
            MempoolEntry entry;
            const auto& tx = e.at("tx");
            entry.tx.type = tx.at("type").get<std::string>();
            entry.tx.payload = from_hex(tx.at("payload").get<std::string>());
            if (tx.contains("party")) entry.tx.party = tx.at("party").get<std::string>();
            if (tx.contains("signature"))
                entry.tx.signature = from_hex(tx.at("signature").get<std::string>());
            entry.not_before_tick = e.at("not_before_tick").get<uint64_t>();
            entry.seq = e.at("seq").get<uint64_t>();
            lg.mempool_.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad ledger state: ") + e.what());
    }
    lg.blocks_ = decode_chain(chain);
    if (lg.blocks_.empty()) fail(Errc::parse, "chain file holds no blocks");
    // stored chains are untrusted until proven intact, so tampering with the
    // file surfaces here rather than as silent state corruption later
    VerifyReport rep = verify_blocks(lg.blocks_, lg.parties_);
    if (!rep.ok)
        fail(Errc::chain_invalid, "chain file fails verification at height " +
                                      std::to_string(rep.height) + ": " + rep.what);
    return lg;
}

}  // namespace vpass::ledger

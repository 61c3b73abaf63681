#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace vpass::ledger {

// Ed25519 keypair; secret key embeds the seed + public key (libsodium layout).
struct KeyPair {
    Bytes public_key;
    Bytes secret_key;
};

KeyPair keygen_from_seed(uint64_t seed);
Bytes sign(const Bytes& secret_key, std::span<const uint8_t> payload);
bool verify_sig(const Bytes& public_key, std::span<const uint8_t> payload,
                std::span<const uint8_t> signature);

struct Party {
    std::string id;
    Bytes public_key;
    bool authorized = true;

    bool operator==(const Party&) const = default;
};

// k parties named "party-0".."party-(k-1)" with deterministic keys.
std::pair<std::vector<Party>, std::vector<KeyPair>> make_parties(size_t k, uint64_t seed);

// Transaction types: "rec" (signed, identity-bearing), "hscan" (anonymous),
// and "member" (genesis-only membership records).
struct Transaction {
    std::string type;
    Bytes payload;
    std::optional<std::string> party;
    std::optional<Bytes> signature;

    // the signed portion: type + payload
    Bytes signing_bytes() const;
    Bytes canonical() const;
    static Transaction decode(ByteReader& r);

    bool operator==(const Transaction&) const = default;
};

// 'rec' payload = 32-byte id + length-prefixed record JSON
Bytes encode_rec_payload(const Digest& id, const std::string& record_json);
std::pair<Digest, std::string> decode_rec_payload(std::span<const uint8_t> payload);
// 'member' payload = party id + length-prefixed public key
Bytes encode_member_payload(const std::string& party_id, const Bytes& public_key);
std::pair<std::string, Bytes> decode_member_payload(std::span<const uint8_t> payload);

struct Block {
    uint64_t height = 0;
    Digest hash{};
    Digest prev_hash{};
    std::string producer;
    std::vector<Transaction> transactions;

    // hashed content: height, prev_hash, producer, transactions
    Bytes canonical() const;
    Digest compute_hash() const { return sha256(canonical()); }

    bool operator==(const Block&) const = default;
};

struct MempoolEntry {
    Transaction tx;
    uint64_t not_before_tick = 0;
    uint64_t seq = 0;  // FIFO order of submission
};

struct VerifyReport {
    bool ok = true;
    uint64_t height = 0;  // first violating height when !ok
    std::string what;
};

// Deterministic in-process permissioned chain: round-robin production, one
// block per tick at most, membership-gated writes, hash-chained blocks.
//
// Timing: now() is the tick of the latest produced block (0 = genesis). A
// transaction submitted at tick T becomes eligible at T+1 (anonymous ones at
// T+1+delay), so at one block per tick a delayed transaction lands exactly
// `delay` blocks after a simultaneous undelayed one.
class Ledger {
public:
    Ledger() = default;

    static Ledger create(std::vector<Party> parties, bool empty_blocks = true);

    size_t num_blocks() const { return blocks_.size(); }
    const Block& block(size_t height) const;
    const std::vector<Block>& blocks() const { return blocks_; }
    uint64_t now() const { return tick_; }
    const std::vector<Party>& parties() const { return parties_; }
    const std::deque<MempoolEntry>& mempool() const { return mempool_; }
    bool empty_blocks() const { return empty_blocks_; }

    // Signed broadcast; signs with sk when tx.signature is absent, then
    // verifies against the party's registered key. Inclusion iff the party
    // is an authorized member.
    void broadcast(const std::string& party_id, const Bytes& sk, Transaction tx);

    // Anonymous broadcast: the gateway checks that sk belongs to an
    // authorized member, then enqueues the identity-free transaction with
    // notBeforeTick = now + 1 + delay. Models an anonymity layer; the real
    // network-level mechanism is out of scope.
    void anon_broadcast(const Bytes& sk, Transaction tx, uint64_t delay_ticks);

    // Advance to `tick` (strictly increasing) and produce the block for it.
    // Includes all eligible mempool entries in submission order; on an empty
    // mempool produces an empty block iff empty_blocks, else nothing.
    std::optional<Block> produce_block(uint64_t tick);
    std::optional<Block> advance() { return produce_block(tick_ + 1); }

    VerifyReport verify_chain() const;

    // persistence: dir/chain.bin + dir/ledger.json
    void save(const std::string& dir) const;
    static Ledger load(const std::string& dir);

    // framed canonical blocks + stored hashes; the on-disk chain format
    Bytes encode_chain() const;
    static std::vector<Block> decode_chain(std::span<const uint8_t> bytes);
    static VerifyReport verify_blocks(const std::vector<Block>& blocks,
                                      const std::vector<Party>& parties);

private:
    const Party* find_party(const std::string& id) const;
    void check_payload(const Transaction& tx) const;

    std::vector<Party> parties_;
    std::vector<Block> blocks_;
    std::deque<MempoolEntry> mempool_;
    uint64_t tick_ = 0;
    uint64_t next_seq_ = 0;
    bool empty_blocks_ = true;
};

}  // namespace vpass::ledger

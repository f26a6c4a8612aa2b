#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lacnet/engine.hpp"

namespace lacnet {

enum class TxKind : uint8_t {
    RegisterNode,
    PostTask,
    SubmitBid,
    AwardTask,
    TokenTransfer,
    ProofOfCompletion,
    AnchorRecord,
    Penalty,
    CheckIn, // periodic status check-in, background load on the token chain
};

const char* tx_kind_name(TxKind k);

struct ChainTransaction {
    uint64_t id = 0;
    std::string submitter;
    SimTime submit_time = 0;
    TxKind kind = TxKind::CheckIn;

    // flat payload; which fields are meaningful depends on kind
    uint64_t task_id = 0;
    std::string from, to;     // TokenTransfer / Penalty source
    double amount = 0;        // tokens moved, burned or escrowed
    double units = 0;         // SubmitBid quantity
    double ask_per_unit = 0;  // SubmitBid price
    uint64_t anchored_height = 0;
    uint64_t anchor_digest = 0;
    std::string memo;

    SimTime sealed_at = -1; // < 0 while unconfirmed

    std::string canonical() const; // deterministic serialization, digest input
};

struct Block {
    uint64_t height = 0;
    SimTime sealed_at = 0;
    std::vector<ChainTransaction> txs;
    uint64_t parent_digest = 0;
    uint64_t digest = 0;
};

struct AnchorRecord {
    uint64_t anchored_height = 0;
    uint64_t digest = 0;
    SimTime posted_at = 0;
};

enum class LedgerKind : uint8_t { Permissioned, Permissionless };

enum class SubmitError : uint8_t { None, UnauthorizedKey, InsufficientBalance };

struct ChainParams {
    int block_size = 10;
    double block_timeout_s = 2.0;
    double tps_cap = 1000;
    double propagation_s = 0.1;
    bool mint_on_proof = false;
};

uint64_t fnv1a64(const std::string& s, uint64_t h = 1469598103934665603ull);
uint64_t block_digest(uint64_t parent_digest, uint64_t height, SimTime sealed_at,
                      const std::vector<ChainTransaction>& txs);

// Abstracted single chain: FIFO mempool, size-or-timeout block sealing,
// rolling-second throughput cap, token balances (permissionless) and a
// registered-key set (permissioned). Append-only after sealing.
class Ledger {
public:
    Ledger(LedgerKind kind, ChainParams params) : kind_(kind), params_(params) {}

    LedgerKind kind() const { return kind_; }
    const ChainParams& params() const { return params_; }

    // Permissionless chains validate submitters against the permissioned
    // registry through this hook.
    void set_external_registry(const std::set<std::string>* reg) {
        external_registry_ = reg;
    }

    // Genesis credit, before any block; counts toward the conserved supply.
    void credit_genesis(const std::string& pk, double amount);

    SubmitError submit(ChainTransaction tx, SimTime now);

    // Seals every block currently due (size or timeout trigger, throttled by
    // the throughput cap) and returns the freshly sealed blocks.
    std::vector<Block> seal_due(SimTime now);

    // Earliest time a seal could become due, or +inf.
    double next_seal_due(SimTime now) const;

    std::optional<double> confirmation_latency(uint64_t tx_id) const;
    std::optional<SimTime> sealed_time(uint64_t tx_id) const;

    const std::vector<Block>& blocks() const { return blocks_; }
    size_t mempool_size() const { return mempool_.size(); }
    const std::set<std::string>& registry() const { return registry_; }

    double balance(const std::string& pk) const;
    double available(const std::string& pk) const; // balance minus pending debits
    const std::map<std::string, double>& balances() const { return balances_; }
    double total_supply() const { return genesis_supply_ + minted_ - burned_; }
    double minted() const { return minted_; }
    double burned() const { return burned_; }

    void dump(std::ostream& os) const;

private:
    bool is_authorized(const std::string& pk) const;
    void apply(const ChainTransaction& tx);
    size_t confirmed_in_last_second(SimTime now) const;

    LedgerKind kind_;
    ChainParams params_;
    std::vector<Block> blocks_;
    std::deque<ChainTransaction> mempool_;
    std::map<std::string, double> balances_;
    std::map<std::string, double> pending_debits_;
    std::set<std::string> registry_;
    const std::set<std::string>* external_registry_ = nullptr;
    std::map<uint64_t, SimTime> sealed_index_; // tx id -> sealed_at
    std::map<uint64_t, SimTime> submit_index_;
    std::deque<SimTime> recent_confirms_;
    double genesis_supply_ = 0;
    double minted_ = 0;
    double burned_ = 0;
};

// Cross-chain anchoring state: digests of the permissioned chain posted onto
// the permissionless chain every anchor interval.
struct AnchorChannel {
    std::vector<AnchorRecord> records;
    bool has_anchor = false;
    uint64_t last_height = 0;
};

// Submits an AnchorRecord tx for the latest sealed permissioned block.
// Returns nullopt when nothing new has been sealed since the last anchor.
std::optional<AnchorRecord> post_anchor(const Ledger& permissioned,
                                        Ledger& permissionless,
                                        AnchorChannel& channel,
                                        const std::string& submitter, SimTime now,
                                        uint64_t tx_id);

struct ReconcileResult {
    bool consistent = true;
    uint64_t mismatch_height = 0;
};

// Replays digests over dumped permissioned history and compares against the
// stored chain and the anchor records. Empty anchor list is vacuously
// consistent with respect to anchors; stored digests are still re-checked.
ReconcileResult reconcile(const std::vector<Block>& permissioned_blocks,
                          const std::vector<AnchorRecord>& anchors);

// Parses the line-delimited dump format written by Ledger::dump.
std::vector<Block> parse_dump(std::istream& is);

} // namespace lacnet

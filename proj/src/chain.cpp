#include "lacnet/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace lacnet {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

const char* tx_kind_name(TxKind k) {
    switch (k) {
        case TxKind::RegisterNode: return "RegisterNode";
        case TxKind::PostTask: return "PostTask";
        case TxKind::SubmitBid: return "SubmitBid";
        case TxKind::AwardTask: return "AwardTask";
        case TxKind::TokenTransfer: return "TokenTransfer";
        case TxKind::ProofOfCompletion: return "ProofOfCompletion";
        case TxKind::AnchorRecord: return "AnchorRecord";
        case TxKind::Penalty: return "Penalty";
        case TxKind::CheckIn: return "CheckIn";
    }
    return "?";
}

static TxKind tx_kind_from_name(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(TxKind::CheckIn); ++i) {
        auto k = static_cast<TxKind>(i);
        if (s == tx_kind_name(k)) return k;
    }
    throw std::runtime_error("unknown tx kind in dump: " + s);
}

std::string ChainTransaction::canonical() const {
    std::ostringstream os;
    os << id << ',' << submitter << ',' << fmt_double(submit_time) << ','
       << tx_kind_name(kind) << ',' << task_id << ',' << from << ',' << to << ','
       << fmt_double(amount) << ',' << fmt_double(units) << ','
       << fmt_double(ask_per_unit) << ',' << anchored_height << ','
       << anchor_digest << ',' << memo;
    return os.str();
}

uint64_t fnv1a64(const std::string& s, uint64_t h) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t block_digest(uint64_t parent_digest, uint64_t height, SimTime sealed_at,
                      const std::vector<ChainTransaction>& txs) {
    std::ostringstream os;
    os << parent_digest << '|' << height << '|' << fmt_double(sealed_at);
    uint64_t h = fnv1a64(os.str());
    for (const auto& tx : txs) h = fnv1a64(tx.canonical(), h);
    return h;
}

void Ledger::credit_genesis(const std::string& pk, double amount) {
    balances_[pk] += amount;
    genesis_supply_ += amount;
}

bool Ledger::is_authorized(const std::string& pk) const {
    if (registry_.count(pk)) return true;
    if (external_registry_ && external_registry_->count(pk)) return true;
    return false;
}

double Ledger::balance(const std::string& pk) const {
    auto it = balances_.find(pk);
    return it == balances_.end() ? 0.0 : it->second;
}

double Ledger::available(const std::string& pk) const {
    double b = balance(pk);
    auto it = pending_debits_.find(pk);
    if (it != pending_debits_.end()) b -= it->second;
    return b;
}

SubmitError Ledger::submit(ChainTransaction tx, SimTime now) {
    tx.submit_time = now;
    if (tx.kind != TxKind::RegisterNode && !is_authorized(tx.submitter))
        return SubmitError::UnauthorizedKey;
    if (tx.kind == TxKind::TokenTransfer || tx.kind == TxKind::Penalty ||
        tx.kind == TxKind::PostTask || tx.kind == TxKind::AwardTask) {
        if (available(tx.from) < tx.amount - 1e-9)
            return SubmitError::InsufficientBalance;
        pending_debits_[tx.from] += tx.amount;
    }
    submit_index_[tx.id] = now;
    mempool_.push_back(std::move(tx));
    return SubmitError::None;
}

size_t Ledger::confirmed_in_last_second(SimTime now) const {
    size_t n = 0;
    for (auto it = recent_confirms_.rbegin(); it != recent_confirms_.rend(); ++it) {
        if (*it > now - 1.0) ++n;
        else break;
    }
    return n;
}

void Ledger::apply(const ChainTransaction& tx) {
    switch (tx.kind) {
        case TxKind::RegisterNode:
            registry_.insert(tx.submitter);
            break;
        case TxKind::TokenTransfer:
        case TxKind::PostTask:  // escrow lock: requester -> escrow account
        case TxKind::AwardTask: // stake lock: winner -> escrow account
            balances_[tx.from] -= tx.amount;
            balances_[tx.to] += tx.amount;
            pending_debits_[tx.from] -= tx.amount;
            break;
        case TxKind::Penalty:
            balances_[tx.from] -= tx.amount;
            burned_ += tx.amount;
            pending_debits_[tx.from] -= tx.amount;
            break;
        case TxKind::ProofOfCompletion:
            if (params_.mint_on_proof) {
                balances_[tx.submitter] += tx.amount;
                minted_ += tx.amount;
            }
            break;
        default:
            break;
    }
}

std::vector<Block> Ledger::seal_due(SimTime now) {
    std::vector<Block> sealed;
    for (;;) {
        if (mempool_.empty()) break;
        const bool size_trigger =
            mempool_.size() >= static_cast<size_t>(params_.block_size);
        const bool timeout_trigger =
            now - mempool_.front().submit_time >= params_.block_timeout_s - 1e-9;
        if (!size_trigger && !timeout_trigger) break;

        const size_t used = confirmed_in_last_second(now);
        const size_t cap = static_cast<size_t>(params_.tps_cap);
        if (used >= cap) break; // throughput-throttled; excess stays pending
        const size_t allowed = cap - used;

        const size_t k = std::min({static_cast<size_t>(params_.block_size),
                                   mempool_.size(), allowed});
        Block b;
        b.height = blocks_.size();
        b.sealed_at = now;
        b.parent_digest = blocks_.empty() ? 0 : blocks_.back().digest;
        for (size_t i = 0; i < k; ++i) {
            ChainTransaction tx = std::move(mempool_.front());
            mempool_.pop_front();
            tx.sealed_at = now;
            sealed_index_[tx.id] = now;
            apply(tx);
            recent_confirms_.push_back(now);
            b.txs.push_back(std::move(tx));
        }
        b.digest = block_digest(b.parent_digest, b.height, b.sealed_at, b.txs);
        blocks_.push_back(b);
        sealed.push_back(std::move(b));
        while (!recent_confirms_.empty() && recent_confirms_.front() <= now - 2.0)
            recent_confirms_.pop_front();
    }
    return sealed;
}

double Ledger::next_seal_due(SimTime now) const {
    if (mempool_.empty()) return kInf;
    double due = mempool_.front().submit_time + params_.block_timeout_s;
    if (mempool_.size() >= static_cast<size_t>(params_.block_size)) due = now;
    if (due < now) due = now;
    const size_t cap = static_cast<size_t>(params_.tps_cap);
    if (confirmed_in_last_second(due) >= cap) {
        // window saturated; earliest slot is when the oldest confirm ages out
        for (SimTime t : recent_confirms_) {
            if (t > due - 1.0) return std::max(due, t + 1.0);
        }
    }
    return due;
}

std::optional<double> Ledger::confirmation_latency(uint64_t tx_id) const {
    auto it = sealed_index_.find(tx_id);
    if (it == sealed_index_.end()) return std::nullopt;
    return it->second - submit_index_.at(tx_id) + params_.propagation_s;
}

std::optional<SimTime> Ledger::sealed_time(uint64_t tx_id) const {
    auto it = sealed_index_.find(tx_id);
    if (it == sealed_index_.end()) return std::nullopt;
    return it->second;
}

void Ledger::dump(std::ostream& os) const {
    for (const auto& b : blocks_) {
        os << b.height << '|' << fmt_double(b.sealed_at) << '|' << b.parent_digest
           << '|' << b.digest << '|';
        for (size_t i = 0; i < b.txs.size(); ++i) {
            if (i) os << ';';
            os << b.txs[i].canonical();
        }
        os << '\n';
    }
}

std::optional<AnchorRecord> post_anchor(const Ledger& permissioned,
                                        Ledger& permissionless,
                                        AnchorChannel& channel,
                                        const std::string& submitter,
                                        SimTime now, uint64_t tx_id) {
    if (permissioned.blocks().empty()) return std::nullopt;
    const Block& tip = permissioned.blocks().back();
    if (channel.has_anchor && tip.height <= channel.last_height)
        return std::nullopt;

    ChainTransaction tx;
    tx.id = tx_id;
    tx.submitter = submitter;
    tx.kind = TxKind::AnchorRecord;
    tx.anchored_height = tip.height;
    tx.anchor_digest = tip.digest;
    if (permissionless.submit(std::move(tx), now) != SubmitError::None)
        return std::nullopt;

    AnchorRecord rec{tip.height, tip.digest, now};
    channel.records.push_back(rec);
    channel.has_anchor = true;
    channel.last_height = tip.height;
    return rec;
}

ReconcileResult reconcile(const std::vector<Block>& permissioned_blocks,
                          const std::vector<AnchorRecord>& anchors) {
    std::vector<uint64_t> recomputed;
    recomputed.reserve(permissioned_blocks.size());
    uint64_t parent = 0;
    for (const auto& b : permissioned_blocks) {
        uint64_t d = block_digest(parent, b.height, b.sealed_at, b.txs);
        if (d != b.digest || b.parent_digest != parent)
            return {false, b.height};
        recomputed.push_back(d);
        parent = d;
    }
    for (const auto& a : anchors) {
        if (a.anchored_height >= recomputed.size())
            return {false, a.anchored_height};
        if (recomputed[a.anchored_height] != a.digest)
            return {false, a.anchored_height};
    }
    return {true, 0};
}

std::vector<Block> parse_dump(std::istream& is) {
    std::vector<Block> blocks;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        Block b;
        std::istringstream ls(line);
        std::string field;
        std::getline(ls, field, '|');
        b.height = std::stoull(field);
        std::getline(ls, field, '|');
        b.sealed_at = std::stod(field);
        std::getline(ls, field, '|');
        b.parent_digest = std::stoull(field);
        std::getline(ls, field, '|');
        b.digest = std::stoull(field);
        std::string txs_field;
        std::getline(ls, txs_field);
        std::istringstream ts(txs_field);
        std::string txrec;
        while (std::getline(ts, txrec, ';')) {
            if (txrec.empty()) continue;
            std::istringstream fs(txrec);
            std::string f[13];
            for (auto& x : f) std::getline(fs, x, ',');
            ChainTransaction tx;
            tx.id = std::stoull(f[0]);
            tx.submitter = f[1];
            tx.submit_time = std::stod(f[2]);
            tx.kind = tx_kind_from_name(f[3]);
            tx.task_id = std::stoull(f[4]);
            tx.from = f[5];
            tx.to = f[6];
            tx.amount = std::stod(f[7]);
            tx.units = std::stod(f[8]);
            tx.ask_per_unit = std::stod(f[9]);
            tx.anchored_height = std::stoull(f[10]);
            tx.anchor_digest = std::stoull(f[11]);
            tx.memo = f[12];
            tx.sealed_at = b.sealed_at;
            b.txs.push_back(std::move(tx));
        }
        blocks.push_back(std::move(b));
    }
    return blocks;
}

} // namespace lacnet

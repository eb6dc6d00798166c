#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "teefabric/crypto.hpp"
#include "teefabric/taint.hpp"

namespace teefabric {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

enum class Kind : uint8_t { Tenant, Node, Fdu, Sc, Mp };

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Tenant: return "tenant";
        case Kind::Node: return "node";
        case Kind::Fdu: return "fdu";
        case Kind::Sc: return "sc";
        case Kind::Mp: return "mp";
    }
    return "?";
}

// FDU ids carry their parent node; everything else has parent 0.
struct PrincipalId {
    Kind kind = Kind::Tenant;
    uint32_t index = 0;
    uint32_t parent = 0;

    auto operator<=>(const PrincipalId&) const = default;

    std::string str() const {
        std::string s = std::string(kind_name(kind)) + ":";
        if (kind == Kind::Fdu) s += std::to_string(parent) + "." + std::to_string(index);
        else s += std::to_string(index);
        return s;
    }

    static PrincipalId tenant(uint32_t i) { return {Kind::Tenant, i, 0}; }
    static PrincipalId node(uint32_t i) { return {Kind::Node, i, 0}; }
    static PrincipalId fdu(uint32_t node, uint32_t i) { return {Kind::Fdu, i, node}; }
    static PrincipalId sc(uint32_t i) { return {Kind::Sc, i, 0}; }
    static PrincipalId mp() { return {Kind::Mp, 0, 0}; }
};

enum class LinkTrust : uint8_t { ShieldedContainer, Open };

enum class MsgKind : uint8_t { MmioRead, MmioWrite, Dma, Interrupt, Control, AttChallenge, AttResponse };

inline const char* msg_kind_name(MsgKind k) {
    switch (k) {
        case MsgKind::MmioRead: return "MmioRead";
        case MsgKind::MmioWrite: return "MmioWrite";
        case MsgKind::Dma: return "Dma";
        case MsgKind::Interrupt: return "Interrupt";
        case MsgKind::Control: return "Control";
        case MsgKind::AttChallenge: return "AttChallenge";
        case MsgKind::AttResponse: return "AttResponse";
    }
    return "?";
}

struct Message {
    PrincipalId src;
    PrincipalId dst;
    MsgKind kind = MsgKind::Control;
    bool sealed = false;
    Envelope env;        // valid when sealed
    TaintedBytes plain;  // valid when !sealed
    bool adversarial = false;

    const TaintSet& taint() const { return sealed ? env.audit_taint : plain.taint; }

    Bytes payload_bytes() const { return sealed ? env.serialize() : plain.bytes; }

    static Message control(PrincipalId src, PrincipalId dst, const json& body) {
        Message m;
        m.src = src;
        m.dst = dst;
        m.kind = MsgKind::Control;
        m.plain = TaintedBytes::plain(to_bytes(body.dump()));
        return m;
    }

    static Message sealed_msg(PrincipalId src, PrincipalId dst, MsgKind kind, Envelope env) {
        Message m;
        m.src = src;
        m.dst = dst;
        m.kind = kind;
        m.sealed = true;
        m.env = std::move(env);
        return m;
    }

    std::optional<json> body() const {
        if (sealed) return std::nullopt;
        json j = json::parse(to_string(plain.bytes), nullptr, false);
        if (j.is_discarded()) return std::nullopt;
        return j;
    }
};

enum class FabricError { UnknownPrincipal, TamperProof, StepLimitExceeded };

inline const char* to_string(FabricError e) {
    switch (e) {
        case FabricError::UnknownPrincipal: return "UnknownPrincipal";
        case FabricError::TamperProof: return "TamperProof";
        case FabricError::StepLimitExceeded: return "StepLimitExceeded";
    }
    return "?";
}

class World;

class Actor {
public:
    virtual ~Actor() = default;
    virtual PrincipalId id() const = 0;
    virtual void handle(World& w, const Message& m) = 0;
};

// What the adversary may do to a message in flight on a tapped open link.
struct Intercept {
    enum class Action { Deliver, Drop, Tamper } action = Action::Deliver;
    std::function<void(Envelope&)> mutate;  // used with Tamper
};

struct LeakRecord {
    uint64_t tick;
    PrincipalId src, dst;
    TaintSet taint;
    std::string what;
};

// One world = one deterministic event loop. Everything observable is a pure
// function of (topology, scenario, seed).
class World {
public:
    static constexpr uint64_t kDefaultStepLimit = 1'000'000;

    World(uint64_t seed, std::unique_ptr<CryptoSuite> suite)
        : seed_(seed), rng_(seed), suite_(std::move(suite)) {}

    World(const World&) = delete;
    World& operator=(const World&) = delete;

    // --- setup ---------------------------------------------------------
    struct NodeMeta {
        bool tee = true;
        std::optional<PrincipalId> guardian_sc;  // set for non-TEE nodes
    };

    void add_actor(std::unique_ptr<Actor> actor, NodeMeta meta = {}) {
        PrincipalId pid = actor->id();
        meta_[pid] = meta;
        actors_[pid] = std::move(actor);
    }

    void register_fdu(PrincipalId fdu) { meta_[fdu] = NodeMeta{}; }

    bool exists(PrincipalId p) const { return meta_.count(p) > 0; }

    LinkTrust link_trust(PrincipalId a, PrincipalId b) const {
        auto shielded_pair = [&](PrincipalId sc, PrincipalId other) {
            if (sc.kind != Kind::Sc || other.kind != Kind::Node) return false;
            auto it = meta_.find(other);
            return it != meta_.end() && !it->second.tee && it->second.guardian_sc &&
                   *it->second.guardian_sc == sc;
        };
        if (shielded_pair(a, b) || shielded_pair(b, a)) return LinkTrust::ShieldedContainer;
        return LinkTrust::Open;
    }

    // --- messaging -----------------------------------------------------
    Status<FabricError> send(Message m) {
        if (!exists(m.src) || !exists(m.dst)) return FabricError::UnknownPrincipal;
        enqueue(std::move(m));
        return Unit{};
    }

    // Adversary injection. Works only where a physical attacker can reach:
    // open links. src is attacker-writable there (spoofable).
    Status<FabricError> inject(Message m) {
        if (!exists(m.src) || !exists(m.dst)) return FabricError::UnknownPrincipal;
        if (link_trust(m.src, m.dst) == LinkTrust::ShieldedContainer)
            return FabricError::TamperProof;
        m.adversarial = true;
        emit("inject", {{"src", m.src.str()}, {"dst", m.dst.str()}, {"kind", msg_kind_name(m.kind)}});
        enqueue(std::move(m));
        return Unit{};
    }

    Status<FabricError> tap(PrincipalId a, PrincipalId b) {
        if (link_trust(a, b) == LinkTrust::ShieldedContainer) return FabricError::TamperProof;
        taps_.insert(link_key(a, b));
        return Unit{};
    }

    void intercept(PrincipalId a, PrincipalId b, std::function<Intercept(const Message&)> fn) {
        intercepts_[link_key(a, b)] = std::move(fn);
    }
    void clear_intercept(PrincipalId a, PrincipalId b) { intercepts_.erase(link_key(a, b)); }

    const std::vector<Message>& tap_log() const { return tap_log_; }

    // Bytes an attacker has actually seen in the clear on tapped links.
    const std::vector<TaintedBytes>& attacker_visible() const { return attacker_visible_; }

    void schedule(uint64_t tick, std::function<void(World&)> fn) {
        actions_.emplace(ActionKey{tick, action_seq_++}, std::move(fn));
    }

    // --- run -----------------------------------------------------------
    Status<FabricError> run_until_quiescent() {
        while (!queue_.empty() || !actions_.empty()) {
            if (++steps_ > step_limit_) {
                emit("step_limit_exceeded", {{"limit", step_limit_}});
                return FabricError::StepLimitExceeded;
            }
            uint64_t next_action = actions_.empty() ? UINT64_MAX : actions_.begin()->first.tick;
            uint64_t next_msg = queue_.empty() ? UINT64_MAX : queue_.begin()->first.tick;
            if (next_action <= next_msg) {
                now_ = next_action;
                auto fn = std::move(actions_.begin()->second);
                actions_.erase(actions_.begin());
                fn(*this);
            } else {
                now_ = next_msg;
                Message m = std::move(queue_.begin()->second);
                queue_.erase(queue_.begin());
                deliver(m);
            }
            if (audit_every_step_) run_audits();
        }
        return Unit{};
    }

    // --- tracing -------------------------------------------------------
    void emit(const std::string& ev, ojson fields = ojson::object()) {
        ojson rec;
        rec["tick"] = now_;
        rec["ev"] = ev;
        for (auto& [k, v] : fields.items()) rec[k] = v;
        trace_.push_back(std::move(rec));
    }

    void emit_blocked(const std::string& ev, ojson fields = ojson::object()) {
        fields["cls"] = "blocked";
        emit(ev, std::move(fields));
    }

    void emit_detected(const std::string& ev, ojson fields = ojson::object()) {
        fields["cls"] = "detected";
        emit(ev, std::move(fields));
    }

    const std::vector<ojson>& trace() const { return trace_; }

    std::string trace_jsonl() const {
        std::string out;
        for (const auto& rec : trace_) {
            out += rec.dump();
            out += '\n';
        }
        return out;
    }

    // --- violation accounting -------------------------------------------
    const std::vector<LeakRecord>& leaks() const { return leaks_; }

    void record_integrity_violation(const std::string& what) {
        ++integrity_violations_;
        emit("integrity_violation", {{"what", what}});
    }
    uint64_t integrity_violations() const { return integrity_violations_; }

    // Opened a tampered envelope successfully: the crypto failed silently.
    void note_opened(const Envelope& env, PrincipalId who) {
        if (env.tampered) record_integrity_violation("tampered envelope opened at " + who.str());
    }

    void add_audit(std::function<std::optional<std::string>(const World&)> fn) {
        audits_.push_back(std::move(fn));
    }
    void set_audit_every_step(bool on) { audit_every_step_ = on; }
    const std::vector<std::string>& audit_failures() const { return audit_failures_; }

    void run_audits() {
        for (auto& a : audits_) {
            auto v = a(*this);
            if (v) {
                audit_failures_.push_back(*v);
                emit("audit_failure", {{"what", *v}});
            }
        }
    }

    // --- accessors -------------------------------------------------------
    uint64_t now() const { return now_; }
    uint64_t seed() const { return seed_; }
    Rng& rng() { return rng_; }
    const CryptoSuite& suite() const { return *suite_; }
    KeyRegistry& key_registry() { return key_registry_; }
    const KeyRegistry& key_registry() const { return key_registry_; }
    uint32_t alloc_channel_id() { return next_channel_id_++; }
    void set_step_limit(uint64_t n) { step_limit_ = n; }
    const std::map<PrincipalId, NodeMeta>& meta() const { return meta_; }
    Actor* actor(PrincipalId p) {
        auto it = actors_.find(route_target(p));
        return it == actors_.end() ? nullptr : it->second.get();
    }

private:
    using LinkKey = std::pair<PrincipalId, PrincipalId>;
    static LinkKey link_key(PrincipalId a, PrincipalId b) {
        return a < b ? LinkKey{a, b} : LinkKey{b, a};
    }

    struct DeliveryKey {
        uint64_t tick;
        PrincipalId src;
        uint64_t seq;
        auto operator<=>(const DeliveryKey&) const = default;
    };
    struct ActionKey {
        uint64_t tick;
        uint64_t seq;
        auto operator<=>(const ActionKey&) const = default;
    };

    // Messages to an FDU are handled by its node's actor.
    static PrincipalId route_target(PrincipalId p) {
        if (p.kind == Kind::Fdu) return PrincipalId::node(p.parent);
        return p;
    }

    void enqueue(Message m) {
        queue_.emplace(DeliveryKey{now_ + 1, m.src, msg_seq_++}, std::move(m));
    }

    bool confined_violation(const Message& m) {
        auto non_tee = [&](PrincipalId p) -> const NodeMeta* {
            if (p.kind != Kind::Node) return nullptr;
            auto it = meta_.find(p);
            return (it != meta_.end() && !it->second.tee) ? &it->second : nullptr;
        };
        // A non-TEE node is physically connected only to its SC; anything else
        // lands on the SC's buses and is filtered there.
        if (const NodeMeta* nm = non_tee(m.src)) {
            if (!nm->guardian_sc || m.dst != *nm->guardian_sc) return true;
        }
        if (const NodeMeta* nm = non_tee(m.dst)) {
            if (!nm->guardian_sc || m.src != *nm->guardian_sc) return true;
        }
        return false;
    }

    void deliver(Message& m) {
        LinkTrust trust = link_trust(m.src, m.dst);

        if (trust == LinkTrust::Open) {
            auto ti = intercepts_.find(link_key(m.src, m.dst));
            if (ti != intercepts_.end()) {
                Intercept act = ti->second(m);
                if (act.action == Intercept::Action::Drop) {
                    emit("drop", {{"src", m.src.str()}, {"dst", m.dst.str()}, {"adv", true}});
                    return;
                }
                if (act.action == Intercept::Action::Tamper && m.sealed) {
                    if (act.mutate) act.mutate(m.env);
                    m.env.tampered = true;
                    m.adversarial = true;
                    emit("tamper", {{"src", m.src.str()}, {"dst", m.dst.str()}, {"adv", true}});
                }
            }
            if (taps_.count(link_key(m.src, m.dst))) {
                tap_log_.push_back(m);
                if (!m.sealed) attacker_visible_.push_back(m.plain);
                else attacker_visible_.push_back(TaintedBytes::plain(m.env.serialize()));
            }
            if (!m.sealed && !m.plain.taint.empty()) {
                leaks_.push_back({now_, m.src, m.dst, m.plain.taint, "tainted plaintext on open link"});
                emit("leak", {{"src", m.src.str()}, {"dst", m.dst.str()}});
            }
        }

        ojson rec;
        rec["src"] = m.src.str();
        rec["dst"] = m.dst.str();
        rec["kind"] = msg_kind_name(m.kind);
        rec["link"] = trust == LinkTrust::Open ? "open" : "shielded";
        rec["sealed"] = m.sealed;
        ojson labels = ojson::array();
        for (JobId j : m.taint()) labels.push_back(j);
        rec["taint"] = labels;
        rec["adv"] = m.adversarial;
        Bytes pb = m.payload_bytes();
        rec["len"] = pb.size();
        rec["digest"] = hex_encode(std::span<const uint8_t>(sha3_256(pb)).first(8));
        emit("deliver", std::move(rec));

        if (confined_violation(m)) {
            emit_blocked("sc_bus_denied", {{"src", m.src.str()}, {"dst", m.dst.str()}});
            return;
        }

        auto it = actors_.find(route_target(m.dst));
        if (it != actors_.end()) it->second->handle(*this, m);
    }

    uint64_t seed_;
    Rng rng_;
    std::unique_ptr<CryptoSuite> suite_;
    KeyRegistry key_registry_;

    std::map<PrincipalId, std::unique_ptr<Actor>> actors_;
    std::map<PrincipalId, NodeMeta> meta_;

    std::map<DeliveryKey, Message> queue_;
    std::map<ActionKey, std::function<void(World&)>> actions_;
    uint64_t msg_seq_ = 0;
    uint64_t action_seq_ = 0;
    uint64_t now_ = 0;
    uint64_t steps_ = 0;
    uint64_t step_limit_ = kDefaultStepLimit;
    uint32_t next_channel_id_ = 1;

    std::set<LinkKey> taps_;
    std::map<LinkKey, std::function<Intercept(const Message&)>> intercepts_;
    std::vector<Message> tap_log_;
    std::vector<TaintedBytes> attacker_visible_;

    std::vector<ojson> trace_;
    std::vector<LeakRecord> leaks_;
    uint64_t integrity_violations_ = 0;

    std::vector<std::function<std::optional<std::string>(const World&)>> audits_;
    std::vector<std::string> audit_failures_;
    bool audit_every_step_ = false;
};

inline Status<FabricError> run_until_quiescent(World& w) { return w.run_until_quiescent(); }

}  // namespace teefabric

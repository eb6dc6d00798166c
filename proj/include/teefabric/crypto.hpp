#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>

#include <openssl/evp.h>

#include "teefabric/bytes.hpp"
#include "teefabric/result.hpp"
#include "teefabric/sha3.hpp"
#include "teefabric/taint.hpp"

namespace teefabric {

using Rng = std::mt19937_64;

enum class CryptoError {
    AuthFailure,
    ReplayDetected,
    NonceReuse,
    InvalidPublicKey,
    BadEnvelope,
};

inline const char* to_string(CryptoError e) {
    switch (e) {
        case CryptoError::AuthFailure: return "AuthFailure";
        case CryptoError::ReplayDetected: return "ReplayDetected";
        case CryptoError::NonceReuse: return "NonceReuse";
        case CryptoError::InvalidPublicKey: return "InvalidPublicKey";
        case CryptoError::BadEnvelope: return "BadEnvelope";
    }
    return "?";
}

struct Digest {
    std::array<uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;

    std::string hex() const { return hex_encode(bytes); }

    static Digest zero() { return Digest{}; }
    static Digest of(std::span<const uint8_t> data) { return Digest{sha3_256(data)}; }
    static Digest of(std::string_view s) { return Digest{sha3_256(s)}; }
    static std::optional<Digest> from_hex(std::string_view s) {
        auto b = hex_decode(s);
        if (!b || b->size() != 32) return std::nullopt;
        Digest d;
        std::copy(b->begin(), b->end(), d.bytes.begin());
        return d;
    }
};

// PCR extension: new = H(old || value). Non-commutative by construction.
inline Digest extend(const Digest& pcr, const Digest& value) {
    Bytes buf(pcr.bytes.begin(), pcr.bytes.end());
    append(buf, value.bytes);
    return Digest::of(buf);
}

struct Key256 {
    std::array<uint8_t, 32> bytes{};

    auto operator<=>(const Key256&) const = default;

    static Key256 random(Rng& rng) {
        Key256 k;
        for (auto& b : k.bytes) b = static_cast<uint8_t>(rng());
        return k;
    }
    void wipe() { secure_wipe(bytes.data(), bytes.size()); }
};

using Nonce = std::array<uint8_t, 12>;
using Tag = std::array<uint8_t, 16>;

inline Nonce make_nonce(uint32_t channel_id, uint64_t counter) {
    Nonce n{};
    n[0] = static_cast<uint8_t>(channel_id >> 24);
    n[1] = static_cast<uint8_t>(channel_id >> 16);
    n[2] = static_cast<uint8_t>(channel_id >> 8);
    n[3] = static_cast<uint8_t>(channel_id);
    for (int i = 0; i < 8; ++i) n[4 + i] = static_cast<uint8_t>(counter >> (8 * (7 - i)));
    return n;
}

struct Signature {
    Bytes bytes;
    auto operator<=>(const Signature&) const = default;
};

struct KeyPair {
    Bytes public_key;
    Bytes private_key;
};

// Authenticated-encryption wrapper for everything that crosses an open link.
// Wire layout (bit-exact):
//   nonce(12) || aad_len(4, BE) || aad || ct_len(4, BE) || ciphertext || tag(16)
// The audit fields below are simulator bookkeeping and are never serialized.
struct Envelope {
    Nonce nonce{};
    Bytes aad;
    Bytes ciphertext;
    Tag tag{};

    // --- audit-only, not part of the wire format ---
    TaintSet audit_taint;       // labels of the sealed plaintext
    std::string key_label;      // which key sealed this (e.g. "job:1")
    bool tampered = false;      // set by adversary mutation helpers

    Bytes serialize() const {
        Bytes out;
        out.reserve(12 + 4 + aad.size() + 4 + ciphertext.size() + 16);
        append(out, nonce);
        put_u32_be(out, static_cast<uint32_t>(aad.size()));
        append(out, aad);
        put_u32_be(out, static_cast<uint32_t>(ciphertext.size()));
        append(out, ciphertext);
        append(out, tag);
        return out;
    }

    static Result<Envelope, CryptoError> deserialize(std::span<const uint8_t> wire) {
        if (wire.size() < 12 + 4) return CryptoError::BadEnvelope;
        Envelope env;
        std::copy(wire.begin(), wire.begin() + 12, env.nonce.begin());
        size_t off = 12;
        uint32_t aad_len = get_u32_be(wire.subspan(off));
        off += 4;
        if (wire.size() < off + aad_len + 4) return CryptoError::BadEnvelope;
        env.aad.assign(wire.begin() + off, wire.begin() + off + aad_len);
        off += aad_len;
        uint32_t ct_len = get_u32_be(wire.subspan(off));
        off += 4;
        if (wire.size() != off + ct_len + 16) return CryptoError::BadEnvelope;
        env.ciphertext.assign(wire.begin() + off, wire.begin() + off + ct_len);
        off += ct_len;
        std::copy(wire.begin() + off, wire.begin() + off + 16, env.tag.begin());
        return env;
    }
};

// Pluggable primitive suite. Hashing is intentionally not part of the suite:
// digests (manifest ids, PCR chains) must agree across backends, so they all
// go through the library's SHA3-256.
class CryptoSuite {
public:
    virtual ~CryptoSuite() = default;
    virtual std::string name() const = 0;

    virtual Envelope seal(const Key256& key, const Nonce& nonce, Bytes aad,
                          std::span<const uint8_t> plaintext) const = 0;
    virtual Result<Bytes, CryptoError> open(const Key256& key, const Envelope& env) const = 0;

    virtual KeyPair gen_agreement_keypair(Rng& rng) const = 0;
    virtual Result<Key256, CryptoError> derive_shared(std::span<const uint8_t> private_key,
                                                      std::span<const uint8_t> peer_public) const = 0;

    virtual KeyPair gen_signing_keypair(Rng& rng) const = 0;
    virtual Signature sign(std::span<const uint8_t> private_key,
                           std::span<const uint8_t> msg) const = 0;
    virtual bool verify(std::span<const uint8_t> public_key, std::span<const uint8_t> msg,
                        const Signature& sig) const = 0;
};

// ---------------------------------------------------------------------------
// Deterministic test backend. A keyed SHA3-sponge stream cipher with a
// SHA3-derived tag, a fixed-prime DH group, and Schnorr signatures over the
// same group. Not secure against a real adversary; byte-stable on every
// platform, which is what trace determinism needs.
// ---------------------------------------------------------------------------
class DeterministicSuite final : public CryptoSuite {
public:
    std::string name() const override { return "deterministic"; }

    Envelope seal(const Key256& key, const Nonce& nonce, Bytes aad,
                  std::span<const uint8_t> plaintext) const override {
        Envelope env;
        env.nonce = nonce;
        env.aad = std::move(aad);
        env.ciphertext.resize(plaintext.size());
        keystream_xor(key, nonce, plaintext, env.ciphertext);
        env.tag = compute_tag(key, nonce, env.aad, env.ciphertext);
        return env;
    }

    Result<Bytes, CryptoError> open(const Key256& key, const Envelope& env) const override {
        Tag expect = compute_tag(key, env.nonce, env.aad, env.ciphertext);
        if (expect != env.tag) return CryptoError::AuthFailure;
        Bytes pt(env.ciphertext.size());
        keystream_xor(key, env.nonce, env.ciphertext, pt);
        return pt;
    }

    KeyPair gen_agreement_keypair(Rng& rng) const override {
        uint64_t priv = draw_exponent(rng);
        KeyPair kp;
        kp.private_key = encode_u64("TDH1", priv);
        kp.public_key = encode_u64("TDHP", modpow(kGen, priv));
        return kp;
    }

    Result<Key256, CryptoError> derive_shared(std::span<const uint8_t> private_key,
                                              std::span<const uint8_t> peer_public) const override {
        auto priv = decode_u64("TDH1", private_key);
        auto peer = decode_u64("TDHP", peer_public);
        if (!priv || !peer || *peer < 2 || *peer >= kPrime - 1) return CryptoError::InvalidPublicKey;
        uint64_t shared = modpow(*peer, *priv);
        Bytes buf = to_bytes("tdh-shared");
        put_u64_be(buf, shared);
        Key256 k;
        k.bytes = sha3_256(buf);
        return k;
    }

    KeyPair gen_signing_keypair(Rng& rng) const override {
        uint64_t priv = draw_exponent(rng);
        KeyPair kp;
        kp.private_key = encode_u64("TSG1", priv);
        kp.public_key = encode_u64("TSGP", modpow(kGen, priv));
        return kp;
    }

    // Schnorr over the fixed group with a derandomized nonce.
    Signature sign(std::span<const uint8_t> private_key,
                   std::span<const uint8_t> msg) const override {
        auto priv = decode_u64("TSG1", private_key);
        if (!priv) return Signature{};
        Bytes kin = encode_u64("TSGK", *priv);
        append(kin, msg);
        uint64_t k = (get_u64_be(sha3_256(kin)) % (kOrder - 1)) + 1;
        uint64_t r = modpow(kGen, k);
        uint64_t e = challenge(r, msg);
        uint64_t s = submod(k, mulmod_order(*priv % kOrder, e));
        Signature sig;
        sig.bytes = to_bytes("TSGS");
        put_u64_be(sig.bytes, e);
        put_u64_be(sig.bytes, s);
        return sig;
    }

    bool verify(std::span<const uint8_t> public_key, std::span<const uint8_t> msg,
                const Signature& sig) const override {
        auto pub = decode_u64("TSGP", public_key);
        if (!pub || *pub < 2 || *pub >= kPrime) return false;
        if (sig.bytes.size() != 4 + 16 || std::memcmp(sig.bytes.data(), "TSGS", 4) != 0)
            return false;
        uint64_t e = get_u64_be(std::span<const uint8_t>(sig.bytes).subspan(4));
        uint64_t s = get_u64_be(std::span<const uint8_t>(sig.bytes).subspan(12));
        if (e >= kOrder || s >= kOrder) return false;
        uint64_t r = mulmod_prime(modpow(kGen, s), modpow(*pub, e));
        return challenge(r, msg) == e;
    }

private:
    // 2^61 - 1 (prime); exponents live mod p-1.
    static constexpr uint64_t kPrime = 2305843009213693951ULL;
    static constexpr uint64_t kOrder = kPrime - 1;
    static constexpr uint64_t kGen = 3;

    static uint64_t mulmod_prime(uint64_t a, uint64_t b) {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % kPrime);
    }
    static uint64_t mulmod_order(uint64_t a, uint64_t b) {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % kOrder);
    }
    static uint64_t submod(uint64_t a, uint64_t b) { return (a + kOrder - b % kOrder) % kOrder; }

    static uint64_t modpow(uint64_t base, uint64_t exp) {
        uint64_t result = 1;
        base %= kPrime;
        while (exp > 0) {
            if (exp & 1) result = mulmod_prime(result, base);
            base = mulmod_prime(base, base);
            exp >>= 1;
        }
        return result;
    }

    static uint64_t draw_exponent(Rng& rng) { return rng() % (kOrder - 3) + 2; }

    static uint64_t challenge(uint64_t r, std::span<const uint8_t> msg) {
        Bytes buf;
        put_u64_be(buf, r);
        append(buf, msg);
        return get_u64_be(sha3_256(buf)) % kOrder;
    }

    static Bytes encode_u64(const char tag[5], uint64_t v) {
        Bytes out = to_bytes(std::string_view(tag, 4));
        put_u64_be(out, v);
        return out;
    }

    static std::optional<uint64_t> decode_u64(const char tag[5], std::span<const uint8_t> b) {
        if (b.size() != 12 || std::memcmp(b.data(), tag, 4) != 0) return std::nullopt;
        return get_u64_be(b.subspan(4));
    }

    static void keystream_xor(const Key256& key, const Nonce& nonce,
                              std::span<const uint8_t> in, Bytes& out) {
        for (size_t block = 0; block * 32 < in.size(); ++block) {
            Bytes seed(key.bytes.begin(), key.bytes.end());
            append(seed, nonce);
            put_u64_be(seed, block);
            append(seed, to_bytes("ks"));
            auto ks = sha3_256(seed);
            size_t base = block * 32;
            size_t n = std::min<size_t>(32, in.size() - base);
            for (size_t i = 0; i < n; ++i) out[base + i] = in[base + i] ^ ks[i];
        }
    }

    static Tag compute_tag(const Key256& key, const Nonce& nonce, const Bytes& aad,
                           const Bytes& ct) {
        Bytes buf(key.bytes.begin(), key.bytes.end());
        append(buf, nonce);
        put_u64_be(buf, aad.size());
        append(buf, aad);
        put_u64_be(buf, ct.size());
        append(buf, ct);
        append(buf, to_bytes("tag"));
        auto full = sha3_256(buf);
        Tag t;
        std::copy(full.begin(), full.begin() + 16, t.begin());
        return t;
    }
};

// ---------------------------------------------------------------------------
// OpenSSL backend: AES-256-GCM, X25519, Ed25519. Key material is drawn from
// the caller's seeded generator, so runs stay reproducible on one platform.
// ---------------------------------------------------------------------------
class OpenSslSuite final : public CryptoSuite {
public:
    std::string name() const override { return "openssl"; }

    Envelope seal(const Key256& key, const Nonce& nonce, Bytes aad,
                  std::span<const uint8_t> plaintext) const override {
        Envelope env;
        env.nonce = nonce;
        env.aad = std::move(aad);
        env.ciphertext.resize(plaintext.size());
        EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
        EVP_EncryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, key.bytes.data(), nonce.data());
        int len = 0;
        if (!env.aad.empty())
            EVP_EncryptUpdate(ctx, nullptr, &len, env.aad.data(), static_cast<int>(env.aad.size()));
        if (!plaintext.empty())
            EVP_EncryptUpdate(ctx, env.ciphertext.data(), &len, plaintext.data(),
                              static_cast<int>(plaintext.size()));
        EVP_EncryptFinal_ex(ctx, env.ciphertext.data() + plaintext.size(), &len);
        EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_GET_TAG, 16, env.tag.data());
        EVP_CIPHER_CTX_free(ctx);
        return env;
    }

    Result<Bytes, CryptoError> open(const Key256& key, const Envelope& env) const override {
        Bytes pt(env.ciphertext.size());
        EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
        EVP_DecryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, key.bytes.data(), env.nonce.data());
        int len = 0;
        if (!env.aad.empty())
            EVP_DecryptUpdate(ctx, nullptr, &len, env.aad.data(), static_cast<int>(env.aad.size()));
        if (!env.ciphertext.empty())
            EVP_DecryptUpdate(ctx, pt.data(), &len, env.ciphertext.data(),
                              static_cast<int>(env.ciphertext.size()));
        Tag tag = env.tag;
        EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_TAG, 16, tag.data());
        int ok = EVP_DecryptFinal_ex(ctx, pt.data() + pt.size(), &len);
        EVP_CIPHER_CTX_free(ctx);
        if (ok != 1) return CryptoError::AuthFailure;
        return pt;
    }

    KeyPair gen_agreement_keypair(Rng& rng) const override {
        return raw_keypair(EVP_PKEY_X25519, rng);
    }

    Result<Key256, CryptoError> derive_shared(std::span<const uint8_t> private_key,
                                              std::span<const uint8_t> peer_public) const override {
        if (private_key.size() != 32 || peer_public.size() != 32)
            return CryptoError::InvalidPublicKey;
        EVP_PKEY* priv = EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                                      private_key.data(), private_key.size());
        EVP_PKEY* peer = EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr,
                                                     peer_public.data(), peer_public.size());
        if (!priv || !peer) {
            EVP_PKEY_free(priv);
            EVP_PKEY_free(peer);
            return CryptoError::InvalidPublicKey;
        }
        EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new(priv, nullptr);
        Bytes secret(32);
        size_t secret_len = secret.size();
        bool ok = EVP_PKEY_derive_init(ctx) == 1 && EVP_PKEY_derive_set_peer(ctx, peer) == 1 &&
                  EVP_PKEY_derive(ctx, secret.data(), &secret_len) == 1;
        EVP_PKEY_CTX_free(ctx);
        EVP_PKEY_free(priv);
        EVP_PKEY_free(peer);
        if (!ok) return CryptoError::InvalidPublicKey;
        Key256 k;
        k.bytes = sha3_256(secret);
        return k;
    }

    KeyPair gen_signing_keypair(Rng& rng) const override {
        return raw_keypair(EVP_PKEY_ED25519, rng);
    }

    Signature sign(std::span<const uint8_t> private_key,
                   std::span<const uint8_t> msg) const override {
        Signature sig;
        EVP_PKEY* priv = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                                      private_key.data(), private_key.size());
        if (!priv) return sig;
        EVP_MD_CTX* ctx = EVP_MD_CTX_new();
        size_t sig_len = 64;
        sig.bytes.resize(sig_len);
        if (EVP_DigestSignInit(ctx, nullptr, nullptr, nullptr, priv) != 1 ||
            EVP_DigestSign(ctx, sig.bytes.data(), &sig_len, msg.data(), msg.size()) != 1)
            sig.bytes.clear();
        EVP_MD_CTX_free(ctx);
        EVP_PKEY_free(priv);
        return sig;
    }

    bool verify(std::span<const uint8_t> public_key, std::span<const uint8_t> msg,
                const Signature& sig) const override {
        if (public_key.size() != 32 || sig.bytes.size() != 64) return false;
        EVP_PKEY* pub = EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(),
                                                    public_key.size());
        if (!pub) return false;
        EVP_MD_CTX* ctx = EVP_MD_CTX_new();
        bool ok = EVP_DigestVerifyInit(ctx, nullptr, nullptr, nullptr, pub) == 1 &&
                  EVP_DigestVerify(ctx, sig.bytes.data(), sig.bytes.size(), msg.data(),
                                   msg.size()) == 1;
        EVP_MD_CTX_free(ctx);
        EVP_PKEY_free(pub);
        return ok;
    }

private:
    static KeyPair raw_keypair(int type, Rng& rng) {
        Bytes seed(32);
        for (auto& b : seed) b = static_cast<uint8_t>(rng());
        KeyPair kp;
        EVP_PKEY* pkey = EVP_PKEY_new_raw_private_key(type, nullptr, seed.data(), seed.size());
        kp.private_key = seed;
        kp.public_key.resize(32);
        size_t pub_len = 32;
        EVP_PKEY_get_raw_public_key(pkey, kp.public_key.data(), &pub_len);
        EVP_PKEY_free(pkey);
        return kp;
    }
};

inline std::unique_ptr<CryptoSuite> make_suite(const std::string& name) {
    if (name == "openssl") return std::make_unique<OpenSslSuite>();
    return std::make_unique<DeterministicSuite>();
}

// ---------------------------------------------------------------------------
// Channel layer: nonce management (4-byte channel id || 8-byte counter) and
// per-(sender,receiver) monotonic sequence numbers carried in the AAD.
// ---------------------------------------------------------------------------

// AAD is canonical JSON of {job, sender, seq}; built by hand here to avoid a
// json.hpp dependency at this layer.
inline Bytes make_aad(JobId job, const std::string& sender, uint64_t seq) {
    std::string s = "{\"job\":" + std::to_string(job) + ",\"sender\":\"" + sender +
                    "\",\"seq\":" + std::to_string(seq) + "}";
    return to_bytes(s);
}

struct AadFields {
    JobId job = 0;
    std::string sender;
    uint64_t seq = 0;
};

inline std::optional<AadFields> parse_aad(std::span<const uint8_t> aad) {
    // Format is fixed by make_aad; parse positionally.
    std::string s = to_string(aad);
    AadFields f;
    size_t jp = s.find("\"job\":");
    size_t sp = s.find(",\"sender\":\"");
    size_t qp = s.find("\",\"seq\":");
    if (jp == std::string::npos || sp == std::string::npos || qp == std::string::npos)
        return std::nullopt;
    try {
        f.job = static_cast<JobId>(std::stoul(s.substr(jp + 6, sp - (jp + 6))));
        f.sender = s.substr(sp + 11, qp - (sp + 11));
        f.seq = std::stoull(s.substr(qp + 8, s.size() - 1 - (qp + 8)));
    } catch (...) {
        return std::nullopt;
    }
    return f;
}

// Sender half of a secure channel. The counter doubles as the sequence
// number, which makes nonce reuse on a live channel impossible; the explicit
// seal_with() entry point exists for tests and raises NonceReuse.
class SendChannel {
public:
    SendChannel() = default;
    SendChannel(const CryptoSuite* suite, Key256 key, uint32_t channel_id, JobId job,
                std::string sender)
        : suite_(suite), key_(key), channel_id_(channel_id), job_(job),
          sender_(std::move(sender)) {}

    Envelope seal(std::span<const uint8_t> plaintext, const TaintSet& taint = {}) {
        uint64_t counter = ++counter_;
        Envelope env = suite_->seal(key_, make_nonce(channel_id_, counter),
                                    make_aad(job_, sender_, counter), plaintext);
        env.audit_taint = taint;
        env.key_label = "job:" + std::to_string(job_);
        return env;
    }

    Result<Envelope, CryptoError> seal_with(uint64_t counter, std::span<const uint8_t> plaintext) {
        if (counter <= counter_) return CryptoError::NonceReuse;
        counter_ = counter;
        return suite_->seal(key_, make_nonce(channel_id_, counter),
                            make_aad(job_, sender_, counter), plaintext);
    }

    const Key256& key() const { return key_; }
    JobId job() const { return job_; }

private:
    const CryptoSuite* suite_ = nullptr;
    Key256 key_{};
    uint32_t channel_id_ = 0;
    JobId job_ = 0;
    std::string sender_;
    uint64_t counter_ = 0;
};

// Receiver half: authenticates, then enforces strictly increasing sequence
// numbers per sender.
class RecvChannel {
public:
    RecvChannel() = default;
    RecvChannel(const CryptoSuite* suite, Key256 key) : suite_(suite), key_(key) {}

    Result<Bytes, CryptoError> open(const Envelope& env) {
        auto pt = suite_->open(key_, env);
        if (!pt.ok()) return pt;
        auto fields = parse_aad(env.aad);
        if (!fields) return CryptoError::AuthFailure;
        uint64_t& last = last_seq_[fields->sender];
        if (fields->seq <= last) return CryptoError::ReplayDetected;
        last = fields->seq;
        return pt;
    }

    const Key256& key() const { return key_; }

private:
    const CryptoSuite* suite_ = nullptr;
    Key256 key_{};
    std::map<std::string, uint64_t> last_seq_;
};

// ---------------------------------------------------------------------------
// Live-key accounting. Long-lived key storage (ERT, FMT, sessions) goes
// through TrackedKey so release paths can prove nothing is left.
// ---------------------------------------------------------------------------
class KeyRegistry {
public:
    uint64_t register_key(JobId job, const std::string& where) {
        uint64_t id = next_id_++;
        live_[id] = {job, where};
        return id;
    }
    void deregister(uint64_t id) { live_.erase(id); }

    size_t live_count(JobId job) const {
        size_t n = 0;
        for (const auto& [id, e] : live_)
            if (e.job == job) ++n;
        return n;
    }
    size_t live_total() const { return live_.size(); }

    std::vector<std::string> holders(JobId job) const {
        std::vector<std::string> out;
        for (const auto& [id, e] : live_)
            if (e.job == job) out.push_back(e.where);
        return out;
    }

private:
    struct Entry {
        JobId job;
        std::string where;
    };
    std::map<uint64_t, Entry> live_;
    uint64_t next_id_ = 1;
};

class TrackedKey {
public:
    TrackedKey() = default;
    TrackedKey(Key256 key, KeyRegistry* registry, JobId job, std::string where)
        : key_(key), registry_(registry), job_(job) {
        if (registry_) id_ = registry_->register_key(job, where);
    }
    TrackedKey(const TrackedKey&) = delete;
    TrackedKey& operator=(const TrackedKey&) = delete;
    TrackedKey(TrackedKey&& o) noexcept { *this = std::move(o); }
    TrackedKey& operator=(TrackedKey&& o) noexcept {
        if (this != &o) {
            zeroize();
            key_ = o.key_;
            registry_ = o.registry_;
            job_ = o.job_;
            id_ = o.id_;
            o.registry_ = nullptr;
            o.id_ = 0;
            o.key_.wipe();
        }
        return *this;
    }
    ~TrackedKey() { zeroize(); }

    void zeroize() {
        key_.wipe();
        if (registry_ && id_) registry_->deregister(id_);
        registry_ = nullptr;
        id_ = 0;
    }

    const Key256& key() const { return key_; }
    JobId job() const { return job_; }
    bool present() const { return id_ != 0 || registry_ == nullptr; }

private:
    Key256 key_{};
    KeyRegistry* registry_ = nullptr;
    JobId job_ = 0;
    uint64_t id_ = 0;
};

}  // namespace teefabric

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "teefabric/crypto.hpp"

namespace teefabric {

enum class ResourceType : uint8_t { CPU, AI_Accelerator, GPU, FPGA, SSD };

inline const char* resource_type_name(ResourceType t) {
    switch (t) {
        case ResourceType::CPU: return "CPU";
        case ResourceType::AI_Accelerator: return "AI_Accelerator";
        case ResourceType::GPU: return "GPU";
        case ResourceType::FPGA: return "FPGA";
        case ResourceType::SSD: return "SSD";
    }
    return "?";
}

inline std::optional<ResourceType> resource_type_from(const std::string& s) {
    if (s == "CPU") return ResourceType::CPU;
    if (s == "AI_Accelerator") return ResourceType::AI_Accelerator;
    if (s == "GPU") return ResourceType::GPU;
    if (s == "FPGA") return ResourceType::FPGA;
    if (s == "SSD") return ResourceType::SSD;
    return std::nullopt;
}

// Fixed property vocabulary for manifest policies and PBA outcomes.
inline const std::set<std::string>& policy_vocabulary() {
    static const std::set<std::string> v = {
        "no-HT",         "memIsolation",        "cachePartitioned",
        "debug",         "coreIsolation",       "privateCache",
        "sharedCache",   "sharedCacheIsolation", "sharedMemoryIsolation",
        "rowHammerMitigation"};
    return v;
}

struct ResourceRequest {
    ResourceType type = ResourceType::CPU;
    std::set<std::string> policies;
    uint32_t cores = 0;
    uint64_t memory = 0;

    auto operator<=>(const ResourceRequest&) const = default;
};

struct Manifest {
    std::string enclave_name;
    std::string vendor;
    std::string version;  // opaque; no comparison semantics
    std::vector<ResourceRequest> resources;
    std::vector<Digest> code_digests;
    Digest digest;
    Signature signature;
    Digest manifest_id;  // hash of canonical bytes (excluding SHA-3/Sig)
};

enum class ManifestError { SchemaError, UnknownResourceType, UnknownPolicy };

inline const char* to_string(ManifestError e) {
    switch (e) {
        case ManifestError::SchemaError: return "SchemaError";
        case ManifestError::UnknownResourceType: return "UnknownResourceType";
        case ManifestError::UnknownPolicy: return "UnknownPolicy";
    }
    return "?";
}

// "256M" -> bytes, suffixes K/M/G as powers of 1024; bare integers pass through.
inline std::optional<uint64_t> parse_memory_size(const json& v) {
    if (v.is_number_unsigned()) return v.get<uint64_t>();
    if (!v.is_string()) return std::nullopt;
    std::string s = v.get<std::string>();
    if (s.empty()) return std::nullopt;
    uint64_t mult = 1;
    char suffix = s.back();
    if (suffix == 'K' || suffix == 'k') mult = 1024ull;
    else if (suffix == 'M' || suffix == 'm') mult = 1024ull * 1024;
    else if (suffix == 'G' || suffix == 'g') mult = 1024ull * 1024 * 1024;
    std::string digits = mult == 1 ? s : s.substr(0, s.size() - 1);
    if (digits.empty()) return std::nullopt;
    uint64_t n = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') return std::nullopt;
        n = n * 10 + static_cast<uint64_t>(c - '0');
    }
    return n * mult;
}

inline std::string format_memory_size(uint64_t bytes) {
    const uint64_t G = 1024ull * 1024 * 1024, M = 1024ull * 1024, K = 1024ull;
    if (bytes >= G && bytes % G == 0) return std::to_string(bytes / G) + "G";
    if (bytes >= M && bytes % M == 0) return std::to_string(bytes / M) + "M";
    if (bytes >= K && bytes % K == 0) return std::to_string(bytes / K) + "K";
    return std::to_string(bytes);
}

// Document form with the field names from the manifest file format.
inline json manifest_document(const Manifest& m, bool include_auth = true) {
    json doc;
    doc["Enclave"] = m.enclave_name;
    doc["Enclave Vendor"] = m.vendor;
    doc["Version"] = m.version;
    json res = json::array();
    for (const auto& r : m.resources) {
        json jr;
        jr["Resource type"] = resource_type_name(r.type);
        jr["Policies"] = json::array();
        for (const auto& p : r.policies) jr["Policies"].push_back(p);
        jr["Cores"] = r.cores;
        jr["Memory"] = format_memory_size(r.memory);
        res.push_back(jr);
    }
    doc["Resource"] = res;
    json cds = json::array();
    for (const auto& d : m.code_digests) cds.push_back(d.hex());
    doc["CodeDigests"] = cds;
    if (include_auth) {
        doc["SHA-3"] = m.digest.hex();
        doc["Sig"] = hex_encode(m.signature.bytes);
    }
    return doc;
}

// Canonical bytes: sorted keys, no insignificant whitespace, lowercase hex,
// with the SHA-3 and Sig fields removed. Signatures are over these bytes.
inline Bytes canonical_manifest_bytes(json doc) {
    doc.erase("SHA-3");
    doc.erase("Sig");
    return to_bytes(doc.dump());
}

inline Result<Manifest, ManifestError> parse_manifest(std::span<const uint8_t> raw) {
    json doc = json::parse(to_string(raw), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return ManifestError::SchemaError;

    auto str_field = [&](const char* name) -> std::optional<std::string> {
        if (!doc.contains(name) || !doc[name].is_string()) return std::nullopt;
        return doc[name].get<std::string>();
    };

    Manifest m;
    auto enclave = str_field("Enclave");
    auto vendor = str_field("Enclave Vendor");
    auto version = str_field("Version");
    if (!enclave || !vendor || !version) return ManifestError::SchemaError;
    m.enclave_name = *enclave;
    m.vendor = *vendor;
    m.version = *version;

    if (!doc.contains("Resource") || !doc["Resource"].is_array() || doc["Resource"].empty())
        return ManifestError::SchemaError;
    for (const auto& jr : doc["Resource"]) {
        if (!jr.is_object()) return ManifestError::SchemaError;
        ResourceRequest r;
        if (!jr.contains("Resource type") || !jr["Resource type"].is_string())
            return ManifestError::SchemaError;
        auto rt = resource_type_from(jr["Resource type"].get<std::string>());
        if (!rt) return ManifestError::UnknownResourceType;
        r.type = *rt;
        if (jr.contains("Policies")) {
            if (!jr["Policies"].is_array()) return ManifestError::SchemaError;
            for (const auto& p : jr["Policies"]) {
                if (!p.is_string()) return ManifestError::SchemaError;
                std::string name = p.get<std::string>();
                if (!policy_vocabulary().count(name)) return ManifestError::UnknownPolicy;
                r.policies.insert(name);
            }
        }
        if (!jr.contains("Cores") || !jr["Cores"].is_number_unsigned())
            return ManifestError::SchemaError;
        r.cores = jr["Cores"].get<uint32_t>();
        if (!jr.contains("Memory")) return ManifestError::SchemaError;
        auto mem = parse_memory_size(jr["Memory"]);
        if (!mem || *mem == 0) return ManifestError::SchemaError;
        r.memory = *mem;
        m.resources.push_back(std::move(r));
    }

    if (doc.contains("CodeDigests")) {
        if (!doc["CodeDigests"].is_array()) return ManifestError::SchemaError;
        for (const auto& cd : doc["CodeDigests"]) {
            if (!cd.is_string()) return ManifestError::SchemaError;
            auto d = Digest::from_hex(cd.get<std::string>());
            if (!d) return ManifestError::SchemaError;
            m.code_digests.push_back(*d);
        }
    }

    if (doc.contains("SHA-3")) {
        if (!doc["SHA-3"].is_string()) return ManifestError::SchemaError;
        auto d = Digest::from_hex(doc["SHA-3"].get<std::string>());
        if (!d) return ManifestError::SchemaError;
        m.digest = *d;
    }
    if (doc.contains("Sig")) {
        if (!doc["Sig"].is_string()) return ManifestError::SchemaError;
        auto b = hex_decode(doc["Sig"].get<std::string>());
        if (!b) return ManifestError::SchemaError;
        m.signature.bytes = *b;
    }

    m.manifest_id = Digest::of(canonical_manifest_bytes(doc));
    return m;
}

inline Bytes serialize_manifest(const Manifest& m) {
    return to_bytes(manifest_document(m).dump());
}

inline bool verify_manifest(const Manifest& m, std::span<const uint8_t> vendor_public,
                            const CryptoSuite& suite) {
    Bytes canon = canonical_manifest_bytes(manifest_document(m));
    if (Digest::of(canon) != m.digest) return false;
    return suite.verify(vendor_public, canon, m.signature);
}

// Fills in SHA-3 and Sig over the canonical bytes.
inline Manifest sign_manifest(Manifest m, std::span<const uint8_t> vendor_private,
                              const CryptoSuite& suite) {
    Bytes canon = canonical_manifest_bytes(manifest_document(m, false));
    m.digest = Digest::of(canon);
    m.signature = suite.sign(vendor_private, canon);
    m.manifest_id = m.digest;
    return m;
}

}  // namespace teefabric

#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "teefabric/bytes.hpp"

namespace teefabric {

using JobId = uint32_t;

// Labels carried by a buffer. Coarse-grained: one set per buffer, unioned on
// every copy or transform, which over-approximates and therefore never loses
// a label.
using TaintSet = std::set<JobId>;

inline TaintSet taint_union(const TaintSet& a, const TaintSet& b) {
    TaintSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

struct TaintedBytes {
    Bytes bytes;
    TaintSet taint;

    TaintedBytes() = default;
    TaintedBytes(Bytes b, TaintSet t) : bytes(std::move(b)), taint(std::move(t)) {}

    static TaintedBytes plain(Bytes b) { return TaintedBytes{std::move(b), {}}; }
    static TaintedBytes labeled(Bytes b, JobId job) { return TaintedBytes{std::move(b), {job}}; }

    bool tainted() const { return !taint.empty(); }

    TaintedBytes slice(size_t off, size_t len) const {
        TaintedBytes out;
        out.bytes.assign(bytes.begin() + off, bytes.begin() + off + len);
        out.taint = taint;
        return out;
    }

    void append_from(const TaintedBytes& other) {
        bytes.insert(bytes.end(), other.bytes.begin(), other.bytes.end());
        taint.insert(other.taint.begin(), other.taint.end());
    }
};

}  // namespace teefabric

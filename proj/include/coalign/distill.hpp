#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coalign/error.hpp"

namespace coalign {

// ---------------------------------------------------------------------------
// SimHash near-duplicate fingerprinting

inline uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// 64-bit SimHash over lowercase whitespace-split unigrams weighted by term
// frequency. Empty text hashes to 0.
inline uint64_t simhash64(std::string_view text) {
    std::map<std::string, uint64_t> tf;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            ++tf[cur];
            cur.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c) && c < 0x80)
            flush();
        else
            cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    }
    flush();
    if (tf.empty()) return 0;

    long long votes[64] = {0};
    for (const auto& [token, count] : tf) {
        const uint64_t h = fnv1a64(token);
        for (int b = 0; b < 64; ++b) {
            const long long w = static_cast<long long>(count);
            votes[b] += (h >> b) & 1 ? w : -w;
        }
    }
    uint64_t fp = 0;
    for (int b = 0; b < 64; ++b)
        if (votes[b] > 0) fp |= 1ull << b;
    return fp;
}

inline int hamming(uint64_t a, uint64_t b) { return std::popcount(a ^ b); }

struct DedupResult {
    std::vector<size_t> retained;  // indices in original order
    double duplication_rate = 0.0;
};

// Single-pass dedup: a document is a duplicate iff its fingerprint lies
// within hamming_threshold of any previously retained fingerprint.
inline DedupResult dedup_corpus(const std::vector<std::string>& texts, int hamming_threshold) {
    if (hamming_threshold < 0 || hamming_threshold > 64)
        throw Error(ErrorKind::FormatError, "hamming threshold must be in 0..64");
    DedupResult res;
    if (texts.empty()) return res;
    std::vector<uint64_t> kept_fp;
    size_t duplicates = 0;
    for (size_t i = 0; i < texts.size(); ++i) {
        const uint64_t fp = simhash64(texts[i]);
        bool dup = false;
        for (uint64_t seen : kept_fp) {
            if (hamming(fp, seen) <= hamming_threshold) {
                dup = true;
                break;
            }
        }
        if (dup) {
            ++duplicates;
        } else {
            kept_fp.push_back(fp);
            res.retained.push_back(i);
        }
    }
    res.duplication_rate = static_cast<double>(duplicates) / static_cast<double>(texts.size());
    return res;
}

// ---------------------------------------------------------------------------
// INT4 absmax quantization

struct QuantSpec {
    double delta = 1.0;  // quantization step; levels fixed to [-8, 7]

    void validate() const {
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw Error(ErrorKind::FormatError, "delta must be positive and finite");
    }
};

// clip(round-half-away-from-zero(W / delta), -8, 7) * delta
inline std::vector<double> quantize_int4(const std::vector<double>& values,
                                         const QuantSpec& spec) {
    spec.validate();
    std::vector<double> out;
    out.reserve(values.size());
    for (double w : values) {
        if (!std::isfinite(w)) throw Error(ErrorKind::NonFiniteInput, "value " + std::to_string(w));
        double level = std::round(w / spec.delta);  // std::round is half-away-from-zero
        level = std::clamp(level, -8.0, 7.0);
        out.push_back(level * spec.delta);
    }
    return out;
}

// delta = max|values| / 7; all-zero arrays get delta 1 so everything
// quantizes to 0.
inline double absmax_delta(const std::vector<double>& values) {
    if (values.empty()) throw Error(ErrorKind::EmptyInput, "no values");
    double mx = 0.0;
    for (double w : values) {
        if (!std::isfinite(w)) throw Error(ErrorKind::NonFiniteInput, "value " + std::to_string(w));
        mx = std::max(mx, std::abs(w));
    }
    return mx == 0.0 ? 1.0 : mx / 7.0;
}

}  // namespace coalign

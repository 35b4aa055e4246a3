#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "coalign/error.hpp"
#include "coalign/plan.hpp"

namespace coalign {

// Offline token-vector table. The engine never calls an encoder; tables are
// exported once from whatever model produced them.
class EmbeddingStore {
public:
    EmbeddingStore(size_t dim, std::unordered_map<std::string, std::vector<double>> table)
        : dim_(dim), table_(std::move(table)) {}

    size_t dim() const { return dim_; }
    size_t size() const { return table_.size(); }
    bool contains(const std::string& token) const { return table_.count(token) != 0; }

    // OOV tokens map to the zero vector (and thus similarity 0).
    std::vector<double> vector_of(const std::string& token) const {
        auto it = table_.find(token);
        if (it != table_.end()) return it->second;
        return std::vector<double>(dim_, 0.0);
    }

private:
    size_t dim_;
    std::unordered_map<std::string, std::vector<double>> table_;
};

// ---------------------------------------------------------------------------
// loading

namespace detail {

inline EmbeddingStore load_embeddings_text(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw Error(ErrorKind::FormatError, "missing header");
    std::istringstream hs(header);
    long long count = -1, dim = -1;
    if (!(hs >> count >> dim) || count < 0 || dim < 1)
        throw Error(ErrorKind::FormatError, "bad header '" + header + "'");

    std::unordered_map<std::string, std::vector<double>> table;
    table.reserve(static_cast<size_t>(count));
    std::string line;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        if (token.empty())
            throw Error(ErrorKind::FormatError, "line " + std::to_string(lineno));
        std::vector<double> vec;
        vec.reserve(static_cast<size_t>(dim));
        double x;
        while (ls >> x) vec.push_back(x);
        if (vec.size() != static_cast<size_t>(dim))
            throw Error(ErrorKind::FormatError,
                        "line " + std::to_string(lineno) + ": expected " +
                            std::to_string(dim) + " floats, got " + std::to_string(vec.size()));
        if (!table.emplace(token, std::move(vec)).second)
            throw Error(ErrorKind::FormatError,
                        "line " + std::to_string(lineno) + ": duplicate token '" + token + "'");
    }
    if (table.size() != static_cast<size_t>(count))
        throw Error(ErrorKind::FormatError,
                    "header declares " + std::to_string(count) + " tokens, file has " +
                        std::to_string(table.size()));
    return EmbeddingStore(static_cast<size_t>(dim), std::move(table));
}

inline uint32_t read_u32_le(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw Error(ErrorKind::FormatError, "truncated binary table");
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

// Binary layout: "EMB1", u32 count, u32 dim, then per token a u32 byte
// length, the UTF-8 token, and dim little-endian float32 values.
inline EmbeddingStore load_embeddings_binary(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "EMB1", 4) != 0)
        throw Error(ErrorKind::FormatError, "bad magic");
    const uint32_t count = read_u32_le(in);
    const uint32_t dim = read_u32_le(in);
    if (dim < 1) throw Error(ErrorKind::FormatError, "dim must be >= 1");
    std::unordered_map<std::string, std::vector<double>> table;
    table.reserve(count);
    for (uint32_t t = 0; t < count; ++t) {
        const uint32_t len = read_u32_le(in);
        std::string token(len, '\0');
        if (!in.read(token.data(), len))
            throw Error(ErrorKind::FormatError, "truncated token " + std::to_string(t));
        std::vector<double> vec(dim);
        for (uint32_t d = 0; d < dim; ++d) {
            uint32_t bits = read_u32_le(in);
            float f;
            std::memcpy(&f, &bits, 4);
            vec[d] = static_cast<double>(f);
        }
        if (!table.emplace(std::move(token), std::move(vec)).second)
            throw Error(ErrorKind::FormatError, "duplicate token at record " + std::to_string(t));
    }
    return EmbeddingStore(dim, std::move(table));
}

}  // namespace detail

// Auto-detects the binary magic, otherwise parses the text format
// "<count> <dim>" header plus one token-per-line body.
inline EmbeddingStore load_embeddings(std::istream& in) {
    const std::istream::pos_type start = in.tellg();
    char probe[4] = {0, 0, 0, 0};
    in.read(probe, 4);
    const bool binary = in.gcount() == 4 && std::memcmp(probe, "EMB1", 4) == 0;
    in.clear();
    in.seekg(start);
    if (binary) return detail::load_embeddings_binary(in);
    return detail::load_embeddings_text(in);
}

inline EmbeddingStore load_embeddings(const std::string& contents) {
    std::istringstream in(contents, std::ios::binary);
    return load_embeddings(in);
}

// ---------------------------------------------------------------------------
// similarity

inline std::vector<double> embed_token(const EmbeddingStore& store, const std::string& token) {
    return store.vector_of(token);
}

// "<hello_wave>" -> mean of Emb(hello), Emb(wave). Single-part ids reduce
// to a plain lookup.
inline std::vector<double> embed_action(const EmbeddingStore& store, const std::string& action_id) {
    if (!is_valid_action_id(action_id))
        throw Error(ErrorKind::InvalidActionId, action_id);
    const std::string inner = action_id.substr(1, action_id.size() - 2);
    std::vector<double> acc(store.dim(), 0.0);
    size_t parts = 0;
    size_t pos = 0;
    while (pos <= inner.size()) {
        size_t next = inner.find('_', pos);
        if (next == std::string::npos) next = inner.size();
        const std::string part = inner.substr(pos, next - pos);
        if (!part.empty()) {
            auto v = store.vector_of(part);
            for (size_t d = 0; d < acc.size(); ++d) acc[d] += v[d];
            ++parts;
        }
        pos = next + 1;
    }
    if (parts > 1)
        for (double& x : acc) x /= static_cast<double>(parts);
    return acc;
}

// Cosine similarity; zero vectors compare as 0 so OOV tokens never match.
inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw Error(ErrorKind::DimError, std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

// ---------------------------------------------------------------------------
// relevance matrix

// Word x plan-action similarity grid with the retention mask at threshold
// theta. Values stay available below threshold; only the mask gates the
// scheduler objective.
struct RelevanceMatrix {
    size_t word_count = 0;
    size_t action_count = 0;
    std::vector<double> values;  // row-major, word-major
    std::vector<uint8_t> mask;   // 1 iff value >= theta
    double theta = 0.7;

    double at(size_t word, size_t action) const {
        return values[word * action_count + action];
    }
    bool retained(size_t word, size_t action) const {
        return mask[word * action_count + action] != 0;
    }

    void rethreshold(double new_theta) {
        theta = new_theta;
        for (size_t k = 0; k < values.size(); ++k)
            mask[k] = values[k] >= theta ? 1 : 0;
    }

    // Uniformly rescales retained similarities (ablation / equivariance
    // experiments); the mask is kept as-is.
    void scale_values(double c) {
        for (double& v : values) v *= c;
    }
};

inline RelevanceMatrix relevance_matrix(const std::vector<WordToken>& words,
                                        const std::vector<std::string>& plan_actions,
                                        const EmbeddingStore& store, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw Error(ErrorKind::FormatError, "theta must be in [0, 1]");
    RelevanceMatrix m;
    m.word_count = words.size();
    m.action_count = plan_actions.size();
    m.theta = theta;
    m.values.resize(m.word_count * m.action_count, 0.0);
    m.mask.resize(m.word_count * m.action_count, 0);

    std::vector<std::vector<double>> action_vecs;
    action_vecs.reserve(plan_actions.size());
    for (const auto& id : plan_actions) action_vecs.push_back(embed_action(store, id));

    for (size_t i = 0; i < words.size(); ++i) {
        const auto wv = store.vector_of(words[i].normalized);
        for (size_t j = 0; j < plan_actions.size(); ++j) {
            double s = cosine(wv, action_vecs[j]);
            m.values[i * m.action_count + j] = s;
            m.mask[i * m.action_count + j] = s >= theta ? 1 : 0;
        }
    }
    return m;
}

}  // namespace coalign

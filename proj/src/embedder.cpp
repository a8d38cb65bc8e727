#include "sheetloop/embedder.hpp"

#include <cmath>
#include <cstdint>

namespace sheetloop::retrieval {

namespace {

std::uint64_t fnv1a(const char* data, size_t len) {
    std::uint64_t h = 1469598103934665603ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

HashNgramEmbedder::HashNgramEmbedder(int dim) : dim_(dim) {
    if (dim < 2) throw EmbedderError("embedding dimension must be >= 2");
}

Vector HashNgramEmbedder::embed_one(const std::string& text) const {
    Vector v(static_cast<size_t>(dim_), 0.0);
    if (text.size() >= 3) {
        for (size_t i = 0; i + 3 <= text.size(); ++i) {
            v[fnv1a(text.data() + i, 3) % dim_] += 1.0;
        }
    } else if (!text.empty()) {
        v[fnv1a(text.data(), text.size()) % dim_] += 1.0;
    }
    double norm = l2_norm(v);
    if (norm == 0.0) {
        v[0] = 1.0;  // documented degenerate rule for empty input
        return v;
    }
    for (auto& x : v) x /= norm;
    return v;
}

std::vector<Vector> HashNgramEmbedder::operator()(const std::vector<std::string>& texts) const {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

std::string HashNgramEmbedder::id() const {
    return "hash-ngram3-d" + std::to_string(dim_) + "-v1";
}

double l2_norm(const Vector& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

void l2_normalize(Vector& v) {
    double norm = l2_norm(v);
    if (norm == 0.0) throw EmbedderError("cannot normalize a zero vector");
    for (auto& x : v) x /= norm;
}

double cosine_similarity(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) {
        throw EmbedderError("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                            std::to_string(v.size()));
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw EmbedderError("cosine of a zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

}  // namespace sheetloop::retrieval

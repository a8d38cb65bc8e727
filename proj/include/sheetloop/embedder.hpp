#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sheetloop::retrieval {

struct EmbedderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vector = std::vector<double>;

/// Batch embedding function: one unit-length-agnostic vector per input,
/// all of equal dimension.
using EmbeddingFn = std::function<std::vector<Vector>(const std::vector<std::string>&)>;

/// Deterministic offline embedder: hashed character trigram counts over
/// `dim` buckets, L2-normalized. Empty (or all-zero) inputs map to the
/// first basis vector so downstream cosine math never sees a zero vector.
class HashNgramEmbedder {
public:
    explicit HashNgramEmbedder(int dim = 64);

    Vector embed_one(const std::string& text) const;
    std::vector<Vector> operator()(const std::vector<std::string>& texts) const;

    int dim() const { return dim_; }
    std::string id() const;  // e.g. "hash-ngram3-d64-v1"

private:
    int dim_;
};

double cosine_similarity(const Vector& u, const Vector& v);  // throws EmbedderError

double l2_norm(const Vector& v);
void l2_normalize(Vector& v);  // throws EmbedderError on zero vector

}  // namespace sheetloop::retrieval

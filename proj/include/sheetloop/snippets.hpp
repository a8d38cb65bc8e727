#pragma once

#include "sheetloop/embedder.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sheetloop::retrieval {

struct CodeSnippet {
    int id = 0;
    std::string source_file;
    int line_start = 1;  // 1-based, inclusive
    int line_end = 1;
    std::string text;
    std::string category;  // from the file's tag header; may be empty

    bool operator==(const CodeSnippet&) const = default;
};

struct RetrievalHit {
    int snippet_id = 0;
    double score = 0.0;
};

struct RetrievalResult {
    std::vector<RetrievalHit> hits;  // scores non-increasing, ties by ascending id
    std::string query_id;
};

/// Window spans (1-based, inclusive) for an n-line file: full windows at
/// stride offsets, plus one tail window reaching the last line when the
/// stride walk stops short. Tail windows span at least min_window lines
/// (clamped to the file length).
std::vector<std::pair<int, int>> sliding_windows(int n_lines, int window_size, int stride,
                                                 int min_window);

/// Immutable snippet store with one unit-norm embedding per snippet.
class SnippetRepository {
public:
    struct BuildParams {
        int window_size = 20;
        int stride = 10;
        int min_window = 2;
    };

    /// Chunks each file with the sliding window, embeds every fragment once
    /// and normalizes. A first line like "# category: Format Adjustment"
    /// tags all snippets of that file.
    static SnippetRepository build(const std::vector<std::string>& file_paths,
                                   const BuildParams& params, const EmbeddingFn& embedder,
                                   const std::string& embedder_id);

    /// Direct construction (tests and benchmarks). Vectors are normalized.
    static SnippetRepository from_vectors(std::vector<CodeSnippet> snippets,
                                          std::vector<Vector> vectors, std::string embedder_id);

    void save(const std::string& path) const;  // versioned index file
    static SnippetRepository load(const std::string& path);

    const std::vector<CodeSnippet>& snippets() const { return snippets_; }
    const std::vector<Vector>& vectors() const { return vectors_; }
    const std::string& embedder_id() const { return embedder_id_; }
    size_t size() const { return snippets_.size(); }
    bool empty() const { return snippets_.empty(); }

    /// Distinct categories present, in first-appearance order.
    std::vector<std::string> categories() const;

private:
    std::vector<CodeSnippet> snippets_;
    std::vector<Vector> vectors_;
    std::string embedder_id_;
};

/// Exact top-k by cosine similarity: the returned set contains the k best
/// snippets (every included snippet scores >= every excluded one), ordered
/// by descending score with ascending-id tie-break. k is clamped to the
/// repository size.
RetrievalResult retrieve_top_k(const SnippetRepository& repo, const Vector& query_vec, int k,
                               std::string query_id = {});

RetrievalResult retrieve_top_k(const SnippetRepository& repo, const std::string& query_code,
                               int k, const EmbeddingFn& embedder);

}  // namespace sheetloop::retrieval

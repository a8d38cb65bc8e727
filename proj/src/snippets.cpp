#include "sheetloop/snippets.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sheetloop::retrieval {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kIndexVersion = "snippet-index v1";

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(std::move(cur));
    return lines;
}

// "# category: Value Processing" or "// category: ..." on the first line.
std::string detect_category(const std::vector<std::string>& lines) {
    if (lines.empty()) return {};
    std::string_view l = lines.front();
    for (std::string_view prefix : {"# category:", "// category:", "-- category:"}) {
        if (l.substr(0, prefix.size()) == prefix) {
            std::string tag(l.substr(prefix.size()));
            size_t a = tag.find_first_not_of(" \t");
            size_t b = tag.find_last_not_of(" \t");
            if (a == std::string::npos) return {};
            return tag.substr(a, b - a + 1);
        }
    }
    return {};
}

}  // namespace

std::vector<std::pair<int, int>> sliding_windows(int n_lines, int window_size, int stride,
                                                 int min_window) {
    if (window_size < 1 || stride < 1 || stride > window_size) {
        throw std::invalid_argument("need window_size >= 1 and 1 <= stride <= window_size");
    }
    std::vector<std::pair<int, int>> out;
    if (n_lines <= 0) return out;
    if (n_lines <= window_size) {
        out.push_back({1, n_lines});
        return out;
    }
    int last_start = 1;
    for (int start = 1; start + window_size - 1 <= n_lines; start += stride) {
        out.push_back({start, start + window_size - 1});
        last_start = start;
    }
    int covered_to = last_start + window_size - 1;
    if (covered_to < n_lines) {
        int tail_start = std::min(last_start + stride, n_lines - min_window + 1);
        if (tail_start < 1) tail_start = 1;
        out.push_back({tail_start, n_lines});
    }
    return out;
}

SnippetRepository SnippetRepository::build(const std::vector<std::string>& file_paths,
                                           const BuildParams& params,
                                           const EmbeddingFn& embedder,
                                           const std::string& embedder_id) {
    SnippetRepository repo;
    repo.embedder_id_ = embedder_id;

    std::vector<std::string> texts;
    int next_id = 1;
    for (const auto& path : file_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open corpus file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        std::vector<std::string> lines = split_lines(buf.str());
        std::string category = detect_category(lines);
        for (auto [start, end] : sliding_windows(static_cast<int>(lines.size()),
                                                 params.window_size, params.stride,
                                                 params.min_window)) {
            CodeSnippet s;
            s.id = next_id++;
            s.source_file = path;
            s.line_start = start;
            s.line_end = end;
            std::string text;
            for (int i = start; i <= end; ++i) {
                text += lines[static_cast<size_t>(i - 1)];
                if (i != end) text.push_back('\n');
            }
            s.text = std::move(text);
            s.category = category;
            texts.push_back(s.text);
            repo.snippets_.push_back(std::move(s));
        }
    }

    if (!texts.empty()) {
        repo.vectors_ = embedder(texts);
        if (repo.vectors_.size() != repo.snippets_.size()) {
            throw EmbedderError("embedder returned " + std::to_string(repo.vectors_.size()) +
                                " vectors for " + std::to_string(repo.snippets_.size()) +
                                " snippets");
        }
        for (auto& v : repo.vectors_) {
            if (v.size() != repo.vectors_.front().size()) {
                throw EmbedderError("dimension mismatch across embedding calls");
            }
            l2_normalize(v);
        }
    }
    return repo;
}

SnippetRepository SnippetRepository::from_vectors(std::vector<CodeSnippet> snippets,
                                                  std::vector<Vector> vectors,
                                                  std::string embedder_id) {
    if (snippets.size() != vectors.size()) {
        throw EmbedderError("snippet/vector count mismatch");
    }
    for (auto& v : vectors) {
        if (v.size() != vectors.front().size()) {
            throw EmbedderError("dimension mismatch across vectors");
        }
        l2_normalize(v);
    }
    SnippetRepository repo;
    repo.snippets_ = std::move(snippets);
    repo.vectors_ = std::move(vectors);
    repo.embedder_id_ = std::move(embedder_id);
    return repo;
}

void SnippetRepository::save(const std::string& path) const {
    Json doc;
    doc["version"] = kIndexVersion;
    doc["embedder"] = embedder_id_;
    Json arr = Json::array();
    for (size_t i = 0; i < snippets_.size(); ++i) {
        const CodeSnippet& s = snippets_[i];
        Json j;
        j["id"] = s.id;
        j["file"] = s.source_file;
        j["lines"] = Json::array({s.line_start, s.line_end});
        j["category"] = s.category;
        j["text"] = s.text;
        j["vector"] = vectors_[i];
        arr.push_back(std::move(j));
    }
    doc["snippets"] = std::move(arr);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write index '" + path + "'");
    out << doc.dump(2) << "\n";
}

SnippetRepository SnippetRepository::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open index '" + path + "'");
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::runtime_error("bad index file '" + path + "': " + e.what());
    }
    if (doc.value("version", "") != kIndexVersion) {
        throw std::runtime_error("unsupported index version in '" + path + "'");
    }
    SnippetRepository repo;
    repo.embedder_id_ = doc.value("embedder", "");
    for (const auto& j : doc.value("snippets", Json::array())) {
        CodeSnippet s;
        s.id = j.at("id").get<int>();
        s.source_file = j.value("file", "");
        s.line_start = j.at("lines")[0].get<int>();
        s.line_end = j.at("lines")[1].get<int>();
        s.category = j.value("category", "");
        s.text = j.value("text", "");
        repo.snippets_.push_back(std::move(s));
        repo.vectors_.push_back(j.at("vector").get<Vector>());
    }
    return repo;
}

std::vector<std::string> SnippetRepository::categories() const {
    std::vector<std::string> out;
    for (const auto& s : snippets_) {
        if (s.category.empty()) continue;
        if (std::find(out.begin(), out.end(), s.category) == out.end()) {
            out.push_back(s.category);
        }
    }
    return out;
}

RetrievalResult retrieve_top_k(const SnippetRepository& repo, const Vector& query_vec, int k,
                               std::string query_id) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (repo.empty()) throw std::invalid_argument("repository is empty");

    std::vector<RetrievalHit> all;
    all.reserve(repo.size());
    for (size_t i = 0; i < repo.size(); ++i) {
        all.push_back(RetrievalHit{repo.snippets()[i].id,
                                   cosine_similarity(query_vec, repo.vectors()[i])});
    }
    auto better = [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.snippet_id < b.snippet_id;
    };
    size_t kk = std::min<size_t>(static_cast<size_t>(k), all.size());
    std::nth_element(all.begin(), all.begin() + kk - 1, all.end(), better);
    std::sort(all.begin(), all.begin() + kk, better);
    all.resize(kk);
    RetrievalResult res;
    res.hits = std::move(all);
    res.query_id = std::move(query_id);
    return res;
}

RetrievalResult retrieve_top_k(const SnippetRepository& repo, const std::string& query_code,
                               int k, const EmbeddingFn& embedder) {
    auto vecs = embedder({query_code});
    if (vecs.size() != 1) throw EmbedderError("embedder returned a bad batch");
    if (!repo.vectors().empty() && vecs[0].size() != repo.vectors().front().size()) {
        throw EmbedderError("query embedding dimension does not match the repository");
    }
    return retrieve_top_k(repo, vecs[0], k, "q");
}

}  // namespace sheetloop::retrieval

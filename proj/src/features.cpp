#include "acap/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "acap/errors.hpp"

namespace acap {

namespace {

struct Decoded {
    char32_t codepoint = 0;
    std::size_t length = 1;
    bool valid = false;
};

Decoded decode_utf8(std::string_view text, std::size_t pos) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    const unsigned char lead = byte(pos);
    Decoded out;
    if (lead < 0x80) {
        out = {lead, 1, true};
    } else if ((lead >> 5) == 0x6 && pos + 1 < text.size() && (byte(pos + 1) & 0xc0) == 0x80) {
        out.codepoint = static_cast<char32_t>((lead & 0x1f) << 6 | (byte(pos + 1) & 0x3f));
        out.length = 2;
        out.valid = out.codepoint >= 0x80;
    } else if ((lead >> 4) == 0xe && pos + 2 < text.size() && (byte(pos + 1) & 0xc0) == 0x80 &&
               (byte(pos + 2) & 0xc0) == 0x80) {
        out.codepoint = static_cast<char32_t>((lead & 0x0f) << 12 | (byte(pos + 1) & 0x3f) << 6 |
                                              (byte(pos + 2) & 0x3f));
        out.length = 3;
        out.valid = out.codepoint >= 0x800 && (out.codepoint < 0xd800 || out.codepoint > 0xdfff);
    } else if ((lead >> 3) == 0x1e && pos + 3 < text.size() && (byte(pos + 1) & 0xc0) == 0x80 &&
               (byte(pos + 2) & 0xc0) == 0x80 && (byte(pos + 3) & 0xc0) == 0x80) {
        out.codepoint = static_cast<char32_t>((lead & 0x07) << 18 | (byte(pos + 1) & 0x3f) << 12 |
                                              (byte(pos + 2) & 0x3f) << 6 | (byte(pos + 3) & 0x3f));
        out.length = 4;
        out.valid = out.codepoint >= 0x10000 && out.codepoint <= 0x10ffff;
    }
    return out;
}

bool is_separator_codepoint(char32_t cp) {
    return (cp >= 0xa0 && cp <= 0xbf) || cp == 0xd7 || cp == 0xf7 ||
           (cp >= 0x2000 && cp <= 0x206f) || (cp >= 0x2e00 && cp <= 0x2e7f) ||
           (cp >= 0x3000 && cp <= 0x303f);
}

void flush_token(std::string& current, std::vector<std::string>& out) {
    std::size_t begin = 0;
    std::size_t end = current.size();
    while (begin < end && current[begin] == '\'') ++begin;
    while (end > begin && current[end - 1] == '\'') --end;
    if (end > begin) {
        out.emplace_back(current.substr(begin, end - begin));
    }
    current.clear();
}

// FNV-1a over the token bytes, with the seed folded in first so hashed
// vocabularies differ across seeds.
std::uint64_t fnv1a(std::string_view token, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ULL;
    for (int shift = 0; shift < 64; shift += 8) {
        h ^= (seed >> shift) & 0xffULL;
        h *= 1099511628211ULL;
    }
    for (char c : token) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> budgeted_tokens(const Document& doc, const TokenBudget& budget,
                                         std::size_t* full_count = nullptr) {
    std::vector<std::string> tokens = tokenize(doc.text);
    if (full_count != nullptr) {
        *full_count = tokens.size();
    }
    const auto cap = budget.for_kind(doc.kind);
    if (cap.has_value() && tokens.size() > *cap) {
        tokens.resize(*cap);
    }
    return tokens;
}

void append_double(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const Decoded d = decode_utf8(text, pos);
        if (!d.valid) {
            flush_token(current, tokens);
            ++pos;
            continue;
        }
        const char32_t cp = d.codepoint;
        if (cp < 0x80) {
            const char c = static_cast<char>(cp);
            if (std::isalnum(static_cast<unsigned char>(c))) {
                current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            } else if (c == '\'') {
                current.push_back('\'');
            } else {
                flush_token(current, tokens);
            }
        } else if (cp == 0x2019) {
            current.push_back('\'');
        } else if (is_separator_codepoint(cp)) {
            flush_token(current, tokens);
        } else {
            current.append(text.substr(pos, d.length));
        }
        pos += d.length;
    }
    flush_token(current, tokens);
    return tokens;
}

std::string_view vectorizer_mode_name(VectorizerMode mode) {
    return mode == VectorizerMode::tfidf ? "tfidf" : "hashed";
}

VectorizerMode parse_vectorizer_mode(std::string_view name) {
    if (name == "tfidf") return VectorizerMode::tfidf;
    if (name == "hashed") return VectorizerMode::hashed;
    throw ValidationError("unknown vectorizer mode: " + std::string(name));
}

Vectorizer Vectorizer::fit(const std::vector<Document>& documents,
                           const VectorizerConfig& config) {
    if (documents.empty()) {
        throw ValidationError("cannot fit a vectorizer on an empty corpus");
    }
    Vectorizer v;
    v.config_ = config;
    if (config.mode == VectorizerMode::hashed) {
        if (config.dimension == 0) {
            throw ValidationError("hashed vectorizer needs a positive dimension");
        }
        v.dimension_ = config.dimension;
        return v;
    }

    // Document frequencies over budgeted tokens, so fitting and embedding see
    // the same text.
    std::map<std::string, std::size_t> df;
    for (const auto& doc : documents) {
        std::vector<std::string> tokens = budgeted_tokens(doc, config.budget);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (auto& t : tokens) {
            ++df[t];
        }
    }

    std::vector<std::pair<std::string, std::size_t>> entries(df.begin(), df.end());
    if (config.dimension > 0 && entries.size() > config.dimension) {
        // Keep the most frequent tokens; ties resolve alphabetically.
        std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        entries.resize(config.dimension);
        std::sort(entries.begin(), entries.end());
    }

    const double n = static_cast<double>(documents.size());
    v.dimension_ = entries.size();
    v.vocabulary_.reserve(entries.size());
    v.idf_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        v.vocabulary_.push_back(entries[i].first);
        v.slot_.emplace(entries[i].first, i);
        // Smoothed idf; strictly positive, so present tokens never vanish.
        v.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(entries[i].second))) +
                         1.0);
    }
    return v;
}

DocVector Vectorizer::embed(const Document& doc) const {
    DocVector out;
    out.values.assign(dimension_, 0.0);
    const std::vector<std::string> tokens = budgeted_tokens(doc, config_.budget, &out.token_count);
    if (config_.mode == VectorizerMode::hashed) {
        for (const auto& t : tokens) {
            const std::size_t slot =
                static_cast<std::size_t>(fnv1a(t, config_.hash_seed) % dimension_);
            out.values[slot] += 1.0;
            ++out.matched_tokens;
        }
        return out;
    }
    for (const auto& t : tokens) {
        const auto it = slot_.find(t);
        if (it == slot_.end()) continue;
        out.values[it->second] += idf_[it->second];
        ++out.matched_tokens;
    }
    return out;
}

Vectorizer fit_vectorizer(const std::vector<Document>& documents,
                          const VectorizerConfig& config) {
    return Vectorizer::fit(documents, config);
}

std::map<std::string, Vectorizer> fit_per_outlet(const std::vector<Document>& documents,
                                                 const VectorizerConfig& config) {
    std::map<std::string, std::vector<Document>> by_outlet;
    for (const auto& doc : documents) {
        by_outlet[doc.outlet].push_back(doc);
    }
    std::map<std::string, Vectorizer> out;
    for (const auto& [outlet, docs] : by_outlet) {
        out.emplace(outlet, Vectorizer::fit(docs, config));
    }
    return out;
}

double cosine_similarity(const DocVector& a, const DocVector& b) {
    if (a.size() != b.size()) {
        throw ValidationError("cosine of vectors with different dimensions (" +
                              std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw ValidationError("cosine of a zero vector is undefined");
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

PairFeatures pair_features(const DocVector& article, const DocVector& comment) {
    if (article.size() != comment.size()) {
        throw ValidationError("pair features need equal dimensions (" +
                              std::to_string(article.size()) + " vs " +
                              std::to_string(comment.size()) + ")");
    }
    PairFeatures out;
    out.reserve(2 * article.size() + 3);
    out.insert(out.end(), article.values.begin(), article.values.end());
    out.insert(out.end(), comment.values.begin(), comment.values.end());
    out.push_back(cosine_similarity(article, comment));
    out.push_back(std::log1p(static_cast<double>(comment.token_count)));
    out.push_back(std::log1p(static_cast<double>(article.token_count)));
    return out;
}

std::map<std::string, DocVector> load_external_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open embeddings file: " + path.string());
    }
    std::map<std::string, DocVector> out;
    std::size_t dimension = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw ParseError(ctx + ": expected `id<TAB>values`");
        }
        std::string id = line.substr(0, tab);
        DocVector vec;
        const char* p = line.data() + tab + 1;
        const char* end = line.data() + line.size();
        while (p < end) {
            while (p < end && *p == ' ') ++p;
            if (p == end) break;
            double value = 0.0;
            const auto res = std::from_chars(p, end, value);
            if (res.ec != std::errc{}) {
                throw ParseError(ctx + ": malformed number");
            }
            if (!std::isfinite(value)) {
                throw ParseError(ctx + ": non-finite value");
            }
            vec.values.push_back(value);
            p = res.ptr;
        }
        if (vec.values.empty()) {
            throw ParseError(ctx + ": empty vector");
        }
        if (dimension == 0) {
            dimension = vec.values.size();
        } else if (vec.values.size() != dimension) {
            throw ParseError(ctx + ": dimension " + std::to_string(vec.values.size()) +
                             " does not match earlier rows of dimension " +
                             std::to_string(dimension));
        }
        if (!out.emplace(std::move(id), std::move(vec)).second) {
            throw ParseError(ctx + ": duplicate id: " + line.substr(0, tab));
        }
    }
    return out;
}

void save_embeddings(const std::filesystem::path& path,
                     const std::map<std::string, DocVector>& embeddings) {
    std::size_t dimension = 0;
    for (const auto& [id, vec] : embeddings) {
        if (vec.values.empty()) {
            throw ValidationError("refusing to save empty vector for id: " + id);
        }
        if (dimension == 0) {
            dimension = vec.values.size();
        } else if (vec.values.size() != dimension) {
            throw ValidationError("refusing to save mixed dimensions (" + std::to_string(dimension) +
                                  " vs " + std::to_string(vec.values.size()) + " for id " + id +
                                  ")");
        }
    }
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write embeddings file: " + path.string());
    }
    std::string buffer;
    for (const auto& [id, vec] : embeddings) {
        buffer.clear();
        buffer += id;
        buffer += '\t';
        for (std::size_t i = 0; i < vec.values.size(); ++i) {
            if (i > 0) buffer += ' ';
            append_double(buffer, vec.values[i]);
        }
        buffer += '\n';
        out << buffer;
    }
}

} // namespace acap

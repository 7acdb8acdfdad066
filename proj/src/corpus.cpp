#include "acap/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "acap/util.hpp"

namespace acap {

using nlohmann::json;

void require_label(Label value) {
    if (!is_valid_label(value)) {
        throw ValidationError("label out of range: " + std::to_string(value) +
                              " (expected 0.." + std::to_string(kNumClasses - 1) + ")");
    }
}

int binarize(Label label) {
    require_label(label);
    return label == 0 ? 0 : 1;
}

std::string_view kind_name(DocKind kind) {
    return kind == DocKind::article ? "article" : "comment";
}

namespace {

bool is_blank(const std::string& s) {
    for (unsigned char c : s) {
        if (!std::isspace(c)) return false;
    }
    return true;
}

std::string line_context(const std::filesystem::path& path, std::size_t lineno) {
    return path.string() + ":" + std::to_string(lineno);
}

const json& require_field(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(ctx + ": missing field '" + key + "'");
    }
    return *it;
}

std::string require_string(const json& j, const char* key, const std::string& ctx) {
    const json& v = require_field(j, key, ctx);
    if (!v.is_string()) {
        throw ParseError(ctx + ": field '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

json parse_record_line(const std::string& line, const std::string& ctx) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(ctx + ": malformed record: " + e.what());
    }
}

} // namespace

void DocumentSet::add(Document doc) {
    if (index_.count(doc.id) != 0) {
        throw ValidationError("duplicate document id '" + doc.id + "'");
    }
    if (is_blank(doc.text)) {
        throw ValidationError("document '" + doc.id + "' has empty text");
    }
    index_.emplace(doc.id, docs_.size());
    docs_.push_back(std::move(doc));
}

const Document* DocumentSet::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &docs_[it->second];
}

const Document& DocumentSet::at(const std::string& id) const {
    const Document* doc = find(id);
    if (doc == nullptr) {
        throw ValidationError("unknown document id '" + id + "'");
    }
    return *doc;
}

std::vector<const Document*> DocumentSet::with_outlet(const std::string& outlet) const {
    std::vector<const Document*> out;
    for (const Document& doc : docs_) {
        if (doc.outlet == outlet) out.push_back(&doc);
    }
    return out;
}

DocumentLoad load_documents(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open documents file: " + path.string());
    }
    DocumentLoad out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        const std::string ctx = line_context(path, lineno);
        json j = parse_record_line(line, ctx);

        Document doc;
        doc.id = require_string(j, "id", ctx);
        doc.outlet = require_string(j, "outlet", ctx);
        doc.text = require_string(j, "text", ctx);
        const std::string kind = require_string(j, "kind", ctx);
        if (kind == "article") {
            doc.kind = DocKind::article;
        } else if (kind == "comment") {
            doc.kind = DocKind::comment;
        } else {
            throw ValidationError(ctx + ": unknown kind '" + kind + "'");
        }
        try {
            out.documents.add(std::move(doc));
        } catch (const ValidationError& e) {
            throw ValidationError(ctx + ": " + e.what());
        }
    }
    if (out.documents.empty()) {
        out.warnings.push_back(path.string() + ": no documents loaded");
    }
    return out;
}

void save_documents(const std::filesystem::path& path, const DocumentSet& documents) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write documents file: " + path.string());
    }
    for (const Document& doc : documents.all()) {
        json j;
        j["id"] = doc.id;
        j["kind"] = std::string(kind_name(doc.kind));
        j["outlet"] = doc.outlet;
        j["text"] = doc.text;
        out << j.dump() << "\n";
    }
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path,
                                               const DocumentSet& documents) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open annotations file: " + path.string());
    }
    std::vector<AnnotationRecord> records;
    std::unordered_map<std::string, std::size_t> seen_pairs;
    std::size_t annotator_count = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        const std::string ctx = line_context(path, lineno);
        json j = parse_record_line(line, ctx);

        AnnotationRecord rec;
        rec.article_id = require_string(j, "article_id", ctx);
        rec.comment_id = require_string(j, "comment_id", ctx);
        const json& labels = require_field(j, "labels", ctx);
        if (!labels.is_array()) {
            throw ParseError(ctx + ": field 'labels' must be an array of integers");
        }
        for (const json& v : labels) {
            if (!v.is_number_integer()) {
                throw ParseError(ctx + ": field 'labels' must be an array of integers");
            }
            const Label label = v.get<int>();
            if (!is_valid_label(label)) {
                throw ValidationError(ctx + ": label out of range: " + std::to_string(label));
            }
            rec.labels.push_back(label);
        }
        if (rec.labels.size() < 2) {
            throw ValidationError(ctx + ": record needs at least 2 annotator labels");
        }
        if (annotator_count == 0) {
            annotator_count = rec.labels.size();
        } else if (rec.labels.size() != annotator_count) {
            throw ValidationError(ctx + ": inconsistent annotator count (expected " +
                                  std::to_string(annotator_count) + ", got " +
                                  std::to_string(rec.labels.size()) + ")");
        }

        const Document* article = documents.find(rec.article_id);
        if (article == nullptr || article->kind != DocKind::article) {
            throw ValidationError(ctx + ": article_id '" + rec.article_id +
                                  "' does not resolve to an article");
        }
        const Document* comment = documents.find(rec.comment_id);
        if (comment == nullptr || comment->kind != DocKind::comment) {
            throw ValidationError(ctx + ": comment_id '" + rec.comment_id +
                                  "' does not resolve to a comment");
        }

        const std::string pair_key = rec.article_id + "\x1f" + rec.comment_id;
        auto [it, inserted] = seen_pairs.emplace(pair_key, lineno);
        if (!inserted) {
            throw ValidationError(ctx + ": duplicate pair (" + rec.article_id + ", " +
                                  rec.comment_id + "), first seen at line " +
                                  std::to_string(it->second));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void save_annotations(const std::filesystem::path& path,
                      const std::vector<AnnotationRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write annotations file: " + path.string());
    }
    for (const AnnotationRecord& rec : records) {
        json j;
        j["article_id"] = rec.article_id;
        j["comment_id"] = rec.comment_id;
        j["labels"] = rec.labels;
        out << j.dump() << "\n";
    }
}

ValidationReport validate_corpus(const DocumentSet& documents,
                                 const std::vector<AnnotationRecord>& records) {
    ValidationReport report;
    report.document_count = documents.size();
    report.annotation_count = records.size();

    for (const Document& doc : documents.all()) {
        OutletCounts& counts = report.per_outlet[doc.outlet];
        if (doc.kind == DocKind::article) {
            ++counts.articles;
        } else {
            ++counts.comments;
        }
    }

    std::unordered_map<std::string, bool> referenced;
    std::unordered_map<std::string, std::size_t> pair_count;
    std::size_t annotator_count = 0;
    std::array<std::size_t, kNumClasses> label_totals{};
    std::size_t labeled_records = 0;

    for (std::size_t i = 0; i < records.size(); ++i) {
        const AnnotationRecord& rec = records[i];
        const std::string where = "record " + std::to_string(i + 1);
        bool usable = true;

        const Document* article = documents.find(rec.article_id);
        if (article == nullptr) {
            report.violations.push_back(where + ": unresolved article_id '" + rec.article_id + "'");
            usable = false;
        } else if (article->kind != DocKind::article) {
            report.violations.push_back(where + ": article_id '" + rec.article_id +
                                        "' refers to a comment");
            usable = false;
        } else {
            referenced[rec.article_id] = true;
        }

        const Document* comment = documents.find(rec.comment_id);
        if (comment == nullptr) {
            report.violations.push_back(where + ": unresolved comment_id '" + rec.comment_id + "'");
            usable = false;
        } else if (comment->kind != DocKind::comment) {
            report.violations.push_back(where + ": comment_id '" + rec.comment_id +
                                        "' refers to an article");
            usable = false;
        } else {
            referenced[rec.comment_id] = true;
        }

        // Pairs must stay inside one outlet; per-outlet vectorizers would
        // otherwise embed the two sides into different spaces.
        if (article != nullptr && comment != nullptr && article->kind == DocKind::article &&
            comment->kind == DocKind::comment && article->outlet != comment->outlet) {
            report.violations.push_back(where + ": article and comment come from different "
                                        "outlets ('" + article->outlet + "' vs '" +
                                        comment->outlet + "')");
            usable = false;
        }

        if (rec.labels.size() < 2) {
            report.violations.push_back(where + ": fewer than 2 annotator labels");
            usable = false;
        } else if (annotator_count == 0) {
            annotator_count = rec.labels.size();
        } else if (rec.labels.size() != annotator_count) {
            report.violations.push_back(where + ": inconsistent annotator count");
            usable = false;
        }

        long long label_sum = 0;
        for (Label label : rec.labels) {
            if (!is_valid_label(label)) {
                report.violations.push_back(where + ": label out of range: " +
                                            std::to_string(label));
                usable = false;
                break;
            }
            label_sum += label;
        }

        const std::string pair_key = rec.article_id + "\x1f" + rec.comment_id;
        if (++pair_count[pair_key] > 1) {
            report.violations.push_back(where + ": duplicate pair (" + rec.article_id + ", " +
                                        rec.comment_id + ")");
            usable = false;
        }

        if (!usable) continue;

        const Label aggregated = static_cast<Label>(
            round_half_up_mean(label_sum, static_cast<long long>(rec.labels.size())));
        ++label_totals[static_cast<std::size_t>(aggregated)];
        ++labeled_records;

        OutletCounts& counts = report.per_outlet[article->outlet];
        ++counts.pairs;
        ++counts.label_counts[static_cast<std::size_t>(aggregated)];
    }

    for (const Document& doc : documents.all()) {
        if (referenced.find(doc.id) == referenced.end()) {
            report.orphan_documents.push_back(doc.id);
        }
    }

    if (labeled_records > 0) {
        for (int c = 0; c < kNumClasses; ++c) {
            report.class_proportions[static_cast<std::size_t>(c)] =
                static_cast<double>(label_totals[static_cast<std::size_t>(c)]) /
                static_cast<double>(labeled_records);
        }
    }
    return report;
}

std::string to_text(const ValidationReport& report) {
    std::ostringstream out;
    out << "documents: " << report.document_count
        << "  annotations: " << report.annotation_count
        << "  violations: " << report.violations.size()
        << "  orphans: " << report.orphan_documents.size() << "\n";
    out << "outlet        articles  comments  pairs  class proportions\n";
    for (const auto& [outlet, counts] : report.per_outlet) {
        std::size_t total = 0;
        for (std::size_t n : counts.label_counts) total += n;
        char row[128];
        std::snprintf(row, sizeof(row), "  %-12s%-10zu%-10zu%-7zu", outlet.c_str(),
                      counts.articles, counts.comments, counts.pairs);
        out << row;
        if (total > 0) {
            char buf[64];
            for (int c = 0; c < kNumClasses; ++c) {
                std::snprintf(buf, sizeof(buf), "%s%.2f", c == 0 ? "" : " ",
                              static_cast<double>(counts.label_counts[static_cast<std::size_t>(c)]) /
                                  static_cast<double>(total));
                out << buf;
            }
        }
        out << "\n";
    }
    for (const std::string& v : report.violations) {
        out << "violation: " << v << "\n";
    }
    return out.str();
}

} // namespace acap

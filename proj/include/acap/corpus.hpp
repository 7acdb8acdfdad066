#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "acap/errors.hpp"

namespace acap {

// Relevance classes, most irrelevant first: 0 irrelevant, 1 same category,
// 2 same entities, 3 relevant. Labels are plain ints constrained to this
// range; require_label enforces the domain at the boundaries.
inline constexpr int kNumClasses = 4;

using Label = int;

inline bool is_valid_label(Label value) { return value >= 0 && value < kNumClasses; }

void require_label(Label value);

// Collapses the ordinal scale to relevant-vs-not: 0 stays 0, everything
// else maps to 1. Monotone by construction.
int binarize(Label label);

enum class DocKind { article, comment };

std::string_view kind_name(DocKind kind);

struct Document {
    std::string id;
    std::string outlet;  // free-form publisher tag
    DocKind kind = DocKind::comment;
    std::string text;    // untruncated UTF-8
};

// Documents with unique ids and non-empty text. Immutable once loaded;
// concurrent reads are safe.
class DocumentSet {
public:
    // Throws ValidationError on duplicate id or whitespace-only text.
    void add(Document doc);

    const Document* find(const std::string& id) const;
    const Document& at(const std::string& id) const;  // throws ValidationError
    bool contains(const std::string& id) const { return find(id) != nullptr; }

    const std::vector<Document>& all() const { return docs_; }
    std::vector<const Document*> with_outlet(const std::string& outlet) const;

    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> index_;
};

// One article-comment pair with the raw per-annotator labels, annotator
// order preserved.
struct AnnotationRecord {
    std::string article_id;
    std::string comment_id;
    std::vector<Label> labels;
};

struct DocumentLoad {
    DocumentSet documents;
    std::vector<std::string> warnings;
};

// File format: one JSON object per line with fields {id, outlet, kind, text};
// kind is "article" or "comment". Blank lines are skipped.
DocumentLoad load_documents(const std::filesystem::path& path);
void save_documents(const std::filesystem::path& path, const DocumentSet& documents);

// File format: one JSON object per line with fields
// {article_id, comment_id, labels: [int, ...]}.
// Every id must resolve to a document of the right kind, labels must lie in
// [0, 4), the annotator count must be constant across the file (and >= 2),
// and duplicate article-comment pairs are rejected.
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path,
                                               const DocumentSet& documents);
void save_annotations(const std::filesystem::path& path,
                      const std::vector<AnnotationRecord>& records);

struct OutletCounts {
    std::size_t articles = 0;
    std::size_t comments = 0;
    std::size_t pairs = 0;
    std::array<std::size_t, kNumClasses> label_counts{};  // aggregated labels
};

struct ValidationReport {
    std::vector<std::string> violations;        // unresolved refs, bad labels, ragged counts
    std::vector<std::string> orphan_documents;  // documents no annotation touches
    std::map<std::string, OutletCounts> per_outlet;
    // Proportions of aggregated labels over all valid records; sums to 1
    // whenever any labels exist, all zeros otherwise.
    std::array<double, kNumClasses> class_proportions{};
    std::size_t document_count = 0;
    std::size_t annotation_count = 0;

    bool ok() const { return violations.empty(); }
};

// Never throws for content problems; findings land in the report.
ValidationReport validate_corpus(const DocumentSet& documents,
                                 const std::vector<AnnotationRecord>& records);

std::string to_text(const ValidationReport& report);

} // namespace acap

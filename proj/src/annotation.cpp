#include "acap/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "acap/errors.hpp"
#include "acap/util.hpp"

namespace acap {

namespace {

void require_labels(const std::vector<Label>& labels) {
    if (labels.empty()) {
        throw ValidationError("cannot aggregate an empty label vector");
    }
    for (Label l : labels) {
        require_label(l);
    }
}

} // namespace

Label aggregate_labels(const std::vector<Label>& labels) {
    require_labels(labels);
    const std::int64_t sum = std::accumulate(labels.begin(), labels.end(), std::int64_t{0});
    return static_cast<Label>(round_half_up_mean(sum, static_cast<std::int64_t>(labels.size())));
}

double annotator_sigma(const std::vector<Label>& labels) {
    require_labels(labels);
    const double n = static_cast<double>(labels.size());
    const double mean =
        std::accumulate(labels.begin(), labels.end(), 0.0,
                        [](double acc, Label l) { return acc + static_cast<double>(l); }) /
        n;
    double ss = 0.0;
    for (Label l : labels) {
        const double d = static_cast<double>(l) - mean;
        ss += d * d;
    }
    return std::sqrt(ss / n);
}

LabeledPair make_labeled_pair(const AnnotationRecord& record, double threshold) {
    LabeledPair pair;
    pair.article_id = record.article_id;
    pair.comment_id = record.comment_id;
    pair.label = aggregate_labels(record.labels);
    pair.sigma = annotator_sigma(record.labels);
    pair.tier = pair.sigma <= threshold ? Tier::high : Tier::low;
    return pair;
}

std::vector<LabeledPair> make_labeled_pairs(const std::vector<AnnotationRecord>& records,
                                            double threshold) {
    std::vector<LabeledPair> pairs;
    pairs.reserve(records.size());
    for (const auto& record : records) {
        pairs.push_back(make_labeled_pair(record, threshold));
    }
    return pairs;
}

AgreementPartition partition_by_agreement(const std::vector<AnnotationRecord>& records,
                                          double threshold) {
    AgreementPartition out;
    for (const auto& record : records) {
        if (annotator_sigma(record.labels) <= threshold) {
            out.high.push_back(record);
        } else {
            out.low.push_back(record);
        }
    }
    return out;
}

RatingMatrix build_rating_matrix(const std::vector<AnnotationRecord>& records,
                                 std::size_t categories) {
    if (records.empty()) {
        throw ValidationError("rating matrix needs at least one item");
    }
    if (categories < 2) {
        throw ValidationError("rating matrix needs at least two categories");
    }
    RatingMatrix matrix;
    matrix.raters = records.front().labels.size();
    if (matrix.raters < 2) {
        throw ValidationError("rating matrix needs at least two raters per item");
    }
    matrix.counts.reserve(records.size());
    for (const auto& record : records) {
        if (record.labels.size() != matrix.raters) {
            throw ValidationError("rating matrix needs a constant rater count (expected " +
                                  std::to_string(matrix.raters) + ", got " +
                                  std::to_string(record.labels.size()) + ")");
        }
        std::vector<int> row(categories, 0);
        for (Label l : record.labels) {
            if (l < 0 || static_cast<std::size_t>(l) >= categories) {
                throw ValidationError("label out of range for rating matrix: " +
                                      std::to_string(l));
            }
            ++row[static_cast<std::size_t>(l)];
        }
        matrix.counts.push_back(std::move(row));
    }
    return matrix;
}

double mean_observed_agreement(const RatingMatrix& matrix) {
    const std::int64_t n = static_cast<std::int64_t>(matrix.items());
    const std::int64_t m = static_cast<std::int64_t>(matrix.raters);
    if (n < 1 || m < 2) {
        throw ValidationError("mean observed agreement needs >= 1 item and >= 2 raters");
    }
    std::int64_t sum_sq = 0;
    for (const auto& row : matrix.counts) {
        for (int v : row) {
            sum_sq += static_cast<std::int64_t>(v) * v;
        }
    }
    // Integer numerator keeps unanimous matrices at exactly 1.0.
    return static_cast<double>(sum_sq - n * m) / static_cast<double>(n * m * (m - 1));
}

double fleiss_kappa(const RatingMatrix& matrix) {
    const double observed = mean_observed_agreement(matrix);
    const std::size_t k = matrix.categories();
    std::vector<std::int64_t> column_totals(k, 0);
    std::int64_t grand_total = 0;
    for (const auto& row : matrix.counts) {
        for (std::size_t j = 0; j < k; ++j) {
            column_totals[j] += row[j];
            grand_total += row[j];
        }
    }
    // Exact degeneracy test: every rating in one category means Pe == 1.
    const std::size_t used =
        static_cast<std::size_t>(std::count_if(column_totals.begin(), column_totals.end(),
                                               [](std::int64_t c) { return c > 0; }));
    if (used <= 1) {
        throw DegenerateStatistic("fleiss kappa is undefined when all ratings share one category");
    }
    double expected = 0.0;
    for (std::int64_t total : column_totals) {
        const double share = static_cast<double>(total) / static_cast<double>(grand_total);
        expected += share * share;
    }
    return (observed - expected) / (1.0 - expected);
}

CoincidenceMatrix build_coincidence_matrix(const std::vector<AnnotationRecord>& records,
                                           std::size_t categories) {
    if (records.empty()) {
        throw ValidationError("coincidence matrix needs at least one item");
    }
    if (categories < 2) {
        throw ValidationError("coincidence matrix needs at least two categories");
    }
    CoincidenceMatrix cm;
    cm.categories = categories;
    cm.coincidences.assign(categories * categories, 0.0);
    cm.marginals.assign(categories, 0.0);
    cm.distances2.assign(categories * categories, 0.0);

    for (const auto& record : records) {
        const std::size_t m = record.labels.size();
        if (m < 2) {
            throw ValidationError("coincidence matrix needs >= 2 ratings per item");
        }
        for (Label l : record.labels) {
            if (l < 0 || static_cast<std::size_t>(l) >= categories) {
                throw ValidationError("label out of range for coincidence matrix: " +
                                      std::to_string(l));
            }
        }
        const double weight = 1.0 / static_cast<double>(m - 1);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                if (a == b) continue;
                const auto ca = static_cast<std::size_t>(record.labels[a]);
                const auto cb = static_cast<std::size_t>(record.labels[b]);
                cm.coincidences[ca * categories + cb] += weight;
            }
        }
    }

    for (std::size_t c = 0; c < categories; ++c) {
        double v = 0.0;
        for (std::size_t d = 0; d < categories; ++d) {
            v += cm.coincidences[c * categories + d];
        }
        cm.marginals[c] = v;
        cm.total += v;
    }

    // Ordinal distance between c and c': the marginal mass spanned from c
    // through c', counting the endpoints at half weight, then squared.
    for (std::size_t c = 0; c < categories; ++c) {
        for (std::size_t d = c + 1; d < categories; ++d) {
            double span = 0.0;
            for (std::size_t g = c; g <= d; ++g) {
                span += cm.marginals[g];
            }
            span -= (cm.marginals[c] + cm.marginals[d]) / 2.0;
            cm.distances2[c * categories + d] = span * span;
            cm.distances2[d * categories + c] = span * span;
        }
    }
    return cm;
}

double krippendorff_alpha(const CoincidenceMatrix& cm) {
    const std::size_t k = cm.categories;
    if (cm.total <= 1.0) {
        throw ValidationError("alpha needs more than one pairable value");
    }
    const std::size_t observed_values =
        static_cast<std::size_t>(std::count_if(cm.marginals.begin(), cm.marginals.end(),
                                               [](double v) { return v > 0.0; }));
    if (observed_values < 2) {
        throw DegenerateStatistic("alpha is undefined when all observed values are identical");
    }
    double disagreement_observed = 0.0;
    double disagreement_expected = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) {
            disagreement_observed += cm.o(c, d) * cm.d2(c, d);
            disagreement_expected += cm.marginals[c] * cm.marginals[d] * cm.d2(c, d);
        }
    }
    if (disagreement_expected == 0.0) {
        throw DegenerateStatistic("alpha is undefined when expected disagreement is zero");
    }
    return 1.0 - (cm.total - 1.0) * disagreement_observed / disagreement_expected;
}

double krippendorff_alpha(const std::vector<AnnotationRecord>& records,
                          std::size_t categories) {
    return krippendorff_alpha(build_coincidence_matrix(records, categories));
}

std::string_view band_name(AgreementBand band) {
    switch (band) {
        case AgreementBand::poor: return "poor";
        case AgreementBand::slight: return "slight";
        case AgreementBand::fair: return "fair";
        case AgreementBand::moderate: return "moderate";
        case AgreementBand::substantial: return "substantial";
        case AgreementBand::almost_perfect: return "almost perfect";
    }
    return "unknown";
}

AgreementBand interpret_kappa(double value) {
    if (!(value >= -1.0 && value <= 1.0)) {
        throw ValidationError("agreement value outside [-1, 1]: " + std::to_string(value));
    }
    if (value < 0.0) return AgreementBand::poor;
    if (value <= 0.20) return AgreementBand::slight;
    if (value <= 0.40) return AgreementBand::fair;
    if (value <= 0.60) return AgreementBand::moderate;
    if (value <= 0.80) return AgreementBand::substantial;
    return AgreementBand::almost_perfect;
}

} // namespace acap

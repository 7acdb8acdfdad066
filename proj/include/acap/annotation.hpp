#pragma once

#include <string_view>
#include <vector>

#include "acap/corpus.hpp"

namespace acap {

// Final label for one pair: arithmetic mean of the annotator labels with
// halves rounded up, computed in exact integer arithmetic. Permutation
// invariant and bounded by the min/max of its inputs.
Label aggregate_labels(const std::vector<Label>& labels);

// Population standard deviation of the annotator labels. The population
// form (not the sample form) is what makes the canonical one-rater-off
// case [1,1,2] land at ~0.471, inside the high-agreement band.
double annotator_sigma(const std::vector<Label>& labels);

enum class Tier { high, low };

struct LabeledPair {
    std::string article_id;
    std::string comment_id;
    Label label = 0;
    double sigma = 0.0;
    Tier tier = Tier::high;  // high iff sigma <= threshold
};

LabeledPair make_labeled_pair(const AnnotationRecord& record, double threshold = 0.5);
std::vector<LabeledPair> make_labeled_pairs(const std::vector<AnnotationRecord>& records,
                                            double threshold = 0.5);

struct AgreementPartition {
    std::vector<AnnotationRecord> high;  // sigma <= threshold
    std::vector<AnnotationRecord> low;   // sigma >  threshold
};

// Disjoint cover of the input for any threshold.
AgreementPartition partition_by_agreement(const std::vector<AnnotationRecord>& records,
                                          double threshold = 0.5);

// Per-item rater counts: counts[i][j] = how many raters put item i into
// category j. Every row sums to the constant rater count m.
struct RatingMatrix {
    std::vector<std::vector<int>> counts;  // N x k
    std::size_t raters = 0;                // m

    std::size_t items() const { return counts.size(); }
    std::size_t categories() const { return counts.empty() ? 0 : counts.front().size(); }
};

// Requires every record to carry the same number of labels (>= 2).
RatingMatrix build_rating_matrix(const std::vector<AnnotationRecord>& records,
                                 std::size_t categories = kNumClasses);

// Mean observed agreement: (sum_ij v_ij^2 - N*m) / (N*m*(m-1)). Lives in
// [0, 1] and hits 1 exactly when every item is unanimous. No chance
// correction; see fleiss_kappa for the corrected statistic.
double mean_observed_agreement(const RatingMatrix& matrix);

// Chance-corrected Fleiss kappa: (P - Pe) / (1 - Pe) with P the mean
// observed agreement and Pe = sum_j p_j^2 over category shares. Throws
// DegenerateStatistic when every rating falls into a single category.
double fleiss_kappa(const RatingMatrix& matrix);

// Coincidences of value pairs within items: o[c][c'] accumulates
// 1/(m_item - 1) per ordered pair of ratings. Symmetric; total mass n equals
// the number of pairable values. distances2 holds squared ordinal distances
// computed from the category marginals.
struct CoincidenceMatrix {
    std::size_t categories = 0;
    std::vector<double> coincidences;  // k*k row-major
    std::vector<double> marginals;     // v_c
    std::vector<double> distances2;    // k*k row-major, zero diagonal
    double total = 0.0;                // n

    double o(std::size_t a, std::size_t b) const { return coincidences[a * categories + b]; }
    double d2(std::size_t a, std::size_t b) const { return distances2[a * categories + b]; }
};

// Requires every record to carry >= 2 ratings; ragged counts are fine here.
CoincidenceMatrix build_coincidence_matrix(const std::vector<AnnotationRecord>& records,
                                           std::size_t categories = kNumClasses);

// Krippendorff's alpha with the ordinal distance metric:
//   alpha = 1 - (n-1) * sum_cc' o_cc' d2_cc' / sum_cc' v_c v_c' d2_cc'.
// Equals 1 on perfect agreement. Throws DegenerateStatistic when all
// observed values are identical (expected disagreement is zero).
double krippendorff_alpha(const CoincidenceMatrix& cm);

double krippendorff_alpha(const std::vector<AnnotationRecord>& records,
                          std::size_t categories = kNumClasses);

enum class AgreementBand { poor, slight, fair, moderate, substantial, almost_perfect };

std::string_view band_name(AgreementBand band);

// Conventional interpretation bands over [-1, 1]:
//   [-1, 0) poor, [0, 0.20] slight, (0.20, 0.40] fair, (0.40, 0.60] moderate,
//   (0.60, 0.80] substantial, (0.80, 1.0] almost perfect.
// Throws ValidationError outside [-1, 1].
AgreementBand interpret_kappa(double value);

} // namespace acap

#include "doctest.h"

#include <cmath>
#include <vector>

#include "acap/annotation.hpp"
#include "acap/errors.hpp"

using namespace acap;

namespace {

std::vector<AnnotationRecord> records_from(const std::vector<std::vector<Label>>& labels) {
    std::vector<AnnotationRecord> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.push_back({"a" + std::to_string(i), "c" + std::to_string(i), labels[i]});
    }
    return out;
}

} // namespace

TEST_SUITE("annotation") {

TEST_CASE("aggregate_labels takes the half-up rounded mean") {
    CHECK(aggregate_labels({1, 1, 2}) == 1);
    CHECK(aggregate_labels({0, 3}) == 2);      // 1.5 rounds up
    CHECK(aggregate_labels({0, 1}) == 1);      // 0.5 rounds up
    CHECK(aggregate_labels({0, 0, 0}) == 0);
    CHECK(aggregate_labels({3, 3, 3}) == 3);
    CHECK(aggregate_labels({2}) == 2);
    CHECK(aggregate_labels({0, 1, 2}) == 1);
    CHECK(aggregate_labels({1, 2, 2}) == 2);   // 1.67 rounds to 2
    CHECK_THROWS_AS(aggregate_labels({}), ValidationError);
    CHECK_THROWS_AS(aggregate_labels({1, 4}), ValidationError);
    CHECK_THROWS_AS(aggregate_labels({-1, 1}), ValidationError);
}

TEST_CASE("aggregate stays within the observed range") {
    // Property: the aggregate never leaves [min, max] of the votes.
    for (Label a = 0; a < 4; ++a) {
        for (Label b = 0; b < 4; ++b) {
            for (Label c = 0; c < 4; ++c) {
                const Label agg = aggregate_labels({a, b, c});
                CHECK(agg >= std::min({a, b, c}));
                CHECK(agg <= std::max({a, b, c}));
            }
        }
    }
}

TEST_CASE("annotator_sigma is the population standard deviation") {
    CHECK(annotator_sigma({1, 1, 2}) == doctest::Approx(0.47140452079103173).epsilon(1e-15));
    CHECK(annotator_sigma({0, 1, 2}) == doctest::Approx(0.816496580927726).epsilon(1e-15));
    CHECK(annotator_sigma({2, 2, 2}) == 0.0);
    CHECK(annotator_sigma({0, 3}) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK_THROWS_AS(annotator_sigma({}), ValidationError);
}

TEST_CASE("labeled pairs carry label, sigma, and tier") {
    const AnnotationRecord near{"a1", "c1", {1, 1, 2}};
    const LabeledPair p1 = make_labeled_pair(near);
    CHECK(p1.article_id == "a1");
    CHECK(p1.label == 1);
    CHECK(p1.sigma == doctest::Approx(0.47140452079103173));
    CHECK(p1.tier == Tier::high);

    const AnnotationRecord spread{"a2", "c2", {0, 1, 2}};
    CHECK(make_labeled_pair(spread).tier == Tier::low);

    // Threshold boundary is inclusive: sigma == threshold counts as high.
    const AnnotationRecord at_half{"a3", "c3", {0, 1}};  // sigma exactly 0.5
    CHECK(annotator_sigma({0, 1}) == 0.5);
    CHECK(make_labeled_pair(at_half).tier == Tier::high);
    CHECK(make_labeled_pair(at_half, 0.4).tier == Tier::low);

    const AnnotationRecord unanimous{"a4", "c4", {1, 1, 1}};
    CHECK(make_labeled_pair(unanimous).tier == Tier::high);
}

TEST_CASE("partition_by_agreement splits without losing records") {
    const auto records = records_from({{1, 1, 1}, {1, 1, 2}, {0, 1, 2}, {0, 2, 3}, {3, 3, 3}});
    const AgreementPartition part = partition_by_agreement(records);
    CHECK(part.high.size() + part.low.size() == records.size());
    CHECK(part.high.size() == 3);  // two unanimous plus [1,1,2]
    for (const auto& rec : part.high) {
        CHECK(annotator_sigma(rec.labels) <= 0.5);
    }
    for (const auto& rec : part.low) {
        CHECK(annotator_sigma(rec.labels) > 0.5);
    }
}

TEST_CASE("rating matrix counts categories per item") {
    const auto records = records_from({{0, 0, 1}, {2, 3, 3}});
    const RatingMatrix matrix = build_rating_matrix(records);
    CHECK(matrix.items() == 2);
    CHECK(matrix.raters == 3);
    CHECK(matrix.categories() == 4);
    CHECK(matrix.counts[0][0] == 2);
    CHECK(matrix.counts[0][1] == 1);
    CHECK(matrix.counts[1][2] == 1);
    CHECK(matrix.counts[1][3] == 2);

    CHECK_THROWS_AS(build_rating_matrix({}), ValidationError);
    CHECK_THROWS_AS(build_rating_matrix(records_from({{1, 1}, {1, 2, 2}})), ValidationError);
}

TEST_CASE("mean observed agreement on a single fully split item") {
    // One item rated 0, 1, 0: of the three rater pairs only one agrees,
    // so the mean observed agreement is exactly 1/3.
    const auto records = records_from({{0, 1, 0}});
    const RatingMatrix matrix = build_rating_matrix(records);
    CHECK(matrix.counts[0][0] == 2);
    CHECK(mean_observed_agreement(matrix) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("mean observed agreement is exactly 1 under unanimity") {
    const auto records = records_from({{0, 0, 0}, {3, 3, 3}, {2, 2, 2}});
    CHECK(mean_observed_agreement(build_rating_matrix(records)) == 1.0);
}

TEST_CASE("fleiss kappa matches a hand-worked four-item example") {
    // Count rows (2,1,0,0), (0,3,0,0), (0,0,1,2), (1,0,2,0): mean observed
    // agreement 1/2, chance agreement 19/72, kappa 17/53.
    const auto records = records_from({{0, 0, 1}, {1, 1, 1}, {2, 3, 3}, {0, 2, 2}});
    const RatingMatrix matrix = build_rating_matrix(records);
    CHECK(mean_observed_agreement(matrix) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fleiss_kappa(matrix) ==
          doctest::Approx(0.32075471698113206).epsilon(1e-15));
}

TEST_CASE("fleiss kappa is exactly 1 for unanimous multi-category data") {
    const auto records = records_from({{0, 0, 0}, {3, 3, 3}});
    CHECK(fleiss_kappa(build_rating_matrix(records)) == 1.0);
}

TEST_CASE("fleiss kappa degenerates when one category absorbs every rating") {
    const auto records = records_from({{1, 1, 1}, {1, 1, 1}});
    CHECK_THROWS_AS(fleiss_kappa(build_rating_matrix(records)), DegenerateStatistic);
}

TEST_CASE("coincidence matrix accumulates pairable values") {
    const auto records = records_from({{0, 3}});
    const CoincidenceMatrix cm = build_coincidence_matrix(records);
    CHECK(cm.o(0, 3) == doctest::Approx(1.0));
    CHECK(cm.o(3, 0) == doctest::Approx(1.0));
    CHECK(cm.o(0, 0) == 0.0);
    CHECK(cm.total == doctest::Approx(2.0));
    CHECK(cm.d2(0, 0) == 0.0);
    CHECK(cm.d2(1, 2) == cm.d2(2, 1));
}

TEST_CASE("ordinal alpha matches a hand-worked ten-item example") {
    // Marginals 7, 8, 9, 6 over 30 pairable values; exact value 81833/126000.
    const auto records = records_from({{0, 0, 1}, {1, 1, 1}, {2, 3, 3}, {0, 2, 2},
                                       {3, 3, 3}, {0, 1, 2}, {1, 2, 2}, {0, 0, 0},
                                       {2, 2, 3}, {1, 1, 2}});
    CHECK(krippendorff_alpha(records) ==
          doctest::Approx(0.6494682539682539).epsilon(1e-15));
}

TEST_CASE("ordinal alpha is exactly 1 under unanimity across categories") {
    const auto records = records_from({{0, 0, 0}, {3, 3, 3}});
    CHECK(krippendorff_alpha(records) == 1.0);
}

TEST_CASE("ordinal alpha degenerates on a single observed value") {
    const auto records = records_from({{2, 2, 2}, {2, 2, 2}});
    CHECK_THROWS_AS(krippendorff_alpha(records), DegenerateStatistic);
}

TEST_CASE("ordinal alpha needs at least two pairable values") {
    CHECK_THROWS_AS(krippendorff_alpha(std::vector<AnnotationRecord>{}), ValidationError);
}

TEST_CASE("agreement bands cover the whole admissible range") {
    CHECK(interpret_kappa(0.45) == AgreementBand::moderate);
    CHECK(interpret_kappa(0.22) == AgreementBand::fair);
    CHECK(interpret_kappa(-0.5) == AgreementBand::poor);
    CHECK(interpret_kappa(-1.0) == AgreementBand::poor);
    CHECK(interpret_kappa(0.0) == AgreementBand::slight);
    CHECK(interpret_kappa(0.20) == AgreementBand::slight);
    CHECK(interpret_kappa(0.40) == AgreementBand::fair);
    CHECK(interpret_kappa(0.60) == AgreementBand::moderate);
    CHECK(interpret_kappa(0.80) == AgreementBand::substantial);
    CHECK(interpret_kappa(0.81) == AgreementBand::almost_perfect);
    CHECK(interpret_kappa(1.0) == AgreementBand::almost_perfect);

    CHECK_THROWS_AS(interpret_kappa(1.0000001), ValidationError);
    CHECK_THROWS_AS(interpret_kappa(-1.5), ValidationError);
    CHECK_THROWS_AS(interpret_kappa(std::nan("")), ValidationError);

    CHECK(band_name(AgreementBand::almost_perfect) == "almost perfect");
    CHECK(band_name(AgreementBand::poor) == "poor");
}

} // TEST_SUITE

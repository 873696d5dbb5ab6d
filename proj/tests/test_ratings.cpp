#include <catch2/catch_amalgamated.hpp>

#include "cupcf/ratings.hpp"
#include "testutil.hpp"

using Catch::Matchers::WithinAbs;

TEST_CASE("matrix construction normalizes arbitrary record order") {
    auto records = testutil::toy_records();
    std::reverse(records.begin(), records.end());
    const cupcf::RatingsMatrix m(records);

    CHECK(m.user_count() == 5);
    CHECK(m.item_count() == 4);
    CHECK(m.rating_count() == 14);
    CHECK(m.to_records() == testutil::toy_records());
}

TEST_CASE("out-of-scale ratings are rejected") {
    CHECK_THROWS_AS(cupcf::RatingsMatrix({{1, 1, 0}}), cupcf::RangeError);
    CHECK_THROWS_AS(cupcf::RatingsMatrix({{1, 1, 6}}), cupcf::RangeError);
    CHECK_NOTHROW(cupcf::RatingsMatrix({{1, 1, 1}, {1, 2, 5}}));
}

TEST_CASE("duplicate (user, item) pairs are rejected") {
    CHECK_THROWS_AS(cupcf::RatingsMatrix({{1, 1, 3}, {1, 1, 4}}), cupcf::DuplicateError);
    CHECK_THROWS_AS(cupcf::RatingsMatrix({{1, 1, 3}, {1, 1, 3}}), cupcf::DuplicateError);
}

TEST_CASE("index lookups are id-ordered and reject unknowns") {
    const auto m = testutil::toy_matrix();
    CHECK(m.user_index(1) == 0);
    CHECK(m.user_index(5) == 4);
    CHECK_FALSE(m.user_index(6).has_value());
    CHECK(m.item_index(4) == 3);
    CHECK_FALSE(m.item_index(99).has_value());
    CHECK(m.user_at(3) == 4);
    CHECK(m.item_at(0) == 1);
}

TEST_CASE("cell access reads back stored ratings") {
    const auto m = testutil::toy_matrix();
    CHECK(m.rating(*m.user_index(1), *m.item_index(2)) == 5);
    CHECK(m.rating(*m.user_index(4), *m.item_index(1)) == 5);
    CHECK_FALSE(m.rating(*m.user_index(1), *m.item_index(1)).has_value());
    CHECK(m.user_row(*m.user_index(3)).size() == 2);
}

TEST_CASE("user statistics use the population standard deviation") {
    const auto m = testutil::toy_matrix();

    const auto s1 = m.user_stats(1);
    CHECK_THAT(s1.mean, WithinAbs(4.0, 1e-12));
    CHECK_THAT(s1.std_dev, WithinAbs(0.81649658092772603, 1e-12));
    CHECK(s1.count == 3);

    const auto s2 = m.user_stats(2);
    CHECK_THAT(s2.mean, WithinAbs(10.0 / 3.0, 1e-12));
    CHECK_THAT(s2.std_dev, WithinAbs(0.94280904158206336, 1e-12));

    const auto s3 = m.user_stats(3);
    CHECK_THAT(s3.mean, WithinAbs(2.5, 1e-12));
    CHECK_THAT(s3.std_dev, WithinAbs(1.5, 1e-12));

    const auto s4 = m.user_stats(4);
    CHECK_THAT(s4.mean, WithinAbs(3.75, 1e-12));
    CHECK_THAT(s4.std_dev, WithinAbs(1.0897247358851685, 1e-12));

    const auto s5 = m.user_stats(5);
    CHECK_THAT(s5.mean, WithinAbs(2.0, 1e-12));
    CHECK_THAT(s5.std_dev, WithinAbs(1.0, 1e-12));

    CHECK_THROWS_AS(m.user_stats(42), cupcf::NoDataError);

    const auto all = m.all_user_stats();
    REQUIRE(all.size() == 5);
    CHECK(all[0].user == 1);
    CHECK(all[4].count == 2);
}

TEST_CASE("item means average over every rater") {
    const auto m = testutil::toy_matrix();
    CHECK_THAT(m.item_mean(1), WithinAbs(10.0 / 3.0, 1e-12));
    CHECK_THAT(m.item_mean(2), WithinAbs(11.0 / 3.0, 1e-12));
    CHECK_THAT(m.item_mean(3), WithinAbs(3.0, 1e-12));
    CHECK_THAT(m.item_mean(4), WithinAbs(3.25, 1e-12));
    CHECK_THROWS_AS(m.item_mean(42), cupcf::NoDataError);
}

TEST_CASE("global mean and empty-matrix behavior") {
    const auto m = testutil::toy_matrix();
    CHECK_THAT(m.global_mean(), WithinAbs(46.0 / 14.0, 1e-12));

    const cupcf::RatingsMatrix empty;
    CHECK(empty.user_count() == 0);
    CHECK(empty.rating_count() == 0);
    CHECK_THROWS_AS(empty.global_mean(), cupcf::NoDataError);
}

TEST_CASE("scale midpoint sits at 3 on the 1..5 scale") {
    CHECK(testutil::toy_matrix().scale_mid() == 3.0);
}

#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>

#include "slr/dataset.hpp"

using namespace slr;

namespace {

// write a throwaway CSV and hand back its path; files land under the system tmp dir
std::string temp_csv(const std::string& tag, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / ("slr_test_" + tag + ".csv");
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    return path.string();
}

std::string repo_file(const std::string& rel) {
    return std::string(SLR_REPO_ROOT) + "/" + rel;
}

} // namespace

TEST_CASE("load_csv reads a plain file and keeps column order") {
    auto path = temp_csv("plain", "a,b,y\n1,2,0\n3,4,1\n5,6,1\n");
    dataset d = load_csv(path, "y");
    REQUIRE(d.rows() == 3);
    REQUIRE(d.cols() == 2);
    CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(d.label_name == "y");
    CHECK(d.features(0, 0) == 1.0);
    CHECK(d.features(2, 1) == 6.0);
    CHECK(d.labels == std::vector<int>{0, 1, 1});
}

TEST_CASE("load_csv accepts the label in any column position") {
    auto path = temp_csv("midlabel", "a,y,b\n1,0,2\n3,1,4\n");
    dataset d = load_csv(path, "y");
    CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(d.features(1, 0) == 3.0);
    CHECK(d.features(1, 1) == 4.0);
    CHECK(d.labels == std::vector<int>{0, 1});
}

TEST_CASE("load_csv handles quoted fields, embedded commas and CRLF") {
    auto path = temp_csv("quoted",
                         "\"name, long\",y\r\n\"1\",1\r\n\"2\",0\r\n");
    dataset d = load_csv(path, "y");
    CHECK(d.feature_names == std::vector<std::string>{"name, long"});
    CHECK(d.features(0, 0) == 1.0);
    CHECK(d.labels == std::vector<int>{1, 0});

    // escaped quotes inside a quoted header cell
    auto path2 = temp_csv("escq", "\"he said \"\"hi\"\"\",y\n7,0\n8,1\n");
    dataset d2 = load_csv(path2, "y");
    CHECK(d2.feature_names[0] == "he said \"hi\"");
}

TEST_CASE("load_csv maps a class string to 1 via positive_class") {
    auto path = temp_csv("classes", "x,species\n1,Cammeo\n2,Osmancik\n3,Cammeo\n");
    dataset d = load_csv(path, "species", "Cammeo");
    CHECK(d.labels == std::vector<int>{1, 0, 1});
    CHECK(d.positive_class == "Cammeo");

    dataset flipped = load_csv(path, "species", "Osmancik");
    CHECK(flipped.labels == std::vector<int>{0, 1, 0});
}

TEST_CASE("load_csv error messages name the offending cell") {
    auto bad_cell = temp_csv("badcell", "a,y\n1,0\nfoo,1\n");
    CHECK_THROWS_WITH_AS((void)load_csv(bad_cell, "y"),
                         doctest::Contains("non-numeric cell \"foo\""), data_error);
    CHECK_THROWS_WITH_AS((void)load_csv(bad_cell, "y"), doctest::Contains("\"a\""), data_error);

    auto missing = temp_csv("nolabel", "a,b\n1,2\n");
    CHECK_THROWS_WITH_AS((void)load_csv(missing, "y"),
                         doctest::Contains("label column \"y\" not found"), data_error);

    auto dup = temp_csv("dup", "y,y\n1,0\n");
    CHECK_THROWS_WITH_AS((void)load_csv(dup, "y"), doctest::Contains("duplicate"), data_error);

    auto nonbin = temp_csv("nonbin", "a,y\n1,0\n2,2\n");
    CHECK_THROWS_WITH_AS((void)load_csv(nonbin, "y"),
                         doctest::Contains("non-binary label \"2\""), data_error);

    auto hole = temp_csv("hole", "a,b,y\n1,,0\n2,3,1\n");
    CHECK_THROWS_WITH_AS((void)load_csv(hole, "y"), doctest::Contains("missing value"),
                         data_error);
    CHECK_THROWS_WITH_AS((void)load_csv(hole, "y"), doctest::Contains("\"b\""), data_error);

    auto ragged = temp_csv("ragged", "a,b,y\n1,2,0\n3,4\n");
    CHECK_THROWS_AS((void)load_csv(ragged, "y"), data_error);

    auto three = temp_csv("three", "x,cls\n1,a\n2,b\n3,c\n");
    CHECK_THROWS_WITH_AS((void)load_csv(three, "cls", "a"),
                         doctest::Contains("exactly 2 distinct"), data_error);

    auto absent = temp_csv("absent", "x,cls\n1,a\n2,b\n");
    CHECK_THROWS_WITH_AS((void)load_csv(absent, "cls", "zz"),
                         doctest::Contains("never appears"), data_error);

    CHECK_THROWS_WITH_AS((void)load_csv("/nonexistent/nope.csv", "y"),
                         doctest::Contains("cannot open"), data_error);
}

TEST_CASE("standardize centers and scales with the sample deviation") {
    dataset d;
    d.features.resize(2, 1);
    d.features << 1, 3; // mean 2, sample std sqrt(2)
    d.labels = {0, 1};
    standardized_frame f = standardize(d);
    CHECK(f.features(0, 0) == doctest::Approx(-0.7071067811865476).epsilon(1e-12));
    CHECK(f.features(1, 0) == doctest::Approx(0.7071067811865476).epsilon(1e-12));
    CHECK(f.column_means[0] == 2.0);
    CHECK(f.column_stds[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_FALSE(f.constant_columns[0]);
}

TEST_CASE("standardize zeroes constant columns and records them") {
    dataset d;
    d.features.resize(3, 2);
    d.features << 5, 1, 5, 2, 5, 3;
    d.labels = {0, 1, 0};
    standardized_frame f = standardize(d);
    CHECK(f.constant_columns[0]);
    CHECK_FALSE(f.constant_columns[1]);
    CHECK(f.column_stds[0] == 0.0);
    CHECK(f.features.col(0).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(f.column_means[0] == 5.0);
}

TEST_CASE("standardized columns have mean zero and unit sample variance") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(3.0, 7.0);
    dataset d;
    d.features = Eigen::MatrixXd::NullaryExpr(
        40, 3, [&](Eigen::Index, Eigen::Index) { return gauss(rng); });
    d.labels.assign(40, 0);
    for (int i = 0; i < 20; ++i) d.labels[std::size_t(i)] = 1;
    standardized_frame f = standardize(d);
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(f.features.col(j).mean() == doctest::Approx(0.0).epsilon(1e-12));
        double var = f.features.col(j).squaredNorm() / 39.0;
        CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("unstandardize_row inverts the transform") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> uni(-100.0, 100.0);
    dataset d;
    d.features = Eigen::MatrixXd::NullaryExpr(
        15, 4, [&](Eigen::Index, Eigen::Index) { return uni(rng); });
    d.features.col(2).setConstant(42.0); // keep one constant column in the mix
    d.labels.assign(15, 0);
    d.labels[0] = 1;
    standardized_frame f = standardize(d);
    for (Eigen::Index i = 0; i < 15; ++i) {
        Eigen::VectorXd back = f.unstandardize_row(f.features.row(i));
        CHECK((back.transpose() - d.features.row(i)).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("standardize_with applies foreign statistics unchanged") {
    dataset d;
    d.features.resize(4, 1);
    d.features << 0, 2, 4, 6; // mean 3
    d.labels = {0, 1, 0, 1};
    standardized_frame fit = standardize(d);

    Eigen::MatrixXd other(2, 1);
    other << 3, 9;
    standardized_frame f = standardize_with(other, {1, 0}, fit);
    CHECK(f.features(0, 0) == doctest::Approx((3.0 - 3.0) / fit.column_stds[0]).epsilon(1e-12));
    CHECK(f.features(1, 0) == doctest::Approx((9.0 - 3.0) / fit.column_stds[0]).epsilon(1e-12));
    CHECK(f.column_means[0] == fit.column_means[0]);

    Eigen::MatrixXd wrong(2, 3);
    CHECK_THROWS_AS((void)standardize_with(wrong, {0, 1}, fit), data_error);
}

TEST_CASE("split sizes follow floor(train_fraction * N)") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss(0.0, 1.0);
    dataset d;
    d.features = Eigen::MatrixXd::NullaryExpr(
        10, 2, [&](Eigen::Index, Eigen::Index) { return gauss(rng); });
    d.labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    standardized_frame f = standardize(d);
    auto [train, val] = split(f, {0.7, 3});
    CHECK(train.features.rows() == 7);
    CHECK(val.features.rows() == 3);
    CHECK(train.labels.size() == 7);
    CHECK(val.labels.size() == 3);
}

TEST_CASE("split partitions the rows exactly and is seed-deterministic") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    dataset d;
    d.features = Eigen::MatrixXd::NullaryExpr(
        23, 3, [&](Eigen::Index, Eigen::Index) { return gauss(rng); });
    d.labels.assign(23, 0);
    for (std::size_t i = 0; i < 23; i += 2) d.labels[i] = 1;
    standardized_frame f = standardize(d);

    auto [train, val] = split(f, {0.6, 99});

    // multiset of unstandardized rows must equal the original rows (up to rounding)
    std::vector<Eigen::VectorXd> seen;
    auto collect = [&](const standardized_frame& side) {
        for (Eigen::Index i = 0; i < side.features.rows(); ++i)
            seen.push_back(side.unstandardize_row(side.features.row(i)));
    };
    collect(train);
    collect(val);
    REQUIRE(seen.size() == 23);
    std::vector<bool> used(seen.size(), false);
    int matched = 0;
    for (Eigen::Index i = 0; i < 23; ++i)
        for (std::size_t k = 0; k < seen.size(); ++k) {
            if (used[k]) continue;
            if ((seen[k].transpose() - d.features.row(i)).lpNorm<Eigen::Infinity>() <= 1e-9) {
                used[k] = true;
                ++matched;
                break;
            }
        }
    CHECK(matched == 23);

    // same seed reproduces the split bit-for-bit; another seed moves rows around
    auto [train2, val2] = split(f, {0.6, 99});
    CHECK(train.features == train2.features);
    CHECK(train.labels == train2.labels);
    auto [train3, val3] = split(f, {0.6, 100});
    CHECK(train.features != train3.features);
}

TEST_CASE("split re-standardizes both sides with train statistics") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> gauss(5.0, 2.0);
    dataset d;
    d.features = Eigen::MatrixXd::NullaryExpr(
        30, 2, [&](Eigen::Index, Eigen::Index) { return gauss(rng); });
    d.labels.assign(30, 0);
    for (std::size_t i = 0; i < 30; i += 3) d.labels[i] = 1;
    standardized_frame f = standardize(d);
    auto [train, val] = split(f, {0.7, 7});

    for (Eigen::Index j = 0; j < 2; ++j) {
        CHECK(train.features.col(j).mean() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(train.features.col(j).squaredNorm() / double(train.features.rows() - 1) ==
              doctest::Approx(1.0).epsilon(1e-12));
        // validation reuses the train statistics, so its stats differ from its own
        CHECK(val.column_means[j] == train.column_means[j]);
        CHECK(val.column_stds[j] == train.column_stds[j]);
    }
}

TEST_CASE("split rejects degenerate fractions and single-class sides") {
    dataset d;
    d.features.resize(4, 1);
    d.features << 1, 2, 3, 4;
    d.labels = {0, 1, 0, 1};
    standardized_frame f = standardize(d);
    CHECK_THROWS_AS((void)split(f, {0.0, 1}), config_error);
    CHECK_THROWS_AS((void)split(f, {1.0, 1}), config_error);
    CHECK_THROWS_AS((void)split(f, {0.2, 1}), data_error); // train side would hold < 2 rows

    dataset one;
    one.features.resize(6, 1);
    one.features << 1, 2, 3, 4, 5, 6;
    one.labels = {1, 1, 1, 1, 1, 0}; // most seeds strand the lone 0 on one side
    standardized_frame g = standardize(one);
    bool threw = false;
    for (std::uint64_t seed = 0; seed < 6 && !threw; ++seed) {
        try {
            (void)split(g, {0.5, seed});
        } catch (const data_error&) {
            threw = true;
        }
    }
    CHECK(threw);
}

TEST_CASE("the bundled clinical dataset loads with the expected shape") {
    dataset d = load_csv(repo_file("data/heart_failure_clinical_records.csv"), "DEATH_EVENT");
    CHECK(d.rows() == 299);
    CHECK(d.cols() == 12);
    CHECK(d.feature_names.front() == "age");
    CHECK(d.feature_names.back() == "time");
    int positives = 0;
    for (int v : d.labels) positives += v;
    CHECK(positives == 96); // published death-event count for this cohort

    standardized_frame f = standardize(d);
    auto [train, val] = split(f, {0.7, 1});
    CHECK(train.features.rows() == 209);
    CHECK(val.features.rows() == 90);
}

#include "doctest.h"
#include "molnet/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace molnet;

namespace {

void write(const char* path, const std::string& body) {
    std::ofstream f(path);
    f << body;
}

// Nearest-centroid oracle under the generator's own centroids.
double centroid_accuracy(const SyntheticSpec& spec, const LabeledDataset& ds) {
    int hits = 0;
    for (size_t i = 0; i < ds.size(); ++i) {
        int best = 0;
        double best_d = 1e300;
        for (int c = 0; c < spec.classes; ++c) {
            auto mu = synthetic_centroid(spec, c);
            double d = 0;
            for (int j = 0; j < spec.features; ++j)
                d += (ds.x[i][j] - mu[j]) * (ds.x[i][j] - mu[j]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        hits += best == ds.y[i];
    }
    return double(hits) / double(ds.size());
}

}  // namespace

TEST_CASE("load_csv parses features and trailing label") {
    const char* path = "test_ds.csv";
    write(path, "1.5,2,0\n-3,0.25,2\n");
    LabeledDataset ds = load_csv(path);
    CHECK(ds.size() == 2);
    CHECK(ds.features() == 2);
    CHECK(ds.classes == 3);  // max label + 1
    CHECK(ds.x[1][0] == -3.0);
    CHECK(ds.y[1] == 2);
    std::remove(path);
}

TEST_CASE("load_csv error paths name the row") {
    const char* path = "test_ds_bad.csv";
    auto expect = [&](const std::string& body, const std::string& needle) {
        write(path, body);
        try {
            load_csv(path);
            FAIL_CHECK("expected DataError for: " << body);
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect("1,0\nx,1\n", "row 2");
    expect("1,2,0\n1,1\n", "row 2");   // arity change
    expect("1,abc\n", "bad label");
    expect("1,-1\n", "bad label");     // negative class
    expect("5\n", "at least one");
    expect("", "no data rows");
    CHECK_THROWS_AS(load_csv("missing_file.csv"), DataError);
    std::remove(path);
}

TEST_CASE("header flag skips the first row") {
    const char* path = "test_ds_hdr.csv";
    write(path, "a,b,label\n1,2,0\n");
    LabeledDataset ds = load_csv(path, true);
    CHECK(ds.size() == 1);
    std::remove(path);
}

TEST_CASE("load_iris accepts the bundled file and rejects other shapes") {
    LabeledDataset iris = load_iris(MOLNET_DATA_DIR "/iris.csv");
    CHECK(iris.size() == 150);
    CHECK(iris.features() == 4);
    CHECK(iris.classes == 3);
    int counts[3] = {0, 0, 0};
    for (int y : iris.y) ++counts[y];
    CHECK(counts[0] == 50);
    CHECK(counts[1] == 50);
    CHECK(counts[2] == 50);

    const char* path = "test_ds_iris.csv";
    write(path, "1,2,3,4,5,0\n");
    CHECK_THROWS_WITH_AS(load_iris(path), doctest::Contains("4 features"), DataError);
    write(path, "1,2,3,4,7\n");
    CHECK_THROWS_WITH_AS(load_iris(path), doctest::Contains("label"), DataError);
    std::remove(path);
}

TEST_CASE("fit_scaling centers and normalizes, zero variance stays defined") {
    LabeledDataset ds;
    ds.x = {{1, 5, 2}, {3, 5, 4}, {5, 5, 0}};
    ds.y = {0, 0, 0};
    ds.classes = 1;
    Scaling s = fit_scaling(ds);
    CHECK(s.mean[0] == doctest::Approx(3.0));
    CHECK(s.std[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));  // population std
    CHECK(s.std[1] == 1.0);

    apply_scaling(ds, s);
    double m = (ds.x[0][0] + ds.x[1][0] + ds.x[2][0]) / 3;
    CHECK(m == doctest::Approx(0.0));
    double var = 0;
    for (int i = 0; i < 3; ++i) var += ds.x[i][0] * ds.x[i][0];
    CHECK(var / 3 == doctest::Approx(1.0));
    CHECK(ds.x[0][1] == 0.0);  // constant feature maps to 0

    auto one = apply_scaling(std::vector<double>{1, 5, 2}, s.mean, s.std);
    CHECK(one == ds.x[0]);
}

TEST_CASE("make_synthetic is deterministic and separable at margin 6") {
    SyntheticSpec spec{4, 10, 50, 6.0};
    LabeledDataset a = make_synthetic(spec, 9);
    LabeledDataset b = make_synthetic(spec, 9);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.size() == 200);
    CHECK(a.features() == 10);
    CHECK(make_synthetic(spec, 10).x != a.x);

    // 6 sigma between centroids: nearest-centroid errors are ~3-sigma
    // events, so 200 draws are clean.
    CHECK(centroid_accuracy(spec, a) == 1.0);
}

TEST_CASE("colliding centroids act as a negative control") {
    // classes > features forces class 0 and 2 onto the same centroid, so
    // class 2 is unclassifiable and accuracy caps near 2/3.
    SyntheticSpec spec{3, 2, 200, 6.0};
    LabeledDataset ds = make_synthetic(spec, 11);
    double acc = centroid_accuracy(spec, ds);
    CHECK(acc < 0.70);
    CHECK(acc > 0.60);
}

TEST_CASE("degenerate synthetic specs are rejected") {
    CHECK_THROWS_AS(make_synthetic({1, 2, 10, 6.0}, 1), DataError);
    CHECK_THROWS_AS(make_synthetic({2, 0, 10, 6.0}, 1), DataError);
    CHECK_THROWS_AS(make_synthetic({2, 2, 0, 6.0}, 1), DataError);
    CHECK_THROWS_AS(make_synthetic({2, 2, 10, -1.0}, 1), DataError);
}

#include <doctest.h>

#include <cmath>

#include "convtrace/classify.hpp"
#include "convtrace/error.hpp"
#include "convtrace/model_io.hpp"
#include "convtrace/rng.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace convtrace;
using namespace convtrace::classify;

namespace {

TrainOptions raw() { return TrainOptions{.standardize = false}; }

ClassifierSpec knn(int k) { return {Kind::knn, k}; }
const ClassifierSpec kLda{Kind::lda, 3};
const ClassifierSpec kSvm{Kind::svm_linear, 3};
const ClassifierSpec kRf{Kind::random_forest, 3};

std::vector<FeatureRecord> shuffled(std::vector<FeatureRecord> recs, std::uint64_t seed)
{
    Xoshiro256 rng(seed);
    shuffle(recs.begin(), recs.end(), rng);
    return recs;
}

}  // namespace

TEST_CASE("classifier names")
{
    CHECK(ClassifierSpec::parse("knn7") == knn(7));
    CHECK(ClassifierSpec::parse("knn:13") == knn(13));
    CHECK(ClassifierSpec::parse("rf").kind == Kind::random_forest);
    CHECK(ClassifierSpec::parse("svm").kind == Kind::svm_linear);
    CHECK(ClassifierSpec::parse("lda").name() == "lda");
    CHECK_THROWS_AS(ClassifierSpec::parse("knn4"), UsageError);
    CHECK_THROWS_AS(ClassifierSpec::parse("rbf"), UsageError);
    CHECK(default_bank().size() == 9);
}

TEST_CASE("knn stores the training set verbatim")
{
    const auto recs = testing::uniform_records(30, 5, 1);
    const auto model = train(knn(3), recs, 0, raw());
    const auto& p = std::get<KnnParams>(model.params);
    REQUIRE(p.points.size() == 30);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(p.points[i] == recs[i].features);
        CHECK(p.labels[i] == recs[i].label);
    }
}

TEST_CASE("knn matches the brute-force oracle")
{
    const auto train_set = testing::uniform_records(100, 24, 2);
    auto queries = testing::uniform_records(100, 24, 3);
    for (const auto& r : train_set) queries.push_back(r);
    for (int k : {3, 5, 7, 9, 11, 13}) {
        const auto model = train(knn(k), train_set, 0, raw());
        for (const auto& q : queries) CHECK(predict(model, q.features) == testing::brute_force_knn(train_set, q.features, k));
    }
}

TEST_CASE("knn tie rules")
{
    std::vector<FeatureRecord> recs;
    for (std::size_t i = 0; i < 3; ++i) recs.push_back({{0.5, 0.5}, 1, "", i});
    recs.push_back({{9.0, 9.0}, 0, "", 3});
    CHECK(predict(train(knn(3), recs, 0, raw()), {0.5, 0.5}) == 1);

    // Equidistant neighbors: the lower record index wins the last slot.
    std::vector<FeatureRecord> tie{
        {{1.0, 0.0}, 0, "", 0}, {{-1.0, 0.0}, 1, "", 1}, {{0.0, 1.0}, 1, "", 2}, {{0.0, -1.0}, 0, "", 3}};
    CHECK(predict(train(knn(3), tie, 0, raw()), {0.0, 0.0}) == 1);
    // Reindexing moves label 0 into the first three.
    tie[1].id = 9;
    CHECK(predict(train(knn(3), tie, 0, raw()), {0.0, 0.0}) == 0);
}

TEST_CASE("knn vote tie goes to the smaller class")
{
    std::vector<FeatureRecord> recs{{{0.0}, 1, "", 0}, {{0.0}, 1, "", 1}, {{0.0}, 0, "", 2}, {{0.0}, 0, "", 3},
                                    {{0.0}, 2, "", 4}, {{50.0}, 0, "", 5}, {{60.0}, 0, "", 6}};
    // k=5: labels {1,1,0,0,2} -> tie between 0 and 1.
    CHECK(predict(train(knn(5), recs, 0, raw()), {0.0}) == 0);
}

TEST_CASE("lda separates distant clusters")
{
    const auto tr = testing::gaussian_clusters(200, 24, 10.0, 4);
    const auto te = testing::gaussian_clusters(200, 24, 10.0, 5, 1000);
    const auto model = train(kLda, tr, 0);
    CHECK(evaluate(model, te).accuracy == 1.0);
    CHECK(evaluate(train(kLda, tr, 0, raw()), te).accuracy == 1.0);
}

TEST_CASE("svm separates distant clusters")
{
    const auto tr = testing::gaussian_clusters(200, 8, 10.0, 6);
    const auto te = testing::gaussian_clusters(200, 8, 10.0, 7, 1000);
    CHECK(evaluate(train(kSvm, tr, 1), te).accuracy == 1.0);
}

TEST_CASE("random forest fits separable data and is deterministic")
{
    const auto tr = testing::gaussian_clusters(200, 24, 6.0, 8);
    const auto te = testing::gaussian_clusters(100, 24, 6.0, 9, 1000);
    const auto a = train(kRf, tr, 42);
    const auto b = train(kRf, tr, 42);
    CHECK(a == b);
    for (const auto& r : te) CHECK(predict(a, r.features) == predict(b, r.features));
    CHECK(evaluate(a, te).accuracy >= 0.97);
    const auto& forest = std::get<ForestParams>(a.params);
    CHECK(forest.trees.size() == 100);
    CHECK(forest.max_features == 4);
    CHECK_FALSE(train(kRf, tr, 43) == a);
}

TEST_CASE("training is invariant to record order")
{
    const auto recs = testing::gaussian_clusters(80, 6, 1.0, 10);
    const auto perm = shuffled(recs, 11);
    for (const auto& spec : default_bank()) {
        CAPTURE(spec.name());
        CHECK(train(spec, recs, 5) == train(spec, perm, 5));
    }
}

TEST_CASE("training input errors")
{
    auto recs = testing::uniform_records(10, 3, 12);
    CHECK_THROWS_AS(train(kRf, {}, 0), ValidationError);
    recs[4].features.pop_back();
    CHECK_THROWS_AS(train(kRf, recs, 0), ValidationError);
    auto three = testing::uniform_records(12, 3, 13);
    three[0].label = 2;
    CHECK_THROWS_AS(train(kLda, three, 0), ValidationError);
    CHECK_NOTHROW(train(kRf, three, 0));
    const auto model = train(knn(3), testing::uniform_records(10, 3, 14), 0);
    CHECK_THROWS_AS(predict(model, {0.1, 0.2}), ValidationError);
}

TEST_CASE("stratified split proportions")
{
    std::vector<FeatureRecord> recs = testing::uniform_records(100, 2, 15);
    for (std::size_t i = 0; i < 100; ++i) recs[i].label = i < 50 ? 0 : 1;
    const Split s = stratified_split(recs, 0.7, 3);
    CHECK(s.train.size() == 70);
    CHECK(s.test.size() == 30);
    CHECK(std::count_if(s.train.begin(), s.train.end(), [](const auto& r) { return r.label == 0; }) == 35);
    const Split again = stratified_split(recs, 0.7, 3);
    for (std::size_t i = 0; i < s.train.size(); ++i) CHECK(s.train[i].id == again.train[i].id);

    std::vector<FeatureRecord> skewed = testing::uniform_records(10, 2, 16);
    for (std::size_t i = 0; i < 10; ++i) skewed[i].label = i < 9 ? 0 : 1;
    const Split sk = stratified_split(skewed, 0.7, 1);
    CHECK(std::count_if(sk.train.begin(), sk.train.end(), [](const auto& r) { return r.label == 1; }) == 1);

    for (auto& r : skewed) r.label = 0;
    CHECK_THROWS_AS(stratified_split(skewed, 0.7, 1), ValidationError);
}

TEST_CASE("cross validation reports")
{
    const auto sep = testing::gaussian_clusters(100, 4, 20.0, 17);
    for (const auto& spec : default_bank()) {
        const EvalReport r = kfold_cv(spec, sep, 5, 9);
        CAPTURE(spec.name());
        CHECK(r.fold_accuracies.size() == 5);
        CHECK(r.mean_accuracy == 1.0);
        std::size_t total = 0;
        for (const auto& row : r.confusion)
            for (std::size_t v : row) total += v;
        CHECK(total == 100);
        CHECK(r.confusion[0][0] + r.confusion[0][1] == 50);
    }
    auto few = testing::gaussian_clusters(8, 2, 5.0, 18);
    CHECK_THROWS_AS(kfold_cv(kRf, few, 5, 1), ValidationError);
}

TEST_CASE("random labels give chance accuracy")
{
    auto recs = testing::gaussian_clusters(400, 24, 0.0, 19);
    Xoshiro256 rng(20);
    std::vector<int> labels(400);
    for (std::size_t i = 0; i < 400; ++i) labels[i] = static_cast<int>(i % 2);
    shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t i = 0; i < 400; ++i) recs[i].label = labels[i];
    for (const auto& spec : {knn(5), kLda, kRf}) {
        CAPTURE(spec.name());
        CHECK(std::abs(kfold_cv(spec, recs, 5, 21).mean_accuracy - 0.5) <= 0.1);
    }
}

TEST_CASE("evaluation arithmetic")
{
    const auto tr = testing::gaussian_clusters(60, 3, 1.0, 22);
    const auto te = testing::gaussian_clusters(60, 3, 1.0, 23, 100);
    const EvalReport r = evaluate(train(knn(3), tr, 0), te);
    const double trace = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]);
    CHECK(r.accuracy == doctest::Approx(trace / 60.0));
    CHECK(r.per_class_accuracy[0] == doctest::Approx(static_cast<double>(r.confusion[0][0]) / 30.0));
}

TEST_CASE("model files round trip")
{
    const auto tr = testing::gaussian_clusters(60, 5, 2.0, 24);
    const auto probe = testing::gaussian_clusters(40, 5, 2.0, 25, 500);
    testing::TempDir dir;
    for (const auto& spec : default_bank()) {
        CAPTURE(spec.name());
        const auto model = train(spec, tr, 77);
        const auto back = deserialize_model(serialize_model(model));
        CHECK(back == model);
        save_model(model, dir / "m.json");
        const auto loaded = load_model(dir / "m.json");
        for (const auto& r : probe) CHECK(predict(loaded, r.features) == predict(model, r.features));
    }
    CHECK_THROWS_AS(deserialize_model("{}"), ParseError);
    CHECK_THROWS_AS(deserialize_model("not json"), ParseError);
    CHECK_THROWS_AS(deserialize_model(R"({"format":"convtrace-model","version":99})"), ParseError);
}

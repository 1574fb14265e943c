#include "convtrace/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "convtrace/error.hpp"

namespace convtrace::classify {

using nlohmann::json;

namespace {

json options_to_json(const TrainOptions& o)
{
    return {{"standardize", o.standardize},   {"lda_ridge", o.lda_ridge},
            {"svm_epochs", o.svm_epochs},     {"svm_lambda", o.svm_lambda},
            {"forest_trees", o.forest_trees}, {"forest_max_depth", o.forest_max_depth}};
}

TrainOptions options_from_json(const json& j)
{
    TrainOptions o;
    o.standardize = j.at("standardize").get<bool>();
    o.lda_ridge = j.at("lda_ridge").get<double>();
    o.svm_epochs = j.at("svm_epochs").get<int>();
    o.svm_lambda = j.at("svm_lambda").get<double>();
    o.forest_trees = j.at("forest_trees").get<int>();
    o.forest_max_depth = j.at("forest_max_depth").get<int>();
    return o;
}

json tree_to_json(const DecisionTree& tree)
{
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        if (n.feature < 0) nodes.push_back({{"leaf", n.counts}});
        else nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}});
    }
    return nodes;
}

DecisionTree tree_from_json(const json& j)
{
    DecisionTree tree;
    for (const auto& n : j) {
        TreeNode node;
        if (n.contains("leaf")) {
            node.counts = n.at("leaf").get<std::vector<int>>();
        } else {
            node.feature = n.at("f").get<int>();
            node.threshold = n.at("t").get<double>();
            node.left = n.at("l").get<int>();
            node.right = n.at("r").get<int>();
        }
        tree.nodes.push_back(std::move(node));
    }
    return tree;
}

}  // namespace

std::string serialize_model(const TrainedModel& model)
{
    json doc;
    doc["format"] = kModelFormat;
    doc["version"] = kModelVersion;
    doc["kind"] = model.spec.name();
    doc["knn_k"] = model.spec.k;
    doc["hyperparameters"] = options_to_json(model.options);
    doc["train_seed"] = model.train_seed;
    doc["dim"] = model.dim;
    doc["classes"] = model.classes;
    doc["standardizer"] = {{"mean", model.standardizer.mean}, {"scale", model.standardizer.scale}};

    json params;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, KnnParams>) {
                params = {{"points", p.points}, {"labels", p.labels}};
            } else if constexpr (std::is_same_v<P, LdaParams>) {
                params = {{"weights", p.weights}, {"threshold", p.threshold}, {"mean0", p.mean0}, {"mean1", p.mean1}};
            } else if constexpr (std::is_same_v<P, SvmParams>) {
                params = {{"weights", p.weights}, {"bias", p.bias}};
            } else {
                json trees = json::array();
                for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
                params = {{"max_features", p.max_features}, {"trees", trees}};
            }
        },
        model.params);
    doc["parameters"] = params;
    return doc.dump(1) + "\n";
}

TrainedModel deserialize_model(const std::string& text)
{
    try {
        const json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != kModelFormat) throw ParseError("not a convtrace model file");
        if (doc.at("version").get<int>() != kModelVersion) {
            throw ParseError("unsupported model version " + std::to_string(doc.at("version").get<int>()));
        }
        TrainedModel m;
        m.spec = ClassifierSpec::parse(doc.at("kind").get<std::string>());
        m.spec.k = doc.at("knn_k").get<int>();
        m.options = options_from_json(doc.at("hyperparameters"));
        m.train_seed = doc.at("train_seed").get<std::uint64_t>();
        m.dim = doc.at("dim").get<std::size_t>();
        m.classes = doc.at("classes").get<std::vector<int>>();
        m.standardizer.mean = doc.at("standardizer").at("mean").get<std::vector<double>>();
        m.standardizer.scale = doc.at("standardizer").at("scale").get<std::vector<double>>();
        const json& p = doc.at("parameters");
        switch (m.spec.kind) {
        case Kind::knn:
            m.params = KnnParams{p.at("points").get<std::vector<std::vector<double>>>(),
                                 p.at("labels").get<std::vector<int>>()};
            break;
        case Kind::lda:
            m.params = LdaParams{p.at("weights").get<std::vector<double>>(), p.at("threshold").get<double>(),
                                 p.at("mean0").get<std::vector<double>>(), p.at("mean1").get<std::vector<double>>()};
            break;
        case Kind::svm_linear:
            m.params = SvmParams{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()};
            break;
        case Kind::random_forest: {
            ForestParams f;
            f.max_features = p.at("max_features").get<int>();
            for (const auto& t : p.at("trees")) f.trees.push_back(tree_from_json(t));
            m.params = std::move(f);
            break;
        }
        }
        if (m.standardizer.mean.size() != m.dim || m.standardizer.scale.size() != m.dim) {
            throw ParseError("standardizer length does not match dim");
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    } catch (const UsageError& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model " + path.string());
    out << serialize_model(model);
    if (!out) throw IoError("write failed for " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

}  // namespace convtrace::classify

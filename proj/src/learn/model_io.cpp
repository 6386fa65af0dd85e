#include <fstream>
#include <json.hpp>
#include <sstream>

#include "feat/learn.hpp"

namespace feat::learn {

namespace {

using nlohmann::json;

json encode_vec(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(format_double(x));
    return a;
}

json encode_mat(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(encode_vec(m.row(r)));
    return rows;
}

double decode_num(const json& j) {
    double v;
    if (!parse_double(j.get<std::string>(), v)) fail("MalformedNumber", "bad numeric string");
    return v;
}

std::vector<double> decode_vec(const json& j) {
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) v.push_back(decode_num(e));
    return v;
}

Matrix decode_mat(const json& j) {
    if (j.empty()) return {};
    Matrix m(j.size(), j[0].size());
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto row = decode_vec(j[r]);
        if (row.size() != m.cols()) fail("MalformedNumber", "ragged matrix rows");
        std::copy(row.begin(), row.end(), m.row(r).data());
    }
    return m;
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
    json j;
    j["version"] = model.version;
    j["kind"] = kind_name(model.kind);
    j["labels"] = model.label_names;

    if (model.pipeline.pca) {
        const auto& p = *model.pipeline.pca;
        j["pca"] = {{"mean", encode_vec(p.mean)},
                    {"components", encode_mat(p.components)},
                    {"explained_variance_ratio", encode_vec(p.explained_variance_ratio)}};
    } else {
        j["pca"] = nullptr;
    }

    if (model.pipeline.hog) {
        const auto& h = *model.pipeline.hog;
        j["hog"] = {{"orientations", h.orientations},
                    {"cell", h.cell},
                    {"block", h.block},
                    {"block_stride", h.block_stride},
                    {"signed", h.signed_gradients},
                    {"crop", model.pipeline.crop},
                    {"include_landmarks", model.pipeline.include_landmarks}};
    } else {
        j["hog"] = nullptr;
    }

    json params;
    switch (model.kind) {
        case ModelKind::logistic:
        case ModelKind::svm: {
            json linear = json::array();
            for (const auto& lp : model.linear)
                linear.push_back({{"weights", encode_vec(lp.weights)},
                                  {"bias", format_double(lp.bias)}});
            params["linear"] = std::move(linear);
            break;
        }
        case ModelKind::forest: {
            params["n_classes"] = model.forest.n_classes;
            json trees = json::array();
            for (const auto& tree : model.forest.trees) {
                json nodes = json::array();
                for (const auto& n : tree.nodes) {
                    json node = {{"feature", n.feature},
                                 {"threshold", format_double(n.threshold)},
                                 {"left", n.left},
                                 {"right", n.right}};
                    if (n.feature < 0) {
                        node["fractions"] = encode_vec(n.class_fraction);
                        node["majority"] = n.majority;
                    }
                    nodes.push_back(std::move(node));
                }
                trees.push_back({{"nodes", std::move(nodes)}});
            }
            params["trees"] = std::move(trees);
            break;
        }
        case ModelKind::pls: {
            params["components"] = model.pls.components;
            params["x_mean"] = encode_vec(model.pls.x_mean);
            params["y_mean"] = encode_vec(model.pls.y_mean);
            params["coef"] = encode_mat(model.pls.coef);
            params["intercept"] = encode_vec(model.pls.intercept);
            break;
        }
    }
    j["params"] = std::move(params);
    return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail("MalformedNumber", std::string("bad model JSON: ") + e.what());
    }
    TrainedModel model;
    try {
        model.version = j.at("version").get<int>();
        if (model.version != 1) fail("DimensionMismatch", "unsupported model version");
        model.kind = kind_from_name(j.at("kind").get<std::string>());
        model.label_names = j.at("labels").get<std::vector<std::string>>();

        if (!j.at("pca").is_null()) {
            feats::PcaModel p;
            p.mean = decode_vec(j["pca"]["mean"]);
            p.components = decode_mat(j["pca"]["components"]);
            p.explained_variance_ratio = decode_vec(j["pca"]["explained_variance_ratio"]);
            model.pipeline.pca = std::move(p);
        }
        if (!j.at("hog").is_null()) {
            feats::HogConfig h;
            h.orientations = j["hog"]["orientations"].get<int>();
            h.cell = j["hog"]["cell"].get<int>();
            h.block = j["hog"]["block"].get<int>();
            h.block_stride = j["hog"]["block_stride"].get<int>();
            h.signed_gradients = j["hog"]["signed"].get<bool>();
            model.pipeline.hog = h;
            model.pipeline.crop = j["hog"]["crop"].get<int>();
            model.pipeline.include_landmarks = j["hog"]["include_landmarks"].get<bool>();
        }

        const json& params = j.at("params");
        switch (model.kind) {
            case ModelKind::logistic:
            case ModelKind::svm:
                for (const auto& lp : params.at("linear")) {
                    LinearParams p;
                    p.weights = decode_vec(lp.at("weights"));
                    p.bias = decode_num(lp.at("bias"));
                    model.linear.push_back(std::move(p));
                }
                break;
            case ModelKind::forest: {
                model.forest.n_classes = params.at("n_classes").get<int>();
                for (const auto& tj : params.at("trees")) {
                    Tree tree;
                    for (const auto& nj : tj.at("nodes")) {
                        TreeNode n;
                        n.feature = nj.at("feature").get<int>();
                        n.threshold = decode_num(nj.at("threshold"));
                        n.left = nj.at("left").get<int>();
                        n.right = nj.at("right").get<int>();
                        if (n.feature < 0) {
                            n.class_fraction = decode_vec(nj.at("fractions"));
                            n.majority = nj.at("majority").get<int>();
                        }
                        tree.nodes.push_back(std::move(n));
                    }
                    model.forest.trees.push_back(std::move(tree));
                }
                break;
            }
            case ModelKind::pls:
                model.pls.components = params.at("components").get<std::size_t>();
                model.pls.x_mean = decode_vec(params.at("x_mean"));
                model.pls.y_mean = decode_vec(params.at("y_mean"));
                model.pls.coef = decode_mat(params.at("coef"));
                model.pls.intercept = decode_vec(params.at("intercept"));
                break;
        }
    } catch (const json::exception& e) {
        fail("MalformedNumber", std::string("bad model JSON: ") + e.what());
    }
    return model;
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot open " + path + " for writing");
    out << model_to_json(model);
    if (!out) fail("IoFailure", "write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoFailure", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace feat::learn

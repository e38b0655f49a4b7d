#include <json.hpp>

#include "space.hpp"

namespace gapkit {

namespace {

using njson = nlohmann::ordered_json;

njson p_to_json(double p) {
    if (p == kInf) return njson("inf");
    return njson(p);
}

double p_from_json(const njson& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInf;
        throw std::invalid_argument("space json: p must be a number or \"inf\"");
    }
    return j.get<double>();
}

njson vec_to_json(const Vec& v) {
    njson a = njson::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vec vec_from_json(const njson& j) {
    if (!j.is_array()) throw std::invalid_argument("space json: expected array");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
    return v;
}

// Matrices serialize as arrays of rows.
njson mat_rows_to_json(const Mat& m) {
    njson a = njson::array();
    for (int i = 0; i < m.rows(); ++i) a.push_back(vec_to_json(m.row(i).transpose()));
    return a;
}

Mat mat_rows_from_json(const njson& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("space json: expected matrix rows");
    Vec r0 = vec_from_json(j[0]);
    Mat m(j.size(), r0.size());
    m.row(0) = r0.transpose();
    for (size_t i = 1; i < j.size(); ++i) {
        Vec ri = vec_from_json(j[i]);
        if (ri.size() != r0.size()) throw std::invalid_argument("space json: ragged matrix");
        m.row(static_cast<int>(i)) = ri.transpose();
    }
    return m;
}

// A kernel is given as a list of basis vectors (stored as matrix columns).
njson kernel_to_json(const Mat& k) {
    njson a = njson::array();
    for (int j = 0; j < k.cols(); ++j) a.push_back(vec_to_json(k.col(j)));
    return a;
}

Mat kernel_from_json(const njson& j, int parent_dim) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("space json: empty kernel");
    Mat k(parent_dim, j.size());
    for (size_t c = 0; c < j.size(); ++c) {
        Vec v = vec_from_json(j[c]);
        if (v.size() != parent_dim) throw std::invalid_argument("space json: kernel vector dim mismatch");
        k.col(static_cast<int>(c)) = v;
    }
    return k;
}

Space from_json(const njson& j) {
    if (!j.is_object() || !j.contains("type"))
        throw std::invalid_argument("space json: expected object with \"type\"");
    std::string type = j.at("type").get<std::string>();
    if (type == "lp") return make_lp(j.at("dim").get<int>(), p_from_json(j.at("p")));
    if (type == "weighted_lp")
        return make_weighted_lp(p_from_json(j.at("p")), vec_from_json(j.at("weights")));
    if (type == "direct_sum") {
        std::vector<Space> parts;
        for (auto& c : j.at("parts")) parts.push_back(from_json(c));
        return make_direct_sum(p_from_json(j.at("p")), std::move(parts));
    }
    if (type == "quotient") {
        Space parent = from_json(j.at("parent"));
        Mat kernel = kernel_from_json(j.at("kernel"), parent->dim);
        if (j.contains("lift") && j.contains("proj"))
            return make_quotient_lift(parent, kernel, mat_rows_from_json(j.at("lift")),
                                      mat_rows_from_json(j.at("proj")));
        return make_quotient(parent, kernel);
    }
    if (type == "pullback")
        return make_pullback(from_json(j.at("parent")), mat_rows_from_json(j.at("map")));
    if (type == "max_functionals") return make_max_functionals(mat_rows_from_json(j.at("rows")));
    if (type == "max_of") {
        std::vector<Space> parts;
        for (auto& c : j.at("parts")) parts.push_back(from_json(c));
        return make_max_of(std::move(parts));
    }
    if (type == "dual") return dual_of(from_json(j.at("parent")));
    throw std::invalid_argument("space json: unknown type \"" + type + "\"");
}

njson to_json(const Space& s) {
    njson j;
    switch (s->kind) {
        case NormKind::Lp:
            j["type"] = "lp";
            j["dim"] = s->dim;
            j["p"] = p_to_json(s->p);
            break;
        case NormKind::WeightedLp:
            j["type"] = "weighted_lp";
            j["p"] = p_to_json(s->p);
            j["weights"] = vec_to_json(s->weights);
            break;
        case NormKind::DirectSum: {
            j["type"] = "direct_sum";
            j["p"] = p_to_json(s->p);
            njson parts = njson::array();
            for (auto& c : s->children) parts.push_back(to_json(c));
            j["parts"] = std::move(parts);
            break;
        }
        case NormKind::Quotient:
            j["type"] = "quotient";
            j["parent"] = to_json(s->children[0]);
            j["kernel"] = kernel_to_json(s->kernel);
            j["lift"] = mat_rows_to_json(s->lift);
            j["proj"] = mat_rows_to_json(s->proj);
            break;
        case NormKind::Pullback:
            j["type"] = "pullback";
            j["parent"] = to_json(s->children[0]);
            j["map"] = mat_rows_to_json(s->map);
            break;
        case NormKind::MaxFunctionals:
            j["type"] = "max_functionals";
            j["rows"] = mat_rows_to_json(s->map);
            break;
        case NormKind::MaxOf: {
            j["type"] = "max_of";
            njson parts = njson::array();
            for (auto& c : s->children) parts.push_back(to_json(c));
            j["parts"] = std::move(parts);
            break;
        }
    }
    return j;
}

}  // namespace

Space parse_space_json(const std::string& text) { return from_json(njson::parse(text)); }

std::string space_to_json(const Space& s) { return to_json(s).dump(); }

std::uint64_t space_hash(const Space& s) {
    std::string text = space_to_json(s);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace gapkit

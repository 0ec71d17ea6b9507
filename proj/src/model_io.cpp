#include "interplab/model_io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "interplab/errors.hpp"

namespace interplab {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "interplab-model";
constexpr const char* kFlattenOrder = "W-rows,b,chain,v,b_out";

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

ordered_json activation_to_json(const Activation& act) {
    if (act.has_table())
        return ordered_json{{"points", act.table_points()}, {"values", act.table_values()}};
    return ordered_json(act.spec_string());
}

Activation activation_from_json(const ordered_json& node) {
    if (node.is_string())
        return Activation::from_spec(node.get<std::string>());
    if (node.is_object() && node.contains("points") && node.contains("values"))
        return Activation::tabulated(node.at("points").get<std::vector<double>>(),
                                     node.at("values").get<std::vector<double>>());
    throw Error(ErrorCode::Input, "model file: unrecognized activation entry");
}

double checked_number(const ordered_json& node, const char* field) {
    if (!node.is_number())
        throw Error(ErrorCode::Input,
                    std::string("model file: field '") + field + "' must be a number");
    const double value = node.get<double>();
    if (!std::isfinite(value))
        throw Error(ErrorCode::Input,
                    std::string("model file: field '") + field + "' is not finite");
    return value;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& node, Eigen::Index rows,
                                 Eigen::Index cols, const char* field) {
    if (!node.is_array() || static_cast<Eigen::Index>(node.size()) != rows)
        throw Error(ErrorCode::Input,
                    std::string("model file: field '") + field + "' has the wrong row count");
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = node[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw Error(ErrorCode::Input, std::string("model file: field '") + field +
                                              "' has a row of the wrong length");
        for (Eigen::Index j = 0; j < cols; ++j)
            out(i, j) = checked_number(row[static_cast<std::size_t>(j)], field);
    }
    return out;
}

Eigen::VectorXd vector_from_json(const ordered_json& node, Eigen::Index size,
                                 const char* field) {
    if (!node.is_array() || static_cast<Eigen::Index>(node.size()) != size)
        throw Error(ErrorCode::Input,
                    std::string("model file: field '") + field + "' has the wrong length");
    Eigen::VectorXd out(size);
    for (Eigen::Index i = 0; i < size; ++i)
        out[i] = checked_number(node[static_cast<std::size_t>(i)], field);
    return out;
}

const ordered_json& require_field(const ordered_json& doc, const char* field) {
    if (!doc.contains(field))
        throw Error(ErrorCode::Input,
                    std::string("model file: missing field '") + field + "'");
    return doc.at(field);
}

void check_finite_params(const NetModel& net) {
    const Eigen::VectorXd params = flatten(net);
    if (!params.allFinite())
        throw Error(ErrorCode::Internal, "refusing to save a model with non-finite parameters");
}

Eigen::Index checked_dim(const ordered_json& doc, const char* field) {
    const auto& node = require_field(doc, field);
    if (!node.is_number_integer() || node.get<long long>() < 1)
        throw Error(ErrorCode::Input,
                    std::string("model file: field '") + field + "' must be a positive integer");
    return static_cast<Eigen::Index>(node.get<long long>());
}

} // namespace

std::string model_to_json_text(const NetModel& net) {
    check_finite_params(net);
    ordered_json doc;
    doc["format"] = kFormatName;
    doc["format_version"] = kFormatVersion;
    doc["flatten_order"] = kFlattenOrder;
    if (const auto* shallow = std::get_if<ShallowNet>(&net)) {
        doc["type"] = "shallow";
        doc["activation"] = activation_to_json(shallow->act);
        doc["width"] = shallow->width();
        doc["input_dim"] = shallow->input_dim();
        doc["hidden_weights"] = matrix_to_json(shallow->hidden_weights);
        doc["hidden_shifts"] = vector_to_json(shallow->hidden_shifts);
        doc["output_weights"] = vector_to_json(shallow->output_weights);
        doc["output_shift"] = shallow->output_shift;
    } else {
        const auto& composed = std::get<ComposedNet>(net);
        doc["type"] = "composed";
        doc["activation"] = activation_to_json(composed.act);
        doc["width"] = composed.width();
        doc["input_dim"] = composed.input_dim();
        doc["chain_length"] = composed.chain.size();
        doc["first_weights"] = matrix_to_json(composed.first_weights);
        doc["first_shifts"] = vector_to_json(composed.first_shifts);
        doc["chain"] = composed.chain;
        doc["output_weights"] = vector_to_json(composed.output_weights);
    }
    return doc.dump(2) + "\n";
}

NetModel model_from_json_text(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& err) {
        throw Error(ErrorCode::Input, std::string("model file: invalid JSON (") + err.what() + ")");
    }
    if (!doc.is_object() || require_field(doc, "format") != kFormatName)
        throw Error(ErrorCode::Input, "model file: not an interplab model");
    if (require_field(doc, "format_version") != kFormatVersion)
        throw Error(ErrorCode::Input, "model file: unsupported format version");
    if (require_field(doc, "flatten_order") != kFlattenOrder)
        throw Error(ErrorCode::Input, "model file: unsupported flattening order");

    const Activation act = activation_from_json(require_field(doc, "activation"));
    const Eigen::Index width = checked_dim(doc, "width");
    const Eigen::Index input_dim = checked_dim(doc, "input_dim");
    const std::string type = require_field(doc, "type").get<std::string>();
    if (type == "shallow") {
        ShallowNet net;
        net.act = act;
        net.hidden_weights =
            matrix_from_json(require_field(doc, "hidden_weights"), width, input_dim,
                             "hidden_weights");
        net.hidden_shifts =
            vector_from_json(require_field(doc, "hidden_shifts"), width, "hidden_shifts");
        net.output_weights =
            vector_from_json(require_field(doc, "output_weights"), width, "output_weights");
        net.output_shift = checked_number(require_field(doc, "output_shift"), "output_shift");
        return net;
    }
    if (type == "composed") {
        const auto& chain_node = require_field(doc, "chain_length");
        if (!chain_node.is_number_integer() || chain_node.get<long long>() < 0)
            throw Error(ErrorCode::Input,
                        "model file: field 'chain_length' must be a non-negative integer");
        const auto chain_length = static_cast<Eigen::Index>(chain_node.get<long long>());
        ComposedNet net;
        net.act = act;
        net.first_weights = matrix_from_json(require_field(doc, "first_weights"), width,
                                             input_dim, "first_weights");
        net.first_shifts =
            vector_from_json(require_field(doc, "first_shifts"), width, "first_shifts");
        const Eigen::VectorXd chain =
            vector_from_json(require_field(doc, "chain"), chain_length, "chain");
        net.chain.assign(chain.data(), chain.data() + chain.size());
        net.output_weights =
            vector_from_json(require_field(doc, "output_weights"), width, "output_weights");
        return net;
    }
    throw Error(ErrorCode::Input, "model file: unknown type '" + type + "'");
}

void save_model(const NetModel& net, const std::string& path) {
    const std::string text = model_to_json_text(net);
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::Input, "cannot open '" + path + "' for writing");
    out << text;
    if (!out.flush())
        throw Error(ErrorCode::Input, "failed writing model to '" + path + "'");
}

NetModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Input, "cannot open model file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json_text(text);
}

} // namespace interplab

#include "interplab/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "interplab/errors.hpp"

namespace interplab {

namespace {

bool rows_equal(const Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b) {
    return (m.row(a).array() == m.row(b).array()).all();
}

bool row_less(const Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(a, j) < m(b, j))
            return true;
        if (m(a, j) > m(b, j))
            return false;
    }
    return false;
}

} // namespace

Dataset::Dataset(Eigen::MatrixXd inputs, Eigen::MatrixXd targets)
    : inputs_(std::move(inputs)), targets_(std::move(targets)) {
    validate_basic();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(inputs_.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [this](Eigen::Index a, Eigen::Index b) { return row_less(inputs_, a, b); });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (rows_equal(inputs_, order[i - 1], order[i]))
            throw Error(ErrorCode::Input,
                        "duplicate input rows " + std::to_string(order[i - 1]) + " and " +
                            std::to_string(order[i]));
}

Dataset::Dataset(Eigen::MatrixXd inputs, Eigen::MatrixXd targets, AllowDuplicates)
    : inputs_(std::move(inputs)), targets_(std::move(targets)) {
    validate_basic();
}

void Dataset::validate_basic() const {
    if (inputs_.rows() < 1)
        throw Error(ErrorCode::Input, "dataset needs at least one point");
    if (inputs_.cols() < 1)
        throw Error(ErrorCode::Input, "dataset inputs need at least one coordinate");
    if (targets_.rows() != inputs_.rows())
        throw Error(ErrorCode::Input, "inputs and targets disagree on point count");
    if (targets_.cols() < 1)
        throw Error(ErrorCode::Input, "dataset needs at least one target column");
    if (!inputs_.allFinite() || !targets_.allFinite())
        throw Error(ErrorCode::Input, "dataset entries must be finite");
}

Dataset Dataset::with_bias_absorbed() const {
    if (bias_absorbed_)
        return *this;
    Eigen::MatrixXd wide(inputs_.rows(), inputs_.cols() + 1);
    wide.leftCols(inputs_.cols()) = inputs_;
    wide.col(inputs_.cols()).setOnes();
    Dataset out(std::move(wide), targets_, AllowDuplicates{});
    out.bias_absorbed_ = true;
    return out;
}

Dataset load_dataset_csv(const std::string& path, Eigen::Index target_count) {
    if (target_count < 1)
        throw Error(ErrorCode::Input, "target_count must be >= 1");
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::DatasetParse, "cannot open '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<double> fields;
        bool numeric = true;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(cell, &used);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
            while (used < cell.size() &&
                   std::isspace(static_cast<unsigned char>(cell[used])))
                ++used;
            if (used != cell.size()) {
                numeric = false;
                break;
            }
            fields.push_back(value);
        }
        if (!numeric) {
            if (first_data_line) { // header row
                first_data_line = false;
                continue;
            }
            throw Error(ErrorCode::DatasetParse,
                        "non-numeric field at line " + std::to_string(line_no));
        }
        first_data_line = false;
        if (!rows.empty() && fields.size() != rows.front().size())
            throw Error(ErrorCode::DatasetParse,
                        "ragged row at line " + std::to_string(line_no));
        rows.push_back(std::move(fields));
    }
    if (rows.empty())
        throw Error(ErrorCode::DatasetParse, "no data rows in '" + path + "'");
    const Eigen::Index cols = static_cast<Eigen::Index>(rows.front().size());
    if (cols <= target_count)
        throw Error(ErrorCode::DatasetParse,
                    "need more columns than targets (got " + std::to_string(cols) + ")");

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index p = cols - target_count;
    Eigen::MatrixXd inputs(n, p);
    Eigen::MatrixXd targets(n, target_count);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j)
            inputs(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        for (Eigen::Index j = 0; j < target_count; ++j)
            targets(i, j) =
                rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(p + j)];
    }
    try {
        return Dataset(std::move(inputs), std::move(targets));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Input)
            throw Error(ErrorCode::DatasetParse, e.what());
        throw;
    }
}

} // namespace interplab

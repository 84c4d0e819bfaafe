#include "repurchase/common.hpp"

#include <algorithm>

namespace repurchase {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    for (const auto& r : rows) m.push_row(r);
    return m;
}

void Matrix::push_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) {
        cols_ = values.size();
    } else if (values.size() != cols_) {
        throw InvalidArgument("row width " + std::to_string(values.size()) + " does not match matrix width " +
                              std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), label));
}

void Dataset::push_back(std::span<const double> features, int label) {
    x.push_row(features);
    y.push_back(label);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.x = Matrix(0, x.cols());
    for (std::size_t i : indices) out.push_back(x.row(i), y[i]);
    return out;
}

void validate_dataset(const Dataset& data) {
    if (data.x.rows() != data.y.size()) {
        throw InvalidArgument("dataset has " + std::to_string(data.x.rows()) + " feature rows but " +
                              std::to_string(data.y.size()) + " labels");
    }
    for (int label : data.y) {
        if (label != 0 && label != 1) throw InvalidArgument("labels must be 0 or 1");
    }
}

std::size_t ceil_fraction(double fraction, std::size_t n) noexcept {
    const double raw = fraction * static_cast<double>(n);
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) <= 1e-9 * std::max(1.0, std::abs(raw))) return static_cast<std::size_t>(rounded);
    return static_cast<std::size_t>(std::ceil(raw));
}

}  // namespace repurchase

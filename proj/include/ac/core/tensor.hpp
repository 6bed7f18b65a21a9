#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace ac {

/// Dense row-major tensor of doubles. Rank 1 or 2 is all the framework needs;
/// scalars are shape {1}.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(numel_of(shape_), 0.0) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (numel_of(shape_) != data_.size())
            throw std::invalid_argument("Tensor: shape/data size mismatch");
    }

    static Tensor of(std::initializer_list<double> values) {
        return Tensor({values.size()}, std::vector<double>(values));
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }
    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<std::size_t> shape, double v) {
        Tensor t(std::move(shape));
        for (auto& x : t.data_) x = v;
        return t;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t numel() const { return data_.size(); }
    std::size_t rank() const { return shape_.size(); }

    std::size_t rows() const { return rank() == 2 ? shape_[0] : 1; }
    std::size_t cols() const { return rank() == 2 ? shape_[1] : shape_.empty() ? 0 : shape_[0]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& vec() { return data_; }
    const std::vector<double>& vec() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

    /// Value of a scalar tensor.
    double item() const {
        if (numel() != 1) throw std::logic_error("Tensor::item on non-scalar");
        return data_[0];
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    void fill(double v) {
        for (auto& x : data_) x = v;
    }

    static std::size_t numel_of(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

    std::string shape_str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(shape_[i]);
        }
        return s + "]";
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

}  // namespace ac

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fpdn/errors.hpp"

namespace fpdn {

// Dense n-dimensional array with an optional gradient buffer. float for
// training, double for gradient-check tests.
template <class T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;
    std::vector<T> grad;  // same length as data iff requires_grad
    bool requires_grad = false;

    int64_t size() const { return static_cast<int64_t>(data.size()); }

    bool is_scalar() const { return data.size() == 1; }

    void set_requires_grad(bool v = true) {
        requires_grad = v;
        if (v) grad.assign(data.size(), T(0));
        else grad.clear();
    }

    void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }

    std::string shape_str() const {
        std::ostringstream os;
        os << '[';
        for (size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
        os << ']';
        return os.str();
    }
};

template <class T>
using Var = std::shared_ptr<Tensor<T>>;

template <class T>
int64_t shape_numel(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw ContractError("tensor shape has non-positive dim");
        n *= d;
    }
    return n;
}

template <class T>
Var<T> make_var(std::vector<int> shape, bool requires_grad = false) {
    auto t = std::make_shared<Tensor<T>>();
    const int64_t n = shape_numel<T>(shape);
    t->shape = std::move(shape);
    t->data.assign(static_cast<size_t>(n), T(0));
    if (requires_grad) t->set_requires_grad();
    return t;
}

template <class T>
Var<T> make_var(std::vector<int> shape, std::vector<T> data, bool requires_grad = false) {
    auto t = std::make_shared<Tensor<T>>();
    const int64_t n = shape_numel<T>(shape);
    if (n != static_cast<int64_t>(data.size()))
        throw ContractError("tensor data length does not match shape");
    t->shape = std::move(shape);
    t->data = std::move(data);
    if (requires_grad) t->set_requires_grad();
    return t;
}

template <class T>
Var<T> scalar_var(T value) {
    return make_var<T>({1}, std::vector<T>{value});
}

template <class T>
bool same_shape(const Tensor<T>& a, const Tensor<T>& b) {
    return a.shape == b.shape;
}

template <class T>
bool all_finite(const Tensor<T>& t) {
    for (T x : t.data)
        if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
}

}  // namespace fpdn

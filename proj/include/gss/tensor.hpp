#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gss/error.hpp"

namespace gss {

// Dense row-major tensor of doubles. Shape extents are positive; the value
// count always equals the shape product.
struct Tensor {
    std::vector<size_t> shape;
    std::vector<double> v;

    Tensor() = default;

    static Tensor zeros(std::vector<size_t> shape) {
        Tensor t;
        size_t n = 1;
        for (size_t e : shape) {
            if (e == 0) throw dim_error("tensor extent must be positive");
            n *= e;
        }
        t.shape = std::move(shape);
        t.v.assign(n, 0.0);
        return t;
    }

    static Tensor from_values(std::vector<size_t> shape, std::vector<double> values) {
        Tensor t = zeros(std::move(shape));
        if (values.size() != t.v.size())
            throw dim_error("tensor value count does not match shape product");
        t.v = std::move(values);
        return t;
    }

    size_t size() const { return v.size(); }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

}  // namespace gss

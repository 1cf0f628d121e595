#pragma once

#include <cstddef>
#include <vector>

namespace pressflow {

// Dense row-major matrix. Just enough linear algebra for the models here;
// shapes are checked and mismatches throw DataError.
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
    size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
};

// a (n x k) times b (k x m) -> n x m
Matrix matmul(const Matrix& a, const Matrix& b);
// a (n x k) times b-transpose, b stored (m x k) -> n x m
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a-transpose times b, a stored (n x k), b (n x m) -> k x m
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// true when every entry is finite
bool all_finite(const Matrix& m);

} // namespace pressflow

#include "matrix.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace pressflow {

namespace {

void require(bool ok, size_t ar, size_t ac, size_t br, size_t bc, const char* op) {
    if (!ok) {
        throw DataError(std::string(op) + ": shape mismatch (" + std::to_string(ar) + "x" +
                        std::to_string(ac) + ") vs (" + std::to_string(br) + "x" +
                        std::to_string(bc) + ")");
    }
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols == b.rows, a.rows, a.cols, b.rows, b.cols, "matmul");
    Matrix c(a.rows, b.cols);
    for (size_t i = 0; i < a.rows; ++i) {
        for (size_t k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (size_t j = 0; j < b.cols; ++j) {
                c.at(i, j) += aik * b.at(k, j);
            }
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    require(a.cols == b.cols, a.rows, a.cols, b.rows, b.cols, "matmul_nt");
    Matrix c(a.rows, b.rows);
    for (size_t i = 0; i < a.rows; ++i) {
        for (size_t j = 0; j < b.rows; ++j) {
            double acc = 0.0;
            for (size_t k = 0; k < a.cols; ++k) {
                acc += a.at(i, k) * b.at(j, k);
            }
            c.at(i, j) = acc;
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    require(a.rows == b.rows, a.rows, a.cols, b.rows, b.cols, "matmul_tn");
    Matrix c(a.cols, b.cols);
    for (size_t n = 0; n < a.rows; ++n) {
        for (size_t i = 0; i < a.cols; ++i) {
            const double ani = a.at(n, i);
            if (ani == 0.0) continue;
            for (size_t j = 0; j < b.cols; ++j) {
                c.at(i, j) += ani * b.at(n, j);
            }
        }
    }
    return c;
}

bool all_finite(const Matrix& m) {
    for (double v : m.data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

} // namespace pressflow

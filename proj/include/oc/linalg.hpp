#pragma once

#include <cstddef>
#include <vector>

namespace oc {

// Dense row-major matrix, just enough for overlap blocks and log-determinants.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

struct LogDet {
    double log_abs = 0.0; // -inf when singular
    bool singular = false;
};

// ln|det A| via LU with partial pivoting; A is destroyed. Square only.
LogDet lu_log_abs_det(Matrix a);

// C = scale * A^T B where A holds the first na columns of a_cols and B the
// first nb columns of b_cols (each column contiguous). Cache-blocked.
Matrix scaled_gram(const std::vector<std::vector<double>>& a_cols, std::size_t na,
                   const std::vector<std::vector<double>>& b_cols, std::size_t nb,
                   double scale);

double dot(const std::vector<double>& x, const std::vector<double>& y);

} // namespace oc

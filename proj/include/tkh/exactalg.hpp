#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace tkh {

enum class Ring { GF2, Rational, Integer };

std::string ring_tag(Ring r);
Ring ring_from_tag(const std::string& tag);

// Integer entries; the ring decides how they are read (GF2 reduces mod 2).
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), columns_(static_cast<std::size_t>(cols)) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    // accumulates; zero sums are dropped by finalize()
    void add(int r, int c, long long v);
    void finalize();

    // sorted by row, no zeros after finalize()
    const std::vector<std::pair<int, long long>>& column(int c) const { return columns_[static_cast<std::size_t>(c)]; }
    long long at(int r, int c) const;
    std::size_t nnz() const;

    static SparseMatrix from_dense(const std::vector<std::vector<long long>>& rows);
    std::vector<std::vector<long long>> to_dense() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::vector<std::pair<int, long long>>> columns_;
};

struct SparseVector {
    int length = 0;
    std::vector<std::pair<int, mpq_class>> entries;  // sorted by index, nonzero

    SparseVector() = default;
    explicit SparseVector(int n) : length(n) {}
    void set(int i, const mpq_class& v);
    mpq_class get(int i) const;
    bool is_zero() const { return entries.empty(); }
};

// Product M x, exact over the rationals, then reduced for the ring.
SparseVector multiply(const SparseMatrix& m, const SparseVector& x, Ring ring);
bool vectors_equal(const SparseVector& a, const SparseVector& b, Ring ring);

std::size_t rank(const SparseMatrix& m, Ring ring);

std::optional<SparseVector> solve(const SparseMatrix& m, const SparseVector& b, Ring ring);

using DenseZ = std::vector<std::vector<mpz_class>>;

struct SmithForm {
    DenseZ S, U, V;                // U * M * V = S
    std::vector<mpz_class> diagonal;  // nonzero diagonal entries d1 | d2 | ...
};

SmithForm smith_normal_form(const DenseZ& m);
SmithForm smith_normal_form(const SparseMatrix& m);

// Nonzero invariant factors only, computed without transforms; suited to large sparse input.
std::vector<mpz_class> smith_diagonal(const SparseMatrix& m);

mpz_class determinant(const DenseZ& m);
DenseZ multiply(const DenseZ& a, const DenseZ& b);

}  // namespace tkh

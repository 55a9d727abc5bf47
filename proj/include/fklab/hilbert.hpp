#pragma once

#include "fklab/exact_num.hpp"

#include <map>
#include <vector>

namespace fklab {

// Power series in x_0..x_{nx-1} (and y_0..y_{ny-1}); keys are exponent vectors
// of length nx+ny, x exponents first. Only monomials with every x exponent
// <= max_degree and x total <= max_total are kept.
struct TruncatedSeries {
    int nx = 0;
    int ny = 0;
    int max_degree = 0;
    int max_total = -1; // negative: no total cap
    std::map<std::vector<int>, BigInt> coeffs;

    BigInt coefficient(const std::vector<int>& exponent) const;
    bool fits(const std::vector<int>& exponent) const;
};

TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b);
// s * (1 - x^e)^{-m}
TruncatedSeries times_geometric_power(const TruncatedSeries& s, const std::vector<int>& e, const BigInt& m);

// Counts forests of height <= n by vertices per level.
TruncatedSeries forest_hilbert(int n, int D, int max_total = -1);
// Counts forests of height <= n by vertices per level and coalescences per level.
TruncatedSeries coalescent_hilbert(int n, int D, int max_total = -1);
// Sums the y exponents out.
TruncatedSeries specialize_y_to_one(const TruncatedSeries& c);

// Number of forests with the given vertex profile, by the composition recursion.
BigInt forest_count(const std::vector<int>& p);

} // namespace fklab

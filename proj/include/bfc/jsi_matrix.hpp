#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bfc {

enum class JsiNormalization { counts, unit_trace };

/// Joint spectral intensity over a (signal sideband x idler sideband) grid.
/// Rows index the signal sideband, columns the idler sideband, both running
/// k_lo .. k_hi.
struct JsiMatrix {
    int k_lo = 2;
    int k_hi = 7;
    std::vector<double> values;  // row-major, dim() x dim()
    JsiNormalization normalization = JsiNormalization::counts;

    std::size_t dim() const { return static_cast<std::size_t>(k_hi - k_lo + 1); }

    double at(int k_signal, int k_idler) const {
        return values[index(k_signal, k_idler)];
    }
    double& at(int k_signal, int k_idler) { return values[index(k_signal, k_idler)]; }

    void validate() const {
        if (k_hi < k_lo) throw std::invalid_argument("jsi: empty index range");
        if (values.size() != dim() * dim()) throw std::invalid_argument("jsi: matrix is not square over its range");
        for (double v : values)
            if (v < 0) throw std::invalid_argument("jsi: negative entry");
    }

  private:
    std::size_t index(int k_signal, int k_idler) const {
        if (k_signal < k_lo || k_signal > k_hi || k_idler < k_lo || k_idler > k_hi)
            throw std::out_of_range("jsi: sideband index outside matrix range");
        return static_cast<std::size_t>(k_signal - k_lo) * dim() + static_cast<std::size_t>(k_idler - k_lo);
    }
};

}  // namespace bfc

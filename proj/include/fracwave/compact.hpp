#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "fracwave/mesh.hpp"

namespace fracwave {

/// Compact average A v: (v_{i-1} + 10 v_i + v_{i+1}) / 12 at interior nodes,
/// identity at the two boundary nodes. A = I + (h^2/12) delta^2, so pairing
/// it with the centered second difference lifts the spatial order to four.
inline GridFunction1D apply_average(const GridFunction1D& v, const SpatialMesh1D& mesh) {
    if (v.size() != mesh.M + 1)
        throw std::invalid_argument("apply_average: value count must equal node count");
    GridFunction1D w(v.size());
    w.front() = v.front();
    w.back() = v.back();
    for (std::size_t i = 1; i < mesh.M; ++i)
        w[i] = (v[i - 1] + 10.0 * v[i] + v[i + 1]) / 12.0;
    return w;
}

/// Centered second difference (v_{i-1} - 2 v_i + v_{i+1}) / h^2 at interior
/// nodes; boundary entries are set to zero (the operator is not defined there).
inline GridFunction1D apply_delta2(const GridFunction1D& v, const SpatialMesh1D& mesh) {
    if (v.size() != mesh.M + 1)
        throw std::invalid_argument("apply_delta2: value count must equal node count");
    GridFunction1D w(v.size(), 0.0);
    const double inv_h2 = 1.0 / (mesh.h * mesh.h);
    for (std::size_t i = 1; i < mesh.M; ++i)
        w[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_h2;
    return w;
}

/// max_i | A(w'')_i - delta^2(w)_i | over interior nodes, for a smooth
/// profile w with exact second derivative wpp. Decays like h^4; for
/// w = x^6/360 the residual equals h^4/120 identically.
template <class Fw, class Fwpp>
double compact_laplacian_residual(Fw&& w, Fwpp&& wpp, const SpatialMesh1D& mesh) {
    const GridFunction1D avg = apply_average(sample(wpp, mesh), mesh);
    const GridFunction1D d2 = apply_delta2(sample(w, mesh), mesh);
    double r = 0.0;
    for (std::size_t i = 1; i < mesh.M; ++i) r = std::max(r, std::abs(avg[i] - d2[i]));
    return r;
}

}  // namespace fracwave

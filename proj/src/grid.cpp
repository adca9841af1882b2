#include "fspt/grid.hpp"

#include <cmath>

namespace fspt {

double norm2(const ComplexField& f) {
    double acc = 0.0;
    for (const cplx& v : f.values) acc += std::norm(v);
    return std::sqrt(acc);
}

double norm_inf(const ComplexField& f) {
    double m = 0.0;
    for (const cplx& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

cplx dot(const ComplexField& f, const ComplexField& g) {
    require_same_grid(f, g);
    cplx acc(0.0, 0.0);
    for (size_t i = 0; i < f.values.size(); ++i) acc += std::conj(f.values[i]) * g.values[i];
    return acc;
}

}  // namespace fspt

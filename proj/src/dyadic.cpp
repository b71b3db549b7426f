#include "opbmo/dyadic.hpp"

namespace opbmo {

std::vector<double> haar_step(const TreeConfig& cfg, const DyadicIndex& I) {
    check_config(cfg);
    check_index(cfg, I);
    std::vector<double> values(cfg.cells(), 0.0);
    for (int c = first_cell(cfg, I); c < first_cell(cfg, I) + cell_span(cfg, I); ++c)
        values[c] = haar_on_cell(cfg, I, c);
    return values;
}

}  // namespace opbmo

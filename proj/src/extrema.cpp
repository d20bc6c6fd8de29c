#include <algorithm>

#include "gapdelay/delay_response.hpp"

namespace gapdelay {

std::vector<std::size_t> local_extrema(std::span<const double> y, ExtremumKind kind,
                                       double prominence_floor) {
    const double sign = kind == ExtremumKind::maximum ? 1.0 : -1.0;
    auto v = [&](std::size_t i) { return sign * y[i]; };

    std::vector<std::size_t> out;
    if (y.size() < 3) return out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(v(i) > v(i - 1) && v(i) > v(i + 1))) continue;

        // Prominence: height above the higher of the two lowest points reached
        // before climbing past v(i) on either side.
        double left_min = v(i);
        for (std::size_t j = i; j-- > 0;) {
            if (v(j) > v(i)) break;
            left_min = std::min(left_min, v(j));
        }
        double right_min = v(i);
        for (std::size_t j = i + 1; j < y.size(); ++j) {
            if (v(j) > v(i)) break;
            right_min = std::min(right_min, v(j));
        }
        if (v(i) - std::max(left_min, right_min) >= prominence_floor) out.push_back(i);
    }
    return out;
}

}  // namespace gapdelay

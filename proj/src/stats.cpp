#include "darrl/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace darrl {

double TrainStats::moving_success(std::size_t index, std::size_t window) const {
    if (index >= episodes.size() || window == 0) {
        throw std::out_of_range("moving_success: index out of range");
    }
    const std::size_t first = index + 1 >= window ? index + 1 - window : 0;
    std::size_t hits = 0;
    for (std::size_t k = first; k <= index; ++k) {
        hits += episodes[k].success ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(index + 1 - first);
}

std::vector<double> TrainStats::moving_success_curve(std::size_t window) const {
    std::vector<double> curve;
    curve.reserve(episodes.size());
    std::size_t hits = 0;
    for (std::size_t k = 0; k < episodes.size(); ++k) {
        hits += episodes[k].success ? 1 : 0;
        if (k >= window) {
            hits -= episodes[k - window].success ? 1 : 0;
        }
        curve.push_back(static_cast<double>(hits) / static_cast<double>(std::min(k + 1, window)));
    }
    return curve;
}

int TrainStats::episodes_to_reach(double level, std::size_t window) const {
    const auto curve = moving_success_curve(window);
    // Only full windows count; a lucky first episode is not convergence.
    for (std::size_t k = window > 0 ? window - 1 : 0; k < curve.size(); ++k) {
        if (curve[k] >= level) {
            return static_cast<int>(k) + 1;
        }
    }
    return -1;
}

}  // namespace darrl

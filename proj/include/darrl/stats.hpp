#pragma once

#include <cstddef>
#include <vector>

namespace darrl {

struct EpisodeRecord {
    int episode = 0;
    double ret = 0.0;  // discounted return
    int steps = 0;     // concrete steps taken
    bool success = false;
    std::size_t leaf_count = 0;
    double epsilon = 0.0;
};

struct TrainStats {
    std::vector<EpisodeRecord> episodes;

    bool empty() const { return episodes.empty(); }
    std::size_t size() const { return episodes.size(); }

    /// Mean success over the `window` episodes ending at position `index`
    /// (fewer at the start of a run).
    double moving_success(std::size_t index, std::size_t window = 100) const;

    /// Moving-average success after every episode.
    std::vector<double> moving_success_curve(std::size_t window = 100) const;

    /// 1-based episode at which the moving-average success over a full
    /// window first reaches `level`, or -1 if it never does.
    int episodes_to_reach(double level, std::size_t window = 100) const;
};

}  // namespace darrl

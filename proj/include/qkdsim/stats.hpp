#pragma once

#include <span>

namespace qkdsim {

struct SeriesStats {
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;
};

SeriesStats describe(std::span<const double> values);

/// First lag (in seconds, linearly interpolated) at which the sample
/// autocorrelation drops below 1/e. Infinity when the series is constant or
/// stays correlated up to half its length.
double decorrelation_time(std::span<const double> values, double dt_seconds);

/// Pearson correlation of average ranks. Ties share the mean rank.
double spearman_rank_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace qkdsim

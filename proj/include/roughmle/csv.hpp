#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "roughmle/experiment.hpp"
#include "roughmle/path_simulation.hpp"

namespace roughmle {

inline constexpr const char* kResultsHeader =
    "experiment,H,epsilon,alpha,delta,n,M,stat,value,se,seed_base";
inline constexpr const char* kSpectralHeader = "H,n,beta,inv_spectral_norm,ratio,log2_ratio";
inline constexpr const char* kPathHeader = "t,x_eps,y_eps,b_h";

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);

void write_results_csv(std::ostream& os, const std::vector<ExperimentRow>& rows);
/// Dedicated spectral-norm layout, built from run_spectral_norm rows.
void write_spectral_csv(std::ostream& os, const std::vector<ExperimentRow>& rows);
/// Multiscale paths at every `stride`-th fine node.
void write_path_csv(std::ostream& os, const MultiscalePaths& paths, std::size_t stride);

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> x;
};

/// Reads a `t,x` CSV with a header line. ConfigError on malformed input or
/// non-uniform time stamps.
TimeSeries read_time_series_csv(const std::string& path);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace roughmle

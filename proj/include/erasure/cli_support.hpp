#pragma once

#include <optional>
#include <string>
#include <vector>

#include "erasure/windowing.hpp"

namespace erasure {

// Usage-level problem with command-line input (maps to exit code 64).
class cli_usage_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// "lo:hi:step" with step > 0 and hi >= lo.
struct Grid {
    double lo;
    double hi;
    double step;

    std::vector<double> values() const;
};

Grid parse_grid(const std::string& spec);

// "geometric:M", "arithmetic:T,M" or "custom:1,2,4,...".
Schedule parse_schedule_spec(const std::string& spec);

ErrorModel parse_error_model(const std::string& name);
std::string error_model_name(ErrorModel model);

// Fixed 12-significant-digit form used by every CSV emitter.
std::string format_num(double v);
std::string format_int(std::int64_t v);

// One CSV document: header once, then rows; trailing comment lines carry
// fitted slopes and similar scalars.
struct CsvWriter {
    std::string header;
    std::vector<std::string> rows;
    std::vector<std::string> comments;

    std::string str() const;
};

}  // namespace erasure

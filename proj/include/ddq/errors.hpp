#pragma once

#include <stdexcept>
#include <string>

namespace ddq {

struct CoordinateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    int row;
    int col;
    ParseError(const std::string& msg, int row_, int col_)
        : std::runtime_error(msg), row(row_), col(col_) {}
};

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ddq

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace covcast::ts {

// Civil timestamp at hourly resolution. Only what the feature engineering
// needs: calendar fields plus an absolute hour count for continuity checks.
struct Timestamp {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;   // 0..23

    // Hours since 1970-01-01 00:00.
    std::int64_t epoch_hours() const;
    int weekday() const;   // 0 = Monday ... 6 = Sunday
    int iso_week() const;  // 1..53
};

// "YYYY-MM-DD HH:MM:SS" or ISO-8601 "YYYY-MM-DDTHH:MM:SS".
Timestamp parse_timestamp(const std::string& text);

struct CsvSchema {
    std::string timestamp_col;  // empty means: first (possibly unnamed) column
    std::string demand_col = "Demand";
    std::string temperature_col = "Temperature";
};

// Hourly series with derived calendar features. All vectors share one length.
struct SeriesFrame {
    std::vector<Timestamp> timestamps;
    std::vector<double> demand;
    std::vector<double> temperature;
    std::vector<double> week;     // ISO week of year, 1..53
    std::vector<double> weekday;  // 0..6, Monday = 0
    std::vector<double> hour;     // 0..23

    std::size_t size() const { return demand.size(); }
    bool has_temperature() const { return !temperature.empty(); }
};

// Parses the CSV, sorts by timestamp, derives calendar features and enforces
// strict hourly continuity (duplicates and gaps are data errors).
SeriesFrame load_csv(const std::string& path, const CsvSchema& schema);

// Builds a frame directly from values (synthetic mode: no timestamps, no
// calendar features, no temperature).
SeriesFrame frame_from_values(const std::vector<double>& demand);

enum class ExogAlignment {
    origin,        // features evaluated at the last lag time t+p-1
    first_target,  // features evaluated at the first predicted time t+p
};

struct WindowConfig {
    int p_lags = 1;
    int horizon = 1;
    // Subset of {"temperature","week","weekday","hour"}, in object order.
    std::vector<std::string> exog_features;
    ExogAlignment alignment = ExogAlignment::origin;

    int object_dim() const { return p_lags + static_cast<int>(exog_features.size()); }
};

struct SupervisedPair {
    Eigen::VectorXd x;  // p_lags lagged values + exogenous features
    Eigen::VectorXd y;  // next horizon values
    std::int64_t t = 0;  // pair index: x starts at series position t
};

// Pair t carries lags (w_t .. w_{t+p-1}), exogenous features per alignment,
// and label (w_{t+p} .. w_{t+p+h-1}). Count = length - p - h + 1.
std::vector<SupervisedPair> make_windows(const SeriesFrame& frame, const WindowConfig& cfg);

// Ordered view over make_windows output starting at a given pair index.
// Label-observation delay is the caller's responsibility (the online harness
// only consumes label components whose timestamps have passed).
class PairStream {
  public:
    PairStream(std::vector<SupervisedPair> pairs, std::size_t start);
    bool done() const { return next_ >= pairs_.size(); }
    const SupervisedPair& peek() const;
    const SupervisedPair& next();
    std::size_t remaining() const { return pairs_.size() - next_; }

  private:
    std::vector<SupervisedPair> pairs_;
    std::size_t next_;
};

}  // namespace covcast::ts

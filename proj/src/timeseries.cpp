#include "covcast/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "covcast/errors.hpp"

namespace covcast::ts {

namespace {

// Days since 1970-01-01 for a civil date (Gregorian, proleptic).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int weekday_from_days(std::int64_t z) {
    // 1970-01-01 was a Thursday; return Monday = 0.
    return static_cast<int>(z >= -3 ? (z + 3) % 7 : (z + 4) % 7 + 6);
}

}  // namespace

std::int64_t Timestamp::epoch_hours() const {
    return days_from_civil(year, month, day) * 24 + hour;
}

int Timestamp::weekday() const {
    return weekday_from_days(days_from_civil(year, month, day));
}

int Timestamp::iso_week() const {
    // ISO 8601: week 1 contains the year's first Thursday.
    auto week_of = [](int y, std::int64_t day_number) {
        const std::int64_t jan1 = days_from_civil(y, 1, 1);
        const int jan1_wd = weekday_from_days(jan1);
        // Monday of week 1 (may fall in the previous year).
        const std::int64_t week1_monday = jan1 + (jan1_wd <= 3 ? -jan1_wd : 7 - jan1_wd);
        const std::int64_t delta = day_number - week1_monday;
        // Floor division: days just before week-1 Monday belong to the
        // previous year's final week, not week 1.
        const std::int64_t wk = delta >= 0 ? delta / 7 : -((6 - delta) / 7);
        return static_cast<int>(wk) + 1;
    };
    const std::int64_t dn = days_from_civil(year, month, day);
    int w = week_of(year, dn);
    if (w < 1) return week_of(year - 1, dn);
    if (w > 52) {
        // Could belong to week 1 of the next year.
        const int w_next = week_of(year + 1, dn);
        if (w_next == 1) return 1;
    }
    return w;
}

Timestamp parse_timestamp(const std::string& text) {
    // Accepts "YYYY-MM-DD HH:MM:SS", "YYYY-MM-DDTHH:MM:SS" and the date-only
    // prefix "YYYY-MM-DD" (midnight).
    Timestamp out;
    const char* p = text.data();
    const char* end = p + text.size();
    auto read_int = [&](int width, char sep, const char* what) {
        int value = 0;
        auto [ptr, ec] = std::from_chars(p, std::min(p + width, end), value);
        if (ec != std::errc() || ptr != p + width)
            throw DataError("unparseable timestamp '" + text + "' (" + what + ")");
        p = ptr;
        if (sep != '\0') {
            if (p >= end || (*p != sep && !(sep == ' ' && *p == 'T')))
                throw DataError("unparseable timestamp '" + text + "' (" + what + ")");
            ++p;
        }
        return value;
    };
    out.year = read_int(4, '-', "year");
    out.month = read_int(2, '-', "month");
    if (text.size() <= 10) {
        out.day = read_int(2, '\0', "day");
        return out;
    }
    out.day = read_int(2, ' ', "day");
    out.hour = read_int(2, ':', "hour");
    if (out.month < 1 || out.month > 12 || out.day < 1 || out.day > 31 || out.hour > 23)
        throw DataError("timestamp out of range: '" + text + "'");
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    double v = 0;
    const char* b = cell.data();
    auto [ptr, ec] = std::from_chars(b, b + cell.size(), v);
    if (ec != std::errc() || ptr != b + cell.size())
        throw DataError("row " + std::to_string(row) + ": cannot parse '" + cell +
                        "' in column " + col);
    return v;
}

}  // namespace

SeriesFrame load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty dataset file: " + path);
    const auto header = split_csv_line(line);

    auto find_col = [&](const std::string& name, bool required) -> int {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            if (required) throw DataError("missing column '" + name + "' in " + path);
            return -1;
        }
        return static_cast<int>(it - header.begin());
    };
    const int ts_col = schema.timestamp_col.empty() ? 0 : find_col(schema.timestamp_col, true);
    const int demand_col = find_col(schema.demand_col, true);
    const int temp_col =
        schema.temperature_col.empty() ? -1 : find_col(schema.temperature_col, true);

    struct Row {
        Timestamp ts;
        double demand;
        double temp;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        const int needed = std::max({ts_col, demand_col, temp_col});
        if (static_cast<int>(cells.size()) <= needed)
            throw DataError("row " + std::to_string(line_no) + ": expected at least " +
                            std::to_string(needed + 1) + " columns");
        Row r;
        r.ts = parse_timestamp(cells[ts_col]);
        r.demand = parse_cell(cells[demand_col], line_no, schema.demand_col);
        r.temp = temp_col >= 0 ? parse_cell(cells[temp_col], line_no, schema.temperature_col) : 0.0;
        rows.push_back(r);
    }
    if (rows.empty()) throw DataError("dataset has a header but no rows: " + path);

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.ts.epoch_hours() < b.ts.epoch_hours();
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto gap = rows[i].ts.epoch_hours() - rows[i - 1].ts.epoch_hours();
        if (gap == 0)
            throw DataError("duplicated timestamp at row " + std::to_string(i + 1));
        if (gap != 1)
            throw DataError("timestamp gap of " + std::to_string(gap) + " hours before row " +
                            std::to_string(i + 1) + "; series must be contiguous hourly");
    }

    SeriesFrame f;
    f.timestamps.reserve(rows.size());
    f.demand.reserve(rows.size());
    for (const Row& r : rows) {
        f.timestamps.push_back(r.ts);
        f.demand.push_back(r.demand);
        if (temp_col >= 0) f.temperature.push_back(r.temp);
        f.week.push_back(static_cast<double>(r.ts.iso_week()));
        f.weekday.push_back(static_cast<double>(r.ts.weekday()));
        f.hour.push_back(static_cast<double>(r.ts.hour));
    }
    return f;
}

SeriesFrame frame_from_values(const std::vector<double>& demand) {
    SeriesFrame f;
    f.demand = demand;
    return f;
}

std::vector<SupervisedPair> make_windows(const SeriesFrame& frame, const WindowConfig& cfg) {
    if (cfg.p_lags < 1 || cfg.horizon < 1)
        throw ConfigError("window config requires p_lags >= 1 and horizon >= 1");
    const std::int64_t n = static_cast<std::int64_t>(frame.size());
    const std::int64_t p = cfg.p_lags, h = cfg.horizon;
    if (n < p + h)
        throw DataError("series length " + std::to_string(n) + " shorter than p_lags + horizon = " +
                        std::to_string(p + h));

    std::vector<const std::vector<double>*> exog;
    for (const auto& name : cfg.exog_features) {
        const std::vector<double>* src = nullptr;
        if (name == "temperature") src = &frame.temperature;
        else if (name == "week") src = &frame.week;
        else if (name == "weekday") src = &frame.weekday;
        else if (name == "hour") src = &frame.hour;
        else throw ConfigError("unknown exogenous feature '" + name + "'");
        if (src->empty())
            throw DataError("exogenous feature '" + name + "' not present in this series");
        exog.push_back(src);
    }

    std::vector<SupervisedPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n - p - h + 1));
    for (std::int64_t t = 0; t + p + h <= n; ++t) {
        SupervisedPair pr;
        pr.t = t;
        pr.x.resize(p + static_cast<std::int64_t>(exog.size()));
        for (std::int64_t k = 0; k < p; ++k) pr.x[k] = frame.demand[t + k];
        const std::int64_t feat_t = cfg.alignment == ExogAlignment::origin ? t + p - 1 : t + p;
        for (std::size_t e = 0; e < exog.size(); ++e) pr.x[p + e] = (*exog[e])[feat_t];
        pr.y.resize(h);
        for (std::int64_t i = 0; i < h; ++i) pr.y[i] = frame.demand[t + p + i];
        pairs.push_back(std::move(pr));
    }
    return pairs;
}

PairStream::PairStream(std::vector<SupervisedPair> pairs, std::size_t start)
    : pairs_(std::move(pairs)), next_(start) {
    if (start > pairs_.size())
        throw DataError("stream start " + std::to_string(start) + " beyond pair count " +
                        std::to_string(pairs_.size()));
}

const SupervisedPair& PairStream::peek() const {
    if (done()) throw DataError("pair stream exhausted");
    return pairs_[next_];
}

const SupervisedPair& PairStream::next() {
    const SupervisedPair& p = peek();
    ++next_;
    return p;
}

}  // namespace covcast::ts

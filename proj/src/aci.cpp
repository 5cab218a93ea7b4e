#include "covcast/aci.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "covcast/errors.hpp"

namespace covcast::aci {

void AciConfig::validate() const {
    if (eps_target.size() == 0 || eps_target.size() != gamma.size())
        throw ConfigError("eps and gamma must be nonempty and of equal length");
    for (int i = 0; i < eps_target.size(); ++i) {
        if (!(eps_target[i] > 0.0 && eps_target[i] < 1.0))
            throw ConfigError("eps[" + std::to_string(i + 1) + "] must lie in (0,1)");
        if (!(gamma[i] > 0.0))
            throw ConfigError("gamma[" + std::to_string(i + 1) + "] must be positive");
    }
    if (clamp_floor && clamp_ceiling && *clamp_floor > *clamp_ceiling)
        throw ConfigError("clamp floor above ceiling");
}

AciState::AciState(const AciConfig& cfg) {
    cfg.validate();
    eps_t_ = cfg.eps_target;  // eps_1 = eps: fixed until the first relevant error
    updates_.assign(cfg.steps(), 0);
}

void AciState::update(const AciConfig& cfg, const PartialErrors& errs,
                      std::optional<double> floor_now) {
    if (errs.steps() != eps_t_.size())
        throw ConfigError("error vector length does not match controller width");
    std::optional<double> floor =
        cfg.clamp_floor_auto ? floor_now : cfg.clamp_floor;
    ++t_;
    for (int i = 0; i < eps_t_.size(); ++i) {
        if (!errs.err[i].has_value()) continue;  // warm-up / drain: fixed point
        const double e = *errs.err[i];
        // 0/1 in the online protocol; any value in [0,1] keeps the update
        // well-defined (err = eps_target is the exact no-op fixed point).
        if (e < 0.0 || e > 1.0) throw ConfigError("errors must lie in [0,1]");
        double next = eps_t_[i] + cfg.gamma[i] * (cfg.eps_target[i] - e);
        if (floor && next < *floor) {
            clamp_log_.push_back({t_, i + 1, next, *floor, true});
            next = *floor;
        }
        if (cfg.clamp_ceiling && next > *cfg.clamp_ceiling) {
            clamp_log_.push_back({t_, i + 1, next, *cfg.clamp_ceiling, false});
            next = *cfg.clamp_ceiling;
        }
        eps_t_[i] = next;
        ++updates_[i];
    }
}

std::string AciState::serialize() const {
    std::ostringstream out;
    char buf[64];
    auto full = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "checkpoint_version = 1\n";
    out << "steps = " << eps_t_.size() << "\n";
    out << "clock = " << t_ << "\n";
    out << "eps_t =";
    for (int i = 0; i < eps_t_.size(); ++i) out << (i ? "," : " ") << full(eps_t_[i]);
    out << "\n";
    out << "update_counts =";
    for (std::size_t i = 0; i < updates_.size(); ++i) out << (i ? "," : " ") << updates_[i];
    out << "\n";
    out << "clamp_events = " << clamp_log_.size() << "\n";
    for (std::size_t k = 0; k < clamp_log_.size(); ++k) {
        const auto& ev = clamp_log_[k];
        out << "clamp_event_" << (k + 1) << " = t=" << ev.t << " step=" << ev.step
            << " before=" << full(ev.before) << " after=" << full(ev.after)
            << " bound=" << (ev.at_floor ? "floor" : "ceiling") << "\n";
    }
    return out.str();
}

namespace {

std::pair<std::string, std::string> split_kv(const std::string& line) {
    const auto pos = line.find('=');
    if (pos == std::string::npos) throw DataError("checkpoint line without '=': " + line);
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    return {trim(line.substr(0, pos)), trim(line.substr(pos + 1))};
}

double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("checkpoint: bad numeric value '" + s + "'");
    }
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            items.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) items.push_back(cur);
    return items;
}

}  // namespace

AciState AciState::deserialize(const std::string& text, const AciConfig& cfg) {
    AciState st(cfg);
    std::istringstream in(text);
    std::string line;
    bool have_version = false;
    std::int64_t n_events = 0;
    std::vector<ClampEvent> events;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto [key, value] = split_kv(line);
        if (key == "checkpoint_version") {
            if (value != "1") throw DataError("unsupported checkpoint version " + value);
            have_version = true;
        } else if (key == "steps") {
            if (std::stoll(value) != cfg.steps())
                throw DataError("checkpoint step count does not match config");
        } else if (key == "clock") {
            st.t_ = std::stoll(value);
        } else if (key == "eps_t") {
            const auto items = split_list(value);
            if (static_cast<int>(items.size()) != cfg.steps())
                throw DataError("checkpoint eps_t length mismatch");
            for (std::size_t i = 0; i < items.size(); ++i) st.eps_t_[i] = parse_double(items[i]);
        } else if (key == "update_counts") {
            const auto items = split_list(value);
            if (static_cast<int>(items.size()) != cfg.steps())
                throw DataError("checkpoint update_counts length mismatch");
            for (std::size_t i = 0; i < items.size(); ++i) st.updates_[i] = std::stoll(items[i]);
        } else if (key == "clamp_events") {
            n_events = std::stoll(value);
        } else if (key.rfind("clamp_event_", 0) == 0) {
            ClampEvent ev;
            std::istringstream fields(value);
            std::string field;
            while (fields >> field) {
                auto [fk, fv] = split_kv(field);
                if (fk == "t") ev.t = std::stoll(fv);
                else if (fk == "step") ev.step = std::stoi(fv);
                else if (fk == "before") ev.before = parse_double(fv);
                else if (fk == "after") ev.after = parse_double(fv);
                else if (fk == "bound") ev.at_floor = (fv == "floor");
                else throw DataError("checkpoint: unknown clamp field '" + fk + "'");
            }
            events.push_back(ev);
        } else {
            throw DataError("checkpoint: unknown key '" + key + "'");
        }
    }
    if (!have_version) throw DataError("checkpoint missing version line");
    if (static_cast<std::int64_t>(events.size()) != n_events)
        throw DataError("checkpoint clamp event count mismatch");
    st.clamp_log_ = std::move(events);
    return st;
}

PendingBuffer::PendingBuffer(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw ConfigError("pending buffer capacity must be >= 1");
}

void PendingBuffer::record(crr::IntervalVector iv) {
    if (!buf_.empty() && iv.origin <= buf_.back().origin)
        throw DataError("out-of-order prediction origin " + std::to_string(iv.origin) +
                        " (latest is " + std::to_string(buf_.back().origin) + ")");
    buf_.push_back(std::move(iv));
    if (static_cast<int>(buf_.size()) > capacity_) buf_.pop_front();
}

const crr::IntervalVector* PendingBuffer::find(std::int64_t origin) const {
    for (const auto& iv : buf_)
        if (iv.origin == origin) return &iv;
    return nullptr;
}

PartialErrors PendingBuffer::extract_errors(std::int64_t t, double y_true,
                                            bool require_head) const {
    if (require_head && find(t) == nullptr)
        throw DataError("no pending prediction with origin " + std::to_string(t));
    PartialErrors errs(capacity_);
    for (int i = 1; i <= capacity_; ++i) {
        const crr::IntervalVector* iv = find(t - i + 1);
        if (iv == nullptr || iv->steps() < i) continue;  // unavailable at this tick
        const bool covered = iv->lower[i - 1] <= y_true && y_true <= iv->upper[i - 1];
        errs.err[i - 1] = covered ? 0.0 : 1.0;
    }
    return errs;
}

}  // namespace covcast::aci

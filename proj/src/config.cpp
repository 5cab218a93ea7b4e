#include "covcast/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "covcast/errors.hpp"

namespace covcast::cfg {

GeneratorKind generator_from_name(const std::string& name) {
    if (name == "iid-gaussian") return GeneratorKind::iid_gaussian;
    if (name == "ar1") return GeneratorKind::ar1;
    if (name == "mean-shift") return GeneratorKind::mean_shift;
    if (name == "trend") return GeneratorKind::trend;
    throw ConfigError("unknown generator '" + name +
                      "' (expected iid-gaussian, ar1, mean-shift or trend)");
}

std::string generator_name(GeneratorKind g) {
    switch (g) {
        case GeneratorKind::iid_gaussian: return "iid-gaussian";
        case GeneratorKind::ar1: return "ar1";
        case GeneratorKind::mean_shift: return "mean-shift";
        case GeneratorKind::trend: return "trend";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (window.p_lags < 1) throw ConfigError("p_lags must be >= 1");
    if (window.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (aci.eps_target.size() != window.horizon)
        throw ConfigError("eps must have one value per horizon step");
    aci.validate();
    if (train_pairs < window.horizon)
        throw ConfigError("train_pairs must be at least the horizon (need one complete pair)");
    if (ridge_a && gcv_grid)
        throw ConfigError("give either ridge_a or gcv_grid, not both");
    if (ridge_a && *ridge_a < 0) throw ConfigError("ridge_a must be nonnegative");
}

namespace {

struct RawConfig {
    std::map<std::string, std::string> kv;
    std::set<std::string> consumed;

    bool has(const std::string& k) const { return kv.count(k) > 0; }
    std::optional<std::string> get(const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end()) return std::nullopt;
        consumed.insert(k);
        return it->second;
    }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse number '" + s + "'");
    }
}

std::int64_t to_int(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse integer '" + s + "'");
    }
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "on") return true;
    if (s == "false" || s == "0" || s == "off") return false;
    throw ConfigError(key + ": expected true/false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    const std::string last = trim(cur);
    if (!last.empty() || !items.empty()) items.push_back(last);
    return items;
}

// Either a single value (broadcast over h) or exactly h comma-separated ones.
Eigen::VectorXd parse_step_vector(const std::string& key, const std::string& s, int h) {
    const auto items = split_list(s);
    Eigen::VectorXd v(h);
    if (items.size() == 1) {
        v.setConstant(to_double(key, items[0]));
    } else if (static_cast<int>(items.size()) == h) {
        for (int i = 0; i < h; ++i) v[i] = to_double(key, items[i]);
    } else {
        throw ConfigError(key + ": expected 1 or " + std::to_string(h) + " values, got " +
                          std::to_string(items.size()));
    }
    return v;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    bool saw_version = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (!saw_version) {
            if (key != "config_version")
                throw ConfigError("first config entry must be config_version");
            if (value != "1") throw ConfigError("unsupported config_version " + value);
            saw_version = true;
            continue;
        }
        if (!raw.kv.emplace(key, value).second)
            throw ConfigError("duplicate config key '" + key + "'");
    }
    if (!saw_version) throw ConfigError("config is missing config_version");

    ExperimentConfig c;
    if (auto v = raw.get("dataset")) c.dataset = *v;
    if (auto v = raw.get("timestamp_column")) c.schema.timestamp_col = *v;
    if (auto v = raw.get("demand_column")) c.schema.demand_col = *v;
    if (auto v = raw.get("temperature_column")) c.schema.temperature_col = *v;

    if (auto v = raw.get("p_lags")) c.window.p_lags = static_cast<int>(to_int("p_lags", *v));
    if (auto v = raw.get("horizon")) c.window.horizon = static_cast<int>(to_int("horizon", *v));
    if (auto v = raw.get("exog_features")) {
        c.window.exog_features.clear();
        for (const auto& item : split_list(*v))
            if (!item.empty()) c.window.exog_features.push_back(item);
    }
    if (auto v = raw.get("exog_alignment")) {
        if (*v == "origin") c.window.alignment = ts::ExogAlignment::origin;
        else if (*v == "first_target") c.window.alignment = ts::ExogAlignment::first_target;
        else throw ConfigError("exog_alignment: expected origin or first_target, got '" + *v + "'");
    }

    if (auto v = raw.get("train_pairs")) c.train_pairs = to_int("train_pairs", *v);

    if (auto v = raw.get("ridge_a")) c.ridge_a = to_double("ridge_a", *v);
    if (auto v = raw.get("gcv_grid")) {
        const std::string s = *v;
        if (s.rfind("logspace:", 0) == 0) {
            const auto parts = split_list(s.substr(9));  // logspace:lo,hi,count
            if (parts.size() != 3) throw ConfigError("gcv_grid logspace needs lo,hi,count");
            c.gcv_grid = ridge::GcvGrid::log_spaced(
                to_double("gcv_grid", parts[0]), to_double("gcv_grid", parts[1]),
                static_cast<int>(to_int("gcv_grid", parts[2])));
        } else {
            ridge::GcvGrid g;
            for (const auto& item : split_list(s)) g.values.push_back(to_double("gcv_grid", item));
            c.gcv_grid = g;
        }
    }

    const int h = c.window.horizon;
    c.aci.eps_target = Eigen::VectorXd::Constant(h, 0.1);
    c.aci.gamma = Eigen::VectorXd::Constant(h, 0.005);
    if (auto v = raw.get("eps")) c.aci.eps_target = parse_step_vector("eps", *v, h);
    if (auto v = raw.get("gamma")) c.aci.gamma = parse_step_vector("gamma", *v, h);
    if (auto v = raw.get("clamp_floor")) {
        if (*v == "auto") {
            c.aci.clamp_floor_auto = true;
        } else if (*v == "off") {
            c.aci.clamp_floor_auto = false;
            c.aci.clamp_floor.reset();
        } else {
            c.aci.clamp_floor_auto = false;
            c.aci.clamp_floor = to_double("clamp_floor", *v);
        }
    }
    if (auto v = raw.get("clamp_ceiling")) {
        if (*v == "off") c.aci.clamp_ceiling.reset();
        else c.aci.clamp_ceiling = to_double("clamp_ceiling", *v);
    }

    if (auto v = raw.get("freeze_after_training"))
        c.freeze_after_training = to_bool("freeze_after_training", *v);
    if (auto v = raw.get("out_dir")) c.out_dir = *v;

    if (auto v = raw.get("generator")) c.generator.kind = generator_from_name(*v);
    if (auto v = raw.get("steps")) c.generator.steps = to_int("steps", *v);
    if (auto v = raw.get("seed")) c.generator.seed = static_cast<std::uint64_t>(to_int("seed", *v));
    if (auto v = raw.get("gen_mu")) c.generator.mu = to_double("gen_mu", *v);
    if (auto v = raw.get("gen_sigma")) c.generator.sigma = to_double("gen_sigma", *v);
    if (auto v = raw.get("gen_phi")) c.generator.phi = to_double("gen_phi", *v);
    if (auto v = raw.get("gen_shift")) c.generator.shift = to_double("gen_shift", *v);
    if (auto v = raw.get("gen_slope")) c.generator.slope = to_double("gen_slope", *v);

    for (const auto& [key, value] : raw.kv)
        if (!raw.consumed.count(key)) throw ConfigError("unknown config key '" + key + "'");

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace covcast::cfg

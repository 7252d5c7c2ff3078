#include "repokva/config.hpp"

#include "repokva/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "reference_config.inc" // defines kReferenceConfigText

namespace repokva {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "trade.principal", "trade.haircut", "trade.liq_discount", "trade.recovery", "trade.maturity",
        "trade.mpr", "trade.mpr_days",
        "rates.r", "rates.funding_basis", "rates.r_c", "rates.repo_spread", "rates.capital_spread",
        "credit.cds_spread", "credit.lambda",
        "model.sigma", "model.jump_intensity", "model.jumps_per_mpr", "model.p_up", "model.mean_up",
        "model.mean_down", "model.drift",
        "mc.n_paths", "mc.seed",
        "ec.q", "ec.measure", "ec.grid_points",
        "rc.reg_haircut", "rc.risk_weight", "rc.capital_ratio", "rc.roe",
        "sweep.h_min", "sweep.h_max", "sweep.h_step",
        "pde.s0", "pde.s_intervals", "pde.t_steps", "pde.half_width", "pde.rebate_rate", "pde.sec_haircut",
        "pde.note_rate", "pde.mc_paths",
        "output.path", "output.format"};
    return keys;
}

const std::vector<std::string>& required_keys() {
    static const std::vector<std::string> keys{
        "trade.principal", "trade.haircut", "trade.maturity", "rates.r", "rates.funding_basis",
        "rates.r_c", "rates.repo_spread", "rates.capital_spread", "model.sigma"};
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Fields {
public:
    explicit Fields(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    double number(const std::string& key) const { return parse_number(key, kv_.at(key)); }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(kv_.at(key));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
        if (out.empty()) throw ConfigError(key + ": expected at least one value");
        return out;
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const double v = number(key);
        if (v < 0.0 || v != std::floor(v)) throw ConfigError(key + ": expected a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? kv_.at(key) : fallback;
    }

private:
    static double parse_number(const std::string& key, const std::string& raw) {
        double v = 0.0;
        const auto* end = raw.data() + raw.size();
        const auto [ptr, ec] = std::from_chars(raw.data(), end, v);
        if (ec != std::errc() || ptr != end || !std::isfinite(v))
            throw ConfigError(key + ": '" + raw + "' is not a finite number");
        return v;
    }

    std::map<std::string, std::string> kv_;
};

void check(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key + ": " + what);
}

void check_fraction(double v, const std::string& key) { check(v >= 0.0 && v < 1.0, key, "must lie in [0, 1)"); }

} // namespace

std::vector<double> SweepSettings::haircuts() const {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((h_max - h_min) / h_step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(h_min + h_step * static_cast<double>(i));
    return out;
}

HazardCurve RunConfig::hazard() const {
    HazardCurve h;
    h.recovery = trade.recovery;
    h.lambda = lambda ? *lambda : hazard_from_cds(*cds_spread, trade.recovery);
    return h;
}

RepoTerms RunConfig::terms_at(double haircut) const {
    RepoTerms t = trade;
    t.haircut = haircut;
    return t;
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'section.key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key)) throw ConfigError(key + ": unknown key");
        if (value.empty()) throw ConfigError(key + ": empty value");
        if (!kv.emplace(key, value).second) throw ConfigError(key + ": duplicate key");
    }

    std::vector<std::string> missing;
    for (const auto& k : required_keys())
        if (!kv.count(k)) missing.push_back(k);
    if (!kv.count("trade.mpr") && !kv.count("trade.mpr_days")) missing.push_back("trade.mpr_days");
    if (!kv.count("credit.cds_spread") && !kv.count("credit.lambda")) missing.push_back("credit.cds_spread");
    if (!missing.empty()) {
        std::string msg = "missing required field(s): ";
        for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
        throw ConfigError(msg);
    }
    const Fields f(std::move(kv));

    RunConfig c;
    check(!(f.has("trade.mpr") && f.has("trade.mpr_days")), "trade.mpr", "give exactly one of trade.mpr, trade.mpr_days");
    check(!(f.has("credit.cds_spread") && f.has("credit.lambda")), "credit.cds_spread",
          "give exactly one of credit.cds_spread, credit.lambda");

    c.trade.principal = f.number("trade.principal");
    check(c.trade.principal > 0.0, "trade.principal", "must be > 0");
    c.haircuts = f.numbers("trade.haircut");
    for (double h : c.haircuts) check_fraction(h, "trade.haircut");
    c.trade.haircut = c.haircuts.front();
    c.trade.liq_discount = f.number("trade.liq_discount", 0.0);
    check_fraction(c.trade.liq_discount, "trade.liq_discount");
    c.trade.recovery = f.number("trade.recovery", 0.4);
    check_fraction(c.trade.recovery, "trade.recovery");
    c.trade.maturity = f.number("trade.maturity");
    check(c.trade.maturity > 0.0, "trade.maturity", "must be > 0");
    c.trade.mpr = f.has("trade.mpr") ? f.number("trade.mpr") : trading_days_to_years(f.number("trade.mpr_days"));
    check(c.trade.mpr > 0.0 && c.trade.mpr < c.trade.maturity, f.has("trade.mpr") ? "trade.mpr" : "trade.mpr_days",
          "margin period must be positive and shorter than the maturity");
    c.trade.confidence = f.number("ec.q", 0.999);
    check(c.trade.confidence > 0.5 && c.trade.confidence < 1.0, "ec.q", "must lie in (0.5, 1)");

    c.rates.r = f.number("rates.r");
    c.rates.funding_basis = f.number("rates.funding_basis");
    check(c.rates.funding_basis >= 0.0, "rates.funding_basis", "must be >= 0 (r_f >= r)");
    c.rates.r_c = f.number("rates.r_c");
    check(c.rates.r_c >= c.rates.r, "rates.r_c", "must be >= rates.r");
    c.rates.s_p = f.number("rates.repo_spread");
    check(c.rates.s_p >= 0.0, "rates.repo_spread", "must be >= 0");
    c.rates.s_k = f.number("rates.capital_spread");
    check(c.rates.s_k >= 0.0, "rates.capital_spread", "must be >= 0");

    if (f.has("credit.lambda")) {
        c.lambda = f.number("credit.lambda");
        check(*c.lambda >= 0.0, "credit.lambda", "must be >= 0");
    } else {
        c.cds_spread = f.number("credit.cds_spread");
        check(*c.cds_spread >= 0.0, "credit.cds_spread", "must be >= 0");
    }

    c.model.sigma = f.number("model.sigma");
    check(c.model.sigma >= 0.0, "model.sigma", "must be >= 0");
    check(!(f.has("model.jump_intensity") && f.has("model.jumps_per_mpr")), "model.jump_intensity",
          "give at most one of model.jump_intensity, model.jumps_per_mpr");
    c.model.jump_intensity =
        f.has("model.jumps_per_mpr")
            ? KouParams::intensity_from_jumps_per_mpr(f.number("model.jumps_per_mpr"), c.trade.mpr)
            : f.number("model.jump_intensity", 0.0);
    check(c.model.jump_intensity >= 0.0, "model.jump_intensity", "must be >= 0");
    c.model.p_up = f.number("model.p_up", 0.5);
    check(c.model.p_up >= 0.0 && c.model.p_up <= 1.0, "model.p_up", "must lie in [0, 1]");
    c.model.mean_up = f.number("model.mean_up", 0.0);
    c.model.mean_down = f.number("model.mean_down", 0.0);
    if (c.model.jump_intensity > 0.0) {
        check(c.model.mean_up > 0.0, "model.mean_up", "must be > 0 when jumps are enabled");
        check(c.model.mean_down > 0.0, "model.mean_down", "must be > 0 when jumps are enabled");
    }
    c.model.drift = f.number("model.drift", 0.0);

    c.n_paths = f.integer("mc.n_paths", 1'000'000);
    check(c.n_paths >= 1, "mc.n_paths", "must be >= 1");
    c.seed = f.integer("mc.seed", 1);

    const std::string measure = f.text("ec.measure", "es");
    if (measure == "both") {
        c.measures = {RiskMeasure::ExpectedShortfall, RiskMeasure::VaR};
    } else {
        try {
            c.measures = {parse_risk_measure(measure)};
        } catch (const std::invalid_argument&) {
            throw ConfigError("ec.measure: expected es, var or both");
        }
    }
    c.grid_points = f.integer("ec.grid_points", 101);
    check(c.grid_points >= 50, "ec.grid_points", "must be >= 50");

    c.rc.reg_haircut = f.number("rc.reg_haircut", 0.15);
    check_fraction(c.rc.reg_haircut, "rc.reg_haircut");
    c.rc.risk_weight = f.number("rc.risk_weight", 1.0);
    check(c.rc.risk_weight >= 0.0, "rc.risk_weight", "must be >= 0");
    c.rc.capital_ratio = f.number("rc.capital_ratio", 0.08);
    check(c.rc.capital_ratio >= 0.0, "rc.capital_ratio", "must be >= 0");
    c.rc.roe = f.number("rc.roe", 0.10);
    check(c.rc.roe >= 0.0, "rc.roe", "must be >= 0");

    c.sweep.h_min = f.number("sweep.h_min", 0.0);
    c.sweep.h_max = f.number("sweep.h_max", 0.20);
    c.sweep.h_step = f.number("sweep.h_step", 0.01);
    check(c.sweep.h_min >= 0.0 && c.sweep.h_max <= 0.20 && c.sweep.h_min <= c.sweep.h_max, "sweep.h_max",
          "sweep range must lie within [0, 0.20]");
    check(c.sweep.h_step > 0.0, "sweep.h_step", "must be > 0");

    c.pde.s0 = f.number("pde.s0", 100.0);
    check(c.pde.s0 > 0.0, "pde.s0", "must be > 0");
    c.pde.s_intervals = f.integer("pde.s_intervals", 400);
    check(c.pde.s_intervals >= 4, "pde.s_intervals", "must be >= 4");
    c.pde.t_steps = static_cast<int>(f.integer("pde.t_steps", 400));
    check(c.pde.t_steps >= 1, "pde.t_steps", "must be >= 1");
    c.pde.half_width = f.number("pde.half_width", 5.0);
    check(c.pde.half_width > 0.0, "pde.half_width", "must be > 0");
    c.pde.rebate_rate = f.number("pde.rebate_rate", 0.0);
    c.pde.sec_haircut = f.number("pde.sec_haircut", 0.0);
    c.pde.note_rate = f.number("pde.note_rate", 0.0);
    c.pde.mc_paths = f.integer("pde.mc_paths", 20000);
    check(c.pde.mc_paths >= 100, "pde.mc_paths", "must be >= 100");

    c.output_path = f.text("output.path", "");
    const std::string fmt = f.text("output.format", "csv");
    if (fmt == "csv") c.format = OutputFormat::Csv;
    else if (fmt == "json") c.format = OutputFormat::Json;
    else throw ConfigError("output.format: expected csv or json");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

const std::string& reference_config_text() {
    static const std::string text(kReferenceConfigText);
    return text;
}

} // namespace repokva

#include "repokva/commands.hpp"
#include "repokva/config.hpp"
#include "repokva/errors.hpp"
#include "repokva/report.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sys/wait.h>

using namespace repokva;
namespace fs = std::filesystem;

namespace {

std::string small_config(const std::string& extra_replace_from = "", const std::string& extra_replace_to = "") {
    std::string text = reference_config_text();
    text = std::regex_replace(text, std::regex("mc.n_paths = \\d+"), "mc.n_paths = 20000");
    text = std::regex_replace(text, std::regex("pde.mc_paths = \\d+"), "pde.mc_paths = 2000");
    if (!extra_replace_from.empty()) {
        const auto pos = text.find(extra_replace_from);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, extra_replace_from.size(), extra_replace_to);
    }
    return text;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

fs::path write_temp(const std::string& name, const std::string& text) {
    const auto dir = fs::temp_directory_path() / "repokva_cli_test";
    fs::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

struct Run {
    int code;
    std::string out;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(REPOKVA_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (const std::size_t n = fread(buf, 1, sizeof(buf), pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

} // namespace

TEST_CASE("shipped reference config parses to the one-year SPX setup") {
    const auto c = load_config(REPOKVA_REFERENCE_CFG);
    CHECK(c.haircuts == std::vector<double>{0.0, 0.05, 0.10});
    CHECK(c.trade.principal == 1.0);
    CHECK(c.trade.maturity == 1.0);
    CHECK(c.trade.mpr == doctest::Approx(10.0 / 252.0));
    CHECK(c.trade.recovery == 0.4);
    CHECK(c.trade.liq_discount == 0.0);
    CHECK(c.trade.confidence == 0.999);
    CHECK(c.rates.r == 0.007);
    CHECK(c.rates.r_c == 0.031);
    CHECK(c.rates.s_p == 0.006);
    CHECK(c.rates.s_k == 0.10);
    CHECK(c.hazard().lambda == doctest::Approx(0.031333).epsilon(1e-5));
    CHECK(c.model.sigma == 0.24);
    CHECK(c.model.jump_intensity == doctest::Approx(80.64));
    CHECK(c.model.p_up == 0.46);
    CHECK(c.model.mean_up == 0.0059);
    CHECK(c.model.mean_down == 0.0078);
    CHECK(c.n_paths == 1'000'000);
    CHECK(c.measures.size() == 2);
    // The bundled copy is the same file.
    CHECK(reference_config_text() == [] {
        std::ifstream in(REPOKVA_REFERENCE_CFG);
        return std::string(std::istreambuf_iterator<char>(in), {});
    }());
}

TEST_CASE("defaults") {
    const std::string minimal = "trade.principal = 100\ntrade.haircut = 0.02\ntrade.maturity = 2\ntrade.mpr_days = 5\n"
                                "rates.r = 0.01\nrates.funding_basis = 0\nrates.r_c = 0.02\nrates.repo_spread = 0.005\n"
                                "rates.capital_spread = 0.1\ncredit.lambda = 0.02\nmodel.sigma = 0.2\n";
    const auto c = parse_config(minimal);
    CHECK(c.trade.liq_discount == 0.0);
    CHECK(c.trade.recovery == 0.4);
    CHECK(c.trade.confidence == 0.999);
    CHECK(c.measures == std::vector<RiskMeasure>{RiskMeasure::ExpectedShortfall});
    CHECK(c.model.drift == 0.0);
    CHECK(c.model.jump_intensity == 0.0);
    CHECK(c.n_paths == 1'000'000);
    CHECK(c.format == OutputFormat::Csv);
}

TEST_CASE("validation errors name the field") {
    CHECK(config_error(small_config("trade.principal = 1\n", "")).find("trade.principal") != std::string::npos);
    const std::string empty = config_error("");
    for (const char* k : {"trade.principal", "trade.haircut", "trade.maturity", "rates.r", "model.sigma",
                          "credit.cds_spread", "trade.mpr_days"})
        CHECK(empty.find(k) != std::string::npos);
    CHECK(config_error(small_config("trade.haircut = 0, 0.05, 0.10", "trade.haircut = 1.0"))
              .find("trade.haircut") != std::string::npos);
    CHECK(config_error(small_config("model.drift = 0", "model.drfit = 0")).find("model.drfit: unknown key") !=
          std::string::npos);
    CHECK(config_error(small_config("credit.cds_spread = 0.0188", "credit.cds_spread = 0.0188\ncredit.lambda = 0.1"))
              .find("exactly one") != std::string::npos);
    CHECK(config_error(small_config("model.sigma = 0.24", "model.sigma = 0.24\nmodel.sigma = 0.3"))
              .find("duplicate") != std::string::npos);
    CHECK(config_error(small_config("rates.r = 0.007", "rates.r = 0,007")).find("rates.r") != std::string::npos);
    CHECK(config_error(small_config("sweep.h_max = 0.20", "sweep.h_max = 0.3")).find("sweep") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/repokva.cfg"), ConfigError);
}

TEST_CASE("CSV round trip and fixed formatting") {
    Table t;
    t.columns = {"name", "a", "b"};
    t.add_row({std::string("x"), 59.790512345, -0.0});
    t.add_row({std::string("y"), 1e-7, 123456789.0});
    const std::string csv = render_csv(t);
    CHECK(csv == "name,a,b\nx,59.7905,0\ny,1e-07,1.23457e+08\n");
    const Table back = parse_csv(csv);
    REQUIRE(back.rows.size() == 2);
    CHECK(render_csv(back) == csv);
    CHECK(std::get<double>(back.rows[0][1]) == 59.7905);
    const auto json = nlohmann::json::parse(render_json(t));
    CHECK(json[0]["a"].get<double>() == 59.7905);
    CHECK(json[1]["name"] == "y");
}

TEST_CASE("zero intensity rows carry no capital or gap charges") {
    const PricingPipeline p(parse_config(small_config("credit.cds_spread = 0.0188", "credit.lambda = 0")));
    const auto t = cmd_price(p);
    for (const auto& row : t.rows) {
        CHECK(std::get<double>(row[4]) == 0.0);
        CHECK(std::get<double>(row[5]) == 0.0);
    }
    for (const auto& row : cmd_ec_profile(p).rows) CHECK(std::get<double>(row[3]) == 0.0);
}

TEST_CASE("profile, sweep and pde-check commands") {
    const PricingPipeline p(parse_config(small_config()));
    const auto prof = cmd_ec_profile(p);
    CHECK(prof.rows.size() == 3 * 2 * 101);
    // ES rows of h = 0 dominate those of h = 5% pointwise.
    for (std::size_t i = 0; i < 101; ++i)
        CHECK(std::get<double>(prof.rows[i][3]) >= std::get<double>(prof.rows[2 * 101 + i][3]));

    const auto sweep = cmd_haircut_sweep(p);
    CHECK(sweep.rows.size() == 21);
    CHECK(std::get<double>(sweep.rows.front()[2]) == doctest::Approx(36.42).epsilon(1e-6));
    const double free_pv = std::get<double>(sweep.rows.back()[2]);
    for (std::size_t i = 15; i < 21; ++i) CHECK(std::get<double>(sweep.rows[i][2]) == doctest::Approx(free_pv));

    const PricingPipeline no_roe(parse_config(small_config("rc.roe = 0.10", "rc.roe = 0")));
    for (const auto& row : cmd_haircut_sweep(no_roe).rows) CHECK(std::get<double>(row[2]) == doctest::Approx(free_pv));

    for (const auto& row : cmd_pde_check(p).rows) CHECK(std::get<std::string>(row[3]) == "yes");
}

TEST_CASE("binary: exit codes, determinism and output formats") {
    const auto cfg = write_temp("small.cfg", small_config());
    const auto a = run_cli("price --config " + cfg.string());
    CHECK(a.code == 0);
    CHECK(a.out.rfind("haircut,measure,npv_star_bp", 0) == 0);
    const auto b = run_cli("price --config " + cfg.string());
    CHECK(a.out == b.out);
    const auto c = run_cli("price --config " + cfg.string() + " --seed 99");
    CHECK(c.code == 0);
    CHECK(c.out != a.out);

    const auto out_file = fs::temp_directory_path() / "repokva_cli_test" / "price.json";
    CHECK(run_cli("price --config " + cfg.string() + " --format json --out " + out_file.string()).code == 0);
    std::ifstream in(out_file);
    const auto json = nlohmann::json::parse(in);
    CHECK(json.size() == 6);
    CHECK(json[0].contains("kva_bp"));

    const auto bad = write_temp("bad.cfg", small_config("trade.principal = 1\n", ""));
    CHECK(run_cli("price --config " + bad.string()).code == 2);
    CHECK(run_cli("price --config /nonexistent.cfg").code == 2);
    CHECK(run_cli("price").code == 2);
    CHECK(run_cli("price --config " + cfg.string() + " --format xml").code == 2);
    CHECK(run_cli("nonsense").code == 2);

    const auto e1 = run_cli("ec-profile --config " + cfg.string());
    const auto e2 = run_cli("ec-profile --config " + cfg.string());
    CHECK(e1.code == 0);
    CHECK(e1.out == e2.out);
}

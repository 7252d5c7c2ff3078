#include "repokva/commands.hpp"
#include "repokva/config.hpp"
#include "repokva/errors.hpp"
#include "repokva/report.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::string out;
    std::string format;
};

repokva::RunConfig build_config(const Options& opt, bool reference) {
    if (!reference && opt.config_path.empty()) throw repokva::ConfigError("--config: a config file is required");
    repokva::RunConfig cfg = reference && opt.config_path.empty() ? repokva::parse_config(repokva::reference_config_text())
                                                              : repokva::load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.paths) {
        if (*opt.paths < 1000) throw repokva::ConfigError("--paths: must be >= 1000");
        cfg.n_paths = *opt.paths;
    }
    if (!opt.out.empty()) cfg.output_path = opt.out;
    if (opt.format == "csv") cfg.format = repokva::OutputFormat::Csv;
    else if (opt.format == "json") cfg.format = repokva::OutputFormat::Json;
    else if (!opt.format.empty()) throw repokva::ConfigError("--format: expected csv or json");
    return cfg;
}

void emit(const repokva::Table& table, const repokva::RunConfig& cfg) {
    std::cerr << repokva::render_pretty(table);
    const std::string text = repokva::render(table, cfg.format);
    if (cfg.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) throw repokva::ConfigError("output.path: cannot open '" + cfg.output_path + "' for writing");
    f << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Repo pricing with gap risk, economic capital and valuation adjustments"};
    app.require_subcommand(1);

    Options opt;
    using Command = std::function<repokva::Table(const repokva::PricingPipeline&)>;
    Command selected;
    bool reference = false;

    auto add = [&](const std::string& name, const std::string& help, Command cmd, bool is_reference) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config_path, "Config file (flat section.key = value)");
        sub->add_option("--seed", opt.seed, "Override mc.seed");
        sub->add_option("--paths", opt.paths, "Override mc.n_paths");
        sub->add_option("--out", opt.out, "Write machine output here instead of stdout");
        sub->add_option("--format", opt.format, "csv or json");
        sub->callback([&, cmd, is_reference] {
            selected = cmd;
            reference = is_reference;
        });
    };
    add("price", "Fair value and valuation adjustments per haircut (bp)", repokva::cmd_price, false);
    add("ec-profile", "Economic capital profile N_c(t)/N_p", repokva::cmd_ec_profile, false);
    add("haircut-sweep", "pv with economic capital vs regulatory capital across haircuts", repokva::cmd_haircut_sweep,
        false);
    add("pde-check", "PDE vs closed form vs Feynman-Kac cross-checks", repokva::cmd_pde_check, false);
    add("table1", "price with the bundled reproduction config", repokva::cmd_price, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        const repokva::RunConfig cfg = build_config(opt, reference);
        const repokva::PricingPipeline pipeline(cfg);
        emit(selected(pipeline), cfg);
    } catch (const repokva::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const repokva::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

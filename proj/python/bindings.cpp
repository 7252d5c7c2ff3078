#include "repokva/commands.hpp"
#include "repokva/config.hpp"
#include "repokva/curves.hpp"
#include "repokva/errors.hpp"
#include "repokva/gap_loss.hpp"
#include "repokva/report.hpp"
#include "repokva/valuation.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace repokva;

namespace {

py::list to_records(const Table& table) {
    py::list out;
    for (const auto& row : table.rows) {
        py::dict rec;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (const auto* d = std::get_if<double>(&row[i])) rec[py::str(table.columns[i])] = *d;
            else rec[py::str(table.columns[i])] = std::get<std::string>(row[i]);
        }
        out.append(rec);
    }
    return out;
}

std::shared_ptr<PricingPipeline> make_pipeline(const std::string& text, std::optional<std::uint64_t> seed,
                                               std::optional<std::size_t> paths) {
    RunConfig cfg = parse_config(text);
    if (seed) cfg.seed = *seed;
    if (paths) cfg.n_paths = *paths;
    py::gil_scoped_release release;
    return std::make_shared<PricingPipeline>(std::move(cfg));
}

template <class F>
py::list run(const PricingPipeline& p, F f) {
    Table t;
    {
        py::gil_scoped_release release;
        t = f(p);
    }
    return to_records(t);
}

} // namespace

PYBIND11_MODULE(_repokva, m) {
    m.doc() = "Repo pricing with gap risk, economic capital and valuation adjustments";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("reference_config_text", &reference_config_text);
    m.def("hazard_from_cds", &hazard_from_cds, py::arg("spread"), py::arg("recovery") = 0.4);
    m.def(
        "risky_annuity",
        [](double rate, double lambda, double maturity) { return risky_annuity(rate, {lambda, 0.4}, maturity); },
        py::arg("rate"), py::arg("hazard"), py::arg("maturity"));
    m.def(
        "settlement_loss",
        [](double x, double haircut, double liq_discount, double recovery, double principal) {
            RepoTerms t;
            t.haircut = haircut;
            t.liq_discount = liq_discount;
            t.recovery = recovery;
            t.principal = principal;
            t.validate();
            return settlement_loss(t, x);
        },
        py::arg("x"), py::arg("haircut"), py::arg("liq_discount") = 0.0, py::arg("recovery") = 0.4,
        py::arg("principal") = 1.0);
    m.def(
        "npv_star_bp",
        [](double repo_spread, double r, double maturity) {
            RepoTerms t;
            t.maturity = maturity;
            RatesEnv env;
            env.r = r;
            env.s_p = repo_spread;
            return to_bp(npv_star(t, env), t.principal);
        },
        py::arg("repo_spread"), py::arg("r"), py::arg("maturity") = 1.0);

    py::class_<PricingPipeline, std::shared_ptr<PricingPipeline>>(m, "Pipeline")
        .def(py::init(&make_pipeline), py::arg("config_text"), py::arg("seed") = py::none(),
             py::arg("paths") = py::none())
        .def("price", [](const PricingPipeline& p) { return run(p, cmd_price); })
        .def("ec_profile", [](const PricingPipeline& p) { return run(p, cmd_ec_profile); })
        .def("haircut_sweep", [](const PricingPipeline& p) { return run(p, cmd_haircut_sweep); })
        .def("pde_check", [](const PricingPipeline& p) { return run(p, cmd_pde_check); })
        .def("render_price_csv", [](const PricingPipeline& p) {
            py::gil_scoped_release release;
            return render_csv(cmd_price(p));
        });
}

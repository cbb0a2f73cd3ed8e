#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "udnsim/config.hpp"
#include "udnsim/heatmap.hpp"

namespace py = pybind11;
using namespace udnsim;

namespace {

ScenarioConfig config_from(const std::string& text)
{
    ScenarioConfig c = apply_json(nlohmann::json::parse(text));
    c.validate();
    return c;
}

Deployment deployment_from(const ScenarioConfig& c, const std::optional<std::vector<std::pair<double, double>>>& bs)
{
    Deployment d = make_deployment(c);
    if (bs) {
        d.bs_positions.clear();
        for (const auto& [x, y] : *bs) {
            if (!d.region.contains({x, y})) {
                throw std::invalid_argument("base station outside the region");
            }
            d.bs_positions.push_back({x, y});
        }
    }
    return d;
}

LinkType link_from(const std::string& s)
{
    if (s == "bs_ue") return LinkType::BsToUe;
    if (s == "bs_bs") return LinkType::BsToBs;
    if (s == "ue_ue") return LinkType::UeToUe;
    throw std::invalid_argument("link must be bs_ue, bs_bs or ue_ue");
}

py::bytes png_of(const CoverageMap& m)
{
    return py::bytes(write_png(m));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Monte Carlo SINR coverage maps for dense small-cell networks";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<CoverageMap>(m, "CoverageMap")
        .def_readonly("resolution", &CoverageMap::resolution)
        .def_readonly("side_km", &CoverageMap::side_km)
        .def_readonly("fingerprint", &CoverageMap::fingerprint)
        .def_readonly("values", &CoverageMap::coverage)
        .def_property_readonly("direction", [](const CoverageMap& c) { return std::string{to_string(c.direction)}; })
        .def("at", &CoverageMap::at, py::arg("i"), py::arg("j"))
        .def("mean", &CoverageMap::mean)
        .def("to_csv", &write_csv)
        .def("to_png", &png_of);

    m.def("_preset", [](const std::string& fig, const std::string& density) {
        return to_json(preset(parse_figure(fig), parse_density(density))).dump();
    });
    m.def("_normalize", [](const std::string& text) { return to_json(config_from(text)).dump(); });
    m.def("_deployment", [](const std::string& text) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : make_deployment(config_from(text)).bs_positions) {
            out.emplace_back(p.x_km, p.y_km);
        }
        return out;
    });
    m.def(
        "_scan",
        [](const std::string& text, unsigned workers,
           const std::optional<std::vector<std::pair<double, double>>>& bs) {
            const ScenarioConfig c = config_from(text);
            const Simulator sim{c, deployment_from(c, bs)};
            py::gil_scoped_release release;
            ScanOptions options;
            options.workers = workers;
            return sim.scan_grid(options);
        },
        py::arg("config"), py::arg("workers") = 0, py::arg("bs") = py::none());
    m.def(
        "_coverage_at",
        [](const std::string& text, double x, double y, std::uint64_t pixel) {
            const ScenarioConfig c = config_from(text);
            const Simulator sim{c, make_deployment(c)};
            py::gil_scoped_release release;
            return sim.coverage_at({x, y}, pixel, c.measurement());
        },
        py::arg("config"), py::arg("x_km"), py::arg("y_km"), py::arg("pixel") = 0);

    m.def(
        "los_probability", [](const std::string& link, double r) { return los_probability(link_from(link), r); },
        py::arg("link"), py::arg("r_km"));
    m.def(
        "path_loss_db",
        [](const std::string& model, const std::string& link, bool los, double r) {
            return path_loss_db(parse_channel(model), link_from(link), los, r);
        },
        py::arg("model"), py::arg("link"), py::arg("los"), py::arg("r_km"));
    m.def(
        "colorize",
        [](double v) {
            const ColorRgb c = colorize(v);
            return py::make_tuple(c.r, c.g, c.b);
        },
        py::arg("v"));
    m.def(
        "diff",
        [](const CoverageMap& a, const CoverageMap& b) { return diff(a, b).values; }, py::arg("a"), py::arg("b"));
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "lcn/agent.hpp"
#include "lcn/commands.hpp"
#include "lcn/config.hpp"
#include "lcn/dst.hpp"
#include "lcn/errors.hpp"
#include "lcn/metrics.hpp"
#include "lcn/tndp.hpp"

namespace py = pybind11;
using namespace lcn;

namespace {

Relation relation_of(const std::string& name, double lambda) {
    return cli::parse_relation(name, lambda);
}

py::dict record_dict(const MetricsRecord& r) {
    py::dict d;
    d["step"] = r.step;
    d["hypervolume"] = r.hypervolume;
    d["eum"] = r.eum;
    d["sen_welfare"] = r.sen_welfare;
    d["mean_sen_welfare"] = r.mean_sen_welfare;
    d["gini"] = r.gini;
    d["total_efficiency"] = r.total_efficiency;
    d["front_size"] = r.front_size;
    return d;
}

py::tuple step_tuple(const StepResult& s) { return py::make_tuple(s.reward, s.done); }

std::vector<bool> mask_list(const Environment& e) {
    const auto m = e.action_mask();
    return {m.begin(), m.end()};
}

py::dict train_json(const std::string& text, const std::filesystem::path& base_dir,
                    std::optional<std::uint64_t> seed, std::optional<double> lambda) {
    auto cfg = config::parse_config(nlohmann::json::parse(text), base_dir);
    auto agent_cfg = cfg.agent;
    agent_cfg.seed = seed.value_or(cfg.seeds.front());
    agent_cfg.lambda = lambda.value_or(cfg.lambdas.front());
    const auto env = config::make_environment(cfg.env);
    agent::TrainResult result;
    {
        py::gil_scoped_release release;
        result = agent::train(agent_cfg, *env);
    }
    py::dict out;
    out["front"] = result.final_evaluation.front.points;
    out["executed"] = result.final_evaluation.executed;
    py::list commands;
    for (const auto& c : result.final_evaluation.commands) {
        commands.append(py::make_tuple(c.desired_return, c.desired_horizon));
    }
    out["commands"] = commands;
    py::list logs;
    for (const auto& r : result.logs) logs.append(record_dict(r));
    out["logs"] = logs;
    out["buffer_returns"] = result.buffer.returns();
    out["steps"] = result.steps;
    out["episodes"] = result.episodes;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = cli::kVersion;

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_RuntimeError);

    m.def("pareto_dominates",
          [](const ObjectiveVector& a, const ObjectiveVector& b) { return pareto_dominates(a, b); },
          py::arg("a"), py::arg("b"));
    m.def("lorenz_dominates",
          [](const ObjectiveVector& a, const ObjectiveVector& b) { return lorenz_dominates(a, b); },
          py::arg("a"), py::arg("b"));
    m.def("lambda_lorenz_dominates",
          [](const ObjectiveVector& a, const ObjectiveVector& b, double lambda) {
              return lambda_lorenz_dominates(a, b, lambda);
          },
          py::arg("a"), py::arg("b"), py::arg("lam"));
    m.def("dominates",
          [](const ObjectiveVector& a, const ObjectiveVector& b, const std::string& relation,
             double lambda) { return dominates(a, b, relation_of(relation, lambda)); },
          py::arg("a"), py::arg("b"), py::arg("relation") = "pareto", py::arg("lam") = 0.0);
    m.def("lorenz_vector", [](const ObjectiveVector& v) { return lorenz_vector(v); });
    m.def("extract_front",
          [](const std::vector<ObjectiveVector>& points, const std::string& relation,
             double lambda) { return extract_front(points, relation_of(relation, lambda)).points; },
          py::arg("points"), py::arg("relation") = "pareto", py::arg("lam") = 0.0);
    m.def("crowding_distance", &crowding_distance, py::arg("points"));

    m.def("hypervolume",
          py::overload_cast<const std::vector<ObjectiveVector>&, const ObjectiveVector&>(
              &hypervolume),
          py::arg("points"), py::arg("ref"));
    m.def("eum", py::overload_cast<const std::vector<ObjectiveVector>&, std::size_t>(&eum),
          py::arg("points"), py::arg("n_weights") = 100);
    m.def("gini_index", [](const std::vector<double>& v) { return gini_index(v); });
    m.def("sen_welfare", [](const std::vector<double>& v) { return sen_welfare(v); });
    m.def("set_sen_welfare",
          py::overload_cast<const std::vector<ObjectiveVector>&>(&set_sen_welfare));
    m.def("metrics",
          [](const std::vector<ObjectiveVector>& points, const ObjectiveVector& ref,
             std::size_t n_weights) { return record_dict(compute_metrics(points, ref, n_weights)); },
          py::arg("points"), py::arg("ref"), py::arg("n_weights") = 100);

    py::class_<dst::DstEnv>(m, "DeepSeaTreasure")
        .def(py::init([](const std::string& map, std::size_t max_steps) {
                 return dst::DstEnv(dst::DstMap::by_name(map), max_steps);
             }),
             py::arg("map") = "standard", py::arg("max_steps") = 100)
        .def("reset", [](dst::DstEnv& e) { e.reset(); return e.observation(); })
        .def("step", [](dst::DstEnv& e, std::size_t a) { return step_tuple(e.step(a)); })
        .def("observation", &dst::DstEnv::observation)
        .def("action_mask", [](const dst::DstEnv& e) { return mask_list(e); })
        .def_property_readonly("position", [](const dst::DstEnv& e) {
            return py::make_tuple(e.position().row, e.position().col);
        });
    m.def("dst_true_pareto_front",
          [](const std::string& map) {
              return dst::dst_true_pareto_front(dst::DstMap::by_name(map)).points;
          },
          py::arg("map") = "standard");

    py::class_<tndp::CityGrid, std::shared_ptr<tndp::CityGrid>>(m, "CityGrid")
        .def(py::init([](std::size_t rows, std::size_t cols, std::vector<double> od,
                         std::vector<int> groups) {
                 return std::make_shared<tndp::CityGrid>(rows, cols, std::move(od),
                                                         std::move(groups));
             }),
             py::arg("rows"), py::arg("cols"), py::arg("od"), py::arg("groups"))
        .def_property_readonly("rows", &tndp::CityGrid::rows)
        .def_property_readonly("cols", &tndp::CityGrid::cols)
        .def_property_readonly("n_groups", &tndp::CityGrid::n_groups)
        .def_property_readonly("group_totals", &tndp::CityGrid::group_totals)
        .def("od", &tndp::CityGrid::od)
        .def("group", &tndp::CityGrid::group)
        .def("line_return", [](const tndp::CityGrid& c, const std::vector<std::size_t>& line) {
            return tndp::line_return(c, line);
        });
    m.def("load_city",
          [](std::size_t rows, std::size_t cols, const std::filesystem::path& od_file,
             const std::filesystem::path& groups_file,
             std::optional<std::filesystem::path> mask_file, std::optional<std::size_t> n_groups) {
              tndp::CityFiles f;
              f.rows = rows;
              f.cols = cols;
              f.od_file = od_file;
              f.groups_file = groups_file;
              f.mask_file = mask_file;
              f.n_groups = n_groups;
              return std::make_shared<tndp::CityGrid>(tndp::load_city(f));
          },
          py::arg("rows"), py::arg("cols"), py::arg("od_file"), py::arg("groups_file"),
          py::arg("mask_file") = py::none(), py::arg("n_groups") = py::none());
    m.def("mobility_law_od",
          [](const std::vector<double>& density, std::size_t rows, std::size_t cols,
             double cell_radius, double f_min, double f_max) {
              return tndp::estimate_od_mobility_law(density, rows, cols, {},
                                                    {cell_radius, f_min, f_max});
          },
          py::arg("density"), py::arg("rows"), py::arg("cols"), py::arg("cell_radius") = 1.0,
          py::arg("f_min") = 1.0 / 7.0, py::arg("f_max") = 7.0);

    py::class_<tndp::TndpEnv>(m, "TransitEnv")
        .def(py::init([](std::shared_ptr<tndp::CityGrid> city, std::size_t start,
                         std::size_t episode_len) {
                 return tndp::TndpEnv(std::move(city), start, episode_len);
             }),
             py::arg("city"), py::arg("start_cell"), py::arg("episode_len"))
        .def("reset", [](tndp::TndpEnv& e) { e.reset(); return e.observation(); })
        .def("step", [](tndp::TndpEnv& e, std::size_t a) { return step_tuple(e.step(a)); })
        .def("observation", &tndp::TndpEnv::observation)
        .def("action_mask", [](const tndp::TndpEnv& e) { return mask_list(e); })
        .def_property_readonly("line", [](const tndp::TndpEnv& e) { return e.state().line; });

    m.def("train_json", &train_json, py::arg("config"), py::arg("base_dir"),
          py::arg("seed") = py::none(), py::arg("lam") = py::none());
}

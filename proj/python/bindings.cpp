#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wedgemix/exact_maps.hpp"
#include "wedgemix/experiment.hpp"
#include "wedgemix/io.hpp"
#include "wedgemix/mixing.hpp"

namespace py = pybind11;
using namespace wedgemix;

namespace {

ScheduleConfig make_schedule(const std::string& flow_type, int n_exp, std::int64_t tau,
                             std::optional<std::vector<std::int64_t>> time_set,
                             std::uint64_t master_seed, std::int64_t run_index) {
    ScheduleConfig s;
    s.flow_type = parse_flow_type(flow_type);
    s.n_exp = GridExponent{n_exp};
    s.tau = tau;
    if (time_set) s.time_set = FlowTimeSet(std::move(*time_set));
    s.master_seed = master_seed;
    s.run_index = run_index;
    return s;
}

RunLimits make_limits(std::int64_t max_steps, const std::string& mode, std::int64_t horizon) {
    RunLimits limits;
    limits.max_steps = max_steps;
    if (mode == "standard") {
        limits.mode = RunMode::Standard;
    } else if (mode == "extended") {
        limits.mode = RunMode::Extended;
    } else {
        throw std::invalid_argument("mode must be standard or extended");
    }
    limits.horizon = horizon;
    return limits;
}

AnalysisParams make_params(std::pair<std::int64_t, std::int64_t> kappa,
                           std::int64_t regression_start, std::int64_t stop_offset) {
    AnalysisParams params;
    params.kappa = Kappa{kappa.first, kappa.second};
    params.regression_start = regression_start;
    params.stop_offset = stop_offset;
    return params;
}

Engine make_engine(const std::string& name) {
    if (name == "auto") return Engine::Auto;
    if (name == "packed") return Engine::Packed;
    if (name == "reference") return Engine::Reference;
    throw std::invalid_argument("engine must be auto, packed or reference");
}

py::dict run_to_dict(const RunResult& run) {
    py::dict d;
    d["run_index"] = run.config.run_index;
    d["run_seed"] = run.run_seed;
    d["trajectory"] = run.trajectory;
    d["completed"] = run.completed;
    d["degenerate"] = run.degenerate;
    d["t10"] = run.t10 ? py::object(py::int_(*run.t10)) : py::none();
    d["rate"] = run.rate ? py::object(py::float_(*run.rate)) : py::none();
    d["r_squared"] = run.r_squared ? py::object(py::float_(*run.r_squared)) : py::none();
    py::list blocks;
    for (const Block& b : run.schedule) {
        blocks.append(py::make_tuple(b.index,
                                     b.direction == Direction::Horizontal ? "H" : "V",
                                     b.phase.w, b.duration));
    }
    d["schedule"] = blocks;
    return d;
}

Field field_from_rows(const std::vector<std::vector<int>>& rows) {
    const auto side = static_cast<std::int64_t>(rows.size());
    if (side < 2 || !std::has_single_bit(static_cast<std::uint64_t>(side))) {
        throw std::invalid_argument("need a 2^N x 2^N value grid with N >= 1");
    }
    const int n = std::countr_zero(static_cast<std::uint64_t>(side));
    Field f(GridExponent{n});
    for (std::int64_t j = 0; j < side; ++j) {
        if (static_cast<std::int64_t>(rows[j].size()) != side) {
            throw std::invalid_argument("value grid is not square");
        }
        for (std::int64_t i = 0; i < side; ++i) {
            const int v = rows[j][i];
            if (v < -127 || v > 127) throw std::invalid_argument("values must fit in int8");
            f.set(i, j, static_cast<std::int8_t>(v));
        }
    }
    return f;
}

py::int_ to_py_int(const BigInt& v) {
    return py::module_::import("builtins").attr("int")(v.str()).cast<py::int_>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "passive-scalar mixing under alternating wedge shear flows";
    m.attr("generator_id") = kGeneratorId;

    m.def("derive_run_seed", &derive_run_seed, py::arg("master_seed"), py::arg("run_index"));

    m.def(
        "fit_rate",
        [](const std::vector<double>& values, std::int64_t start, std::int64_t t10) {
            const RateFit fit = fit_rate(values, start, t10);
            return py::make_tuple(fit.rate, fit.r_squared);
        },
        py::arg("neg_log2_scale"), py::arg("regression_start"), py::arg("t10"),
        "Least-squares decay rate and r^2 over the window [regression_start, t10].");

    m.def(
        "mixing_exponent",
        [](const std::vector<std::vector<int>>& rows,
           std::pair<std::int64_t, std::int64_t> kappa) {
            const Field f = field_from_rows(rows);
            const BlockSumPyramid p(f);
            return mixing_scale_exponent(p, Kappa{kappa.first, kappa.second}, f.sup_norm());
        },
        py::arg("rows"), py::arg("kappa") = std::pair<std::int64_t, std::int64_t>{1, 3},
        "Finest dyadic level at which the value grid rows[j][i] is mixed.");

    m.def(
        "simulate",
        [](const std::string& flow_type, int n_exp, std::int64_t tau,
           std::optional<std::vector<std::int64_t>> time_set, std::uint64_t master_seed,
           std::int64_t run_index, std::pair<std::int64_t, std::int64_t> kappa,
           std::int64_t regression_start, std::int64_t stop_offset, std::int64_t max_steps,
           const std::string& mode, std::int64_t horizon, const std::string& engine) {
            const RunResult run = run_simulation(
                make_schedule(flow_type, n_exp, tau, std::move(time_set), master_seed,
                              run_index),
                make_limits(max_steps, mode, horizon),
                make_params(kappa, regression_start, stop_offset), make_engine(engine));
            return run_to_dict(run);
        },
        py::arg("flow_type"), py::arg("n_exp"), py::arg("tau"),
        py::arg("time_set") = py::none(), py::arg("master_seed") = 0,
        py::arg("run_index") = 0, py::arg("kappa") = std::pair<std::int64_t, std::int64_t>{1, 3},
        py::arg("regression_start") = 8, py::arg("stop_offset") = 5,
        py::arg("max_steps") = 400, py::arg("mode") = "standard", py::arg("horizon") = 0,
        py::arg("engine") = "auto");

    m.def(
        "ensemble",
        [](const std::string& flow_type, int n_exp, std::int64_t tau, std::int64_t runs,
           std::optional<std::vector<std::int64_t>> time_set, std::uint64_t master_seed,
           std::pair<std::int64_t, std::int64_t> kappa, std::int64_t regression_start,
           std::int64_t stop_offset, std::int64_t max_steps, const std::string& mode,
           std::int64_t horizon, const std::string& engine, bool keep_runs) {
            const EnsembleResult result = run_ensemble(
                make_schedule(flow_type, n_exp, tau, std::move(time_set), master_seed, 0),
                runs, make_limits(max_steps, mode, horizon),
                make_params(kappa, regression_start, stop_offset), make_engine(engine));
            py::dict d;
            d["runs_requested"] = result.summary.runs_requested;
            d["runs_completed"] = result.summary.runs_completed;
            d["runs_with_rate"] = result.summary.runs_with_rate;
            d["mean_rate"] = result.summary.mean_rate;
            d["std_rate"] = result.summary.std_rate;
            d["mean_r2"] = result.summary.mean_r2;
            d["std_r2"] = result.summary.std_r2;
            d["mean_t10"] = result.summary.mean_t10;
            d["std_t10"] = result.summary.std_t10;
            d["summary_csv"] = summary_csv(result);
            if (keep_runs) {
                py::list run_dicts;
                for (const RunResult& run : result.runs) run_dicts.append(run_to_dict(run));
                d["runs"] = run_dicts;
            }
            return d;
        },
        py::arg("flow_type"), py::arg("n_exp"), py::arg("tau"), py::arg("runs"),
        py::arg("time_set") = py::none(), py::arg("master_seed") = 0,
        py::arg("kappa") = std::pair<std::int64_t, std::int64_t>{1, 3},
        py::arg("regression_start") = 8, py::arg("stop_offset") = 5,
        py::arg("max_steps") = 400, py::arg("mode") = "standard", py::arg("horizon") = 0,
        py::arg("engine") = "auto", py::arg("keep_runs") = false);

    m.def(
        "orbit_jacobian",
        [](std::pair<std::pair<std::int64_t, std::int64_t>,
                     std::pair<std::int64_t, std::int64_t>>
               point,
           const std::vector<std::tuple<std::string, std::pair<std::int64_t, std::int64_t>,
                                        std::int64_t>>& word) {
            ExactPoint p{Rational(BigInt(point.first.first), BigInt(point.first.second)),
                         Rational(BigInt(point.second.first), BigInt(point.second.second))};
            MapWord w;
            for (const auto& [dir, omega, tau] : word) {
                if (dir != "H" && dir != "V") {
                    throw std::invalid_argument("direction must be H or V");
                }
                w.push_back({dir == "H" ? Direction::Horizontal : Direction::Vertical,
                             Rational(BigInt(omega.first), BigInt(omega.second)), tau});
            }
            const BranchMatrix jac = orbit_jacobian(p, w);
            return py::make_tuple(py::make_tuple(to_py_int(jac.a), to_py_int(jac.b)),
                                  py::make_tuple(to_py_int(jac.c), to_py_int(jac.d)));
        },
        py::arg("point"), py::arg("word"),
        "Exact orbit Jacobian; point coordinates and shear centers are (num, den) pairs.");

    m.def(
        "jordan_check",
        [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
            const JordanReport r = jordan_check(BranchMatrix{a, b, c, d});
            py::dict out;
            out["det_one"] = r.det_one;
            out["trace_two"] = r.trace_two;
            out["not_identity"] = r.not_identity;
            out["similar_to_jordan_block"] = r.similar_to_jordan_block;
            out["ones_vector_fixed"] = r.ones_vector_fixed;
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));
}

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncmap/commands.hpp"
#include "ncmap/config.hpp"
#include "ncmap/spectral.hpp"
#include "ncmap/verify.hpp"

namespace py = pybind11;
using namespace ncmap;

namespace {

TargetSpec make_target(const std::string& family, int n, double a, double b, double c,
                       const std::vector<double>& gamma, const std::optional<Eigen::MatrixXd>& q) {
    TargetSpec t{.family = parse_target_family(family), .n = n, .a = a, .b = b, .c = c, .gamma = gamma};
    t.q_matrix = q;
    return t;
}

py::dict exploration_dict(const ExplorationMatrix& em) {
    py::dict d;
    d["w"] = em.w;
    d["m"] = em.m;
    d["sigma"] = em.sigma;
    d["case"] = em.sigma_case;
    d["u"] = em.u_factor;
    d["v"] = em.v_factor;
    if (em.target) d["target"] = em.target->materialize(em.params);
    return d;
}

RunConfig config_for(const std::optional<std::string>& preset, const std::vector<std::string>& overrides) {
    CommandOptions opts;
    opts.preset = preset;
    opts.overrides = overrides;
    return resolve_config(opts);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Derivative-free optimization with periodic non-commutative exploration maps";

    static py::exception<Error> ncmap_error(m, "NcmapError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = ncmap_error;
            py::object inst = err(e.what());
            inst.attr("kind") = error_kind_name(e.kind());
            inst.attr("exit_code") = exit_code_for(e.kind());
            PyErr_SetObject(err.ptr(), inst.ptr());
        }
    });

    m.def("build_P", [](int size, double a1, double a2) { return build_P({a1, a2}, size); },
          py::arg("m"), py::arg("alpha1") = 0.5, py::arg("alpha2") = 0.5);
    m.def("build_C", &build_C, py::arg("m"));
    m.def("build_P_tilde", [](int size, double a1, double a2) { return build_P_tilde({a1, a2}, size); },
          py::arg("m"), py::arg("alpha1") = 0.5, py::arg("alpha2") = 0.5);
    m.def("compute_T_direct",
          [](const Eigen::MatrixXd& W, double a1, double a2) { return compute_T_direct(W, {a1, a2}); },
          py::arg("W"), py::arg("alpha1") = 0.5, py::arg("alpha2") = 0.5);
    m.def("compute_T_via_P",
          [](const Eigen::MatrixXd& W, double a1, double a2) { return compute_T_via_P(W, {a1, a2}); },
          py::arg("W"), py::arg("alpha1") = 0.5, py::arg("alpha2") = 0.5);

    m.def("skew_deltas", &skew_deltas, py::arg("C"));
    m.def(
        "skew_block_diagonalize",
        [](const Eigen::MatrixXd& C) {
            auto bs = skew_block_diagonalize(C);
            return py::make_tuple(bs.theta, bs.deltas(), bs.zero_count);
        },
        py::arg("C"), "returns (theta, deltas, zero_count)");
    m.def("orthogonality_defect", &orthogonality_defect, py::arg("M"));
    m.def("calc_theta", &calc_theta, py::arg("C"), py::arg("omega_hat"));
    m.def(
        "check_interlacing",
        [](int m_max) {
            auto r = check_interlacing(m_max);
            return py::make_tuple(r.ok(), r.min_margin);
        },
        py::arg("m_max") = 200, "returns (ok, min_margin)");

    m.def(
        "target_matrix",
        [](const std::string& family, int n, double a, double b, double c, const std::vector<double>& gamma,
           const std::optional<Eigen::MatrixXd>& q, double a1, double a2) {
            return make_target(family, n, a, b, c, gamma, q).materialize({a1, a2});
        },
        py::arg("family"), py::arg("n"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 0.0,
        py::arg("gamma") = std::vector<double>{}, py::arg("q") = std::nullopt, py::arg("alpha1") = 0.5,
        py::arg("alpha2") = 0.5);
    m.def(
        "construct_W",
        [](const std::string& family, int n, const std::vector<double>& sigma_free, double a1, double a2,
           double a, double b, double c, const std::vector<double>& gamma,
           const std::optional<Eigen::MatrixXd>& q, int m_cap) {
            auto em = construct_W(make_target(family, n, a, b, c, gamma, q), {a1, a2}, sigma_free,
                                  {.m_cap = m_cap});
            return exploration_dict(em);
        },
        py::arg("family"), py::arg("n"), py::arg("sigma_free") = std::vector<double>{},
        py::arg("alpha1") = 0.5, py::arg("alpha2") = 0.5, py::arg("a") = 1.0, py::arg("b") = 1.0,
        py::arg("c") = 0.0, py::arg("gamma") = std::vector<double>{}, py::arg("q") = std::nullopt,
        py::arg("m_cap") = 0);
    m.def(
        "reference_coordinate_sequence",
        [](int n) { return reference_coordinate_sequence(n).w; }, py::arg("n"));

    m.def(
        "evaluate_pair",
        [](const std::string& family, double z, double a, double b, double c, double phi, double r0,
           double mu, int sign) {
            auto gp = make_pair(parse_pair_family(family),
                                {.a = a, .b = b, .c = c, .phi = phi, .r0 = r0, .mu_gain = mu, .sign = sign});
            auto v = evaluate(gp, z);
            return py::make_tuple(v.f, v.g, v.df, v.dg);
        },
        py::arg("family"), py::arg("z"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 0.0,
        py::arg("phi") = 0.0, py::arg("r0") = 1.0, py::arg("mu") = 1.0, py::arg("sign") = 1,
        "returns (f, g, df, dg)");

    m.def("shoelace_areas", &shoelace_areas, py::arg("W"));
    m.def(
        "brockett_run",
        [](const Eigen::MatrixXd& W, double a1, double a2) {
            auto st = brockett_run(W, {a1, a2});
            return py::make_tuple(st.y, st.Z);
        },
        py::arg("W"), py::arg("alpha1") = 0.5, py::arg("alpha2") = 0.5, "returns (y_m, Z_m)");
    m.def(
        "catalog_sweep",
        [](int threads) {
            auto r = catalog_sweep(default_catalog_grid(), 1e-7, threads);
            py::dict d;
            d["passed"] = r.report.passed;
            d["admissible"] = r.admissible;
            d["rejected_as_expected"] = r.rejected_as_expected;
            d["line"] = r.report.line();
            return d;
        },
        py::arg("threads") = 1);

    m.def("preset_ids", &preset_ids);
    m.def("preset_text", &preset_text, py::arg("id"));
    m.def(
        "config_text",
        [](const std::optional<std::string>& preset, const std::vector<std::string>& overrides) {
            return serialize_config(config_for(preset, overrides));
        },
        py::arg("preset") = std::nullopt, py::arg("overrides") = std::vector<std::string>{});
    m.def(
        "run_preset",
        [](const std::string& preset, const std::vector<std::string>& overrides) {
            RunConfig cfg = config_for(preset, overrides);
            validate(cfg);
            auto em = construct_W(cfg.target(), cfg.params(), cfg.sigma_free, {.m_cap = cfg.m_cap});
            StepSchedule s = cfg.schedule == ScheduleKind::Harmonic ? harmonic_schedule(cfg.h0, em.m)
                                                                    : constant_schedule(cfg.h0);
            ObjectivePort J = cfg.objective_port();
            RunRecord rec;
            {
                py::gil_scoped_release release;
                rec = run({em.w, cfg.generating_pair(), cfg.params()}, s, cfg.stop, J, cfg.start());
            }
            Eigen::MatrixXd xs(static_cast<long>(rec.iterates.size()), cfg.n);
            for (std::size_t k = 0; k < rec.iterates.size(); ++k) xs.row(static_cast<long>(k)) = rec.iterates[k];
            py::dict d;
            d["m"] = em.m;
            d["w"] = em.w;
            d["iterates"] = xs;
            d["objective"] = rec.objective_values;
            d["h"] = rec.h_trace;
            d["evals"] = rec.evals_cum.back();
            d["stop_reason"] = rec.stop_reason;
            return d;
        },
        py::arg("preset"), py::arg("overrides") = std::vector<std::string>{});
}

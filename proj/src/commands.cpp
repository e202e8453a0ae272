#include "ncmap/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "ncmap/sequence.hpp"
#include "ncmap/verify.hpp"

namespace ncmap {

namespace {

const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> table = {
#include "presets.inc"
    };
    return table;
}

std::string fmt_vec(const Eigen::VectorXd& v) {
    std::ostringstream os;
    os << std::setprecision(10);
    for (long i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
    return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
    return fmt_vec(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size())));
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write '" + p.string() + "'");
    return f;
}

ExplorationMatrix build(const RunConfig& cfg) {
    validate(cfg);
    ConstructOptions opts;
    opts.m_cap = cfg.m_cap;
    return construct_W(cfg.target(), cfg.params(), cfg.sigma_free, opts);
}

RunRecord execute(const RunConfig& cfg, const ExplorationMatrix& em) {
    RunSetup setup{em.w, cfg.generating_pair(), cfg.params()};
    StepSchedule sched = cfg.schedule == ScheduleKind::Harmonic ? harmonic_schedule(cfg.h0, em.m)
                                                                : constant_schedule(cfg.h0);
    ObjectivePort J = cfg.objective_port();
    return run(setup, sched, cfg.stop, J, cfg.start());
}

void summarize_run(std::ostream& out, const ExplorationMatrix& em, const RunRecord& rec) {
    out << "m=" << em.m << "\n";
    out << "iterations=" << rec.iterates.size() - 1 << "\n";
    out << "stop=" << rec.stop_reason << "\n";
    out << "x_final=" << fmt_vec(rec.iterates.back()) << "\n";
    out << "J_final=" << std::setprecision(10) << rec.objective_values.back() << "\n";
    out << "evals=" << rec.evals_cum.back() << "\n";
}

bool two_point(const RunConfig& cfg) { return cfg.alpha1 == 0.5 && cfg.alpha2 == 0.5; }

}  // namespace

std::vector<std::string> preset_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, text] : presets()) ids.push_back(id);
    return ids;
}

const std::string& preset_text(const std::string& id) {
    auto it = presets().find(id);
    if (it == presets().end()) throw Error(ErrorKind::ConfigError, "unknown preset '" + id + "'");
    return it->second;
}

RunConfig preset_config(const std::string& id) { return parse_config_text(preset_text(id)); }

RunConfig resolve_config(const CommandOptions& o) {
    RunConfig cfg;
    if (o.preset) cfg = preset_config(*o.preset);
    if (o.config_path) cfg = parse_config_file(*o.config_path, cfg);
    if (o.seed) cfg.seed = *o.seed;
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.sigma) apply_override(cfg, "sigma_free", *o.sigma);
    for (const auto& kv : o.overrides) apply_override(cfg, kv);
    return cfg;
}

int cmd_construct(const RunConfig& cfg, std::ostream& out) {
    ExplorationMatrix em = build(cfg);
    Eigen::MatrixXd Td = em.target->materialize(cfg.params());
    double resid = (compute_T_direct(em.w, cfg.params()) - Td).cwiseAbs().maxCoeff();
    auto path = out_path(cfg, "W.txt");
    {
        auto f = open_out(path);
        write_W(f, em);
    }
    out << "m=" << em.m << "\n";
    out << "case=" << em.sigma_case << "\n";
    out << "sigma=" << fmt_list(em.sigma) << "\n";
    out << "residual=" << std::setprecision(3) << resid << "\n";
    out << "W=" << path.string() << "\n";
    return 0;
}

int cmd_run(const RunConfig& cfg, std::ostream& out) {
    ExplorationMatrix em = build(cfg);
    RunRecord rec = execute(cfg, em);
    auto f = open_out(out_path(cfg, "run.csv"));
    write_run_csv(f, rec);
    summarize_run(out, em, rec);
    return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    ExplorationMatrix em = build(cfg);
    RunRecord rec = execute(cfg, em);
    {
        auto f = open_out(out_path(cfg, "trajectory.csv"));
        write_run_csv(f, rec);
    }
    {
        auto f = open_out(out_path(cfg, "W.txt"));
        write_W(f, em);
    }
    {
        // polygon corners of the exploration partial sums
        auto f = open_out(out_path(cfg, "polygon.csv"));
        const long d = em.w.rows();
        f << "l";
        for (long i = 1; i <= d; ++i) f << ",s_" << i;
        f << "\n" << std::setprecision(17);
        Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
        for (long l = 0; l <= em.w.cols(); ++l) {
            f << l;
            for (long i = 0; i < d; ++i) f << ',' << s(i);
            f << '\n';
            if (l < em.w.cols()) s += em.w.col(l);
        }
    }
    if (two_point(cfg)) {
        Eigen::MatrixXd A = shoelace_areas(em.w);
        Eigen::MatrixXd T = compute_T_direct(em.w, cfg.params());
        auto f = open_out(out_path(cfg, "areas.csv"));
        f << "p,q,area,T\n" << std::setprecision(17);
        for (long p = 0; p < A.rows(); ++p)
            for (long q = 0; q < A.cols(); ++q)
                f << p + 1 << ',' << q + 1 << ',' << A(p, q) << ',' << T(p, q) << '\n';
    }
    summarize_run(out, em, rec);
    return 0;
}

int cmd_verify(const std::string& suite, const RunConfig& cfg, int m_max, std::ostream& out) {
    std::vector<VerificationReport> reps;
    if (suite == "interlacing") {
        reps.push_back(interlacing_report(m_max));
    } else if (suite == "catalog") {
        unsigned hw = std::thread::hardware_concurrency();
        CatalogResult res = catalog_sweep(default_catalog_grid(), 1e-7,
                                          static_cast<int>(std::max(1u, std::min(hw, 8u))));
        for (const auto& o : res.outcomes) {
            if (o.status != "pass" && o.status != "expected-rejection") {
                out << "# " << o.id << ": " << o.status << " " << o.message << "\n";
            }
        }
        res.report.note = std::to_string(res.admissible) + " admissible, " +
                          std::to_string(res.rejected_as_expected) + " expected rejections";
        reps.push_back(res.report);
    } else if (suite == "shoelace") {
        if (!two_point(cfg)) {
            throw Error(ErrorKind::ConfigError,
                        "shoelace areas are only defined for alpha = [1/2, 1/2]");
        }
        ExplorationMatrix em = build(cfg);
        reps.push_back(shoelace_check(em.w));
        // random zero-sum sweep
        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<int> nd(1, 3), md(2, 16);
        std::normal_distribution<double> g;
        VerificationReport sweep;
        sweep.check_name = "shoelace_random";
        sweep.threshold = 1e-10;
        for (int t = 0; t < 200; ++t) {
            int n = nd(rng), m = md(rng);
            Eigen::MatrixXd W(2 * n, m);
            for (long i = 0; i < W.size(); ++i) W.data()[i] = g(rng);
            W.colwise() -= W.rowwise().mean();
            sweep.residuals.push_back({"W" + std::to_string(t), shoelace_check(W).max_residual()});
        }
        sweep.finalize();
        reps.push_back(sweep);
    } else if (suite == "brockett") {
        ExplorationMatrix em = build(cfg);
        reps.push_back(brockett_check(em.w, em.target->materialize(cfg.params()), cfg.params()));
    } else if (suite == "order") {
        ExplorationMatrix em = build(cfg);
        ObjectivePort J = cfg.objective_port();
        GeneratingPair gp = cfg.generating_pair();
        reps.push_back(gradient_order_check(em.w, gp, cfg.params(), J, cfg.start()));
        // corrupted W: the heaviest column removed
        Eigen::MatrixXd bad = em.w;
        Eigen::Index col = 0;
        bad.colwise().norm().maxCoeff(&col);
        bad.col(col).setZero();
        OrderFit fit = fit_gradient_order(bad, gp, cfg.params(), J, cfg.start(),
                                          {0.1, 0.05, 0.025, 0.0125});
        VerificationReport neg;
        neg.check_name = "gradient_order_negative_control";
        neg.threshold = 1.2;
        neg.residuals.push_back({"slope", fit.slope});
        neg.finalize();
        reps.push_back(neg);
    } else {
        throw Error(ErrorKind::ConfigError, "unknown verify suite '" + suite + "'");
    }
    bool ok = true;
    for (const auto& r : reps) {
        out << r.line() << "\n";
        if (!r.note.empty()) out << "# " << r.note << "\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace ncmap

#include "ncmap/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "ncmap/errors.hpp"

namespace ncmap {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::string t = trim(v);
    double out = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size()) {
        throw Error(ErrorKind::ConfigError, key + ": not a number '" + v + "'");
    }
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    std::string t = trim(v);
    long out = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size()) {
        throw Error(ErrorKind::ConfigError, key + ": not an integer '" + v + "'");
    }
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string t = trim(v);
    if (t.empty() || t == "none") return out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    if (v.empty()) return "none";
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

ObjectiveKind parse_objective(const std::string& s) {
    if (s == "quadratic") return ObjectiveKind::Quadratic;
    if (s == "ripple") return ObjectiveKind::Ripple;
    if (s == "norm") return ObjectiveKind::Norm;
    throw Error(ErrorKind::ConfigError, "unknown objective.kind '" + s + "'");
}

}  // namespace

const char* objective_kind_name(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::Quadratic: return "quadratic";
        case ObjectiveKind::Ripple: return "ripple";
        case ObjectiveKind::Norm: return "norm";
    }
    return "?";
}

TargetSpec RunConfig::target() const {
    TargetSpec t;
    t.family = target_family;
    t.n = n;
    t.a = target_a;
    t.b = target_b;
    t.c = target_c;
    t.gamma = target_gamma;
    if (!target_q.empty()) {
        if (static_cast<int>(target_q.size()) != n * n) {
            throw Error(ErrorKind::ConfigError, "target.q needs n*n entries");
        }
        Eigen::MatrixXd Q(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Q(i, j) = target_q[static_cast<std::size_t>(i * n + j)];
        t.q_matrix = Q;
    }
    return t;
}

GeneratingPair RunConfig::generating_pair() const { return make_pair(pair_family, pair); }

Eigen::VectorXd RunConfig::start() const {
    if (x0.empty()) return Eigen::VectorXd::Zero(n);
    if (static_cast<int>(x0.size()) != n) throw Error(ErrorKind::ConfigError, "run.x0 needs n entries");
    return Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
}

ObjectivePort RunConfig::objective_port() const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    if (!objective.center.empty()) {
        if (static_cast<int>(objective.center.size()) != n) {
            throw Error(ErrorKind::ConfigError, "objective.center needs n entries");
        }
        c = Eigen::Map<const Eigen::VectorXd>(objective.center.data(), n);
    }
    NoiseSpec noise{noise_sigma, seed};
    const double a = objective.amp, w = objective.freq * std::numbers::pi;
    switch (objective.kind) {
        case ObjectiveKind::Quadratic:
            return ObjectivePort([c](const Eigen::VectorXd& x) { return (x - c).squaredNorm(); },
                                 [c](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * (x - c); },
                                 noise);
        case ObjectiveKind::Ripple:
            return ObjectivePort(
                [c, a, w](const Eigen::VectorXd& x) {
                    return (x - c + a * (w * x.array()).sin().matrix()).squaredNorm();
                },
                [c, a, w](const Eigen::VectorXd& x) -> Eigen::VectorXd {
                    Eigen::ArrayXd r = (x - c + a * (w * x.array()).sin().matrix()).array();
                    return (2.0 * r * (1.0 + a * w * (w * x.array()).cos())).matrix();
                },
                noise);
        case ObjectiveKind::Norm:
            return ObjectivePort([c](const Eigen::VectorXd& x) { return (x - c).norm(); },
                                 [c](const Eigen::VectorXd& x) -> Eigen::VectorXd {
                                     double r = (x - c).norm();
                                     return r > 0.0 ? Eigen::VectorXd((x - c) / r)
                                                    : Eigen::VectorXd::Zero(x.size());
                                 },
                                 noise);
    }
    throw Error(ErrorKind::ConfigError, "objective kind");
}

void apply_override(RunConfig& c, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "n") {
        c.n = static_cast<int>(to_long(key, v));
        if (c.n < 1) throw Error(ErrorKind::ConfigError, "n must be >= 1");
    } else if (key == "map.alpha1") c.alpha1 = to_double(key, v);
    else if (key == "map.alpha2") c.alpha2 = to_double(key, v);
    else if (key == "target.family") c.target_family = parse_target_family(v);
    else if (key == "target.a") c.target_a = to_double(key, v);
    else if (key == "target.b") c.target_b = to_double(key, v);
    else if (key == "target.c") c.target_c = to_double(key, v);
    else if (key == "target.gamma") c.target_gamma = to_list(key, v);
    else if (key == "target.q") c.target_q = to_list(key, v);
    else if (key == "sigma_free") c.sigma_free = to_list(key, v);
    else if (key == "construct.m_cap") c.m_cap = static_cast<int>(to_long(key, v));
    else if (key == "pair.family") c.pair_family = parse_pair_family(v);
    else if (key == "pair.a") c.pair.a = to_double(key, v);
    else if (key == "pair.b") c.pair.b = to_double(key, v);
    else if (key == "pair.c") c.pair.c = to_double(key, v);
    else if (key == "pair.phi") c.pair.phi = to_double(key, v);
    else if (key == "pair.r0") c.pair.r0 = to_double(key, v);
    else if (key == "pair.mu") c.pair.mu_gain = to_double(key, v);
    else if (key == "pair.sign") {
        long s = to_long(key, v);
        if (s != 1 && s != -1) throw Error(ErrorKind::ConfigError, "pair.sign must be 1 or -1");
        c.pair.sign = static_cast<int>(s);
    } else if (key == "objective.kind") c.objective.kind = parse_objective(v);
    else if (key == "objective.center") c.objective.center = to_list(key, v);
    else if (key == "objective.amp") c.objective.amp = to_double(key, v);
    else if (key == "objective.freq") c.objective.freq = to_double(key, v);
    else if (key == "run.h0") c.h0 = to_double(key, v);
    else if (key == "run.schedule") {
        if (v == "constant") c.schedule = ScheduleKind::Constant;
        else if (v == "harmonic") c.schedule = ScheduleKind::Harmonic;
        else throw Error(ErrorKind::ConfigError, "run.schedule must be constant or harmonic");
    } else if (key == "run.x0") c.x0 = to_list(key, v);
    else if (key == "stop.max_iters") c.stop.max_iters = to_long(key, v);
    else if (key == "stop.max_evals") c.stop.max_evals = to_long(key, v);
    else if (key == "stop.j_threshold") {
        if (v == "none") c.stop.j_threshold.reset();
        else c.stop.j_threshold = to_double(key, v);
    } else if (key == "stop.stall_tol") c.stop.stall_tol = to_double(key, v);
    else if (key == "stop.stall_patience") c.stop.stall_patience = static_cast<int>(to_long(key, v));
    else if (key == "noise.sigma") c.noise_sigma = to_double(key, v);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_long(key, v));
    else if (key == "output.dir") c.out_dir = v;
    else throw Error(ErrorKind::ConfigError, "unknown key '" + key + "'");
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw Error(ErrorKind::ConfigError, "override must be key=value: '" + assignment + "'");
    }
    apply_override(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

RunConfig parse_config(std::istream& is, RunConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            apply_override(base, line);
        } catch (const Error& e) {
            throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::istringstream is(text);
    return parse_config(is, std::move(base));
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot open config '" + path + "'");
    return parse_config(f, std::move(base));
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "n=" << c.n << "\n"
       << "map.alpha1=" << fmt(c.alpha1) << "\n"
       << "map.alpha2=" << fmt(c.alpha2) << "\n"
       << "target.family=" << family_name(c.target_family) << "\n"
       << "target.a=" << fmt(c.target_a) << "\n"
       << "target.b=" << fmt(c.target_b) << "\n"
       << "target.c=" << fmt(c.target_c) << "\n"
       << "target.gamma=" << fmt_list(c.target_gamma) << "\n"
       << "target.q=" << fmt_list(c.target_q) << "\n"
       << "sigma_free=" << fmt_list(c.sigma_free) << "\n"
       << "construct.m_cap=" << c.m_cap << "\n"
       << "pair.family=" << pair_family_name(c.pair_family) << "\n"
       << "pair.a=" << fmt(c.pair.a) << "\n"
       << "pair.b=" << fmt(c.pair.b) << "\n"
       << "pair.c=" << fmt(c.pair.c) << "\n"
       << "pair.phi=" << fmt(c.pair.phi) << "\n"
       << "pair.r0=" << fmt(c.pair.r0) << "\n"
       << "pair.mu=" << fmt(c.pair.mu_gain) << "\n"
       << "pair.sign=" << c.pair.sign << "\n"
       << "objective.kind=" << objective_kind_name(c.objective.kind) << "\n"
       << "objective.center=" << fmt_list(c.objective.center) << "\n"
       << "objective.amp=" << fmt(c.objective.amp) << "\n"
       << "objective.freq=" << fmt(c.objective.freq) << "\n"
       << "run.h0=" << fmt(c.h0) << "\n"
       << "run.schedule=" << (c.schedule == ScheduleKind::Harmonic ? "harmonic" : "constant") << "\n"
       << "run.x0=" << fmt_list(c.x0) << "\n"
       << "stop.max_iters=" << c.stop.max_iters << "\n"
       << "stop.max_evals=" << c.stop.max_evals << "\n"
       << "stop.j_threshold=" << (c.stop.j_threshold ? fmt(*c.stop.j_threshold) : "none") << "\n"
       << "stop.stall_tol=" << fmt(c.stop.stall_tol) << "\n"
       << "stop.stall_patience=" << c.stop.stall_patience << "\n"
       << "noise.sigma=" << fmt(c.noise_sigma) << "\n"
       << "seed=" << c.seed << "\n"
       << "output.dir=" << c.out_dir << "\n";
    return os.str();
}

void validate(const RunConfig& c) {
    MapParameters p = c.params();
    TargetSpec t = c.target();
    if (is_skew_family(t.family) != p.skew_regime()) {
        throw Error(ErrorKind::IncompatibleParams,
                    std::string(family_name(t.family)) +
                        (p.skew_regime() ? " needs 2*alpha2 - (alpha1+alpha2)^2 != 0"
                                         : " needs 2*alpha2 - (alpha1+alpha2)^2 = 0"));
    }
    if (t.family != TargetFamily::TdE || !t.gamma.empty()) t.materialize(p);
    c.generating_pair();
    c.start();
    c.objective_port();
    if (!(c.h0 > 0.0)) throw Error(ErrorKind::ConfigError, "run.h0 must be > 0");
    if (c.noise_sigma < 0.0) throw Error(ErrorKind::ConfigError, "noise.sigma must be >= 0");
}

}  // namespace ncmap

#include "ncmap/engine.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "ncmap/errors.hpp"

namespace ncmap {

ObjectivePort::ObjectivePort(Fn fn, GradFn grad, NoiseSpec noise)
    : fn_(std::move(fn)), grad_(std::move(grad)), noise_(noise), rng_(noise.seed) {
    if (!fn_) throw Error(ErrorKind::ConfigError, "objective callable is empty");
}

double ObjectivePort::evaluate(const Eigen::VectorXd& x) {
    ++count_;
    double v = fn_(x);
    if (noise_.sigma > 0.0) v += noise_.sigma * normal_(rng_);
    return v;
}

Eigen::VectorXd ObjectivePort::gradient(const Eigen::VectorXd& x) const {
    if (!grad_) throw Error(ErrorKind::ConfigError, "objective has no gradient oracle");
    return grad_(x);
}

void ObjectivePort::reset() {
    count_ = 0;
    rng_.seed(noise_.seed);
    normal_.reset();
}

double StepSchedule::at(long k) const {
    if (kind == ScheduleKind::Constant) return h0;
    return h0 / static_cast<double>(k / m + 1);
}

StepSchedule harmonic_schedule(double h0, int m) {
    if (!(h0 > 0) || m < 1) throw Error(ErrorKind::ConfigError, "harmonic schedule needs h0 > 0, m >= 1");
    return {h0, ScheduleKind::Harmonic, m};
}

StepSchedule constant_schedule(double h0) {
    if (!(h0 > 0)) throw Error(ErrorKind::ConfigError, "h0 must be > 0");
    return {h0, ScheduleKind::Constant, 1};
}

namespace {

double checked(double v) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteObjective, "J returned a non-finite value");
    return v;
}

Eigen::VectorXd direction(const GeneratingPair& pair, double z, const Eigen::MatrixXd& W, long col) {
    const int n = static_cast<int>(W.rows() / 2);
    PairValue v = pair.evaluate(z);
    return v.f * W.col(col).head(n) + v.g * W.col(col).tail(n);
}

}  // namespace

Eigen::VectorXd transition_step(const Eigen::VectorXd& x, long k, const Eigen::MatrixXd& W,
                                const GeneratingPair& pair, const MapParameters& params,
                                double h, ObjectivePort& J) {
    if (!(h > 0)) throw Error(ErrorKind::ConfigError, "h must be > 0");
    if (W.rows() != 2 * x.size() || W.cols() < 1) {
        throw Error(ErrorKind::ConfigError, "W shape does not match x");
    }
    const long l = k % W.cols();
    const double sh = std::sqrt(h);
    const double z0 = checked(J.evaluate(x));
    Eigen::VectorXd s0 = direction(pair, z0, W, l);
    Eigen::VectorXd step = params.alpha1() * s0;
    if (params.alpha2() != 0.0) {
        Eigen::VectorXd xh = x + sh * s0;
        const double z1 = checked(J.evaluate(xh));
        step += params.alpha2() * direction(pair, z1, W, l);
    }
    return x + sh * step;
}

RunRecord run(const RunSetup& setup, const StepSchedule& schedule, const StopCriteria& stop,
              ObjectivePort& J, const Eigen::VectorXd& x0) {
    RunRecord rec;
    rec.evals_per_iter = setup.params.alpha2() == 0.0 ? 1 : 2;
    const long m = setup.w.cols();
    const double n = static_cast<double>(x0.size());
    const double stall_tol = stop.stall_tol < 0 ? 1e-6 * std::sqrt(n) : stop.stall_tol;
    const long base = J.eval_count();

    Eigen::VectorXd x = x0;
    rec.iterates.push_back(x);
    rec.objective_values.push_back(J.peek(x));
    rec.evals_cum.push_back(0);

    int stalled = 0;
    for (long k = 0;; ++k) {
        rec.h_next = schedule.at(k);
        if (k >= stop.max_iters) {
            rec.stop_reason = "max_iters";
            break;
        }
        if (stop.max_evals >= 0 && J.eval_count() - base + rec.evals_per_iter > stop.max_evals) {
            rec.stop_reason = "max_evals";
            break;
        }
        const double h = schedule.at(k);
        Eigen::VectorXd nx;
        try {
            nx = transition_step(x, k, setup.w, setup.pair, setup.params, h, J);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonFiniteObjective && e.kind() != ErrorKind::DomainError) throw;
            rec.stop_reason = "diverged";
            break;
        }
        rec.h_trace.push_back(h);
        if (!nx.allFinite()) {
            rec.stop_reason = "diverged";
            break;
        }
        x = nx;
        rec.iterates.push_back(x);
        double jv = J.peek(x);
        rec.objective_values.push_back(jv);
        rec.evals_cum.push_back(J.eval_count() - base);
        const long kk = k + 1;
        rec.h_next = schedule.at(kk);
        if (stop.j_threshold && jv <= *stop.j_threshold) {
            rec.stop_reason = "threshold";
            break;
        }
        if (kk % m == 0 && kk >= m) {
            double moved = (x - rec.iterates[kk - m]).norm();
            stalled = moved < stall_tol ? stalled + 1 : 0;
            if (stalled >= stop.stall_patience) {
                rec.stop_reason = "stall";
                break;
            }
        }
    }
    return rec;
}

void write_run_csv(std::ostream& os, const RunRecord& rec) {
    const int n = rec.iterates.empty() ? 0 : static_cast<int>(rec.iterates[0].size());
    os << "k";
    for (int i = 1; i <= n; ++i) os << ",x_" << i;
    os << ",J,h,evals_cum\n";
    os << std::setprecision(17);
    for (std::size_t k = 0; k < rec.iterates.size(); ++k) {
        os << k;
        for (int i = 0; i < n; ++i) os << ',' << rec.iterates[k](i);
        double h = k < rec.h_trace.size() ? rec.h_trace[k] : rec.h_next;
        os << ',' << rec.objective_values[k] << ',' << h << ',' << rec.evals_cum[k] << '\n';
    }
}

}  // namespace ncmap

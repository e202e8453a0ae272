#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ncmap/genfun.hpp"
#include "ncmap/sequence.hpp"

namespace ncmap {

struct NoiseSpec {
    double sigma = 0.0;  // additive Gaussian noise; 0 disables
    std::uint64_t seed = 0;
};

class ObjectivePort {
public:
    using Fn = std::function<double(const Eigen::VectorXd&)>;
    using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

    explicit ObjectivePort(Fn fn, GradFn grad = nullptr, NoiseSpec noise = {});

    double evaluate(const Eigen::VectorXd& x);
    // noise-free value for bookkeeping; does not count
    double peek(const Eigen::VectorXd& x) const { return fn_(x); }
    long eval_count() const { return count_; }
    bool has_gradient() const { return static_cast<bool>(grad_); }
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    void reset();

private:
    Fn fn_;
    GradFn grad_;
    NoiseSpec noise_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    long count_ = 0;
};

enum class ScheduleKind { Constant, Harmonic };

struct StepSchedule {
    double h0 = 0.05;
    ScheduleKind kind = ScheduleKind::Constant;
    int m = 1;
    double at(long k) const;
};

StepSchedule harmonic_schedule(double h0, int m);
StepSchedule constant_schedule(double h0);

struct StopCriteria {
    long max_iters = 10000;
    long max_evals = -1;                // < 0: unlimited
    std::optional<double> j_threshold;  // stop once J(x_k) <= threshold
    double stall_tol = -1.0;            // < 0: 1e-6 * sqrt(n)
    int stall_patience = 5;             // periods
};

struct RunRecord {
    std::vector<Eigen::VectorXd> iterates;
    std::vector<double> objective_values;
    std::vector<double> h_trace;  // h_k used for step k
    std::vector<long> evals_cum;  // evaluations spent to reach iterate k
    double h_next = 0.0;          // h the schedule would use for the next step
    int evals_per_iter = 2;
    std::string stop_reason;
};

// one map M_k; J(x) is evaluated here, J(x^) too unless alpha2 == 0
Eigen::VectorXd transition_step(const Eigen::VectorXd& x, long k, const Eigen::MatrixXd& W,
                                const GeneratingPair& pair, const MapParameters& params,
                                double h, ObjectivePort& J);

struct RunSetup {
    Eigen::MatrixXd w;
    GeneratingPair pair;
    MapParameters params;
};

RunRecord run(const RunSetup& setup, const StepSchedule& schedule, const StopCriteria& stop,
              ObjectivePort& J, const Eigen::VectorXd& x0);

void write_run_csv(std::ostream& os, const RunRecord& rec);

}  // namespace ncmap

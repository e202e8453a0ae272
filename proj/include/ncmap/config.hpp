#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ncmap/engine.hpp"
#include "ncmap/genfun.hpp"
#include "ncmap/target.hpp"

namespace ncmap {

enum class ObjectiveKind { Quadratic, Ripple, Norm };

struct ObjectiveConfig {
    ObjectiveKind kind = ObjectiveKind::Quadratic;
    std::vector<double> center;  // empty: origin
    double amp = 0.5;            // ripple amplitude
    double freq = 10.0;          // ripple: sin(freq * pi * x)
};

struct RunConfig {
    int n = 2;
    double alpha1 = 0.5;
    double alpha2 = 0.5;

    TargetFamily target_family = TargetFamily::H1;
    double target_a = 1.0;
    double target_b = 1.0;
    double target_c = 0.0;
    std::vector<double> target_gamma;
    std::vector<double> target_q;  // row-major n x n, empty: family default
    std::vector<double> sigma_free;
    int m_cap = 0;

    PairFamily pair_family = PairFamily::H2_sincos;
    PairParams pair;

    ObjectiveConfig objective;
    double h0 = 0.05;
    ScheduleKind schedule = ScheduleKind::Constant;
    std::vector<double> x0;

    StopCriteria stop;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    MapParameters params() const { return {alpha1, alpha2}; }
    TargetSpec target() const;
    GeneratingPair generating_pair() const;
    ObjectivePort objective_port() const;
    Eigen::VectorXd start() const;
};

RunConfig parse_config(std::istream& is, RunConfig base = {});
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig parse_config_file(const std::string& path, RunConfig base = {});
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);
// "key=value"
void apply_override(RunConfig& cfg, const std::string& assignment);
std::string serialize_config(const RunConfig& cfg);

// Map/target/pair compatibility gate; throws before any construction starts.
void validate(const RunConfig& cfg);

const char* objective_kind_name(ObjectiveKind k);

}  // namespace ncmap

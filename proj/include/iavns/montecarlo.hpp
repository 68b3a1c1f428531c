#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iavns/scenario.hpp"
#include "iavns/simworld.hpp"

namespace iavns {

// Error of one estimator against truth at one instant. Angles in degrees.
struct FrameRecord {
    double t = 0.0;
    double dpsi = 0.0;
    double dtheta = 0.0;
    double dxi = 0.0;
    double dr = 0.0;    // rotation-vector norm of q_hat ⊖ q
    double dh = 0.0;    // m
    double dhor = 0.0;  // NED-plane distance, m
};

enum class Variable { psi, theta, xi, dr, h, hor };
inline constexpr Variable kVariables[] = {Variable::psi, Variable::theta, Variable::xi,
                                          Variable::dr,  Variable::h,     Variable::hor};
double value_of(const FrameRecord& r, Variable v);
const char* to_string(Variable v);
const char* to_string(EstimatorKind k);
std::optional<EstimatorKind> estimator_from_string(const std::string& s);

struct EstimatorSet {
    bool ins = true;
    bool vns = true;
    bool iavns = true;
    bool contains(EstimatorKind k) const;
    std::vector<EstimatorKind> kinds() const;
};

struct EstimatorSeries {
    EstimatorKind kind = EstimatorKind::vns;
    std::vector<FrameRecord> records;
    int solver_flags = 0;   // frames whose solve did not converge cleanly
    int prior_frames = 0;   // frames where the inertial prior was applied
};

struct RunReport {
    int run_id = 0;
    std::uint64_t seed = 0;
    double distance_flown = 0.0;
    std::vector<EstimatorSeries> series;

    const EstimatorSeries* find(EstimatorKind k) const;
};

struct RunOptions {
    int record_stride = 10;  // frames between records; the last frame is always kept
    // Called for every visual frame after the solve.
    std::function<void(EstimatorKind, double, const FrameResult&)> on_frame;
};

RunReport run_single(const ScenarioConfig& cfg, const EstimatorSet& estimators, std::uint64_t seed,
                     const RunOptions& opts = {});

class EmptyInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct VariableStats {
    double mean = 0.0;
    double std = 0.0;
    double max = 0.0;  // signed value of largest magnitude
};

VariableStats summarize(const std::vector<double>& values);

struct EstimatorStats {
    EstimatorKind kind = EstimatorKind::vns;
    VariableStats final[6];
    VariableStats hor_percent;
    const VariableStats& operator[](Variable v) const { return final[static_cast<int>(v)]; }
};

struct AggregateStats {
    int runs = 0;
    std::vector<std::uint64_t> seeds;
    double mean_distance = 0.0;
    std::vector<EstimatorStats> estimators;
    const EstimatorStats* find(EstimatorKind k) const;
};

AggregateStats aggregate(const std::vector<RunReport>& reports);

struct CampaignConfig {
    std::string name = "campaign";
    int runs = 20;
    std::uint64_t master_seed = 1;
    EstimatorSet estimators;
    int threads = 0;  // 0: hardware concurrency
    RunOptions run;
};

// Run seeds are derived from the master seed, so results do not depend on the
// thread count or completion order.
std::vector<RunReport> run_campaign(const ScenarioConfig& cfg, const CampaignConfig& campaign);

// Index of the run whose final |value| is largest for this estimator.
std::size_t worst_run(const std::vector<RunReport>& reports, EstimatorKind k, Variable v);

// Writes <dir>/<estimator>_<variable>.csv for every estimator/variable pair
// present. Returns the paths written.
std::vector<std::filesystem::path> emit_timeseries(const std::vector<RunReport>& reports,
                                                   const std::filesystem::path& dir);
// The header lists run seeds rather than the master seed, so a one-run campaign
// and a single run with the derived seed produce the same file.
std::filesystem::path emit_summary(const AggregateStats& stats, const std::string& campaign,
                                   const std::filesystem::path& dir);
std::string format_summary(const AggregateStats& stats, const std::string& campaign);

}  // namespace iavns

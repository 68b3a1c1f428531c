#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "iavns/montecarlo.hpp"
#include "support.hpp"

using namespace iavns;
using iavns::test::Gen;

namespace {

ScenarioConfig short_scenario(double t_end = 400.0) {
    ScenarioConfig c = default_scenario(ScenarioKind::scenario2);
    c.t_end = t_end;
    std::erase_if(c.maneuvers, [&](const ManeuverSpec& m) { return m.start_s.hi >= t_end; });
    return c;
}

ScenarioConfig noiseless(double t_end) {
    ScenarioConfig c = short_scenario(t_end);
    c.obs_noise_px = 0.0;
    c.outlier_rate = 0.0;
    c.scale_error = Range::fixed(0.0);
    c.frontend.guess_rot_sigma_deg = 0.0;
    c.frontend.guess_trans_sigma_m = 0.0;
    c.frontend.depth_noise_frac = 0.0;
    c.ins.sigma_psi = c.ins.sigma_theta = c.ins.sigma_xi = c.ins.sigma_h = 0.0;
    c.ins.hor_drift_rate = 0.0;
    return c;
}

RunReport synthetic_report(int id, std::uint64_t seed, const std::vector<double>& finals) {
    RunReport r;
    r.run_id = id;
    r.seed = seed;
    r.distance_flown = 1000.0 * (id + 1);
    for (auto k : {EstimatorKind::vns, EstimatorKind::iavns}) {
        EstimatorSeries s;
        s.kind = k;
        for (std::size_t j = 0; j < finals.size(); ++j) {
            FrameRecord fr;
            fr.t = static_cast<double>(j);
            fr.dpsi = fr.dtheta = fr.dxi = fr.dr = fr.dh = fr.dhor = finals[j] * (k == EstimatorKind::vns ? 1.0 : 0.5);
            s.records.push_back(fr);
        }
        r.series.push_back(s);
    }
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Summarize, Examples) {
    const VariableStats s = summarize({1.0, 2.0, 3.0, -4.0});
    EXPECT_DOUBLE_EQ(s.mean, 0.5);
    EXPECT_DOUBLE_EQ(s.std, std::sqrt(29.0 / 3.0));
    EXPECT_EQ(s.max, -4.0);
    const VariableStats one = summarize({7.0});
    EXPECT_EQ(one.mean, 7.0);
    EXPECT_EQ(one.std, 0.0);
    EXPECT_EQ(one.max, 7.0);
    EXPECT_THROW(summarize({}), EmptyInput);
}

TEST(Summarize, MatchesNaiveFormulasProperty) {
    Gen g(70);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> v(static_cast<std::size_t>(g.integer(2, 60)));
        for (double& x : v) x = g.uniform(-100.0, 100.0);
        long double sum = 0.0L;
        for (double x : v) sum += x;
        const long double mean = sum / v.size();
        long double ss = 0.0L;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = static_cast<double>(std::sqrt(ss / (v.size() - 1)));
        double big = 0.0;
        for (double x : v) big = std::abs(x) > std::abs(big) ? x : big;
        const VariableStats s = summarize(v);
        EXPECT_NEAR(s.mean, static_cast<double>(mean), 1e-12 * 100.0);
        EXPECT_NEAR(s.std, sd, 1e-12 * 100.0);
        EXPECT_EQ(s.max, big);
    }
}

TEST(Aggregate, CombinesFinalValues) {
    const std::vector<RunReport> reports = {synthetic_report(0, 11, {0.0, 2.0}), synthetic_report(1, 12, {0.0, -6.0}),
                                            synthetic_report(2, 13, {0.0, 1.0})};
    const AggregateStats a = aggregate(reports);
    EXPECT_EQ(a.runs, 3);
    EXPECT_EQ(a.seeds, (std::vector<std::uint64_t>{11, 12, 13}));
    EXPECT_DOUBLE_EQ(a.mean_distance, 2000.0);
    const EstimatorStats* vns = a.find(EstimatorKind::vns);
    ASSERT_NE(vns, nullptr);
    EXPECT_DOUBLE_EQ((*vns)[Variable::h].mean, -1.0);
    EXPECT_EQ((*vns)[Variable::h].max, -6.0);
    EXPECT_DOUBLE_EQ((*vns)[Variable::h].std, std::sqrt((9.0 + 25.0 + 4.0) / 2.0));
    EXPECT_DOUBLE_EQ(vns->hor_percent.mean, (0.2 - 0.3 + 1.0 / 30.0) / 3.0);
    EXPECT_EQ(a.find(EstimatorKind::ins), nullptr);
    EXPECT_DOUBLE_EQ((*a.find(EstimatorKind::iavns))[Variable::psi].mean, -0.5);
}

TEST(Aggregate, RejectsEmptyInput) {
    EXPECT_THROW(aggregate({}), EmptyInput);
    EXPECT_THROW(worst_run({}, EstimatorKind::vns, Variable::h), EmptyInput);
    RunReport r = synthetic_report(0, 1, {1.0});
    r.series[0].records.clear();
    EXPECT_THROW(aggregate({r}), EmptyInput);
}

TEST(WorstRun, PicksLargestFinalMagnitude) {
    const std::vector<RunReport> reports = {synthetic_report(0, 1, {50.0, 2.0}), synthetic_report(1, 2, {0.0, -6.0}),
                                            synthetic_report(2, 3, {0.0, 5.0})};
    EXPECT_EQ(worst_run(reports, EstimatorKind::vns, Variable::h), 1u);
    EXPECT_EQ(worst_run(reports, EstimatorKind::iavns, Variable::hor), 1u);
}

TEST(Emit, FiveColumnFilesPerEstimatorAndVariable) {
    const std::vector<RunReport> reports = {synthetic_report(0, 1, {0.0, 1.0, 2.0}),
                                            synthetic_report(1, 2, {0.0, -3.0, 4.0})};
    const auto dir = test::fresh_dir("emit");
    const auto paths = emit_timeseries(reports, dir);
    ASSERT_EQ(paths.size(), 12u);
    EXPECT_EQ(paths.front().filename(), "vns_psi_deg.csv");
    EXPECT_EQ(paths.back().filename(), "iavns_horizontal_m.csv");
    for (const auto& p : paths) {
        const auto lines = lines_of(test::read_file(p));
        ASSERT_EQ(lines.size(), 4u);
        EXPECT_EQ(lines[0], "t,mean,mean_minus_std,mean_plus_std,worst");
        for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ','), 4) << l;
    }
    const auto h = lines_of(test::read_file(dir / "vns_altitude_m.csv"));
    EXPECT_EQ(h[1], "0,0,0,0,0");
    EXPECT_EQ(h[2], "1,-1,-3.828427125,1.828427125,-3");
    EXPECT_EQ(h[3], "2,3,1.585786438,4.414213562,4");
}

TEST(Emit, RecordsWithoutSamplesGiveHeaderOnly) {
    RunReport r = synthetic_report(0, 1, {});
    const auto dir = test::fresh_dir("emit_empty");
    const auto paths = emit_timeseries({r}, dir);
    ASSERT_EQ(paths.size(), 12u);
    for (const auto& p : paths) EXPECT_EQ(test::read_file(p), "t,mean,mean_minus_std,mean_plus_std,worst\n");
    EXPECT_TRUE(emit_timeseries({}, dir / "none").empty());
}

TEST(Emit, SummaryListsSeeds) {
    const std::vector<RunReport> reports = {synthetic_report(0, 11, {0.0, 2.0}), synthetic_report(1, 12, {0.0, -6.0})};
    const auto dir = test::fresh_dir("summary");
    const auto path = emit_summary(aggregate(reports), "demo", dir);
    const auto lines = lines_of(test::read_file(path));
    ASSERT_GE(lines.size(), 4u);
    EXPECT_EQ(lines[0], "campaign demo");
    EXPECT_EQ(lines[1], "runs 2");
    EXPECT_EQ(lines[2], "seeds 11 12");
    EXPECT_EQ(lines[3], "mean_distance_m 1500");
    EXPECT_NE(test::read_file(path).find("[final horizontal_percent]"), std::string::npos);
}

TEST(RunSingle, NoiselessWorldGivesNearZeroErrors) {
    const ScenarioConfig c = noiseless(300.0);
    const RunReport r = run_single(c, EstimatorSet{}, 3);
    ASSERT_EQ(r.series.size(), 3u);
    const EstimatorSeries* ins = r.find(EstimatorKind::ins);
    for (const auto& fr : ins->records) {
        EXPECT_EQ(fr.dh, 0.0);
        EXPECT_EQ(fr.dhor, 0.0);
        EXPECT_LT(fr.dr, 1e-9);
    }
    for (auto k : {EstimatorKind::vns, EstimatorKind::iavns}) {
        const EstimatorSeries* s = r.find(k);
        ASSERT_NE(s, nullptr);
        EXPECT_EQ(s->solver_flags, 0);
        for (const auto& fr : s->records) {
            EXPECT_LT(fr.dr, 1e-6) << to_string(k) << " t=" << fr.t;
            EXPECT_LT(std::abs(fr.dh), 1e-3) << to_string(k) << " t=" << fr.t;
            EXPECT_LT(fr.dhor, 1e-3) << to_string(k) << " t=" << fr.t;
        }
    }
}

TEST(RunSingle, RecordsFollowStrideAndKeepLastFrame) {
    const ScenarioConfig c = short_scenario(200.0);
    RunOptions opts;
    opts.record_stride = 7;
    const RunReport r = run_single(c, EstimatorSet{true, false, false}, 4, opts);
    const auto& rec = r.series.front().records;
    EXPECT_EQ(rec.size(), 2001u / 7u + 1u + 1u);
    EXPECT_DOUBLE_EQ(rec[1].t, 0.7);
    EXPECT_DOUBLE_EQ(rec.back().t, 200.0);
}

TEST(RunSingle, DeterministicForSeed) {
    const ScenarioConfig c = short_scenario(300.0);
    const RunReport a = run_single(c, EstimatorSet{}, 5), b = run_single(c, EstimatorSet{}, 5);
    ASSERT_EQ(a.series.size(), b.series.size());
    for (std::size_t s = 0; s < a.series.size(); ++s) {
        ASSERT_EQ(a.series[s].records.size(), b.series[s].records.size());
        for (std::size_t j = 0; j < a.series[s].records.size(); ++j) {
            ASSERT_EQ(a.series[s].records[j].dhor, b.series[s].records[j].dhor);
            ASSERT_EQ(a.series[s].records[j].dr, b.series[s].records[j].dr);
        }
    }
    const RunReport c2 = run_single(c, EstimatorSet{}, 6);
    EXPECT_NE(a.series[1].records.back().dhor, c2.series[1].records.back().dhor);
}

TEST(RunSingle, EstimatorSubsetDoesNotChangeOthers) {
    const ScenarioConfig c = short_scenario(300.0);
    const RunReport all = run_single(c, EstimatorSet{}, 7);
    const RunReport vns_only = run_single(c, EstimatorSet{false, true, false}, 7);
    ASSERT_EQ(vns_only.series.size(), 1u);
    const auto& a = all.find(EstimatorKind::vns)->records;
    const auto& b = vns_only.series[0].records;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) ASSERT_EQ(a[j].dhor, b[j].dhor);
}

TEST(RunSingle, PriorOffMakesIavnsMatchVnsWhenInitIsShared) {
    // With the gain at zero and no inertial initialization advantage, the two
    // visual estimators share every input and must agree exactly.
    ScenarioConfig c = short_scenario(300.0);
    c.adjustment.dtheta1_max = c.adjustment.dtheta2_max = c.adjustment.dxi1_max = 0.0;
    const RunReport r = run_single(c, EstimatorSet{false, true, true}, 8);
    EXPECT_EQ(r.find(EstimatorKind::iavns)->prior_frames, 0);
    const auto& a = r.find(EstimatorKind::vns)->records;
    const auto& b = r.find(EstimatorKind::iavns)->records;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        ASSERT_EQ(a[j].dhor, b[j].dhor);
        ASSERT_EQ(a[j].dr, b[j].dr);
    }
}

TEST(Campaign, IndependentOfThreadCount) {
    const ScenarioConfig c = short_scenario(200.0);
    CampaignConfig one;
    one.runs = 4;
    one.master_seed = 9;
    one.threads = 1;
    CampaignConfig many = one;
    many.threads = 4;
    const auto a = run_campaign(c, one), b = run_campaign(c, many);
    const auto da = test::fresh_dir("campaign_a"), db = test::fresh_dir("campaign_b");
    const auto pa = emit_timeseries(a, da), pb = emit_timeseries(b, db);
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(test::read_file(pa[i]), test::read_file(pb[i]));
    EXPECT_EQ(format_summary(aggregate(a), "x"), format_summary(aggregate(b), "x"));
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(a[static_cast<std::size_t>(i)].run_id, i);
        EXPECT_EQ(a[static_cast<std::size_t>(i)].seed, derive_run_seed(9, static_cast<std::uint64_t>(i)));
    }
}

TEST(Campaign, RejectsBadInput) {
    CampaignConfig cc;
    cc.runs = 0;
    EXPECT_THROW(run_campaign(short_scenario(), cc), std::invalid_argument);
    ScenarioConfig bad = short_scenario();
    bad.frame_dt = -1.0;
    cc.runs = 1;
    EXPECT_THROW(run_campaign(bad, cc), std::invalid_argument);
}

TEST(Names, EstimatorsAndVariables) {
    EXPECT_EQ(estimator_from_string("ia-vns"), EstimatorKind::iavns);
    EXPECT_EQ(estimator_from_string("iavns"), EstimatorKind::iavns);
    EXPECT_EQ(estimator_from_string("ins"), EstimatorKind::ins);
    EXPECT_FALSE(estimator_from_string("gps").has_value());
    EXPECT_STREQ(to_string(Variable::hor), "horizontal_m");
    EXPECT_EQ(EstimatorSet{}.kinds().size(), 3u);
    EXPECT_EQ((EstimatorSet{false, false, true}.kinds()), std::vector<EstimatorKind>{EstimatorKind::iavns});
}

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "iavns/montecarlo.hpp"

namespace iavns {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

const FrameRecord& final_record(const RunReport& r, EstimatorKind k) {
    const EstimatorSeries* s = r.find(k);
    if (s == nullptr || s->records.empty()) {
        throw EmptyInput(std::string("report ") + std::to_string(r.run_id) + " has no " + to_string(k) + " series");
    }
    return s->records.back();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    f.close();
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

VariableStats summarize(const std::vector<double>& values) {
    if (values.empty()) throw EmptyInput("summarize: no values");
    VariableStats s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    s.max = values.front();
    for (double v : values) {
        if (std::abs(v) > std::abs(s.max)) s.max = v;
    }
    return s;
}

const EstimatorStats* AggregateStats::find(EstimatorKind k) const {
    for (const auto& e : estimators) {
        if (e.kind == k) return &e;
    }
    return nullptr;
}

AggregateStats aggregate(const std::vector<RunReport>& reports) {
    if (reports.empty()) throw EmptyInput("aggregate: no reports");
    AggregateStats out;
    out.runs = static_cast<int>(reports.size());
    double dist = 0.0;
    for (const auto& r : reports) {
        dist += r.distance_flown;
        out.seeds.push_back(r.seed);
    }
    out.mean_distance = dist / static_cast<double>(reports.size());

    for (const auto& series : reports.front().series) {
        EstimatorStats es;
        es.kind = series.kind;
        for (Variable v : kVariables) {
            std::vector<double> vals;
            vals.reserve(reports.size());
            for (const auto& r : reports) vals.push_back(value_of(final_record(r, es.kind), v));
            es.final[static_cast<int>(v)] = summarize(vals);
        }
        std::vector<double> pct;
        for (const auto& r : reports) {
            const double d = r.distance_flown;
            pct.push_back(d > 0.0 ? 100.0 * final_record(r, es.kind).dhor / d : 0.0);
        }
        es.hor_percent = summarize(pct);
        out.estimators.push_back(es);
    }
    return out;
}

std::vector<RunReport> run_campaign(const ScenarioConfig& cfg, const CampaignConfig& campaign) {
    if (campaign.runs < 1) throw std::invalid_argument("campaign.runs must be >= 1");
    cfg.validate();
    std::vector<RunReport> reports(static_cast<std::size_t>(campaign.runs));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (int i = next++; i < campaign.runs && !failed; i = next++) {
            try {
                const std::uint64_t seed = derive_run_seed(campaign.master_seed, static_cast<std::uint64_t>(i));
                reports[static_cast<std::size_t>(i)] = run_single(cfg, campaign.estimators, seed, campaign.run);
                reports[static_cast<std::size_t>(i)].run_id = i;
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    int threads = campaign.threads > 0 ? campaign.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, campaign.runs);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return reports;
}

std::size_t worst_run(const std::vector<RunReport>& reports, EstimatorKind k, Variable v) {
    if (reports.empty()) throw EmptyInput("worst_run: no reports");
    std::size_t best = 0;
    double worst = -1.0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const double a = std::abs(value_of(final_record(reports[i], k), v));
        if (a > worst) {
            worst = a;
            best = i;
        }
    }
    return best;
}

std::vector<std::filesystem::path> emit_timeseries(const std::vector<RunReport>& reports,
                                                   const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    if (reports.empty()) return written;
    ensure_dir(dir);
    for (const auto& series : reports.front().series) {
        for (Variable v : kVariables) {
            std::string text = "t,mean,mean_minus_std,mean_plus_std,worst\n";
            const auto path = dir / (std::string(to_string(series.kind)) + '_' + to_string(v) + ".csv");
            if (series.records.empty()) {  // header-only file
                write_file(path, text);
                written.push_back(path);
                continue;
            }
            const std::size_t w = worst_run(reports, series.kind, v);
            const auto& worst = reports[w].find(series.kind)->records;
            std::vector<double> vals(reports.size());
            for (std::size_t j = 0; j < series.records.size(); ++j) {
                for (std::size_t i = 0; i < reports.size(); ++i) {
                    vals[i] = value_of(reports[i].find(series.kind)->records.at(j), v);
                }
                const VariableStats s = summarize(vals);
                text += fmt(series.records[j].t) + ',' + fmt(s.mean) + ',' + fmt(s.mean - s.std) + ',' +
                        fmt(s.mean + s.std) + ',' + fmt(value_of(worst.at(j), v)) + '\n';
            }
            write_file(path, text);
            written.push_back(path);
        }
    }
    return written;
}

std::string format_summary(const AggregateStats& stats, const std::string& campaign) {
    std::ostringstream os;
    os << "campaign " << campaign << "\n";
    os << "runs " << stats.runs << "\n";
    os << "seeds";
    for (auto seed : stats.seeds) os << " " << seed;
    os << "\n";
    os << "mean_distance_m " << fmt(stats.mean_distance) << "\n";
    auto block = [&](const std::string& title, auto getter) {
        os << "\n[" << title << "]\n";
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-6s", "");
        os << buf;
        for (const auto& e : stats.estimators) {
            std::snprintf(buf, sizeof buf, " %16s", to_string(e.kind));
            os << buf;
        }
        os << "\n";
        for (const char* row : {"mean", "std", "max"}) {
            std::snprintf(buf, sizeof buf, "%-6s", row);
            os << buf;
            for (const auto& e : stats.estimators) {
                const VariableStats& s = getter(e);
                const double v = row[0] == 'm' && row[1] == 'e' ? s.mean : row[0] == 's' ? s.std : s.max;
                std::snprintf(buf, sizeof buf, " %16s", fmt(v).c_str());
                os << buf;
            }
            os << "\n";
        }
    };
    for (Variable v : kVariables) {
        block(std::string("final ") + to_string(v), [v](const EstimatorStats& e) -> const VariableStats& { return e[v]; });
    }
    block("final horizontal_percent", [](const EstimatorStats& e) -> const VariableStats& { return e.hor_percent; });
    return os.str();
}

std::filesystem::path emit_summary(const AggregateStats& stats, const std::string& campaign,
                                   const std::filesystem::path& dir) {
    ensure_dir(dir);
    const auto path = dir / "summary.txt";
    write_file(path, format_summary(stats, campaign));
    return path;
}

}  // namespace iavns

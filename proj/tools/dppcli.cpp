// Single-binary experiment harness. Subcommands mirror the library modules;
// every emitted file carries the resolved config and seed so runs reproduce.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpp/dpp.hpp"

namespace {

using dpp::Configuration;
using dpp::ExperimentConfig;
using dpp::PreconditionError;
using nlohmann::json;

std::vector<std::pair<double, double>> parse_schedule_string(const std::string& s) {
    std::vector<std::pair<double, double>> pairs;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string item =
            s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw PreconditionError("schedule item '" + item + "' is not R:delta");
        try {
            pairs.emplace_back(std::stod(item.substr(0, colon)),
                               std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw PreconditionError("bad number in schedule item '" + item + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (pairs.empty()) throw PreconditionError("empty schedule");
    return pairs;
}

std::vector<double> parse_double_list(const std::string& s, char sep = ',') {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t next = s.find(sep, pos);
        const std::string item =
            s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw PreconditionError("bad number '" + item + "' in list");
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

// Registers flags that mirror ExperimentConfig fields and resolves the final
// config as: defaults, then --config file, then explicitly passed flags.
class ConfigFlags {
  public:
    explicit ConfigFlags(CLI::App* cmd) : cmd_(cmd) {
        cmd->add_option("--config", config_path_, "JSON config file; flags override it");
    }

    void add_kernel() {
        reg(cmd_->add_option("--kernel", staged_.kernel, "sine|hermite:<N>|bessel:<s>"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.kernel = s.kernel; });
        reg(cmd_->add_option("--window-lo", staged_.window_lo, "window lower edge"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.window_lo = s.window_lo; });
        reg(cmd_->add_option("--window-hi", staged_.window_hi, "window upper edge"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.window_hi = s.window_hi; });
        reg(cmd_->add_option("--nodes", staged_.n_nodes, "quadrature nodes for discretization"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.n_nodes = s.n_nodes; });
    }

    void add_run() {
        reg(cmd_->add_option("--seed", staged_.seed, "root random seed"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.seed = s.seed; });
        reg(cmd_->add_option("--workers", staged_.workers, "worker threads"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.workers = s.workers; });
        reg(cmd_->add_option("--out", staged_.out, "output path base (default: stdout)"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.out = s.out; });
    }

    void add_samples() {
        reg(cmd_->add_option("--samples", staged_.samples, "Monte Carlo sample count"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.samples = s.samples; });
    }

    void add_anchor() {
        reg(cmd_->add_option("--a", staged_.anchor, "anchor point a"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.anchor = s.anchor; });
    }

    void add_schedule() {
        reg(cmd_->add_option("--schedule", schedule_text_, "cutoff schedule R1:d1,R2:d2,..."),
            [this](ExperimentConfig& c, const ExperimentConfig&) {
                c.schedule = parse_schedule_string(schedule_text_);
            });
    }

    void add_rn() {
        reg(cmd_->add_option("--b", staged_.anchor_b, "shifted anchor b"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.anchor_b = s.anchor_b; });
        reg(cmd_->add_option("--eps", staged_.eps, "anchor shift magnitude"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.eps = s.eps; });
        reg(cmd_->add_option("--R", staged_.cutoff_radius, "cutoff radius R"),
            [](ExperimentConfig& c, const ExperimentConfig& s) {
                c.cutoff_radius = s.cutoff_radius;
            });
        reg(cmd_->add_option("--delta", staged_.cutoff_delta, "collar half width delta"),
            [](ExperimentConfig& c, const ExperimentConfig& s) {
                c.cutoff_delta = s.cutoff_delta;
            });
    }

    void add_dynamics() {
        reg(cmd_->add_option("--dt", staged_.dt, "time step"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.dt = s.dt; });
        reg(cmd_->add_option("--T", staged_.t_final, "final time"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.t_final = s.t_final; });
        reg(cmd_->add_option("--trajectories", staged_.trajectories, "trajectory count"),
            [](ExperimentConfig& c, const ExperimentConfig& s) {
                c.trajectories = s.trajectories;
            });
        reg(cmd_->add_option("--drift", staged_.drift, "closed|estimated"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.drift = s.drift; });
        reg(cmd_->add_option("--confinement", staged_.confinement,
                             "restoring-force scale (1 matches the kernel)"),
            [](ExperimentConfig& c, const ExperimentConfig& s) {
                c.confinement = s.confinement;
            });
    }

    void add_bins() {
        reg(cmd_->add_option("--bins", staged_.bins, "histogram bin count"),
            [](ExperimentConfig& c, const ExperimentConfig& s) { c.bins = s.bins; });
    }

    void add_observable() {
        reg(cmd_->add_option("--observable", staged_.observable,
                             "test function, e.g. bump:0:1 or indicator:-1:1"),
            [](ExperimentConfig& c, const ExperimentConfig& s) {
                c.observable = s.observable;
            });
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_path_.empty()) cfg = dpp::load_experiment_config(config_path_);
        for (const auto& [opt, copy] : overrides_)
            if (opt->count() > 0) copy(cfg, staged_);
        return cfg;
    }

  private:
    using Copy = std::function<void(ExperimentConfig&, const ExperimentConfig&)>;
    void reg(CLI::Option* opt, Copy copy) { overrides_.emplace_back(opt, std::move(copy)); }

    CLI::App* cmd_;
    ExperimentConfig staged_;
    std::string config_path_;
    std::string schedule_text_;
    std::vector<std::pair<CLI::Option*, Copy>> overrides_;
};

dpp::KernelModel kernel_from(const ExperimentConfig& cfg) {
    return dpp::parse_kernel_spec(cfg.kernel, dpp::Window{cfg.window_lo, cfg.window_hi});
}

void write_json(const json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(path);
        if (!out) throw PreconditionError("cannot open '" + path + "' for writing");
        out << j.dump(2) << "\n";
    }
}

void config_comments(dpp::CsvWriter& csv, const ExperimentConfig& cfg) {
    csv.comment("config " + json(cfg).dump());
    csv.comment("seed " + std::to_string(cfg.seed));
}

json estimate_json(const dpp::Estimate& e) {
    return json{{"value", e.value}, {"stderr", e.std_err}, {"n", e.n}};
}

// Collects sampled configurations, reduced at the anchor when palm is set.
std::vector<Configuration> draw_samples(const dpp::KernelModel& kernel,
                                        const dpp::DiscretizedKernel& disc,
                                        const std::optional<double>& palm_at,
                                        std::int64_t count, dpp::Rng& rng) {
    if (palm_at) {
        const dpp::PalmSampler palm(kernel, disc);
        return palm.sample_many(*palm_at, count, rng);
    }
    std::vector<Configuration> out;
    out.reserve(count);
    for (std::int64_t i = 0; i < count; ++i) out.push_back(dpp::sample_dpp(disc, rng));
    return out;
}

// --- subcommand bodies --------------------------------------------------------

int cmd_check_kernel(const ExperimentConfig& cfg) {
    const dpp::KernelModel kernel = kernel_from(cfg);
    const dpp::AssumptionReport rep = dpp::check_assumption2(kernel);
    const dpp::DiscretizedKernel disc = dpp::discretize(kernel, cfg.n_nodes);
    json j{{"config", cfg},
           {"kernel", kernel.describe()},
           {"symmetric_ok", rep.symmetric_ok},
           {"symmetry_residual", rep.symmetry_residual},
           {"spectrum_ok", rep.spectrum_ok},
           {"projection_residual", rep.projection_residual},
           {"eig_min", rep.eig_min},
           {"eig_max", rep.eig_max},
           {"smooth_ok", rep.smooth_ok},
           {"second_difference_max", rep.second_difference_max},
           {"integrable_ok", rep.integrable_ok},
           {"intensity_integral", rep.intensity_integral},
           {"discretized_trace", disc.trace},
           {"discretized_rank", disc.rank},
           {"ok", rep.ok()}};
    write_json(j, cfg.out);
    return 0;
}

int cmd_sample(const ExperimentConfig& cfg, const std::optional<double>& palm_at) {
    const dpp::KernelModel kernel = kernel_from(cfg);
    const dpp::DiscretizedKernel disc = dpp::discretize(kernel, cfg.n_nodes);

    std::unique_ptr<dpp::JsonlWriter> owned;
    if (!cfg.out.empty()) owned = std::make_unique<dpp::JsonlWriter>(cfg.out);
    dpp::JsonlWriter stdout_writer(std::cout);
    dpp::JsonlWriter& w = owned ? *owned : stdout_writer;

    json meta{{"config", cfg}, {"command", "sample"}};
    if (palm_at) meta["palm_at"] = *palm_at;
    w.record(meta);

    dpp::Rng rng = dpp::make_stream(cfg.seed, 0);
    if (palm_at) {
        const dpp::PalmSampler palm(kernel, disc);
        const dpp::PalmSampler::Basis basis = palm.prepare(*palm_at);
        for (std::int64_t i = 0; i < cfg.samples; ++i)
            w.record(dpp::configuration_to_json(palm.sample_with(basis, rng)));
    } else {
        for (std::int64_t i = 0; i < cfg.samples; ++i)
            w.record(dpp::configuration_to_json(dpp::sample_dpp(disc, rng)));
    }
    return 0;
}

int cmd_intensity(const ExperimentConfig& cfg, const std::optional<double>& palm_at) {
    const dpp::KernelModel kernel = kernel_from(cfg);
    const dpp::DiscretizedKernel disc = dpp::discretize(kernel, cfg.n_nodes);
    dpp::Rng rng = dpp::make_stream(cfg.seed, 0);
    const std::vector<Configuration> samples =
        draw_samples(kernel, disc, palm_at, cfg.samples, rng);
    const dpp::Window w = kernel.window();
    const dpp::IntensityProfile prof = dpp::empirical_intensity(samples, w, cfg.bins);

    std::optional<dpp::PalmKernel> reduced;
    if (palm_at) reduced = dpp::palm_reduce(kernel, *palm_at);

    std::unique_ptr<dpp::CsvWriter> owned;
    if (!cfg.out.empty()) owned = std::make_unique<dpp::CsvWriter>(cfg.out);
    dpp::CsvWriter stdout_writer(std::cout);
    dpp::CsvWriter& csv = owned ? *owned : stdout_writer;

    config_comments(csv, cfg);
    if (palm_at) csv.comment("palm_at " + dpp::fmt17(*palm_at));
    csv.header({"bin_lo", "bin_hi", "intensity", "stderr", "model"});
    for (int b = 0; b < cfg.bins; ++b) {
        const double center = 0.5 * (prof.edges[b] + prof.edges[b + 1]);
        const double model = reduced ? reduced->intensity(center) : kernel.intensity(center);
        csv.row({prof.edges[b], prof.edges[b + 1], prof.intensity[b].value,
                 prof.intensity[b].std_err, model});
    }
    return 0;
}

int cmd_logderiv(const ExperimentConfig& cfg) {
    const dpp::KernelModel kernel = kernel_from(cfg);
    const dpp::DiscretizedKernel disc = dpp::discretize(kernel, cfg.n_nodes);
    const dpp::RegularizationSchedule schedule(cfg.schedule);
    const dpp::LogDerivative ld(kernel, cfg.anchor, schedule);
    const dpp::PalmSampler palm(kernel, disc);
    const std::size_t n_pairs = ld.schedule().size();

    struct Accum {
        std::vector<dpp::RunningStat> per_pair;
    };
    auto work = [&](int, std::int64_t count, dpp::Rng& rng) {
        Accum acc;
        acc.per_pair.resize(n_pairs);
        const dpp::PalmSampler::Basis basis = palm.prepare(cfg.anchor);
        for (std::int64_t s = 0; s < count; ++s) {
            const Configuration X = palm.sample_with(basis, rng);
            for (std::size_t i = 0; i < n_pairs; ++i)
                acc.per_pair[i].add(ld.pair_value(i, X));
        }
        return acc;
    };
    const Accum acc = dpp::parallel_map_reduce<Accum>(
        cfg.samples, cfg.workers, cfg.seed, work, [](Accum& a, const Accum& b) {
            for (std::size_t i = 0; i < a.per_pair.size(); ++i)
                a.per_pair[i].merge(b.per_pair[i]);
        });

    std::vector<dpp::Estimate> means;
    means.reserve(n_pairs);
    for (const auto& st : acc.per_pair) means.push_back(st.mean_estimate());

    const double last = means.back().value;
    const double prev = means[means.size() - 2].value;
    const double gap = std::abs(last - prev);
    json summary{{"extrapolated", last},
                 {"cauchy_gap", gap},
                 {"converged", gap < dpp::defaults::conv_tol},
                 {"anchor", cfg.anchor},
                 {"intensity_term", ld.intensity_term()},
                 {"n", cfg.samples},
                 {"config", cfg}};

    std::unique_ptr<dpp::CsvWriter> owned;
    if (!cfg.out.empty()) owned = std::make_unique<dpp::CsvWriter>(cfg.out + ".csv");
    dpp::CsvWriter stdout_writer(std::cout);
    dpp::CsvWriter& csv = owned ? *owned : stdout_writer;

    config_comments(csv, cfg);
    csv.header({"R", "delta", "value", "stderr"});
    const auto& pairs = ld.schedule().pairs();
    for (std::size_t i = 0; i < n_pairs; ++i)
        csv.row({pairs[i].first, pairs[i].second, means[i].value, means[i].std_err});

    if (cfg.out.empty())
        csv.comment("summary " + summary.dump());
    else
        write_json(summary, cfg.out + ".json");
    return 0;
}

std::function<double(const Configuration&)> parse_psi(const std::string& spec,
                                                      std::string& name_out) {
    const std::size_t c1 = spec.find(':');
    const std::string head = spec.substr(0, c1);
    if (head == "one") {
        name_out = "one";
        return [](const Configuration&) { return 1.0; };
    }
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw PreconditionError("psi spec '" + spec + "' wants expcount:lo:hi|invcount:lo:hi|one");
    double lo = 0.0, hi = 0.0;
    try {
        lo = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
        hi = std::stod(spec.substr(c2 + 1));
    } catch (const std::exception&) {
        throw PreconditionError("bad number in psi spec '" + spec + "'");
    }
    if (!(lo < hi)) throw PreconditionError("psi window needs lo < hi");
    name_out = head;
    if (head == "expcount")
        return [lo, hi](const Configuration& X) {
            return std::exp(-static_cast<double>(count_in(X, lo, hi)));
        };
    if (head == "invcount")
        return [lo, hi](const Configuration& X) {
            return 1.0 / (1.0 + static_cast<double>(count_in(X, lo, hi)));
        };
    throw PreconditionError("unknown psi '" + head + "'");
}

int cmd_ibp_test(const ExperimentConfig& cfg, const std::string& psi_spec) {
    const dpp::KernelModel kernel = kernel_from(cfg);
    const dpp::DiscretizedKernel disc = dpp::discretize(kernel, cfg.n_nodes);

    // chi must be smooth with compact support, so only the bump preset fits.
    if (cfg.observable.rfind("bump:", 0) != 0)
        throw PreconditionError("ibp-test needs --observable bump:<center>:<width>");
    const std::vector<double> args = parse_double_list(cfg.observable.substr(5), ':');
    if (args.size() != 2 || !(args[1] > 0.0))
        throw PreconditionError("ibp-test needs --observable bump:<center>:<width>");
    const double center = args[0];
    const double width = args[1];

    std::string psi_name;
    auto psi = parse_psi(psi_spec, psi_name);
    const dpp::ProductObservable obs = dpp::detail::bump_observable(
        center, width, center - width, center + width, std::move(psi), psi_name);

    const dpp::RegularizationSchedule schedule(cfg.schedule);
    const dpp::IbpResult r = dpp::ibp_test(kernel, disc, obs, schedule, cfg.samples,
                                           cfg.seed, cfg.workers);
    json j{{"lhs", estimate_json(r.lhs)},
           {"rhs", estimate_json(r.rhs)},
           {"gap", estimate_json(r.gap)},
           {"z_score", r.z},
           {"n", r.n},
           {"anchor_mass", r.scale},
           {"observable", cfg.observable},
           {"psi", psi_spec},
           {"config", cfg}};
    write_json(j, cfg.out);
    return 0;
}

int cmd_rn_check(const ExperimentConfig& cfg, const std::string& eps_list_text) {
    const dpp::KernelModel kernel = kernel_from(cfg);
    const dpp::DiscretizedKernel disc = dpp::discretize(kernel, cfg.n_nodes);
    std::vector<double> eps_list;
    if (eps_list_text.empty())
        eps_list = {4.0 * cfg.eps, 2.0 * cfg.eps, cfg.eps};
    else
        eps_list = parse_double_list(eps_list_text);

    const dpp::PalmSampler palm(kernel, disc);
    dpp::Rng rng = dpp::make_stream(cfg.seed, 0);
    const std::vector<Configuration> samples =
        palm.sample_many(cfg.anchor, cfg.samples, rng);
    const std::vector<dpp::DiffQuotientPoint> points = dpp::rn_difference_quotient_check(
        kernel, cfg.anchor, cfg.cutoff_radius, cfg.cutoff_delta, eps_list, samples);

    std::unique_ptr<dpp::CsvWriter> owned;
    if (!cfg.out.empty()) owned = std::make_unique<dpp::CsvWriter>(cfg.out);
    dpp::CsvWriter stdout_writer(std::cout);
    dpp::CsvWriter& csv = owned ? *owned : stdout_writer;

    config_comments(csv, cfg);
    csv.header({"eps", "l2_gap"});
    for (const auto& p : points) csv.row({p.eps, p.l2_gap});
    return 0;
}

int cmd_diffuse(const ExperimentConfig& cfg) {
    const dpp::KernelModel kernel = kernel_from(cfg);
    dpp::DiffusionConfig dcfg;
    dcfg.dt = cfg.dt;
    dcfg.t_final = cfg.t_final;
    dcfg.mode = dpp::parse_drift_mode(cfg.drift);
    dcfg.confinement = cfg.confinement;
    if (dcfg.mode == dpp::DriftMode::EstimatedLogDeriv)
        dcfg.schedule = dpp::RegularizationSchedule(cfg.schedule);
    if (dcfg.mode == dpp::DriftMode::ClosedFormHermite &&
        cfg.kernel.rfind("hermite", 0) != 0)
        throw PreconditionError("closed-form drift needs --kernel hermite:<N>");

    const dpp::StationarityReport rep = dpp::stationarity_run(
        kernel, dcfg, cfg.trajectories, cfg.seed, cfg.workers, cfg.bins, cfg.n_nodes);

    json j{{"config", cfg},
           {"bin_edges", rep.bin_edges},
           {"z_scores", rep.z_scores},
           {"occupancy_start", rep.occupancy_start},
           {"occupancy_end", rep.occupancy_end},
           {"max_abs_z", rep.max_abs_z},
           {"gap_distance", rep.gap_distance},
           {"collision_rate", rep.collision_rate},
           {"n_trajectories", rep.n_trajectories},
           {"stationary", rep.stationary}};

    if (cfg.out.empty()) {
        write_json(j, "");
        return 0;
    }

    // One representative trajectory for the snapshot stream, capped at ~200
    // records regardless of step count.
    write_json(j, cfg.out + ".json");
    dpp::JsonlWriter w(cfg.out + ".jsonl");
    w.record(json{{"config", cfg}, {"command", "diffuse"}});
    const dpp::DiscretizedKernel disc = dpp::discretize(kernel, cfg.n_nodes);
    dpp::Rng rng = dpp::make_stream(cfg.seed + 1, 0);
    dpp::DiffusionState state;
    state.xs = dpp::sample_dpp(disc, rng).points;
    const dpp::Diffusion diffusion(kernel, dcfg);
    const std::int64_t stride = std::max<std::int64_t>(1, dcfg.n_steps() / 200);
    std::int64_t k = 0;
    diffusion.run(state, rng, [&](const dpp::DiffusionState& s) {
        if (k % stride == 0 || k == dcfg.n_steps())
            w.record(json{{"t", s.time}, {"points", s.xs}});
        ++k;
    });
    return 0;
}

int cmd_acceptance(const dpp::AcceptanceOptions& opt, const std::vector<int>& ids,
                   const std::string& out_path) {
    std::vector<dpp::CriterionResult> results;
    if (ids.empty()) {
        results = dpp::run_acceptance(opt);
    } else {
        for (int id : ids) results.push_back(dpp::run_criterion(id, opt));
    }
    bool all_pass = true;
    for (const auto& r : results) {
        if (!r.pass) all_pass = false;
        char line[512];
        std::snprintf(line, sizeof line, "[%s] %d %s (%.1fs): %s",
                      r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                      r.detail.c_str());
        std::cout << line << "\n";
    }
    if (!out_path.empty()) {
        json arr = json::array();
        for (const auto& r : results)
            arr.push_back(json{{"id", r.id},
                               {"name", r.name},
                               {"pass", r.pass},
                               {"detail", r.detail},
                               {"seconds", r.seconds}});
        write_json(json{{"results", arr}, {"all_pass", all_pass}}, out_path);
    }
    return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"determinantal point process toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // check-kernel
    CLI::App* ck = app.add_subcommand("check-kernel", "verify kernel model assumptions");
    ConfigFlags ck_flags(ck);
    ck_flags.add_kernel();
    ck_flags.add_run();

    // sample
    CLI::App* sp = app.add_subcommand("sample", "draw configurations as JSONL");
    ConfigFlags sp_flags(sp);
    sp_flags.add_kernel();
    sp_flags.add_run();
    sp_flags.add_samples();
    double sp_palm_at = 0.0;
    CLI::Option* sp_palm_opt =
        sp->add_option("--palm-at", sp_palm_at, "sample the reduced process anchored here");

    // intensity
    CLI::App* in = app.add_subcommand("intensity", "binned one-point intensity vs model");
    ConfigFlags in_flags(in);
    in_flags.add_kernel();
    in_flags.add_run();
    in_flags.add_samples();
    in_flags.add_bins();
    double in_palm_at = 0.0;
    CLI::Option* in_palm_opt =
        in->add_option("--palm-at", in_palm_at, "profile the reduced process anchored here");

    // logderiv
    CLI::App* ld = app.add_subcommand("logderiv", "log-derivative estimator across the schedule");
    ConfigFlags ld_flags(ld);
    ld_flags.add_kernel();
    ld_flags.add_run();
    ld_flags.add_samples();
    ld_flags.add_anchor();
    ld_flags.add_schedule();

    // ibp-test
    CLI::App* ib = app.add_subcommand("ibp-test", "integration-by-parts consistency check");
    ConfigFlags ib_flags(ib);
    ib_flags.add_kernel();
    ib_flags.add_run();
    ib_flags.add_samples();
    ib_flags.add_schedule();
    ib_flags.add_observable();
    std::string ib_psi = "expcount:0.5:1.5";
    ib->add_option("--psi", ib_psi, "bounded statistic: expcount:lo:hi|invcount:lo:hi|one");

    // rn-check
    CLI::App* rn = app.add_subcommand("rn-check", "difference quotient of the change of measure");
    ConfigFlags rn_flags(rn);
    rn_flags.add_kernel();
    rn_flags.add_run();
    rn_flags.add_samples();
    rn_flags.add_anchor();
    rn_flags.add_rn();
    std::string rn_eps_list;
    rn->add_option("--eps-list", rn_eps_list, "shifts to test, e.g. 0.2,0.1,0.05");

    // diffuse
    CLI::App* df = app.add_subcommand("diffuse", "interacting diffusion stationarity run");
    ConfigFlags df_flags(df);
    df_flags.add_kernel();
    df_flags.add_run();
    df_flags.add_schedule();
    df_flags.add_dynamics();
    df_flags.add_bins();

    // acceptance
    CLI::App* ac = app.add_subcommand("acceptance", "run the acceptance suite");
    bool ac_quick = false;
    int ac_workers = 1;
    std::uint64_t ac_seed = dpp::AcceptanceOptions{}.seed;
    std::vector<int> ac_ids;
    std::string ac_out;
    ac->add_flag("--quick", ac_quick, "reduced sample counts");
    ac->add_option("--workers", ac_workers, "worker threads");
    ac->add_option("--seed", ac_seed, "root random seed");
    ac->add_option("--criterion", ac_ids, "run only these criterion ids (1-8)");
    ac->add_option("--out", ac_out, "also write results as JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (ck->parsed()) return cmd_check_kernel(ck_flags.resolve());
        if (sp->parsed()) {
            std::optional<double> palm;
            if (sp_palm_opt->count() > 0) palm = sp_palm_at;
            return cmd_sample(sp_flags.resolve(), palm);
        }
        if (in->parsed()) {
            std::optional<double> palm;
            if (in_palm_opt->count() > 0) palm = in_palm_at;
            return cmd_intensity(in_flags.resolve(), palm);
        }
        if (ld->parsed()) return cmd_logderiv(ld_flags.resolve());
        if (ib->parsed()) return cmd_ibp_test(ib_flags.resolve(), ib_psi);
        if (rn->parsed()) return cmd_rn_check(rn_flags.resolve(), rn_eps_list);
        if (df->parsed()) return cmd_diffuse(df_flags.resolve());
        if (ac->parsed()) {
            dpp::AcceptanceOptions opt;
            opt.quick = ac_quick;
            opt.workers = ac_workers;
            opt.seed = ac_seed;
            return cmd_acceptance(opt, ac_ids, ac_out);
        }
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

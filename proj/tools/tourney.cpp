#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tourney/asymptotics.hpp"
#include "tourney/errors.hpp"
#include "tourney/exact_engine.hpp"
#include "tourney/model_io.hpp"
#include "tourney/simulator.hpp"
#include "tourney/verify.hpp"

namespace {

namespace asy = tourney::asymptotics;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;

// Grid specs: a comma list ("100,1000"), "lin:start:stop:count" or
// "log:start:stop:count" (log-spaced endpoints inclusive).
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    auto parse_num = [](const std::string& s) {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw tourney::ConfigError("bad number in grid spec: " + s);
        return v;
    };
    if (spec.rfind("lin:", 0) == 0 || spec.rfind("log:", 0) == 0) {
        const bool log_spaced = spec[1] == 'o';
        std::vector<std::string> parts;
        std::stringstream ss(spec.substr(4));
        std::string tok;
        while (std::getline(ss, tok, ':')) parts.push_back(tok);
        if (parts.size() != 3)
            throw tourney::ConfigError("grid spec needs start:stop:count: " + spec);
        const double start = parse_num(parts[0]);
        const double stop = parse_num(parts[1]);
        const long long count = static_cast<long long>(parse_num(parts[2]));
        if (count < 1) throw tourney::ConfigError("grid count must be >= 1: " + spec);
        if (log_spaced && (start <= 0.0 || stop <= 0.0))
            throw tourney::ConfigError("log grid needs positive endpoints: " + spec);
        for (long long i = 0; i < count; ++i) {
            const double f =
                count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
            out.push_back(log_spaced ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                                     : start + f * (stop - start));
        }
        return out;
    }
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(parse_num(tok));
    }
    if (out.empty()) throw tourney::ConfigError("empty grid spec: " + spec);
    return out;
}

std::vector<long long> parse_int_grid(const std::string& spec) {
    std::vector<long long> out;
    for (double v : parse_grid(spec)) out.push_back(std::llround(v));
    return out;
}

ordered_json grid_json(const std::vector<double>& g) { return ordered_json(g); }
ordered_json grid_json(const std::vector<long long>& g) { return ordered_json(g); }

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tourney::ConfigError("cannot open output file " + path);
    out << text;
}

std::string csv_bool(bool b) { return b ? "1" : "0"; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string manifest_comment(const ordered_json& manifest) {
    return "# manifest: " + manifest.dump();
}

// ---------------------------------------------------------------------------

int cmd_exact(const std::string& model_spec, const std::string& n_spec,
              const std::string& t_spec, const std::string& out_path, bool with_bounds) {
    const tourney::OutcomeModel model = tourney::load_model(model_spec);
    const auto n_grid = parse_int_grid(n_spec);
    const auto t_grid = parse_grid(t_spec);
    for (long long n : n_grid)
        if (n < 4) throw tourney::ConfigError("exact: every n must be >= 4");

    ordered_json manifest;
    manifest["subcommand"] = with_bounds ? "bounds" : "exact";
    manifest["tool_version"] = kToolVersion;
    manifest["model"] = model.id;
    manifest["n_grid"] = grid_json(n_grid);
    manifest["t_grid"] = grid_json(t_grid);

    std::ostringstream csv;
    csv << "# schema: " << (with_bounds ? "bounds_v1" : "exact_v1") << "\n";
    csv << manifest_comment(manifest) << "\n";
    csv << "model_id,n,t,x_n,raw_threshold,p_n,lambda_n,pair_cov,var_W,stein_bound,"
           "mean_mismatch_bound,combined_bound,threshold_near_atom,cleanup_mass";
    if (with_bounds) csv << ",rate_envelope,combined_over_envelope";
    csv << "\n";

    for (long long n : n_grid) {
        tourney::ScoreLaws laws;
        try {
            laws = tourney::score_laws(model, n);
        } catch (const tourney::CapacityError& e) {
            throw tourney::CapacityError("at n=" + std::to_string(n) + ": " + e.what());
        }
        for (double t : t_grid) {
            const tourney::ExceedanceReport r = tourney::exceedance_report(model, n, t, &laws);
            csv << r.model_id << ',' << r.n << ',' << fmt(r.t) << ',' << fmt(r.x_n) << ','
                << fmt(r.raw_threshold) << ',' << fmt(r.p_n) << ',' << fmt(r.lambda_n) << ','
                << fmt(r.pair_cov) << ',' << fmt(r.var_w) << ',' << fmt(r.stein_bound) << ','
                << fmt(r.mean_mismatch_bound) << ',' << fmt(r.combined_bound) << ','
                << csv_bool(r.threshold_near_atom) << ',' << fmt(r.cleanup_mass);
            if (with_bounds) {
                const double env = asy::rate_envelope(std::max<long long>(n, 16));
                csv << ',' << fmt(env) << ',' << fmt(r.combined_bound / env);
            }
            csv << "\n";
        }
        std::cerr << "exact: n=" << n << " done (" << t_grid.size() << " thresholds)\n";
    }
    write_text(out_path, csv.str());
    return kExitOk;
}

int cmd_simulate(const std::string& model_spec, long long n, const std::string& t_spec,
                 int j_max, long long replicates, std::uint64_t seed, int workers,
                 const std::string& out_path, const std::string& format, bool with_exact) {
    tourney::SimConfig cfg;
    cfg.model = tourney::load_model(model_spec);
    cfg.n = n;
    cfg.t_grid = parse_grid(t_spec);
    cfg.j_max = j_max;
    cfg.replicates = replicates;
    cfg.seed = seed;
    cfg.workers = workers;

    std::vector<tourney::ExceedanceReport> refs;
    if (with_exact) {
        const tourney::ScoreLaws laws = tourney::score_laws(cfg.model, n);
        for (double t : cfg.t_grid)
            refs.push_back(tourney::exceedance_report(cfg.model, n, t, &laws));
    }

    const tourney::SimReport rep =
        tourney::run_experiment(cfg, with_exact ? &refs : nullptr);
    std::cerr << "simulate: " << replicates << " replicates at n=" << n << " in "
              << rep.wall_seconds << " s (" << workers << " workers)\n";

    ordered_json manifest;
    manifest["subcommand"] = "simulate";
    manifest["tool_version"] = kToolVersion;
    manifest["model"] = cfg.model.id;
    manifest["n"] = n;
    manifest["t_grid"] = grid_json(cfg.t_grid);
    manifest["j_max"] = j_max;
    manifest["replicates"] = replicates;
    manifest["seed"] = seed;
    manifest["with_exact"] = with_exact;

    if (format == "json") {
        ordered_json j;
        j["manifest"] = manifest;
        j["report"] = ordered_json::parse(tourney::report_to_json(rep));
        write_text(out_path, j.dump(2) + "\n");
        return kExitOk;
    }

    // tidy CSV: one row per (t, k) for W histograms, one per (j, bin) for the
    // order statistics; summary rows carry section-level scalars
    std::ostringstream csv;
    csv << "# schema: simulate_v1\n" << manifest_comment(manifest) << "\n";
    csv << "section,t,j,bin,value\n";
    for (const auto& w : rep.w_results) {
        for (std::size_t k = 0; k < w.hist.size(); ++k)
            csv << "w_hist," << fmt(w.t) << ",," << k << ',' << w.hist[k] << "\n";
        csv << "w_overflow," << fmt(w.t) << ",,," << w.overflow << "\n";
        csv << "w_mean," << fmt(w.t) << ",,," << fmt(w.mean) << "\n";
        csv << "w_var," << fmt(w.t) << ",,," << fmt(w.var) << "\n";
        csv << "tv_vs_limit," << fmt(w.t) << ",,," << fmt(w.tv_vs_limit) << "\n";
        if (w.has_exact) {
            csv << "lambda_exact," << fmt(w.t) << ",,," << fmt(w.lambda_exact) << "\n";
            csv << "tv_vs_exact," << fmt(w.t) << ",,," << fmt(w.tv_vs_exact) << "\n";
        }
    }
    for (const auto& o : rep.order_stats) {
        for (std::size_t b = 0; b < o.hist.size(); ++b) {
            if (o.hist[b] == 0) continue;  // sparse rows; 2000 bins are mostly empty
            csv << "m_hist,," << o.j << ',' << b << ',' << o.hist[b] << "\n";
        }
        csv << "m_underflow,," << o.j << ",," << o.underflow << "\n";
        csv << "m_overflow,," << o.j << ",," << o.overflow << "\n";
        csv << "m_mean,," << o.j << ",," << fmt(o.mean) << "\n";
        csv << "m_var,," << o.j << ",," << fmt(o.var) << "\n";
    }
    csv << "huber_mean,,,," << fmt(rep.huber_mean) << "\n";
    csv << "huber_var,,,," << fmt(rep.huber_var) << "\n";
    write_text(out_path, csv.str());
    return kExitOk;
}

int cmd_verify(unsigned long long budget, const std::string& out_path) {
    const tourney::VerifyReport report = tourney::run_verify_suite(budget);
    for (const auto& c : report.checks) {
        const char* s = c.status == tourney::CheckStatus::Pass     ? "PASS"
                        : c.status == tourney::CheckStatus::Skipped ? "SKIPPED"
                                                                    : "FAIL";
        std::printf("%-8s %-28s max_violation=%.3e grid=%lld %s\n", s, c.name.c_str(),
                    c.max_violation, c.grid_points, c.detail.c_str());
    }
    if (!out_path.empty()) write_text(out_path, tourney::verify_report_to_json(report) + "\n");
    return report.all_passed() ? kExitOk : kExitVerifyFail;
}

int cmd_limits(const std::string& n_spec, const std::string& t_spec, int j_max,
               const std::string& out_path) {
    const auto n_grid = parse_int_grid(n_spec);
    const auto t_grid = parse_grid(t_spec);

    ordered_json manifest;
    manifest["subcommand"] = "limits";
    manifest["tool_version"] = kToolVersion;
    manifest["n_grid"] = grid_json(n_grid);
    manifest["t_grid"] = grid_json(t_grid);
    manifest["j_max"] = j_max;

    std::ostringstream csv;
    csv << "# schema: limits_v1\n" << manifest_comment(manifest) << "\n";
    csv << "n,t,a_n,b_n,x_n,predicted_lambda,predicted_pair_cov,rate_envelope,"
           "huber_centering,phi_xn_asymptotic";
    for (int j = 0; j <= j_max; ++j) csv << ",limit_cdf_j" << j;
    csv << "\n";
    for (long long n : n_grid) {
        const auto nc = asy::norming(n);
        for (double t : t_grid) {
            csv << n << ',' << fmt(t) << ',' << fmt(nc.a_n) << ',' << fmt(nc.b_n) << ','
                << fmt(asy::x_n(n, t)) << ',' << fmt(asy::predicted_lambda(t)) << ','
                << fmt(asy::predicted_pair_cov(n, t)) << ','
                << (n >= 16 ? fmt(asy::rate_envelope(n)) : std::string("")) << ','
                << fmt(asy::huber_centering(n)) << ',' << fmt(asy::phi_xn_asymptotic(n, t));
            for (int j = 0; j <= j_max; ++j)
                csv << ',' << fmt(asy::order_stat_limit_cdf({t, j}));
            csv << "\n";
        }
    }
    write_text(out_path, csv.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"extreme scores in round-robin tournaments: exact, asymptotic and simulated"};
    app.require_subcommand(1);

    std::string model_spec = "chess";
    std::string n_spec, t_spec = "0";
    std::string out_path, format = "csv";
    int j_max = 0;
    long long n_single = 100, replicates = 1000;
    std::uint64_t seed = 0;
    int workers = 1;
    unsigned long long budget = 100'000'000ULL;
    bool with_exact = false;

    auto* exact = app.add_subcommand("exact", "exact exceedance reports over an (n, t) grid");
    exact->add_option("--model", model_spec, "model file, or 'classical'/'chess'");
    exact->add_option("--n", n_spec, "n grid (comma list, lin:, log:)")->required();
    exact->add_option("--t", t_spec, "t grid");
    exact->add_option("--out", out_path, "output path ('-' = stdout)");

    auto* bounds = app.add_subcommand("bounds", "exact bounds vs the rate envelope");
    bounds->add_option("--model", model_spec, "model file, or 'classical'/'chess'");
    bounds->add_option("--n", n_spec, "n grid")->required();
    bounds->add_option("--t", t_spec, "t grid");
    bounds->add_option("--out", out_path, "output path");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo tournament experiment");
    simulate->add_option("--model", model_spec, "model file, or 'classical'/'chess'");
    simulate->add_option("--n", n_single, "number of players");
    simulate->add_option("--t", t_spec, "t grid");
    simulate->add_option("--j", j_max, "deepest order statistic (0 = maximum only)");
    simulate->add_option("--replicates", replicates, "number of tournaments");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--workers", workers, "worker threads");
    simulate->add_option("--out", out_path, "output path");
    simulate->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    simulate->add_flag("--with-exact", with_exact,
                       "also compute exact lambda_n per t for the second TV column");

    auto* verify = app.add_subcommand("verify", "oracle-vs-engine verification suite");
    verify->add_option("--budget", budget, "enumeration term budget");
    verify->add_option("--out", out_path, "JSON report path");

    auto* limits = app.add_subcommand("limits", "tabulate the asymptotic formulas");
    limits->add_option("--n", n_spec, "n grid")->required();
    limits->add_option("--t", t_spec, "t grid");
    limits->add_option("--j", j_max, "deepest order statistic");
    limits->add_option("--out", out_path, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (exact->parsed()) return cmd_exact(model_spec, n_spec, t_spec, out_path, false);
        if (bounds->parsed()) return cmd_exact(model_spec, n_spec, t_spec, out_path, true);
        if (simulate->parsed())
            return cmd_simulate(model_spec, n_single, t_spec, j_max, replicates, seed, workers,
                                out_path, format, with_exact);
        if (verify->parsed()) return cmd_verify(budget, out_path);
        if (limits->parsed()) return cmd_limits(n_spec, t_spec, j_max, out_path);
    } catch (const tourney::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const tourney::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const tourney::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

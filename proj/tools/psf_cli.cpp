// psf: pattern similarity-based forecasting of monthly demand.
//
//   psf synth     --out data.csv --seed 7 --count 12 --years 10 --noise 0.03
//   psf tune      --data data.csv --models FNM,k-NNw --out runs/tune
//   psf forecast  --data data.csv --models FNM+ES --out runs/fc [--future]
//   psf benchmark --data data.csv --models table1,table2 --seed 7 --out runs/bench
//   psf evaluate  --forecast runs/fc/fnm_es.forecast.csv
//   psf rank      --metrics runs/bench/metrics.csv --by rmse

#include "psf/app.hpp"
#include "psf/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct RunOptions {
    std::string config_file;
    std::string data;
    std::string out;
    std::string models;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> ensemble_size;
    std::optional<unsigned> threads;
    bool future = false;
    std::vector<std::string> overrides;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("-c,--config", o.config_file, "flat key=value configuration file");
    cmd->add_option("-d,--data", o.data, "input CSV (id,year,month,value)");
    cmd->add_option("-o,--out", o.out, "output directory");
    cmd->add_option("-m,--models", o.models,
                    "comma list of models, or table1 / table2 / all");
    cmd->add_option("--seed", o.seed, "run seed (required for homogeneous ensembles)");
    cmd->add_option("--horizon", o.horizon, "forecast horizon in months");
    cmd->add_option("-K,--members", o.ensemble_size, "homogeneous ensemble size");
    cmd->add_option("-j,--threads", o.threads, "worker threads (0: all cores)");
    cmd->add_option("--set", o.overrides, "extra key=value setting, repeatable");
}

psf::RunConfig to_run(const RunOptions& o) {
    psf::RunConfig run;
    if (!o.config_file.empty()) run.load_file(o.config_file);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw psf::ConfigError("--set expects key=value, got '" + kv + "'");
        run.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.data.empty()) run.data_path = o.data;
    if (!o.out.empty()) run.out_dir = o.out;
    if (!o.models.empty()) run.models = o.models;
    if (o.seed) run.seed = o.seed;
    if (o.horizon) run.horizon = *o.horizon;
    if (o.ensemble_size) run.ensemble_size = *o.ensemble_size;
    if (o.threads) run.threads = *o.threads;
    if (o.future) run.future = true;
    return run;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pattern similarity-based forecasting of monthly electricity demand"};
    app.set_version_flag("--version", psf::kVersion);
    app.require_subcommand(1);

    RunOptions forecast_opts, tune_opts, bench_opts;
    auto* forecast = app.add_subcommand("forecast", "tune and forecast each series");
    add_run_options(forecast, forecast_opts);
    forecast->add_flag("--future", forecast_opts.future, "forecast past the end of the data");

    auto* tune = app.add_subcommand("tune", "grid-search hyperparameters per series");
    add_run_options(tune, tune_opts);

    auto* bench = app.add_subcommand("benchmark", "tune, forecast, score and rank");
    add_run_options(bench, bench_opts);

    std::string eval_in, eval_out = "-";
    auto* evaluate = app.add_subcommand("evaluate", "score a forecast CSV with actuals");
    evaluate->add_option("-f,--forecast", eval_in, "forecast CSV")->required();
    evaluate->add_option("-o,--out", eval_out, "metrics CSV ('-' for stdout)");

    std::string rank_in, rank_by = "mape", rank_out = "-";
    auto* rank = app.add_subcommand("rank", "average within-series ranks of models");
    rank->add_option("--metrics", rank_in, "per-series metrics CSV")->required();
    rank->add_option("--by", rank_by, "mape or rmse");
    rank->add_option("-o,--out", rank_out, "ranks CSV ('-' for stdout)");

    std::string synth_out = "-";
    std::uint64_t synth_seed = 1;
    int synth_count = 12, synth_years = 10;
    double synth_noise = 0.03;
    auto* synth = app.add_subcommand("synth", "write a synthetic demand corpus");
    synth->add_option("-o,--out", synth_out, "output CSV ('-' for stdout)");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--count", synth_count, "number of series");
    synth->add_option("--years", synth_years, "years per series");
    synth->add_option("--noise", synth_noise, "relative noise sd");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*forecast) return psf::cmd_forecast(to_run(forecast_opts));
        if (*tune) return psf::cmd_tune(to_run(tune_opts));
        if (*bench) return psf::cmd_benchmark(to_run(bench_opts));
        if (*evaluate) return psf::cmd_evaluate(eval_in, eval_out);
        if (*rank) return psf::cmd_rank(rank_in, rank_by, rank_out);
        if (*synth) return psf::cmd_synth(synth_out, synth_seed, synth_count, synth_years, synth_noise);
    } catch (const psf::Error& e) {
        std::cerr << "psf: " << e.what() << '\n';
        return psf::exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "psf: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

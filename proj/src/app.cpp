#include "psf/app.hpp"

#include "psf/error.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

namespace psf {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Model ids

namespace {

std::string squash(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (c == '-' || c == '_' || c == ' ') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

} // namespace

ModelId ModelId::parse(const std::string& name) {
    const std::string key = squash(name);
    ModelId id;
    if (key == "snaive" || key == "seasonalnaive") {
        id.type = Type::SeasonalNaive;
        return id;
    }
    for (int e = 1; e <= 4; ++e) {
        if (key == "ensemble" + std::to_string(e) || key == "e" + std::to_string(e)) {
            id.type = Type::Heterogeneous;
            id.ensemble = static_cast<EnsembleId>(e - 1);
            return id;
        }
    }
    for (int s = 1; s <= 5; ++s) {
        if (key == "fnme" + std::to_string(s) || key == "s" + std::to_string(s)) {
            id.type = Type::Homogeneous;
            id.strategy = static_cast<Strategy>(s - 1);
            return id;
        }
    }
    std::string base = key;
    std::string suffix;
    if (auto plus = key.find('+'); plus != std::string::npos) {
        base = key.substr(0, plus);
        suffix = key.substr(plus + 1);
    }
    if (base == "knnw" || base == "knn") {
        id.kind = ModelKind::KNNW;
    } else if (base == "fnm") {
        id.kind = ModelKind::FNM;
    } else if (base == "nwe" || base == "nw") {
        id.kind = ModelKind::NWE;
    } else if (base == "grnn") {
        id.kind = ModelKind::GRNN;
    } else {
        throw ConfigError("unknown model '" + name + "'");
    }
    if (suffix.empty() || suffix == "v2") {
        id.coding = Coding::V2;
    } else if (suffix == "rw" || suffix == "arima") {
        id.coding = Coding::RW;
    } else if (suffix == "es" || suffix == "ets") {
        id.coding = Coding::ES;
    } else {
        throw ConfigError("unknown coding variant in model '" + name + "'");
    }
    return id;
}

std::string ModelId::label() const {
    switch (type) {
    case Type::SeasonalNaive: return "SNaive";
    case Type::Heterogeneous: return to_string(ensemble);
    case Type::Homogeneous: return to_string(strategy);
    case Type::Base: break;
    }
    std::string out = to_string(kind);
    if (coding == Coding::RW) out += "+RW";
    if (coding == Coding::ES) out += "+ES";
    return out;
}

std::vector<ModelId> table1_models() {
    std::vector<ModelId> out;
    const ModelId::Coding codings[] = {ModelId::Coding::V2, ModelId::Coding::RW,
                                       ModelId::Coding::ES};
    for (int g = 0; g < 3; ++g) {
        for (ModelKind kind : kAllKinds) {
            ModelId id;
            id.kind = kind;
            id.coding = codings[g];
            out.push_back(id);
        }
        ModelId ens;
        ens.type = ModelId::Type::Heterogeneous;
        ens.ensemble = static_cast<EnsembleId>(g);
        out.push_back(ens);
    }
    ModelId e4;
    e4.type = ModelId::Type::Heterogeneous;
    e4.ensemble = EnsembleId::E4;
    out.push_back(e4);
    return out;
}

std::vector<ModelId> table2_models() {
    std::vector<ModelId> out;
    for (int s = 0; s < 5; ++s) {
        ModelId id;
        id.type = ModelId::Type::Homogeneous;
        id.strategy = static_cast<Strategy>(s);
        out.push_back(id);
    }
    return out;
}

std::vector<ModelId> parse_model_list(const std::string& list) {
    std::vector<ModelId> out;
    auto add = [&](const ModelId& id) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    };
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string key = squash(item);
        if (key.empty()) continue;
        if (key == "table1" || key == "all") {
            for (const auto& id : table1_models()) add(id);
        }
        if (key == "table2" || key == "all") {
            for (const auto& id : table2_models()) add(id);
        }
        if (key != "table1" && key != "table2" && key != "all") add(ModelId::parse(item));
    }
    if (out.empty()) throw ConfigError("no models selected");
    return out;
}

// ---------------------------------------------------------------------------
// Run configuration

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError("bad value '" + text + "' for " + key);
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!trim(item).empty()) out.push_back(parse_number<T>(key, item));
    }
    if (out.empty()) throw ConfigError(key + " needs at least one value");
    return out;
}

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, end};
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) out += ',';
        if constexpr (std::is_floating_point_v<T>) {
            out += shortest(v);
        } else {
            out += std::to_string(v);
        }
    }
    return out;
}

} // namespace

void RunConfig::set(const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    if (key == "data") {
        data_path = trim(value);
    } else if (key == "out") {
        out_dir = trim(value);
    } else if (key == "models") {
        models = trim(value);
    } else if (key == "horizon") {
        horizon = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
        seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "K") {
        ensemble_size = parse_number<std::size_t>(key, value);
    } else if (key == "train_frac") {
        train_frac = parse_number<double>(key, value);
    } else if (key == "feature_frac") {
        feature_frac = parse_number<double>(key, value);
    } else if (key == "sigma_s") {
        sigma_s = parse_number<double>(key, value);
    } else if (key == "sigma_x") {
        sigma_x = parse_number<double>(key, value);
    } else if (key == "sigma_y") {
        sigma_y = parse_number<double>(key, value);
    } else if (key == "future") {
        const std::string v = trim(value);
        if (v != "true" && v != "false" && v != "1" && v != "0") {
            throw ConfigError("future must be true or false");
        }
        future = v == "true" || v == "1";
    } else if (key == "threads") {
        threads = parse_number<unsigned>(key, value);
    } else if (key == "grid.n") {
        grid.n_values = parse_list<std::size_t>(key, value);
    } else if (key == "grid.k") {
        grid.k_values = parse_list<std::size_t>(key, value);
    } else if (key == "grid.sigma") {
        grid.sigma_values = parse_list<double>(key, value);
    } else if (key == "grid.h") {
        grid.h_values = parse_list<double>(key, value);
    } else {
        throw ConfigError("unknown setting '" + key + "'");
    }
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

std::string RunConfig::echo() const {
    // The output directory and thread count do not affect results.
    std::ostringstream out;
    out << "data=" << data_path << '\n'
        << "models=" << models << '\n'
        << "horizon=" << horizon << '\n'
        << "seed=" << (seed ? std::to_string(*seed) : std::string("none")) << '\n'
        << "K=" << ensemble_size << '\n'
        << "train_frac=" << shortest(train_frac) << '\n'
        << "feature_frac=" << shortest(feature_frac) << '\n'
        << "sigma_s=" << shortest(sigma_s) << '\n'
        << "sigma_x=" << shortest(sigma_x) << '\n'
        << "sigma_y=" << shortest(sigma_y) << '\n'
        << "future=" << (future ? "true" : "false") << '\n'
        << "grid.n=" << join(grid.n_values) << '\n'
        << "grid.k=" << join(grid.k_values) << '\n'
        << "grid.sigma=" << join(grid.sigma_values) << '\n'
        << "grid.h=" << join(grid.h_values) << '\n';
    return out.str();
}

void RunConfig::validate() const {
    const auto ids = parse_model_list(models);
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    const bool stochastic = std::any_of(ids.begin(), ids.end(), [](const ModelId& id) {
        return id.type == ModelId::Type::Homogeneous;
    });
    if (stochastic && !seed) {
        throw ConfigError("homogeneous ensembles are stochastic; a seed is required");
    }
    if (grid.n_values.empty() || grid.k_values.empty() || grid.sigma_values.empty() ||
        grid.h_values.empty()) {
        throw ConfigError("every grid list needs at least one value");
    }
}

std::uint64_t series_seed(std::uint64_t run_seed, const std::string& series_id) {
    // FNV-1a of the id, so the seed does not depend on series order.
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : series_id) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return derive_seed(run_seed, hash);
}

// ---------------------------------------------------------------------------
// Pipeline

SeriesResult run_series(const MonthlySeries& series, const std::vector<ModelId>& models,
                        const RunConfig& run, bool tune_only) {
    SeriesResult result;
    result.id = series.id();
    try {
        result.split = run.future ? SplitSpec::future(series, run.horizon)
                                  : SplitSpec::holdout(series, run.horizon);

        std::set<ModelKind> need_v2;
        std::set<ModelKind> need_v1;
        for (const auto& id : models) {
            switch (id.type) {
            case ModelId::Type::Base:
                (id.coding == ModelId::Coding::V2 ? need_v2 : need_v1).insert(id.kind);
                break;
            case ModelId::Type::Heterogeneous:
                if (id.ensemble == EnsembleId::E1 || id.ensemble == EnsembleId::E4) {
                    need_v2.insert(std::begin(kAllKinds), std::end(kAllKinds));
                }
                if (id.ensemble != EnsembleId::E1) {
                    need_v1.insert(std::begin(kAllKinds), std::end(kAllKinds));
                }
                break;
            case ModelId::Type::Homogeneous:
                need_v2.insert(ModelKind::FNM);
                break;
            case ModelId::Type::SeasonalNaive:
                break;
            }
        }

        auto tune = [&](ModelKind kind, Variant variant) {
            PsfmConfig base;
            base.m = run.horizon;
            base.variant = variant;
            GridResult grid =
                grid_search(series, kind, run.grid, result.split.test_origin, base);
            PsfmConfig best = grid.best;
            result.grids.emplace_back(to_string(kind) + (variant == Variant::V2 ? "/V2" : "/V1"),
                                      std::move(grid));
            return best;
        };
        for (ModelKind kind : kAllKinds) {
            if (need_v2.count(kind)) result.tuned.v2[kind] = tune(kind, Variant::V2);
            if (need_v1.count(kind)) result.tuned.v1[kind] = tune(kind, Variant::V1);
        }

        if (result.split.has_actuals(series)) {
            auto window = series.values().subspan(result.split.test_origin + 1, run.horizon);
            result.actual.assign(window.begin(), window.end());
        }
        if (tune_only) return result;

        const std::uint64_t seed = series_seed(run.seed.value_or(0), series.id());
        for (const auto& id : models) {
            std::vector<double> forecast;
            switch (id.type) {
            case ModelId::Type::Base: {
                PsfmConfig config;
                if (id.coding == ModelId::Coding::V2) {
                    config = result.tuned.v2.at(id.kind);
                } else {
                    config = with_coding_family(result.tuned.v1.at(id.kind),
                                                id.coding == ModelId::Coding::RW
                                                    ? ScalarFamily::RandomWalk
                                                    : ScalarFamily::Smoothing);
                }
                forecast = forecast_single(series, config, result.split).forecast;
                break;
            }
            case ModelId::Type::Heterogeneous:
                forecast = heterogeneous_forecast(series, id.ensemble, result.tuned, result.split)
                               .forecast;
                break;
            case ModelId::Type::Homogeneous: {
                DiversitySpec spec;
                spec.strategy = id.strategy;
                spec.base = result.tuned.v2.at(ModelKind::FNM);
                spec.train_frac = run.train_frac;
                spec.feature_frac = run.feature_frac;
                spec.sigma_s = run.sigma_s;
                spec.sigma_x = run.sigma_x;
                spec.sigma_y = run.sigma_y;
                spec.K = run.ensemble_size;
                spec.seed = derive_seed(seed, static_cast<std::uint64_t>(id.strategy));
                forecast = homogeneous_forecast(series, spec, result.split).forecast;
                break;
            }
            case ModelId::Type::SeasonalNaive: {
                auto history = series.values().first(result.split.test_origin + 1);
                forecast = forecast_scalar(history, ScalarModelSpec::seasonal_naive(12),
                                           run.horizon);
                break;
            }
            }
            result.forecasts.emplace_back(id, std::move(forecast));
        }
    } catch (const std::exception& e) {
        result.error = e.what();
        result.failure = std::current_exception();
        result.forecasts.clear();
    }
    return result;
}

std::vector<SeriesResult> run_all(const std::vector<MonthlySeries>& data,
                                  const std::vector<ModelId>& models, const RunConfig& run,
                                  bool tune_only) {
    std::vector<SeriesResult> results(data.size());
    unsigned workers = run.threads ? run.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, data.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < data.size();) {
            results[i] = run_series(data[i], models, run, tune_only);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return results;
}

namespace {

const std::vector<double>* find_forecast(const SeriesResult& r, const ModelId& id) {
    for (const auto& [model, forecast] : r.forecasts) {
        if (model == id) return &forecast;
    }
    return nullptr;
}

} // namespace

std::vector<ReportRow> build_report(const std::vector<SeriesResult>& results,
                                    const std::vector<ModelId>& models, const std::string& by) {
    if (by != "mape" && by != "rmse") throw ConfigError("rank criterion must be mape or rmse");
    ScoreTable scores;
    for (const auto& id : models) scores.models.push_back(id.label());
    std::vector<std::vector<MetricSet>> per_model(models.size());
    for (const auto& r : results) {
        if (!r.error.empty() || r.actual.empty()) continue;
        std::vector<double> row;
        for (std::size_t j = 0; j < models.size(); ++j) {
            const auto* forecast = find_forecast(r, models[j]);
            if (!forecast) throw IncompleteTableError(models[j].label() + " missing for " + r.id);
            MetricSet m = compute_metrics(r.actual, *forecast);
            per_model[j].push_back(m);
            row.push_back(by == "mape" ? m.mape : m.rmse);
        }
        scores.series.push_back(r.id);
        scores.values.push_back(std::move(row));
    }
    if (scores.series.empty()) throw InsufficientDataError("no series produced scores");
    const RankTable ranks = rank_models(scores);
    std::vector<ReportRow> rows;
    for (std::size_t j = 0; j < models.size(); ++j) {
        rows.push_back({models[j].label(), average_metrics(per_model[j]), ranks.average_rank[j]});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Commands

int exit_code(ErrorCategory category) {
    switch (category) {
    case ErrorCategory::Data: return 1;
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Runtime: return 3;
    }
    return 3;
}

namespace {

// Writes via a temporary file and rename so readers never see partial output.
void write_file(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ParseError("cannot write '" + path.string() + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

std::string slug(const std::string& label) {
    std::string out;
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (c == '+') {
            out.push_back('_');
        }
    }
    return out;
}

std::string fixed(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string manifest(const std::string& command, const RunConfig& run) {
    return "psf " + std::string(kVersion) + "\ncommand=" + command + "\n" + run.echo() +
           "seed_derivation=series: splitmix(seed, fnv1a(id)); strategy Sj: "
           "splitmix(series, j-1); member k: splitmix(strategy, k)\n";
}

std::vector<MonthlySeries> load_for(const RunConfig& run) {
    run.validate();
    if (run.data_path.empty()) throw ConfigError("no data file given");
    return load_csv(run.data_path);
}

std::string tuned_csv(const std::vector<SeriesResult>& results) {
    std::string out = "id,model,variant,n,k,sigma,h,cv_mape\n";
    for (const auto& r : results) {
        for (const auto& [name, grid] : r.grids) {
            const auto& c = grid.best;
            out += r.id + ',' + to_string(c.kind) + ',' + (c.variant == Variant::V2 ? "V2" : "V1") +
                   ',' + std::to_string(c.n) + ',';
            out += (c.kind == ModelKind::KNNW ? std::to_string(c.k) : "") + ',';
            out += (c.kind == ModelKind::FNM || c.kind == ModelKind::GRNN ? shortest(c.sigma) : "") + ',';
            out += (c.kind == ModelKind::NWE ? shortest(c.h.front()) : "") + ',';
            out += fixed(grid.best_score) + '\n';
        }
    }
    return out;
}

std::string failures_csv(const std::vector<SeriesResult>& results) {
    std::string out = "id,error\n";
    for (const auto& r : results) {
        if (r.error.empty()) continue;
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        out += r.id + ',' + msg + '\n';
    }
    return out;
}

} // namespace

int cmd_forecast(const RunConfig& run) {
    const auto data = load_for(run);
    const auto models = parse_model_list(run.models);
    const auto results = run_all(data, models, run);
    for (const auto& r : results) {
        if (r.failure) std::rethrow_exception(r.failure);
    }

    fs::create_directories(run.out_dir);
    for (const auto& id : models) {
        const bool with_actual = !run.future;
        std::string out = with_actual ? "id,year,month,forecast,actual\n" : "id,year,month,forecast\n";
        for (std::size_t s = 0; s < data.size(); ++s) {
            const auto& r = results[s];
            const auto* forecast = find_forecast(r, id);
            for (std::size_t t = 0; t < forecast->size(); ++t) {
                const YearMonth ym = data[s].month_of(r.split.test_origin + 1 + t);
                out += r.id + ',' + std::to_string(ym.year) + ',' + std::to_string(ym.month) + ',' +
                       shortest((*forecast)[t]);
                if (with_actual) out += ',' + shortest(r.actual[t]);
                out += '\n';
            }
        }
        write_file(fs::path(run.out_dir) / (slug(id.label()) + ".forecast.csv"), out);
    }
    write_file(fs::path(run.out_dir) / "manifest.txt", manifest("forecast", run));
    return 0;
}

int cmd_tune(const RunConfig& run) {
    const auto data = load_for(run);
    const auto models = parse_model_list(run.models);
    const auto results = run_all(data, models, run, /*tune_only=*/true);
    for (const auto& r : results) {
        if (r.failure) std::rethrow_exception(r.failure);
    }
    const fs::path dir = run.out_dir;
    fs::create_directories(dir / "scores");
    for (const auto& r : results) {
        for (const auto& [name, grid] : r.grids) {
            std::ostringstream table;
            table.precision(10);
            write_score_table(table, grid.best.kind, grid.table);
            std::string file = r.id + "_" + slug(to_string(grid.best.kind)) + "_" +
                               (grid.best.variant == Variant::V2 ? "v2" : "v1") + ".csv";
            write_file(dir / "scores" / file, table.str());
        }
    }
    write_file(dir / "tuned.csv", tuned_csv(results));
    write_file(dir / "manifest.txt", manifest("tune", run));
    return 0;
}

int cmd_benchmark(const RunConfig& run) {
    if (run.future) throw ConfigError("benchmark needs held-out actuals; future=true not allowed");
    const auto data = load_for(run);
    const auto models = parse_model_list(run.models);
    const auto results = run_all(data, models, run);

    const bool any_ok = std::any_of(results.begin(), results.end(),
                                    [](const SeriesResult& r) { return r.error.empty(); });
    const fs::path dir = run.out_dir;
    fs::create_directories(dir);
    write_file(dir / "failures.csv", failures_csv(results));
    write_file(dir / "manifest.txt", manifest("benchmark", run));
    if (!any_ok) {
        std::cerr << "benchmark: every series failed; see " << (dir / "failures.csv").string()
                  << '\n';
        return 3;
    }

    std::string metrics = "id,model,median_ape,mape,iqr,rmse\n";
    std::string forecasts = "id,model,year,month,forecast,actual\n";
    for (std::size_t s = 0; s < data.size(); ++s) {
        const auto& r = results[s];
        if (!r.error.empty()) continue;
        for (const auto& [id, forecast] : r.forecasts) {
            const MetricSet m = compute_metrics(r.actual, forecast);
            metrics += r.id + ',' + id.label() + ',' + fixed(m.median_ape) + ',' + fixed(m.mape) +
                       ',' + fixed(m.iqr_ape) + ',' + fixed(m.rmse) + '\n';
            for (std::size_t t = 0; t < forecast.size(); ++t) {
                const YearMonth ym = data[s].month_of(r.split.test_origin + 1 + t);
                forecasts += r.id + ',' + id.label() + ',' + std::to_string(ym.year) + ',' +
                             std::to_string(ym.month) + ',' + shortest(forecast[t]) + ',' +
                             shortest(r.actual[t]) + '\n';
            }
        }
    }
    write_file(dir / "metrics.csv", metrics);
    write_file(dir / "forecasts.csv", forecasts);
    write_file(dir / "tuned.csv", tuned_csv(results));

    auto subset = [&](const std::vector<ModelId>& table) {
        std::vector<ModelId> out;
        for (const auto& id : table) {
            if (std::find(models.begin(), models.end(), id) != models.end()) out.push_back(id);
        }
        return out;
    };
    auto emit = [&](const std::string& stem, const std::vector<ModelId>& rows) {
        if (rows.empty()) return;
        const auto report = build_report(results, rows, "mape");
        write_file(dir / (stem + ".txt"), render_report_text(report));
        write_file(dir / (stem + ".csv"), render_report_csv(report));
    };
    emit("table1", subset(table1_models()));
    emit("table2", subset(table2_models()));
    emit("report", models);

    for (const std::string by : {"mape", "rmse"}) {
        const auto report = build_report(results, models, by);
        std::string ranks = "model,avg_rank\n";
        for (const auto& row : report) ranks += row.model + ',' + fixed(row.avg_rank, 4) + '\n';
        write_file(dir / ("ranks_" + by + ".csv"), ranks);
    }
    return 0;
}

namespace {

std::vector<std::vector<std::string>> read_table(const std::string& path,
                                                 const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != expected_header) {
        throw ParseError("line 1: expected header '" + expected_header + "'");
    }
    const auto columns = static_cast<std::size_t>(std::count(expected_header.begin(), expected_header.end(), ',') + 1);
    std::vector<std::vector<std::string>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (fields.size() != columns) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(columns) + " fields");
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        write_file(path, content);
    }
}

} // namespace

int cmd_evaluate(const std::string& forecast_csv, const std::string& out_csv) {
    const auto rows = read_table(forecast_csv, "id,year,month,forecast,actual");
    std::vector<std::string> ids;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_id;
    for (const auto& row : rows) {
        if (!by_id.count(row[0])) ids.push_back(row[0]);
        auto& [actual, forecast] = by_id[row[0]];
        forecast.push_back(parse_number<double>("forecast", row[3]));
        actual.push_back(parse_number<double>("actual", row[4]));
    }
    if (ids.empty()) throw ParseError("no forecast rows in '" + forecast_csv + "'");
    std::string out = "id,median_ape,mape,iqr,rmse\n";
    std::vector<MetricSet> all;
    for (const auto& id : ids) {
        const auto& [actual, forecast] = by_id[id];
        const MetricSet m = compute_metrics(actual, forecast);
        all.push_back(m);
        out += id + ',' + fixed(m.median_ape) + ',' + fixed(m.mape) + ',' + fixed(m.iqr_ape) + ',' +
               fixed(m.rmse) + '\n';
    }
    const MetricSet avg = average_metrics(all);
    out += "ALL," + fixed(avg.median_ape) + ',' + fixed(avg.mape) + ',' + fixed(avg.iqr_ape) + ',' +
           fixed(avg.rmse) + '\n';
    write_output(out_csv, out);
    return 0;
}

int cmd_rank(const std::string& metrics_csv, const std::string& by, const std::string& out_csv) {
    if (by != "mape" && by != "rmse") throw ConfigError("rank criterion must be mape or rmse");
    const auto rows = read_table(metrics_csv, "id,model,median_ape,mape,iqr,rmse");
    ScoreTable table;
    for (const auto& row : rows) {
        if (std::find(table.series.begin(), table.series.end(), row[0]) == table.series.end()) {
            table.series.push_back(row[0]);
        }
        if (std::find(table.models.begin(), table.models.end(), row[1]) == table.models.end()) {
            table.models.push_back(row[1]);
        }
    }
    table.values.assign(table.series.size(),
                        std::vector<double>(table.models.size(), std::nan("")));
    for (const auto& row : rows) {
        const auto s = static_cast<std::size_t>(
            std::find(table.series.begin(), table.series.end(), row[0]) - table.series.begin());
        const auto j = static_cast<std::size_t>(
            std::find(table.models.begin(), table.models.end(), row[1]) - table.models.begin());
        table.values[s][j] = parse_number<double>(by, by == "mape" ? row[3] : row[5]);
    }
    const RankTable ranks = rank_models(table);
    std::string out = "model,avg_rank\n";
    for (std::size_t j = 0; j < ranks.models.size(); ++j) {
        out += ranks.models[j] + ',' + fixed(ranks.average_rank[j], 4) + '\n';
    }
    write_output(out_csv, out);
    return 0;
}

int cmd_synth(const std::string& out_csv, std::uint64_t seed, int count, int years,
              double noise_sd) {
    if (count < 1) throw ConfigError("series count must be positive");
    const auto corpus = synthetic_corpus(seed, count, years, noise_sd);
    std::ostringstream out;
    write_csv(out, corpus);
    write_output(out_csv, out.str());
    return 0;
}

} // namespace psf

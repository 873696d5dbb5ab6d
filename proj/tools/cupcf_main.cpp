// Command-line front end for the cupcf engine:
//   validate    ingest a rating file and print corpus statistics
//   similarity  dump a user-user similarity matrix (or one user's neighbors)
//   predict     score unrated items for one user
//   recommend   print a top-N recommendation list for one user
//   evaluate    run the k-fold experiment and write JSON/Markdown reports

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cupcf/cupcf.hpp"

namespace fs = std::filesystem;

namespace {

/// Relative paths that do not exist are retried under $CUPCF_DATA_DIR.
std::string resolve_path(const std::string& path) {
    if (fs::exists(path) || fs::path(path).is_absolute()) return path;
    if (const char* dir = std::getenv("CUPCF_DATA_DIR")) {
        const auto joined = fs::path(dir) / path;
        if (fs::exists(joined)) return joined.string();
    }
    return path;
}

struct CommonOptions {
    std::string input;
    std::string format = "movielens";
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool input_required = true) {
    auto* in = cmd->add_option("-i,--input", opts.input,
                               "Rating file (relative paths also tried under $CUPCF_DATA_DIR)");
    if (input_required) in->required();
    cmd->add_option("-f,--format", opts.format, "Input format: movielens (tab) or csv")
        ->check(CLI::IsMember({"movielens", "csv"}))
        ->capture_default_str();
}

cupcf::RatingsMatrix load_input(const CommonOptions& opts) {
    return cupcf::load_ratings(resolve_path(opts.input),
                               cupcf::file_format_from_string(opts.format));
}

int run_validate(const CommonOptions& opts) {
    const auto matrix = load_input(opts);
    const double cells = static_cast<double>(matrix.user_count()) *
                         static_cast<double>(matrix.item_count());
    const double density =
        cells > 0 ? static_cast<double>(matrix.rating_count()) / cells : 0.0;
    std::cout << matrix.user_count() << " users, " << matrix.item_count() << " items, "
              << matrix.rating_count() << " ratings, density "
              << cupcf::format_fixed(density, 6) << "\n";
    return 0;
}

int run_similarity(const CommonOptions& opts, const std::string& measure_name,
                   const std::string& output, cupcf::UserId user, bool user_given, int top,
                   int workers) {
    const auto matrix = load_input(opts);
    const auto measure = cupcf::measure_from_string(measure_name);
    const auto sim = cupcf::build_similarity_matrix(matrix, measure, workers);

    if (user_given) {
        const auto idx = matrix.user_index(user);
        if (!idx) {
            std::cerr << "error: unknown user " << user << "\n";
            return 1;
        }
        const auto neighbors = cupcf::select_neighbors(sim, *idx, top);
        std::cout << "rank,neighbor,similarity\n";
        for (std::size_t i = 0; i < neighbors.size(); ++i) {
            std::cout << (i + 1) << ',' << matrix.user_at(neighbors[i].index) << ','
                      << cupcf::format_full(neighbors[i].similarity) << "\n";
        }
        return 0;
    }

    if (output.empty() || output == "-") {
        cupcf::dump_similarity_csv(std::cout, sim, matrix);
    } else {
        std::ofstream out(output);
        if (!out) throw cupcf::Error("cannot open output file: " + output);
        cupcf::dump_similarity_csv(out, sim, matrix);
    }
    return 0;
}

void print_prediction_row(const cupcf::Prediction& p) {
    std::cout << p.user << ',' << p.item << ',' << cupcf::format_fixed(p.value, 6) << ','
              << cupcf::format_fixed(p.nhsm_component, 6) << ','
              << cupcf::format_fixed(p.pearson_component, 6) << ',' << (p.nhsm_fellback ? 1 : 0)
              << ',' << (p.pearson_fellback ? 1 : 0) << "\n";
}

int run_predict(const CommonOptions& opts, cupcf::UserId user, cupcf::ItemId item,
                bool item_given, const cupcf::PredictConfig& config, int workers) {
    const auto matrix = load_input(opts);
    if (!matrix.user_index(user)) {
        std::cerr << "error: unknown user " << user << "\n";
        return 1;
    }
    const auto stats = matrix.all_user_stats();
    const auto nhsm = cupcf::build_similarity_matrix(matrix, cupcf::Measure::nhsm, workers);
    const auto pearson = cupcf::build_similarity_matrix(matrix, cupcf::Measure::pearson, workers);

    std::cout << "user,item,value,nhsm,pearson,nhsm_fellback,pearson_fellback\n";
    if (item_given) {
        print_prediction_row(cupcf::cup_predict(matrix, stats, nhsm, pearson, user, item, config));
    } else {
        for (const auto& p :
             cupcf::predict_all_unrated(matrix, stats, nhsm, pearson, user, config)) {
            print_prediction_row(p);
        }
    }
    return 0;
}

int run_recommend(const CommonOptions& opts, cupcf::UserId user, int n,
                  const cupcf::PredictConfig& config, const std::string& output, int workers) {
    const auto matrix = load_input(opts);
    if (!matrix.user_index(user)) {
        std::cerr << "error: unknown user " << user << "\n";
        return 1;
    }
    const auto stats = matrix.all_user_stats();
    const auto nhsm = cupcf::build_similarity_matrix(matrix, cupcf::Measure::nhsm, workers);
    const auto pearson = cupcf::build_similarity_matrix(matrix, cupcf::Measure::pearson, workers);
    const auto predictions =
        cupcf::predict_all_unrated(matrix, stats, nhsm, pearson, user, config);
    const auto list = cupcf::top_n(predictions, n);

    if (output.empty() || output == "-") {
        cupcf::write_recommendations_csv(std::cout, list);
    } else {
        std::ofstream out(output);
        if (!out) throw cupcf::Error("cannot open output file: " + output);
        cupcf::write_recommendations_csv(out, list);
    }
    return 0;
}

struct EvaluateOptions {
    CommonOptions common;
    std::string splits_dir;
    std::string output = "report";
    bool write_csv = false;
    bool check_bands = false;
    cupcf::ExperimentConfig config;
};

int run_evaluate(EvaluateOptions& opts) {
    cupcf::EvalReport report;
    cupcf::InputInfo input;

    if (!opts.splits_dir.empty()) {
        const auto dir = resolve_path(opts.splits_dir);
        const auto folds = cupcf::load_movielens_splits(dir);
        std::string combined;
        for (int f = 1; f <= 5; ++f) {
            combined +=
                cupcf::file_checksum((fs::path(dir) / ("u" + std::to_string(f) + ".base")).string());
            combined +=
                cupcf::file_checksum((fs::path(dir) / ("u" + std::to_string(f) + ".test")).string());
        }
        input = {opts.splits_dir, "movielens", cupcf::to_hex(cupcf::fnv1a64(combined))};
        report = cupcf::run_experiment(folds, opts.config, "external(" + opts.splits_dir + ")");
    } else {
        const auto path = resolve_path(opts.common.input);
        const auto matrix = cupcf::load_ratings(
            path, cupcf::file_format_from_string(opts.common.format));
        input = {opts.common.input, opts.common.format, cupcf::file_checksum(path)};
        report = cupcf::run_experiment(matrix, opts.config);
    }

    const auto json_path = opts.output + ".json";
    const auto md_path = opts.output + ".md";
    {
        std::ofstream out(json_path, std::ios::binary);
        if (!out) throw cupcf::Error("cannot open output file: " + json_path);
        out << cupcf::report_to_json(report, input).dump(2) << "\n";
    }
    {
        std::ofstream out(md_path, std::ios::binary);
        if (!out) throw cupcf::Error("cannot open output file: " + md_path);
        out << cupcf::report_to_markdown(report, input);
    }
    if (opts.write_csv) {
        std::ofstream out(opts.output + ".csv", std::ios::binary);
        if (!out) throw cupcf::Error("cannot open output file: " + opts.output + ".csv");
        out << cupcf::report_to_csv(report);
    }

    // console mirrors the written tables at the same precision
    for (const auto& fold : report.folds) {
        std::cout << "fold " << (fold.fold_index + 1)
                  << ": MAE " << cupcf::format_fixed(fold.mae, 4) << "\n";
    }
    const int first_n = opts.config.n_values.front();
    for (const auto& fold : report.folds) {
        for (const auto& cell : fold.cells) {
            if (cell.n == first_n && cell.threshold == 3) {
                auto text = [](const std::optional<double>& v) {
                    return v ? cupcf::format_fixed(*v, 4) : std::string("n/a");
                };
                std::cout << "fold " << (fold.fold_index + 1) << " top-" << first_n
                          << " T=3: accuracy " << text(cell.values.accuracy) << ", precision "
                          << text(cell.values.precision) << ", recall "
                          << text(cell.values.recall) << "\n";
                break;
            }
        }
    }
    std::cout << "mean MAE " << cupcf::format_fixed(report.mean_mae(), 4) << "\n";
    std::cout << "report written to " << json_path << " and " << md_path << "\n";

    if (opts.check_bands) {
        const auto violations = cupcf::check_report_bands(report);
        if (!violations.empty()) {
            for (const auto& v : violations) std::cerr << "band check failed: " << v << "\n";
            return 2;
        }
        std::cout << "band checks passed\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cupcf - combined-similarity collaborative filtering engine"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file (sections per subcommand)");
    // subcommands inherit this, so --config may follow the subcommand name
    app.fallthrough();

    // validate
    CommonOptions validate_opts;
    auto* validate_cmd = app.add_subcommand("validate", "Check a rating file and print statistics");
    add_common(validate_cmd, validate_opts);

    // similarity
    CommonOptions sim_opts;
    std::string sim_measure = "nhsm";
    std::string sim_output;
    cupcf::UserId sim_user = 0;
    int sim_top = 10;
    int sim_workers = 0;
    auto* sim_cmd = app.add_subcommand("similarity", "Dump a similarity matrix as CSV");
    add_common(sim_cmd, sim_opts);
    sim_cmd->add_option("-m,--measure", sim_measure, "Similarity measure")
        ->check(CLI::IsMember({"nhsm", "pearson"}))
        ->capture_default_str();
    sim_cmd->add_option("-o,--output", sim_output, "Output CSV path (default stdout)");
    auto* sim_user_opt =
        sim_cmd->add_option("-u,--user", sim_user, "Print this user's ranked neighbors instead");
    sim_cmd->add_option("--top", sim_top, "Neighbor count for --user")->capture_default_str();
    sim_cmd->add_option("-w,--workers", sim_workers, "Worker threads (0 = all cores)");

    // predict
    CommonOptions predict_opts;
    cupcf::UserId predict_user = 0;
    cupcf::ItemId predict_item = 0;
    int predict_k = 300;
    bool predict_no_clamp = false;
    int predict_workers = 0;
    auto* predict_cmd = app.add_subcommand("predict", "Predict ratings for one user");
    add_common(predict_cmd, predict_opts);
    predict_cmd->add_option("-u,--user", predict_user, "Active user")->required();
    auto* predict_item_opt =
        predict_cmd->add_option("--item", predict_item, "Single item (default: all unrated)");
    predict_cmd->add_option("-k,--k-neighbors", predict_k, "Neighborhood size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    predict_cmd->add_flag("--no-clamp", predict_no_clamp, "Do not clip predictions into [1,5]");
    predict_cmd->add_option("-w,--workers", predict_workers, "Worker threads (0 = all cores)");

    // recommend
    CommonOptions rec_opts;
    cupcf::UserId rec_user = 0;
    int rec_n = 10;
    int rec_k = 300;
    std::string rec_output;
    int rec_workers = 0;
    auto* rec_cmd = app.add_subcommand("recommend", "Top-N recommendations for one user");
    add_common(rec_cmd, rec_opts);
    rec_cmd->add_option("-u,--user", rec_user, "Active user")->required();
    rec_cmd->add_option("-n,--top-n", rec_n, "List size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rec_cmd->add_option("-k,--k-neighbors", rec_k, "Neighborhood size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rec_cmd->add_option("-o,--output", rec_output, "Output CSV path (default stdout)");
    rec_cmd->add_option("-w,--workers", rec_workers, "Worker threads (0 = all cores)");

    // evaluate
    EvaluateOptions eval_opts;
    std::string eval_method = "cup";
    std::string eval_ranking = "combined";
    std::string eval_averaging = "micro";
    bool eval_no_clamp = false;
    auto* eval_cmd = app.add_subcommand("evaluate", "Run the k-fold evaluation experiment");
    add_common(eval_cmd, eval_opts.common, /*input_required=*/false);
    auto* splits_opt = eval_cmd->add_option(
        "--splits", eval_opts.splits_dir,
        "Directory with pre-built u1.base/.test .. u5.base/.test fold files");
    eval_cmd->add_option("--folds", eval_opts.config.k_folds, "Fold count")
        ->check(CLI::Range(2, 1000))
        ->capture_default_str();
    eval_cmd->add_option("-s,--seed", eval_opts.config.seed, "Shuffle seed")
        ->capture_default_str();
    eval_cmd->add_option("-k,--k-neighbors", eval_opts.config.k_neighbors, "Neighborhood size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd->add_option("-n,--n-values", eval_opts.config.n_values, "Top-N sizes")
        ->delimiter(',')
        ->capture_default_str();
    eval_cmd->add_option("-t,--thresholds", eval_opts.config.thresholds,
                         "Relevance thresholds")
        ->delimiter(',')
        ->capture_default_str();
    eval_cmd->add_option("--measure", eval_method,
                         "Predictor: cup (combined), nhsm-only, pearson-only")
        ->check(CLI::IsMember({"cup", "nhsm", "pearson", "nhsm-only", "pearson-only"}))
        ->capture_default_str();
    eval_cmd->add_option("--ranking", eval_ranking, "Top-N ranking: combined or merged")
        ->check(CLI::IsMember({"combined", "merged"}))
        ->capture_default_str();
    eval_cmd->add_option("--averaging", eval_averaging, "Metric averaging over users")
        ->check(CLI::IsMember({"micro", "macro"}))
        ->capture_default_str();
    eval_cmd->add_flag("--no-clamp", eval_no_clamp, "Do not clip predictions into [1,5]");
    eval_cmd->add_option("-o,--output", eval_opts.output, "Report path prefix")
        ->capture_default_str();
    eval_cmd->add_flag("--csv", eval_opts.write_csv, "Also write a flat CSV of all cells");
    eval_cmd->add_flag("--check-bands", eval_opts.check_bands,
                       "Verify MovieLens-100K reference bands; exit 2 on violation");
    eval_cmd->add_option("-w,--workers", eval_opts.config.workers,
                         "Worker threads (0 = all cores)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate_cmd)) return run_validate(validate_opts);
        if (app.got_subcommand(sim_cmd)) {
            return run_similarity(sim_opts, sim_measure, sim_output, sim_user,
                                  sim_user_opt->count() > 0, sim_top, sim_workers);
        }
        if (app.got_subcommand(predict_cmd)) {
            return run_predict(predict_opts, predict_user, predict_item,
                               predict_item_opt->count() > 0,
                               {predict_k, !predict_no_clamp}, predict_workers);
        }
        if (app.got_subcommand(rec_cmd)) {
            return run_recommend(rec_opts, rec_user, rec_n, {rec_k, true}, rec_output,
                                 rec_workers);
        }
        if (app.got_subcommand(eval_cmd)) {
            if (eval_opts.splits_dir.empty() && eval_opts.common.input.empty()) {
                std::cerr << "error: evaluate needs --input or --splits\n";
                return 1;
            }
            if (splits_opt->count() > 0 && !eval_opts.common.input.empty()) {
                std::cerr << "error: --input and --splits are mutually exclusive\n";
                return 1;
            }
            eval_opts.config.method = cupcf::method_from_string(eval_method);
            eval_opts.config.ranking_mode = cupcf::ranking_mode_from_string(eval_ranking);
            eval_opts.config.averaging = cupcf::averaging_from_string(eval_averaging);
            eval_opts.config.clamp = !eval_no_clamp;
            return run_evaluate(eval_opts);
        }
    } catch (const cupcf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

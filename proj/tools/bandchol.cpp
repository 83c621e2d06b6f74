// Command-line front end: estimate, bandwidth, simulate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bandchol/bandwidth.hpp"
#include "bandchol/competitors.hpp"
#include "bandchol/io.hpp"
#include "bandchol/parallel.hpp"
#include "bandchol/simulate.hpp"

namespace {

using namespace bandchol;
using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct DataOptions {
    std::string input;
    bool header = false;
    bool center = false;
};

struct SelectionOptions {
    Eigen::Index kmax = 20;
    double M = 1e6;
    double nu0 = 2.0;
    std::uint64_t seed = 0;
    std::size_t splits = 50;
    Eigen::Index reference_k = 20;
};

std::optional<unsigned> g_threads;

void add_data_options(CLI::App* cmd, DataOptions& d) {
    cmd->add_option("-i,--input", d.input, "n x p numeric CSV, one observation per row")->required();
    cmd->add_flag("--header", d.header, "skip the first line of the input");
    cmd->add_flag("--center", d.center, "subtract column means before fitting");
}

void add_selection_options(CLI::App* cmd, SelectionOptions& s) {
    cmd->add_option("--kmax", s.kmax, "largest bandwidth considered")->capture_default_str();
    cmd->add_option("--M", s.M, "truncation bound on innovation variances")->capture_default_str();
    cmd->add_option("--nu0", s.nu0, "prior exponent nu0")->capture_default_str();
    cmd->add_option("--seed", s.seed, "master seed")->capture_default_str();
    cmd->add_option("--splits", s.splits, "random splits for resampling selection")->capture_default_str();
    cmd->add_option("--reference-k", s.reference_k, "reference bandwidth K for resampling selection")
        ->capture_default_str();
}

DataMatrix load(const DataOptions& d) {
    DataMatrix data(read_matrix_csv(d.input, d.header));
    return d.center ? data.centered() : data;
}

Eigen::Index mode_kmax(const SelectionOptions& s, const DataMatrix& data) {
    return std::min(s.kmax, max_evaluable_k(data.n(), data.p(), s.nu0));
}

ResamplingConfig resampling_config(const SelectionOptions& s, const DataMatrix& data) {
    ResamplingConfig rc;
    rc.splits = s.splits;
    rc.reference_k = std::min({s.reference_k, data.p() - 1, data.n() - data.n() / 3 - 1});
    return rc;
}

Eigen::Index resampling_kmax(const SelectionOptions& s, const DataMatrix& data) {
    return std::min({s.kmax, data.n() / 3 - 1, data.p() - 1});
}

json selection_json(const SelectionOptions& s) {
    return {{"kmax", s.kmax}, {"M", s.M}, {"nu0", s.nu0}, {"seed", s.seed},
            {"splits", s.splits}, {"reference_k", s.reference_k}};
}

json data_json(const DataOptions& d, const DataMatrix& data) {
    return {{"input", d.input}, {"header", d.header}, {"center", d.center}, {"n", data.n()}, {"p", data.p()}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

int cmd_estimate(const DataOptions& d, const SelectionOptions& s, const std::string& estimator,
                 std::optional<Eigen::Index> fixed_k, const std::string& select, const std::string& output,
                 std::string meta) {
    const DataMatrix data = load(d);
    const unsigned threads = resolve_threads(g_threads);
    PriorConfig prior{0, s.M, s.nu0};

    json selection = {{"scheme", fixed_k ? "fixed" : select}};
    Eigen::Index k = 0;
    if (fixed_k) {
        k = *fixed_k;
    } else if (select == "mode") {
        const Eigen::Index kmax = mode_kmax(s, data);
        k = select_k_posterior_mode(data, kmax, prior).mode;
        selection["kmax"] = kmax;
    } else {
        const Eigen::Index kmax = resampling_kmax(s, data);
        const ResamplingConfig rc = resampling_config(s, data);
        k = select_k_resampling(data, kmax, rc, s.seed, threads).k_hat;
        selection["kmax"] = kmax;
        selection["reference_k"] = rc.reference_k;
    }
    selection["k"] = k;

    MatrixXd omega;
    if (estimator == "ll") {
        prior.k = k;
        omega = plug_in_estimator(fit_posterior(data, prior)).matrix();
    } else if (estimator == "bl") {
        omega = bl_banded_estimator(data, k).matrix();
    } else {
        omega = graphical_mle_banded(data, k).matrix();
    }
    write_matrix_csv(output, omega);
    if (meta.empty()) meta = output + ".json";
    write_json(meta, {{"command", "estimate"},
                      {"estimator", estimator},
                      {"k", k},
                      {"output", output},
                      {"data", data_json(d, data)},
                      {"selection", selection},
                      {"options", selection_json(s)}});
    std::cout << "estimator " << estimator << ", k = " << k << ", wrote " << output << '\n';
    return 0;
}

int cmd_bandwidth(const DataOptions& d, const SelectionOptions& s, const std::string& scheme,
                  const std::string& output, std::string meta) {
    const DataMatrix data = load(d);
    const unsigned threads = resolve_threads(g_threads);
    const bool want_mode = scheme == "mode" || scheme == "both";
    const bool want_resampling = scheme == "resampling" || scheme == "both";

    std::optional<BandwidthPosterior> post;
    std::optional<ResamplingResult> risk;
    json report = {{"command", "bandwidth"}, {"scheme", scheme}, {"output", output},
                   {"data", data_json(d, data)}, {"options", selection_json(s)}};
    if (want_mode) {
        const Eigen::Index kmax = mode_kmax(s, data);
        post = select_k_posterior_mode(data, kmax, PriorConfig{0, s.M, s.nu0});
        report["posterior_mode"] = {{"k", post->mode}, {"kmax", kmax}};
    }
    if (want_resampling) {
        const Eigen::Index kmax = resampling_kmax(s, data);
        const ResamplingConfig rc = resampling_config(s, data);
        risk = select_k_resampling(data, kmax, rc, s.seed, threads);
        report["resampling"] = {{"k", risk->k_hat}, {"kmax", kmax}, {"reference_k", rc.reference_k}};
    }

    std::ofstream out(output);
    if (!out) throw InputError("cannot write '" + output + "'");
    out << "k";
    if (post) out << ",log_posterior";
    if (risk) out << ",resampling_risk";
    out << '\n';
    const std::size_t rows = std::max(post ? post->k_values.size() : 0, risk ? risk->risk.size() : 0);
    for (std::size_t i = 0; i < rows; ++i) {
        out << i + 1;
        if (post) out << ',' << (i < post->log_post.size() ? format_real(post->log_post[i]) : "");
        if (risk) out << ',' << (i < risk->risk.size() ? format_real(risk->risk[i]) : "");
        out << '\n';
    }
    if (meta.empty()) meta = output + ".json";
    write_json(meta, report);
    if (post) std::cout << "posterior mode k = " << post->mode << '\n';
    if (risk) std::cout << "resampling k = " << risk->k_hat << '\n';
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool timings) {
    std::ifstream in(config_path);
    if (!in) throw InputError("cannot open '" + config_path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(config_path + ": " + e.what());
    }
    const ExperimentConfig config = parse_experiment_config(j);
    const ExperimentResult result = run_experiment(config, resolve_threads(g_threads));

    std::filesystem::create_directories(out_dir);
    const std::string reps_path = (std::filesystem::path(out_dir) / "reps.csv").string();
    const std::string summary_path = (std::filesystem::path(out_dir) / "summary.json").string();
    std::ofstream reps(reps_path);
    if (!reps) throw InputError("cannot write '" + reps_path + "'");
    write_reps_csv(reps, result, timings);
    write_json(summary_path, summary_json(result));

    std::cout << config.truth.name() << " n=" << config.n << " p=" << config.truth.p << " reps=" << config.reps
              << " failures=" << result.failures << '\n';
    for (const auto& [e, per_loss] : result.summary) {
        std::cout << "  " << estimator_name(e);
        for (const auto& [l, s] : per_loss) std::cout << "  " << norm_name(l) << " " << s.mean << " (" << s.sd << ")";
        std::cout << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Banded Cholesky precision-matrix estimation"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (default: BANDCHOL_THREADS or all cores)");

    DataOptions est_data;
    SelectionOptions est_sel;
    std::string estimator = "ll";
    std::optional<Eigen::Index> fixed_k;
    std::string select = "mode";
    std::string est_output;
    std::string est_meta;
    auto* estimate = app.add_subcommand("estimate", "estimate a precision matrix from data");
    add_data_options(estimate, est_data);
    add_selection_options(estimate, est_sel);
    estimate->add_option("--estimator", estimator, "ll (plug-in Bayes), bl (banded OLS) or mle (graphical MLE)")
        ->check(CLI::IsMember({"ll", "bl", "mle"}))
        ->capture_default_str();
    auto* k_opt = estimate->add_option("-k,--k", fixed_k, "fixed bandwidth (skips selection)");
    estimate->add_option("--select-k", select, "bandwidth selection: mode or resampling")
        ->check(CLI::IsMember({"mode", "resampling"}))
        ->capture_default_str()
        ->excludes(k_opt);
    estimate->add_option("-o,--output", est_output, "precision-matrix CSV")->required();
    estimate->add_option("--meta", est_meta, "metadata JSON (default: <output>.json)");

    DataOptions bw_data;
    SelectionOptions bw_sel;
    std::string scheme = "mode";
    std::string bw_output;
    std::string bw_meta;
    auto* bandwidth = app.add_subcommand("bandwidth", "bandwidth profile and selected k");
    add_data_options(bandwidth, bw_data);
    add_selection_options(bandwidth, bw_sel);
    bandwidth->add_option("--scheme", scheme, "mode, resampling or both")
        ->check(CLI::IsMember({"mode", "resampling", "both"}))
        ->capture_default_str();
    bandwidth->add_option("-o,--output", bw_output, "profile CSV")->required();
    bandwidth->add_option("--meta", bw_meta, "metadata JSON (default: <output>.json)");

    std::string config_path;
    std::string out_dir = ".";
    bool timings = false;
    auto* simulate = app.add_subcommand("simulate", "run a replicated simulation experiment");
    simulate->add_option("-c,--config", config_path, "experiment JSON")->required();
    simulate->add_option("-o,--output-dir", out_dir, "directory for reps.csv and summary.json")
        ->capture_default_str();
    simulate->add_flag("--timings", timings, "add per-replication wall time to reps.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }
    if (threads > 0) g_threads = threads;

    try {
        if (*estimate) {
            if (fixed_k && *fixed_k < 0) throw InputError("--k must be nonnegative");
            return cmd_estimate(est_data, est_sel, estimator, fixed_k, select, est_output, est_meta);
        }
        if (*bandwidth) return cmd_bandwidth(bw_data, bw_sel, scheme, bw_output, bw_meta);
        return cmd_simulate(config_path, out_dir, timings);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

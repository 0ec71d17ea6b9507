#include <CLI11.hpp>
#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "interplab/activation.hpp"
#include "interplab/activation_analysis.hpp"
#include "interplab/dataset.hpp"
#include "interplab/errors.hpp"
#include "interplab/hessian.hpp"
#include "interplab/interpolation.hpp"
#include "interplab/model_io.hpp"
#include "interplab/network.hpp"
#include "interplab/polynomial.hpp"
#include "interplab/random_features.hpp"
#include "interplab/report.hpp"

namespace {

using namespace interplab;

// Flags shared by every subcommand; each handler reads what it needs and
// echoes the resolved values into the report's config block.
struct CommonOptions {
    std::string data_path;
    std::string activation_spec = "tanh";
    std::uint64_t seed = 0;
    int targets = 1;
    double interp_tol = 1e-6;
    double rank_tol_factor = 1.0;
    double zero_threshold_factor = 1e-6;
    std::string out_path;    // model for interpolate/deep-interpolate, else report
    std::string report_path; // report for interpolate/deep-interpolate
};

void add_tolerance_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--interp-tol", opt.interp_tol,
                    "Absolute residual tolerance for interpolation checks");
    cmd->add_option("--rank-tol-factor", opt.rank_tol_factor,
                    "Multiplier on the d*eps*sigma_max rank tolerance");
    cmd->add_option("--zero-threshold-factor", opt.zero_threshold_factor,
                    "Multiplier on the relative eigenvalue zero band");
}

ReportJson tolerance_config(const CommonOptions& opt) {
    ReportJson t;
    t["interp_tol"] = opt.interp_tol;
    t["rank_tol_factor"] = opt.rank_tol_factor;
    t["zero_threshold_factor"] = opt.zero_threshold_factor;
    return t;
}

int resolve_threads(ReportJson& config) {
    int threads = 1;
    if (const char* raw = std::getenv("INTERPLAB_THREADS")) {
        config["threads"] = std::string(raw);
        std::size_t used = 0;
        int parsed = 0;
        try {
            parsed = std::stoi(raw, &used);
        } catch (const std::exception&) {
            throw Error(ErrorCode::Input, "INTERPLAB_THREADS must be a positive integer");
        }
        if (used != std::string(raw).size() || parsed < 1)
            throw Error(ErrorCode::Input, "INTERPLAB_THREADS must be a positive integer");
        threads = parsed;
        config["threads"] = threads;
    } else {
        config["threads"] = threads;
    }
    Eigen::setNbThreads(threads);
    return threads;
}

InterpolationOptions interp_options(const CommonOptions& opt) {
    InterpolationOptions options;
    options.interp_tol = opt.interp_tol;
    return options;
}

Dataset load_data(const CommonOptions& opt) {
    if (opt.data_path.empty())
        throw Error(ErrorCode::Input, "missing --data file");
    return load_dataset_csv(opt.data_path, opt.targets);
}

// ----- interpolate ---------------------------------------------------------

struct InterpolateOptions {
    CommonOptions common;
    int width = 0; // 0 = use the data count
};

ReportJson interpolate_config(const InterpolateOptions& opt) {
    ReportJson c;
    c["dataset_path"] = opt.common.data_path;
    c["activation"] = opt.common.activation_spec;
    c["width"] = opt.width;
    c["seed"] = opt.common.seed;
    c["targets"] = opt.common.targets;
    c["tolerances"] = tolerance_config(opt.common);
    c["output_path"] = opt.common.out_path;
    c["report_path"] = opt.common.report_path;
    return c;
}

void run_interpolate(const InterpolateOptions& opt, ReportJson& report) {
    const Dataset data = load_data(opt.common);
    if (data.target_dim() != 1)
        throw Error(ErrorCode::Input,
                    "interpolate expects exactly one target column (use --targets 1)");
    const Activation act = Activation::from_spec(opt.common.activation_spec);
    const Eigen::Index width = opt.width > 0 ? opt.width : data.count();

    ShallowBuildInfo info;
    const ShallowNet net = construct_shallow_interpolant(
        data, act, width, opt.common.seed, interp_options(opt.common), &info);

    if (!opt.common.out_path.empty())
        save_model(NetModel(net), opt.common.out_path);

    const Eigen::VectorXd residuals =
        forward_all(net, data.inputs()) - data.target_column(0);
    report["result"] = {
        {"d", data.count()},
        {"p", data.dim()},
        {"width", width},
        {"condition", finite_number(info.condition)},
        {"rounds_used", info.rounds_used},
        {"fallback_tier", info.fallback_tier},
        {"sup_residual", finite_number(residuals.cwiseAbs().maxCoeff())},
        {"residuals", finite_array(residuals)},
        {"model_path", opt.common.out_path},
    };
}

// ----- deep-interpolate -----------------------------------------------------

void run_deep_interpolate(const InterpolateOptions& opt, ReportJson& report) {
    const Dataset data = load_data(opt.common);
    if (data.target_dim() != 1)
        throw Error(ErrorCode::Input,
                    "deep-interpolate expects exactly one target column (use --targets 1)");
    const Activation act = Activation::from_spec(opt.common.activation_spec);

    DeepBuildInfo info;
    const ComposedNet net = construct_deep_interpolant(
        data, act, opt.common.seed, interp_options(opt.common), &info);

    if (!opt.common.out_path.empty())
        save_model(NetModel(net), opt.common.out_path);

    const Eigen::VectorXd residuals =
        forward_all(net, data.inputs()) - data.target_column(0);
    report["result"] = {
        {"d", data.count()},
        {"p", data.dim()},
        {"depth", info.depth},
        {"chain", net.chain},
        {"composed_degree", poly::degree(info.composed_coeffs)},
        {"condition", finite_number(info.shallow.condition)},
        {"rounds_used", info.shallow.rounds_used},
        {"fallback_tier", info.shallow.fallback_tier},
        {"sup_residual", finite_number(residuals.cwiseAbs().maxCoeff())},
        {"residuals", finite_array(residuals)},
        {"model_path", opt.common.out_path},
    };
}

// ----- feasibility ----------------------------------------------------------

struct FeasibilityOptions {
    CommonOptions common;
    int m = 1;
};

ReportJson feasibility_config(const FeasibilityOptions& opt) {
    ReportJson c;
    c["dataset_path"] = opt.common.data_path;
    c["m"] = opt.m;
    c["targets"] = opt.common.targets;
    c["tolerances"] = tolerance_config(opt.common);
    c["output_path"] = opt.common.out_path;
    return c;
}

void run_feasibility(const FeasibilityOptions& opt, ReportJson& report) {
    const Dataset data = load_data(opt.common);
    const FeasibilityReport feas =
        poly_feasibility(data, opt.m, opt.common.rank_tol_factor);
    report["result"] = {
        {"d", data.count()},
        {"p", data.dim()},
        {"m", feas.m},
        {"dim_bound", feas.dim_bound},
        {"dim_bound_with_constant", feas.dim_bound_with_constant},
        {"feature_rank", feas.feature_rank},
        {"feasible", feas.feasible},
    };
}

// ----- actprobe -------------------------------------------------------------

struct ActprobeOptions {
    CommonOptions common;
    int d = 6;
    double epsilon = 0.05;
    double halfwidth = 10.0;
    double tol = 1e-8;
};

ReportJson actprobe_config(const ActprobeOptions& opt) {
    ReportJson c;
    c["activation"] = opt.common.activation_spec;
    c["d"] = opt.d;
    c["epsilon"] = opt.epsilon;
    c["halfwidth"] = opt.halfwidth;
    c["tol"] = opt.tol;
    c["tolerances"] = tolerance_config(opt.common);
    c["output_path"] = opt.common.out_path;
    return c;
}

void run_actprobe(const ActprobeOptions& opt, ReportJson& report) {
    const Activation act = Activation::from_spec(opt.common.activation_spec);
    if (opt.d < 1)
        throw Error(ErrorCode::Input, "--d must be >= 1");

    ReportJson poly_map;
    for (int k = 1; k <= 10; ++k)
        poly_map[std::to_string(k)] = poly_degree_test(act, k);

    ReportJson result;
    result["is_poly_deg_le"] = std::move(poly_map);
    result["T_d"] = finite_number(truncation_level(act, opt.d, opt.halfwidth));

    // A low-degree polynomial activation legitimately has no certificate; the
    // probe reports that finding instead of failing.
    try {
        const DerivativeCertificate cert = find_nonvanishing_point(
            act, opt.d, opt.epsilon, opt.halfwidth, opt.tol);
        result["b0"] = finite_number(cert.b0);
        result["derivative_values"] = cert.derivative_values;
        result["epsilon_used"] = finite_number(cert.epsilon_used);
    } catch (const NotFoundError& err) {
        result["b0"] = nullptr;
        result["derivative_values"] = ReportJson::array();
        result["certificate_error"] = {{"code", error_code_name(err.code())},
                                       {"message", err.what()},
                                       {"best_point", finite_number(err.best_point())},
                                       {"best_margin", finite_number(err.best_margin())}};
    } catch (const Error& err) {
        if (err.code() != ErrorCode::Precondition)
            throw;
        result["b0"] = nullptr;
        result["derivative_values"] = ReportJson::array();
        result["certificate_error"] = {{"code", error_code_name(err.code())},
                                       {"message", err.what()}};
    }
    report["result"] = std::move(result);
}

// ----- randfeat -------------------------------------------------------------

struct RandfeatOptions {
    CommonOptions common;
    double target_fail = 1e-6;
    long long mc = 100000;
    int trials = 100;
    double delta = 0.5;
    double b0 = 0.0;
    double M_override = 0.0; // 0 = derive from the data
};

ReportJson randfeat_config(const RandfeatOptions& opt) {
    ReportJson c;
    c["dataset_path"] = opt.common.data_path;
    c["activation"] = opt.common.activation_spec;
    c["target_fail"] = opt.target_fail;
    c["mc"] = opt.mc;
    c["seed"] = opt.common.seed;
    c["trials"] = opt.trials;
    c["delta"] = opt.delta;
    c["b0"] = opt.b0;
    c["M_override"] = opt.M_override;
    c["targets"] = opt.common.targets;
    c["tolerances"] = tolerance_config(opt.common);
    c["output_path"] = opt.common.out_path;
    return c;
}

void run_randfeat(const RandfeatOptions& opt, ReportJson& report) {
    const Dataset data = load_data(opt.common);
    if (data.target_dim() != 1)
        throw Error(ErrorCode::Input,
                    "randfeat expects exactly one target column (use --targets 1)");
    const Activation act = Activation::from_spec(opt.common.activation_spec);

    WidthOptions width_options;
    width_options.delta = opt.delta;
    width_options.b0 = opt.b0;
    if (opt.M_override > 0.0)
        width_options.M_override = opt.M_override;

    const WidthCertificate cert = recommend_width(
        data, act, opt.target_fail, opt.mc, opt.common.seed, width_options);

    const Dataset absorbed = data.with_bias_absorbed();
    const Eigen::VectorXd y = data.target_column(0);
    ReportJson ranks = ReportJson::array();
    ReportJson residuals = ReportJson::array();
    int full_rank_trials = 0;
    for (int t = 0; t < opt.trials; ++t) {
        const FeatureMatrix fm = sample_features(
            absorbed, act, static_cast<Eigen::Index>(cert.recommended_h),
            opt.common.seed + static_cast<std::uint64_t>(t));
        const Eigen::Index rank = numerical_rank(fm.phi, opt.common.rank_tol_factor);
        const OutputFit fit = fit_output_weights(fm, y, opt.common.rank_tol_factor);
        ranks.push_back(rank);
        residuals.push_back(finite_number(fit.residual_norm));
        if (rank == data.count())
            ++full_rank_trials;
    }

    report["result"] = {
        {"d", data.count()},
        {"p", data.dim()},
        {"lambda_tilde", finite_number(cert.lambda_tilde_est)},
        {"lambda_tilde_stderr", finite_number(cert.lambda_tilde_stderr)},
        {"mc_samples", cert.mc_samples},
        {"T_d", finite_number(cert.T_d)},
        {"M", finite_number(cert.M)},
        {"delta", finite_number(cert.delta)},
        {"chernoff_base", finite_number(cert.chernoff_base)},
        {"recommended_h", cert.recommended_h},
        {"target_failure_prob", finite_number(cert.target_failure_prob)},
        {"trials", opt.trials},
        {"trial_ranks", std::move(ranks)},
        {"trial_residuals", std::move(residuals)},
        {"full_rank_trials", full_rank_trials},
    };
}

// ----- spectrum -------------------------------------------------------------

struct SpectrumOptions {
    CommonOptions common;
    std::string model_path;
};

ReportJson spectrum_config(const SpectrumOptions& opt) {
    ReportJson c;
    c["model_path"] = opt.model_path;
    c["dataset_path"] = opt.common.data_path;
    c["targets"] = opt.common.targets;
    c["tolerances"] = tolerance_config(opt.common);
    c["output_path"] = opt.common.out_path;
    return c;
}

void run_spectrum(const SpectrumOptions& opt, ReportJson& report) {
    if (opt.model_path.empty())
        throw Error(ErrorCode::Input, "missing --model file");
    const NetModel net = load_model(opt.model_path);
    const Dataset data = load_data(opt.common);
    const SpectrumReport spectrum = spectrum_at_minimum(
        net, data, opt.common.interp_tol, opt.common.zero_threshold_factor);

    const Eigen::Index n_eigen = spectrum.eigenvalues.size();
    const Eigen::Index show = std::min<Eigen::Index>(10, n_eigen);
    report["result"] = {
        {"n", spectrum.n},
        {"d", spectrum.d},
        {"positive_count", spectrum.positive_count},
        {"zero_count", spectrum.zero_count},
        {"negative_count", spectrum.negative_count},
        {"zero_threshold", finite_number(spectrum.zero_threshold)},
        {"gauss_newton_check", finite_number(spectrum.gauss_newton_check)},
        {"jacobian_full_rank", spectrum.jacobian_full_rank},
        {"smallest_jacobian_singular", finite_number(spectrum.smallest_jacobian_singular)},
        {"smallest_eigenvalues", finite_array(spectrum.eigenvalues.head(show))},
        {"largest_eigenvalues", finite_array(spectrum.eigenvalues.tail(show))},
    };
}

// ----- classify -------------------------------------------------------------

void run_classify(const CommonOptions& opt, ReportJson& report) {
    if (opt.data_path.empty())
        throw Error(ErrorCode::Input, "missing --data file");
    const Dataset data = load_dataset_csv(opt.data_path, 1);
    std::vector<int> labels(static_cast<std::size_t>(data.count()));
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        const double raw = data.targets()(i, 0);
        const double rounded = std::round(raw);
        if (std::abs(raw - rounded) > 1e-9 || rounded < 1.0)
            throw Error(ErrorCode::Input,
                        "labels must be integers >= 1 in the last CSV column");
        labels[static_cast<std::size_t>(i)] = static_cast<int>(rounded);
    }
    const Activation act = Activation::from_spec(opt.activation_spec);
    const Classifier classifier =
        fit_classifier(data.inputs(), labels, act, opt.seed, interp_options(opt));

    ReportJson predictions = ReportJson::array();
    int correct = 0;
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        const int predicted = classifier.predict(data.inputs().row(i).transpose());
        predictions.push_back(predicted);
        if (predicted == labels[static_cast<std::size_t>(i)])
            ++correct;
    }
    report["result"] = {
        {"d", data.count()},
        {"p", data.dim()},
        {"classes", classifier.classes()},
        {"predictions", std::move(predictions)},
        {"training_accuracy",
         finite_number(static_cast<double>(correct) / static_cast<double>(data.count()))},
    };
}

// ----- dispatch -------------------------------------------------------------

ReportJson error_details(const Error& err) {
    ReportJson detail;
    detail["code"] = error_code_name(err.code());
    detail["message"] = err.what();
    if (const auto* cond = dynamic_cast<const ConditioningError*>(&err)) {
        detail["best_condition"] = finite_number(cond->best_condition());
        detail["rounds"] = cond->rounds();
    }
    if (const auto* miss = dynamic_cast<const NotFoundError*>(&err)) {
        detail["best_point"] = finite_number(miss->best_point());
        detail["best_margin"] = finite_number(miss->best_margin());
    }
    return detail;
}

template <typename RunFn>
int dispatch(const std::string& command, ReportJson config,
             const std::string& report_dest, RunFn&& run) {
    ReportJson report;
    try {
        resolve_threads(config);
        report = make_report(command, config);
        run(report);
        write_report(report, report_dest);
        return 0;
    } catch (const Error& err) {
        ReportJson failure = make_report(command, config);
        failure["error"] = error_details(err);
        std::cerr << "interplab " << command << ": " << err.what() << '\n';
        try {
            write_report(failure, report_dest);
        } catch (const std::exception& write_err) {
            std::cerr << "interplab " << command
                      << ": could not write error report: " << write_err.what() << '\n';
        }
        return error_code_is_usage(err.code()) ? 1 : 2;
    } catch (const std::exception& err) {
        ReportJson failure = make_report(command, config);
        failure["error"] = {{"code", "INTERNAL"}, {"message", err.what()}};
        std::cerr << "interplab " << command << ": " << err.what() << '\n';
        try {
            write_report(failure, report_dest);
        } catch (const std::exception&) {
        }
        return 2;
    }
}

void add_data_flags(CLI::App* cmd, CommonOptions& opt, bool with_targets = true) {
    cmd->add_option("--data", opt.data_path, "Dataset CSV (last columns are targets)");
    if (with_targets)
        cmd->add_option("--targets", opt.targets, "Number of trailing target columns");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constructive interpolation and random-feature analysis for "
                 "shallow and deep feedforward networks"};
    app.require_subcommand(1);

    InterpolateOptions interp;
    CLI::App* cmd_interp =
        app.add_subcommand("interpolate", "Build an exact shallow interpolant");
    add_data_flags(cmd_interp, interp.common);
    cmd_interp->add_option("--activation", interp.common.activation_spec,
                           "tanh|relu|sigmoid|poly:c0,c1,...|table:file");
    cmd_interp->add_option("--width", interp.width, "Hidden width h >= d (0 = d)");
    cmd_interp->add_option("--seed", interp.common.seed, "Sampling seed");
    cmd_interp->add_option("--out", interp.common.out_path, "Model JSON output path");
    cmd_interp->add_option("--report", interp.common.report_path,
                           "Report JSON path (default stdout)");
    add_tolerance_flags(cmd_interp, interp.common);

    InterpolateOptions deep;
    CLI::App* cmd_deep = app.add_subcommand(
        "deep-interpolate", "Build a deep interpolant for a polynomial activation");
    add_data_flags(cmd_deep, deep.common);
    cmd_deep->add_option("--activation", deep.common.activation_spec,
                         "poly:c0,c1,... (degree >= 2)");
    cmd_deep->add_option("--seed", deep.common.seed, "Sampling seed");
    cmd_deep->add_option("--out", deep.common.out_path, "Model JSON output path");
    cmd_deep->add_option("--report", deep.common.report_path,
                         "Report JSON path (default stdout)");
    add_tolerance_flags(cmd_deep, deep.common);

    FeasibilityOptions feas;
    CLI::App* cmd_feas = app.add_subcommand(
        "feasibility", "Rank test of the degree-m moment-feature matrix");
    add_data_flags(cmd_feas, feas.common);
    cmd_feas->add_option("--m", feas.m, "Polynomial degree bound")->required();
    cmd_feas->add_option("--out", feas.common.out_path,
                         "Report JSON path (default stdout)");
    add_tolerance_flags(cmd_feas, feas.common);

    ActprobeOptions probe;
    CLI::App* cmd_probe = app.add_subcommand(
        "actprobe", "Polynomial screening and derivative certificate for an activation");
    cmd_probe->add_option("--activation", probe.common.activation_spec,
                          "tanh|relu|sigmoid|poly:c0,c1,...|table:file");
    cmd_probe->add_option("--d", probe.d, "Data count the certificate must serve");
    cmd_probe->add_option("--epsilon", probe.epsilon, "Mollification scale");
    cmd_probe->add_option("--halfwidth", probe.halfwidth, "Search half-width M");
    cmd_probe->add_option("--tol", probe.tol, "Derivative magnitude tolerance");
    cmd_probe->add_option("--out", probe.common.out_path,
                          "Report JSON path (default stdout)");
    add_tolerance_flags(cmd_probe, probe.common);

    RandfeatOptions rf;
    CLI::App* cmd_rf = app.add_subcommand(
        "randfeat", "Width certificate and random-feature rank trials");
    add_data_flags(cmd_rf, rf.common);
    cmd_rf->add_option("--activation", rf.common.activation_spec,
                       "tanh|relu|sigmoid|poly:c0,c1,...|table:file");
    cmd_rf->add_option("--target-fail", rf.target_fail, "Target failure probability");
    cmd_rf->add_option("--mc", rf.mc, "Monte-Carlo samples for the lambda estimate");
    cmd_rf->add_option("--seed", rf.common.seed, "Base seed");
    cmd_rf->add_option("--trials", rf.trials, "Feature-matrix trials at the certified width");
    cmd_rf->add_option("--delta", rf.delta, "Chernoff deviation parameter in [0,1)");
    cmd_rf->add_option("--b0", rf.b0, "Shift from a derivative certificate");
    cmd_rf->add_option("--M", rf.M_override, "Override the range bound M (> 0)");
    cmd_rf->add_option("--out", rf.common.out_path, "Report JSON path (default stdout)");
    add_tolerance_flags(cmd_rf, rf.common);

    SpectrumOptions spec;
    CLI::App* cmd_spec = app.add_subcommand(
        "spectrum", "Loss-Hessian eigenvalue audit at an interpolation point");
    cmd_spec->add_option("--model", spec.model_path, "Model JSON produced by interpolate");
    add_data_flags(cmd_spec, spec.common);
    cmd_spec->add_option("--out", spec.common.out_path,
                         "Report JSON path (default stdout)");
    add_tolerance_flags(cmd_spec, spec.common);

    CommonOptions cls;
    CLI::App* cmd_cls = app.add_subcommand(
        "classify", "One-hot interpolation classifier with softmax readout");
    add_data_flags(cmd_cls, cls, false);
    cmd_cls->add_option("--activation", cls.activation_spec,
                        "tanh|relu|sigmoid|poly:c0,c1,...|table:file");
    cmd_cls->add_option("--seed", cls.seed, "Sampling seed");
    cmd_cls->add_option("--out", cls.out_path, "Report JSON path (default stdout)");
    add_tolerance_flags(cmd_cls, cls);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (app.got_subcommand(cmd_interp))
        return dispatch("interpolate", interpolate_config(interp),
                        interp.common.report_path,
                        [&](ReportJson& r) { run_interpolate(interp, r); });
    if (app.got_subcommand(cmd_deep))
        return dispatch("deep-interpolate", interpolate_config(deep),
                        deep.common.report_path,
                        [&](ReportJson& r) { run_deep_interpolate(deep, r); });
    if (app.got_subcommand(cmd_feas))
        return dispatch("feasibility", feasibility_config(feas), feas.common.out_path,
                        [&](ReportJson& r) { run_feasibility(feas, r); });
    if (app.got_subcommand(cmd_probe))
        return dispatch("actprobe", actprobe_config(probe), probe.common.out_path,
                        [&](ReportJson& r) { run_actprobe(probe, r); });
    if (app.got_subcommand(cmd_rf))
        return dispatch("randfeat", randfeat_config(rf), rf.common.out_path,
                        [&](ReportJson& r) { run_randfeat(rf, r); });
    if (app.got_subcommand(cmd_spec))
        return dispatch("spectrum", spectrum_config(spec), spec.common.out_path,
                        [&](ReportJson& r) { run_spectrum(spec, r); });
    if (app.got_subcommand(cmd_cls)) {
        ReportJson config;
        config["dataset_path"] = cls.data_path;
        config["activation"] = cls.activation_spec;
        config["seed"] = cls.seed;
        config["tolerances"] = tolerance_config(cls);
        config["output_path"] = cls.out_path;
        return dispatch("classify", std::move(config), cls.out_path,
                        [&](ReportJson& r) { run_classify(cls, r); });
    }
    std::cerr << "interplab: no command selected\n";
    return 1;
}

// Command-line front door: runs experiments and writes reproducible reports.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "schatten_lab/entropy.hpp"
#include "schatten_lab/nets.hpp"
#include "schatten_lab/parallel.hpp"
#include "schatten_lab/recovery.hpp"
#include "schatten_lab/sampling.hpp"
#include "schatten_lab/volumes.hpp"

namespace {

using nlohmann::json;
using namespace schatten_lab;

constexpr const char* kToolName = "schatten-lab";
constexpr const char* kToolVersion = "0.1.0";

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Exponent parse_exponent(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity") return Exponent::infinity();
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            const double num = std::stod(s.substr(0, slash));
            const double den = std::stod(s.substr(slash + 1));
            return Exponent(num / den);
        }
        return Exponent(std::stod(s));
    } catch (const std::exception&) {
        throw invalid_input("cannot parse exponent '" + s + "' (number, a/b, or inf)");
    }
}

json exponent_echo(const Exponent& e) {
    if (e.is_inf()) return "inf";
    return e.value();
}

struct Invocation {
    std::string command;
    std::uint64_t seed = 0;
    int threads = default_threads();
    std::string out;
    std::string format = "json";
    json params = json::object();
};

const std::map<std::string, std::set<std::string>>& allowed_params() {
    static const std::map<std::string, std::set<std::string>> table{
        {"rate", {"p", "q", "N", "n"}},
        {"volume", {"p", "N", "samples"}},
        {"grassmann", {"N", "k", "q", "delta_grid", "samples"}},
        {"net-build", {"p", "q", "N", "levels", "alpha", "c_q"}},
        {"net-audit", {"net", "samples"}},
        {"sandwich", {"p", "q", "N", "levels", "samples", "audit_samples", "route"}},
        {"recovery", {"p", "q", "N", "m_grid", "trials", "rank", "iters", "basis_override"}},
    };
    return table;
}

void validate_params(const Invocation& inv) {
    const auto it = allowed_params().find(inv.command);
    if (it == allowed_params().end()) throw invalid_input("unknown command '" + inv.command + "'");
    for (const auto& [key, value] : inv.params.items()) {
        (void)value;
        if (!it->second.count(key)) {
            throw invalid_input("unknown parameter '" + key + "' for command '" + inv.command +
                                "'");
        }
    }
}

Exponent param_exponent(const json& params, const std::string& key) {
    if (!params.contains(key)) throw invalid_input("missing parameter '" + key + "'");
    const json& v = params.at(key);
    if (v.is_string()) return parse_exponent(v.get<std::string>());
    if (v.is_number()) return Exponent(v.get<double>());
    throw invalid_input("parameter '" + key + "' must be a number or string");
}

template <typename T>
T param_value(const json& params, const std::string& key, std::optional<T> fallback = {}) {
    if (!params.contains(key)) {
        if (fallback) return *fallback;
        throw invalid_input("missing parameter '" + key + "'");
    }
    try {
        return params.at(key).get<T>();
    } catch (const json::exception&) {
        throw invalid_input("parameter '" + key + "' has the wrong type");
    }
}

struct CommandOutput {
    json result;
    std::string csv;
    std::string summary;
};

// ---------- commands ----------

CommandOutput run_rate(const Invocation& inv) {
    const Exponent p = param_exponent(inv.params, "p");
    const Exponent q = param_exponent(inv.params, "q");
    const int n_dim = param_value<int>(inv.params, "N");
    const long n = param_value<long>(inv.params, "n");
    const double rate = theory_rate(RateQuery(p, q, n, n_dim));
    CommandOutput out;
    out.result = {{"rate", rate}};
    out.csv = "rate\n" + fmt_double(rate) + "\n";
    out.summary = "rate = " + fmt_double(rate);
    return out;
}

CommandOutput run_volume(const Invocation& inv) {
    const Exponent p = param_exponent(inv.params, "p");
    std::vector<int> n_dims;
    if (inv.params.contains("N") && inv.params.at("N").is_array()) {
        n_dims = param_value<std::vector<int>>(inv.params, "N");
    } else {
        n_dims.push_back(param_value<int>(inv.params, "N"));
    }
    const long samples = param_value<long>(inv.params, "samples", 1'000'000L);
    const StreamKey key{inv.seed, 0};

    CommandOutput out;
    json estimates = json::array();
    std::vector<double> xs, ys;
    std::string csv = "n_dim,value,std_error,n_samples,method\n";
    for (std::size_t i = 0; i < n_dims.size(); ++i) {
        const VolumeEstimate est = schatten_ball_volume_mc(BallSpec(n_dims[i], p), samples,
                                                           derive_stream(key, 1000 + i),
                                                           inv.threads);
        const char* method = est.method == VolumeEstimate::Method::exact ? "exact" : "rejection";
        estimates.push_back({{"n_dim", n_dims[i]},
                             {"value", est.value},
                             {"std_error", est.std_error},
                             {"n_samples", est.n_samples},
                             {"method", method}});
        csv += std::to_string(n_dims[i]) + "," + fmt_double(est.value) + "," +
               fmt_double(est.std_error) + "," + std::to_string(est.n_samples) + "," + method +
               "\n";
        xs.push_back(std::log(static_cast<double>(n_dims[i])));
        ys.push_back(std::log(est.value));
    }
    out.result["estimates"] = std::move(estimates);
    if (n_dims.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
        mx /= xs.size(), my /= ys.size();
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        out.result["slope"] = sxy / sxx;
        out.result["predicted_slope"] = -(0.5 + p.inv());
    }
    out.csv = std::move(csv);
    out.summary = std::to_string(n_dims.size()) + " volume estimate(s)";
    return out;
}

CommandOutput run_grassmann(const Invocation& inv) {
    const int n_dim = param_value<int>(inv.params, "N");
    const int k = param_value<int>(inv.params, "k", 1);
    const Exponent q =
        inv.params.contains("q") ? param_exponent(inv.params, "q") : Exponent::infinity();
    const std::vector<double> deltas = param_value<std::vector<double>>(inv.params, "delta_grid");
    const long samples = param_value<long>(inv.params, "samples", 100'000L);
    const StreamKey key{inv.seed, 0};

    const auto points = grassmann_ball_measure_mc(n_dim, k, q, deltas, samples, key, inv.threads);
    CommandOutput out;
    json rows = json::array();
    std::string csv = "delta,probability,std_error,hits,widened_ci\n";
    for (const auto& pt : points) {
        rows.push_back({{"delta", pt.delta},
                        {"probability", pt.probability},
                        {"std_error", pt.std_error},
                        {"hits", pt.hits},
                        {"widened_ci", pt.widened_ci}});
        csv += fmt_double(pt.delta) + "," + fmt_double(pt.probability) + "," +
               fmt_double(pt.std_error) + "," + std::to_string(pt.hits) + "," +
               (pt.widened_ci ? "1" : "0") + "\n";
    }
    out.result["points"] = std::move(rows);
    out.result["predicted_exponent"] = k * (n_dim - k);
    try {
        out.result["fitted_exponent"] = fit_measure_exponent(points);
    } catch (const degenerate_estimate& e) {
        out.result["fitted_exponent"] = nullptr;
        out.result["fit_note"] = e.what();
    }
    out.csv = std::move(csv);
    out.summary = std::to_string(points.size()) + " measure point(s)";
    return out;
}

CommandOutput run_net_build(const Invocation& inv) {
    const Exponent p = param_exponent(inv.params, "p");
    const Exponent q = param_exponent(inv.params, "q");
    const int n_dim = param_value<int>(inv.params, "N");
    const int levels = param_value<int>(inv.params, "levels");
    const double alpha = param_value<double>(inv.params, "alpha", 1.0);
    const double c_q = param_value<double>(inv.params, "c_q", 1.0);
    const StreamKey key{inv.seed, 0};

    const ProductNet net = schatten_net_build(n_dim, p, q, levels, alpha, c_q, key);
    CommandOutput out;
    out.result = {{"n_dim", n_dim},
                  {"p", exponent_echo(p)},
                  {"q", exponent_echo(q)},
                  {"levels", levels},
                  {"alpha", alpha},
                  {"c_q", c_q},
                  {"error_budget", net.error_budget},
                  {"log2_cardinality", net.log2_cardinality}};
    if (!inv.out.empty()) {
        save_product_net(net, inv.out);
        out.result["net_dir"] = inv.out;
    }
    out.csv = "error_budget,log2_cardinality\n" + fmt_double(net.error_budget) + "," +
              fmt_double(net.log2_cardinality) + "\n";
    out.summary = "error_budget = " + fmt_double(net.error_budget) +
                  ", log2_cardinality = " + fmt_double(net.log2_cardinality);
    return out;
}

CommandOutput run_net_audit(const Invocation& inv) {
    const std::string manifest = param_value<std::string>(inv.params, "net");
    const long samples = param_value<long>(inv.params, "samples", 1000L);
    const StreamKey key{inv.seed, 0};

    const ProductNet net = load_product_net(manifest);
    double worst = 0.0;
    long violations = 0;
    for (long s = 0; s < samples; ++s) {
        const Mat a = sample_schatten_ball(BallSpec(net.n_dim, net.p), BallSampleMode::spectral,
                                           derive_stream(key, 7000 + static_cast<std::uint64_t>(s)));
        const double err = quantize(net, a).achieved_error;
        worst = std::max(worst, err);
        if (err > net.error_budget) ++violations;
    }
    CommandOutput out;
    out.result = {{"net", manifest},
                  {"samples", samples},
                  {"error_budget", net.error_budget},
                  {"worst_error", worst},
                  {"violations", violations}};
    out.csv = "samples,error_budget,worst_error,violations\n" + std::to_string(samples) + "," +
              fmt_double(net.error_budget) + "," + fmt_double(worst) + "," +
              std::to_string(violations) + "\n";
    out.summary = "worst_error = " + fmt_double(worst) + " vs budget " +
                  fmt_double(net.error_budget) + " (" + std::to_string(violations) +
                  " violation(s))";
    return out;
}

CommandOutput run_sandwich(const Invocation& inv) {
    const Exponent p = param_exponent(inv.params, "p");
    const Exponent q = param_exponent(inv.params, "q");
    const int n_dim = param_value<int>(inv.params, "N");
    const std::vector<int> levels = param_value<std::vector<int>>(inv.params, "levels");
    SandwichOptions opts;
    opts.threads = inv.threads;
    opts.volume_samples = param_value<long>(inv.params, "samples", opts.volume_samples);
    opts.audit_samples = param_value<long>(inv.params, "audit_samples", opts.audit_samples);
    const std::string route = param_value<std::string>(inv.params, "route", std::string("auto"));
    if (route == "product") {
        opts.route = UpperRoute::product;
    } else if (route == "greedy") {
        opts.route = UpperRoute::greedy;
    } else if (route != "auto") {
        throw invalid_input("route must be auto, product, or greedy");
    }
    const StreamKey key{inv.seed, 0};

    const SandwichReport report = sandwich_report(p, q, n_dim, levels, key, opts);
    CommandOutput out;
    json rows = json::array();
    std::string csv = "n,lower,upper,theory,ratio\n";
    for (const auto& row : report.rows) {
        rows.push_back({{"n", row.n},
                        {"lower", row.lower},
                        {"upper", row.upper},
                        {"theory", row.theory},
                        {"ratio_upper_lower", std::isfinite(row.ratio_upper_lower)
                                                  ? json(row.ratio_upper_lower)
                                                  : json("inf")},
                        {"method_lower", row.method_lower},
                        {"method_upper", row.method_upper},
                        {"lower_missing", row.lower_missing},
                        {"audit_worst", row.audit_worst},
                        {"log2_cardinality", row.log2_cardinality}});
        csv += std::to_string(row.n) + "," + fmt_double(row.lower) + "," + fmt_double(row.upper) +
               "," + fmt_double(row.theory) + "," + fmt_double(row.ratio_upper_lower) + "\n";
    }
    out.result["rows"] = std::move(rows);
    out.csv = std::move(csv);
    out.summary = std::to_string(report.rows.size()) + " sandwich row(s)";
    return out;
}

CommandOutput run_recovery(const Invocation& inv) {
    const Exponent p = param_exponent(inv.params, "p");
    const Exponent q = param_exponent(inv.params, "q");
    const int n_dim = param_value<int>(inv.params, "N");
    const std::vector<int> m_grid = param_value<std::vector<int>>(inv.params, "m_grid");
    const int trials = param_value<int>(inv.params, "trials", 20);
    EmOptions opts;
    opts.threads = inv.threads;
    opts.recovery_rank = param_value<int>(inv.params, "rank", opts.recovery_rank);
    opts.iht.iters = param_value<int>(inv.params, "iters", opts.iht.iters);
    opts.basis_override_at_full_m = param_value<bool>(inv.params, "basis_override", false);
    const StreamKey key{inv.seed, 0};

    const RecoveryReport report = em_experiment(n_dim, m_grid, p, q, trials, key, opts);
    CommandOutput out;
    json rows = json::array();
    std::string csv = "m,worst_error,theory_lower\n";
    for (const auto& row : report.rows) {
        rows.push_back({{"m", row.m},
                        {"worst_error", row.worst_error},
                        {"theory_lower", row.theory_lower}});
        csv += std::to_string(row.m) + "," + fmt_double(row.worst_error) + "," +
               fmt_double(row.theory_lower) + "\n";
    }
    out.result["rows"] = std::move(rows);
    out.result["note"] =
        "worst_error bounds one specific map/decoder pair from above; theory_lower bounds the "
        "optimal pair from below, so only one-sided consistency is checkable";
    out.csv = std::move(csv);
    out.summary = std::to_string(report.rows.size()) + " recovery row(s)";
    return out;
}

CommandOutput dispatch(const Invocation& inv) {
    if (inv.command == "rate") return run_rate(inv);
    if (inv.command == "volume") return run_volume(inv);
    if (inv.command == "grassmann") return run_grassmann(inv);
    if (inv.command == "net-build") return run_net_build(inv);
    if (inv.command == "net-audit") return run_net_audit(inv);
    if (inv.command == "sandwich") return run_sandwich(inv);
    if (inv.command == "recovery") return run_recovery(inv);
    throw invalid_input("unknown command '" + inv.command + "'");
}

json config_echo(const Invocation& inv) {
    return {{"command", inv.command}, {"seed", inv.seed},       {"threads", inv.threads},
            {"output_path", inv.out}, {"format", inv.format},   {"params", inv.params}};
}

void write_report(const Invocation& inv, const std::string& text) {
    if (inv.out.empty() || inv.command == "net-build") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(inv.out);
    if (!f) throw invalid_input("cannot open output path " + inv.out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

int execute(const Invocation& inv) {
    validate_params(inv);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const CommandOutput out = dispatch(inv);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (inv.format == "csv") {
            write_report(inv, out.csv);
        } else {
            json report;
            report["tool"] = kToolName;
            report["version"] = kToolVersion;
            report["status"] = "ok";
            report["seed"] = inv.seed;
            report["config"] = config_echo(inv);
            report["wall_clock_seconds"] = wall;
            report["result"] = out.result;
            write_report(inv, report.dump(2));
        }
        std::cerr << inv.command << ": ok — " << out.summary << "\n";
        if (!inv.out.empty() || inv.command == "net-build") {
            std::cout << inv.command << ": ok — " << out.summary << "\n";
        }
        return 0;
    } catch (const invalid_input&) {
        throw;  // config problems do not produce failed reports
    } catch (const std::exception& e) {
        if (!inv.out.empty()) {
            json report;
            report["tool"] = kToolName;
            report["version"] = kToolVersion;
            report["status"] = "failed";
            report["seed"] = inv.seed;
            report["config"] = config_echo(inv);
            report["error"] = e.what();
            std::ofstream f(inv.out);
            if (f) f << report.dump(2) << "\n";
        }
        throw;
    }
}

Invocation from_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw invalid_input("cannot open config file " + path);
    json cfg;
    try {
        f >> cfg;
    } catch (const json::exception& e) {
        throw invalid_input(std::string("config parse error: ") + e.what());
    }
    static const std::set<std::string> top_keys{"command", "params",        "seed",
                                               "threads", "output_path", "format"};
    for (const auto& [key, value] : cfg.items()) {
        (void)value;
        if (!top_keys.count(key)) throw invalid_input("unknown config key '" + key + "'");
    }
    Invocation inv;
    inv.command = cfg.contains("command") ? cfg.at("command").get<std::string>() : "";
    if (inv.command.empty()) throw invalid_input("config must set 'command'");
    if (cfg.contains("seed")) inv.seed = cfg.at("seed").get<std::uint64_t>();
    if (cfg.contains("threads")) inv.threads = cfg.at("threads").get<int>();
    if (cfg.contains("output_path")) inv.out = cfg.at("output_path").get<std::string>();
    if (cfg.contains("format")) inv.format = cfg.at("format").get<std::string>();
    if (cfg.contains("params")) {
        if (!cfg.at("params").is_object()) throw invalid_input("config 'params' must be an object");
        inv.params = cfg.at("params");
    }
    if (inv.format != "json" && inv.format != "csv") {
        throw invalid_input("format must be json or csv");
    }
    return inv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for entropy numbers of Schatten-class embeddings"};
    app.require_subcommand(0, 1);

    std::string config_path;
    Invocation inv;
    std::string p_str, q_str, route = "auto", net_path;
    long n_index = 0, samples = -1, audit_samples = -1;
    int n_dim = 0, k = 1, levels_single = 1, trials = -1, rank = -1, iters = -1;
    std::vector<int> n_dims, levels, m_grid;
    std::vector<double> delta_grid;
    double alpha = 1.0, c_q = 1.0;
    bool basis_override = false;

    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", inv.seed, "master seed (default 0)");
    app.add_option("--threads", inv.threads, "worker threads");
    app.add_option("--out", inv.out, "output path (net directory for net-build)");
    app.add_option("--format", inv.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

    auto* rate = app.add_subcommand("rate", "Three-regime theoretical rate");
    rate->add_option("--p", p_str)->required();
    rate->add_option("--q", q_str)->required();
    rate->add_option("--N", n_dim)->required();
    rate->add_option("--n", n_index)->required();

    auto* volume = app.add_subcommand("volume", "Normalized ball volume estimates");
    volume->add_option("--p", p_str)->required();
    volume->add_option("--N", n_dims)->required();
    volume->add_option("--samples", samples);

    auto* grassmann = app.add_subcommand("grassmann", "Metric ball measure on the Grassmannian");
    grassmann->add_option("--N", n_dim)->required();
    grassmann->add_option("--k", k);
    grassmann->add_option("--q", q_str);
    grassmann->add_option("--delta-grid", delta_grid)->required();
    grassmann->add_option("--samples", samples);

    auto* net_build = app.add_subcommand("net-build", "Build the dyadic product net");
    net_build->add_option("--p", p_str)->required();
    net_build->add_option("--q", q_str)->required();
    net_build->add_option("--N", n_dim)->required();
    net_build->add_option("--levels", levels_single)->required();
    net_build->add_option("--alpha", alpha);
    net_build->add_option("--c-q", c_q);

    auto* net_audit = app.add_subcommand("net-audit", "Audit a saved product net");
    net_audit->add_option("--net", net_path)->required();
    net_audit->add_option("--samples", samples);

    auto* sandwich = app.add_subcommand("sandwich", "Upper/lower entropy bound report");
    sandwich->add_option("--p", p_str)->required();
    sandwich->add_option("--q", q_str)->required();
    sandwich->add_option("--N", n_dim)->required();
    sandwich->add_option("--levels", levels)->required();
    sandwich->add_option("--samples", samples);
    sandwich->add_option("--audit-samples", audit_samples);
    sandwich->add_option("--route", route)->check(CLI::IsMember({"auto", "product", "greedy"}));

    auto* recovery = app.add_subcommand("recovery", "Low-rank recovery consistency experiment");
    recovery->add_option("--p", p_str)->required();
    recovery->add_option("--q", q_str)->required();
    recovery->add_option("--N", n_dim)->required();
    recovery->add_option("--m-grid", m_grid)->required();
    recovery->add_option("--trials", trials);
    recovery->add_option("--rank", rank);
    recovery->add_option("--iters", iters);
    recovery->add_flag("--basis-override", basis_override);

    for (CLI::App* sub : {rate, volume, grassmann, net_build, net_audit, sandwich, recovery}) {
        sub->fallthrough();  // lets --seed/--threads/--out/--format follow the subcommand
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) {
            Invocation from_file = from_config(config_path);
            // Command-line overrides win over the file.
            if (app.count("--seed")) from_file.seed = inv.seed;
            if (app.count("--threads")) from_file.threads = inv.threads;
            if (app.count("--out")) from_file.out = inv.out;
            if (app.count("--format")) from_file.format = inv.format;
            return execute(from_file);
        }
        if (app.get_subcommands().empty()) {
            throw invalid_input("no command given (and no --config)");
        }
        CLI::App* sub = app.get_subcommands().front();
        inv.command = sub->get_name();
        json& par = inv.params;
        if (sub == rate) {
            par = {{"p", p_str}, {"q", q_str}, {"N", n_dim}, {"n", n_index}};
        } else if (sub == volume) {
            par = {{"p", p_str}, {"N", n_dims}};
            if (samples >= 0) par["samples"] = samples;
        } else if (sub == grassmann) {
            par = {{"N", n_dim}, {"k", k}, {"delta_grid", delta_grid}};
            if (sub->count("--q")) par["q"] = q_str;
            if (samples >= 0) par["samples"] = samples;
        } else if (sub == net_build) {
            par = {{"p", p_str},        {"q", q_str}, {"N", n_dim},
                   {"levels", levels_single}, {"alpha", alpha}, {"c_q", c_q}};
        } else if (sub == net_audit) {
            par = {{"net", net_path}};
            if (samples >= 0) par["samples"] = samples;
        } else if (sub == sandwich) {
            par = {{"p", p_str}, {"q", q_str}, {"N", n_dim}, {"levels", levels}, {"route", route}};
            if (samples >= 0) par["samples"] = samples;
            if (audit_samples >= 0) par["audit_samples"] = audit_samples;
        } else if (sub == recovery) {
            par = {{"p", p_str}, {"q", q_str}, {"N", n_dim}, {"m_grid", m_grid}};
            if (trials >= 0) par["trials"] = trials;
            if (rank >= 0) par["rank"] = rank;
            if (iters >= 0) par["iters"] = iters;
            if (basis_override) par["basis_override"] = true;
        }
        return execute(inv);
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

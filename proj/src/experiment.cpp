#include "pathlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>

#include "pathlab/action.hpp"
#include "pathlab/classical.hpp"
#include "pathlab/kernels/kernels.hpp"
#include "pathlab/transform.hpp"

#ifndef PATHLAB_VERSION
#define PATHLAB_VERSION "unknown"
#endif

namespace pathlab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

fs::path resolve_output(const ExperimentSpec& spec, const fs::path& output_dir) {
    fs::path dir = output_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') dir = env;
    }
    fs::path file = spec.output_path;
    if (file.empty()) {
        file = std::string(to_string(spec.command)) +
               (spec.format == Format::Csv ? ".csv" : ".json");
    }
    if (file.is_absolute() || dir.empty()) return file;
    return dir / file;
}

namespace {

// Rows of json scalars under named columns.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
    bool single_object = false;  // JSON: emit the only row as an object
};

std::string csv_cell(const json& v) {
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_number()) return v.dump();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return s;
}

json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

void write_text(const fs::path& file, const std::string& content) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + file.string() + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + file.string() + "'");
}

void write_table(const fs::path& file, Format format, const Table& table) {
    std::string content;
    if (format == Format::Csv) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            content += (c ? "," : "") + table.columns[c];
        content += '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) content += (c ? "," : "") + csv_cell(row[c]);
            content += '\n';
        }
    } else {
        json rows = json::array();
        for (const auto& row : table.rows) {
            json obj = json::object();
            for (std::size_t c = 0; c < row.size(); ++c) {
                const json& v = row[c];
                obj[table.columns[c]] =
                    v.is_number_float() ? finite_or_string(v.get<double>()) : v;
            }
            rows.push_back(std::move(obj));
        }
        const json doc = table.single_object && rows.size() == 1 ? rows[0] : rows;
        content = doc.dump(2) + "\n";
    }
    write_text(file, content);
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Outcome {
    Table table;
    json results = json::object();
    int status = kExitPass;
    std::string summary;
};

// ---------------------------------------------------------------------------

Outcome run_equivalence(const ExperimentSpec& spec) {
    const auto lattice = spec.lattice();
    const auto params = spec.params();
    SamplerConfig config = spec.sampler;
    Outcome out;
    out.table.columns = {"observable",      "mean_mapped", "stderr_mapped", "mean_metropolis",
                         "stderr_metropolis", "z",         "pass"};
    if (!spec.proposal_width_set)
        config.proposal_width = tune_proposal(lattice, params, spec.branch, config);
    out.results["proposal_width"] = config.proposal_width;
    out.results["proposal_width_tuned"] = !spec.proposal_width_set;

    try {
        const auto report = equivalence_experiment(lattice, params, spec.branch, config,
                                                   spec.observables);
        for (const auto& row : report.rows) {
            const std::size_t dim = row.mapped.mean.size();
            for (std::size_t d = 0; d < dim; ++d) {
                std::string name(to_string(row.observable));
                if (dim > 1) name += "[" + std::to_string(d) + "]";
                out.table.rows.push_back({name, row.mapped.mean[d], row.mapped.std_error[d],
                                          row.metropolis.mean[d], row.metropolis.std_error[d],
                                          row.z[d], std::abs(row.z[d]) < kPassSigma});
            }
        }
        out.results["n_blowups"] = report.n_blowups;
        out.results["acceptance_rate"] = report.acceptance_rate;
        out.results["all_pass"] = report.all_pass;
        out.status = report.all_pass ? kExitPass : kExitCriteriaFailed;
        out.summary = std::string("equivalence ") + (report.all_pass ? "passed" : "FAILED") +
                      " (" + std::to_string(report.rows.size()) + " observables, acceptance " +
                      format_number(report.acceptance_rate) + ")";
    } catch (const BlowupBudgetError& e) {
        out.results["n_blowups"] = e.rejected();
        out.results["error"] = e.what();
        out.results["all_pass"] = false;
        out.status = kExitCriteriaFailed;
        out.summary = std::string("equivalence FAILED: ") + e.what();
    }
    return out;
}

Outcome run_classical_limit(const ExperimentSpec& spec) {
    const auto lattice = spec.lattice();
    const auto params = spec.params();
    const std::vector<double> hbars = spec.hbar_list.value_or(std::vector<double>{0.5, 0.2, 0.1, 0.05});
    Outcome out;
    out.table.columns = {"hbar", "rms_dev_from_kink", "max_el7_residual", "mean_el9_residual",
                         "n_blowups"};
    try {
        const auto report = hbar_sweep(lattice, params, spec.branch, hbars, spec.sampler);
        for (const auto& r : report.rows)
            out.table.rows.push_back({r.hbar, r.rms_dev_from_kink, r.max_el7_residual,
                                      r.mean_el9_residual, r.n_blowups});
        json blowups = json::array();
        for (const auto& r : report.rows) blowups.push_back(r.n_blowups);
        out.results["n_blowups"] = blowups;
        out.results["rms_strictly_decreasing"] = report.rms_strictly_decreasing;
        out.results["el7_below_a_over_5"] = report.el7_small;
        out.results["el9_within_20pct_of_a"] = report.el9_offset_matches;
        out.results["all_pass"] = report.all_pass();
        out.status = report.all_pass() ? kExitPass : kExitCriteriaFailed;
        out.summary = std::string("classical-limit ") + (report.all_pass() ? "passed" : "FAILED");
    } catch (const BlowupBudgetError& e) {
        out.results["error"] = e.what();
        out.results["all_pass"] = false;
        out.status = kExitCriteriaFailed;
        out.summary = std::string("classical-limit FAILED: ") + e.what();
    }
    return out;
}

json diagnostics_json(const shooting::Diagnostics& d) {
    return {{"p_lo", d.p_lo},
            {"p_hi", d.p_hi},
            {"scanned", d.scanned},
            {"escaped", d.escaped},
            {"sign_changes", d.sign_changes},
            {"min_abs_residual", finite_or_string(d.min_abs_residual)},
            {"argmin_p", d.argmin_p},
            {"min_residual", finite_or_string(d.min_residual)},
            {"max_residual", finite_or_string(d.max_residual)}};
}

Outcome run_bvp(const ExperimentSpec& spec) {
    const auto lattice = spec.lattice();
    const auto params = spec.params();
    Outcome out;

    Path guess(lattice.n_nodes(), -spec.kink_alpha);
    try {
        guess = kink_path(make_kink(params, spec.T, spec.kink_alpha), lattice);
        for (double v : guess.values())
            if (!std::isfinite(v)) throw SingularityError("non-finite guess", 0.0);
    } catch (const SingularityError&) {
        guess = Path(lattice.n_nodes(), -spec.kink_alpha);
    }

    try {
        const auto sol = solve_broken_bvp(lattice, params, guess);
        const Path phi = positions(sol);
        out.table.columns = {"t", "phi", "dphi"};
        for (std::size_t i = 0; i < phi.size(); ++i)
            out.table.rows.push_back({lattice.time(i), phi[i], sol.nodes[i].v});

        double odd = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i)
            odd = std::max(odd, std::abs(phi[i] + phi[phi.size() - 1 - i]));
        double l2 = 0.0;
        try {
            const Path kink = kink_path(make_kink(params, spec.T, -phi.front()), lattice);
            for (std::size_t i = 0; i < lattice.N(); ++i)
                l2 += (phi[i] - kink[i]) * (phi[i] - kink[i]) * lattice.epsilon();
            l2 = std::sqrt(l2);
        } catch (const SingularityError&) {
            l2 = std::numeric_limits<double>::infinity();
        }
        out.results = {{"converged", true},
                       {"phi_left", sol.p},
                       {"left_bc_residual", sol.left_residual},
                       {"right_bc_residual", sol.right_residual},
                       {"refinement_error", sol.refinement_error},
                       {"max_odd_asymmetry", odd},
                       {"l2_distance_from_kink", finite_or_string(l2)}};
        out.summary = "bvp converged at phi(-T) = " + format_number(sol.p);
    } catch (const ConvergenceError& e) {
        // the residual scan is the useful artifact when no root exists
        const auto problem = broken_bvp_problem(params);
        const auto options = broken_bvp_options(params, guess);
        out.table.columns = {"phi_left", "right_bc_residual"};
        std::vector<shooting::State> nodes;
        const double dp = (options.p_hi - options.p_lo) / static_cast<double>(options.scan_points - 1);
        for (std::size_t k = 0; k < options.scan_points; ++k) {
            const double p = options.p_lo + static_cast<double>(k) * dp;
            const bool ok = shooting::integrate(problem.rhs, {p, problem.left_velocity(p)}, lattice,
                                                options.substeps, options.escape, nodes);
            out.table.rows.push_back(
                {p, ok ? problem.right_residual(nodes.back()) : std::numeric_limits<double>::quiet_NaN()});
        }
        out.results = {{"converged", false},
                       {"error", e.what()},
                       {"diagnostics", diagnostics_json(e.diagnostics())}};
        out.status = kExitCriteriaFailed;
        out.summary = std::string("bvp FAILED: ") + e.what();
    }
    return out;
}

Outcome run_kink(const ExperimentSpec& spec) {
    const auto lattice = spec.lattice();
    const auto params = spec.params();
    const auto sol = make_kink(params, spec.T, spec.kink_alpha, spec.branch);
    const Path phi = kink_path(sol, lattice);

    Outcome out;
    out.table.columns = {"t", "phi"};
    for (std::size_t i = 0; i < phi.size(); ++i) out.table.rows.push_back({lattice.time(i), phi[i]});

    const auto flow = residual(phi, spec.branch == Branch::Plus ? EquationId::FlowPlus
                                                                : EquationId::FlowMinus,
                               lattice, params);
    const auto el7 = residual(phi, EquationId::ElSymmetric, lattice, params);
    const auto el9 = residual(phi, EquationId::ElBroken, lattice, params);
    double flow_max = 0.0, el7_max = 0.0, el9_mean = 0.0;
    for (double r : flow) flow_max = std::max(flow_max, std::abs(r));
    for (double r : el7) el7_max = std::max(el7_max, std::abs(r));
    for (double r : el9) el9_mean += r;
    el9_mean /= static_cast<double>(el9.size());

    out.results = {{"kind", std::string(to_string(sol.kind))},
                   {"c", sol.c},
                   {"alpha", sol.alpha},
                   {"max_abs_flow_residual", finite_or_string(flow_max)},
                   {"max_abs_el7_residual", finite_or_string(el7_max)},
                   {"mean_el9_residual", finite_or_string(el9_mean)}};
    if (const auto pole = pole_time(sol)) out.results["pole_time"] = *pole;

    if (params.beta() > 0.0) {
        const auto odd = make_kink_with_constant(params, spec.T, KinkKind::Tanh, 0.0);
        const double gap = action_gap(odd, lattice, params);
        const double phi_T = kink_profile(odd, spec.T);
        out.results["odd_kink_action_gap"] = gap;
        out.results["odd_kink_gap_prediction"] = odd_path_gap_prediction(phi_T, params);
        out.results["odd_kink_left_sum_correction"] = params.a() * lattice.epsilon() * phi_T;
    }
    out.summary = std::string("kink ") + std::string(to_string(sol.kind)) + " c=" + format_number(sol.c);
    return out;
}

Outcome run_ito_check(const ExperimentSpec& spec) {
    const auto report = ito_check(spec.lattice(), spec.params(), spec.sampler);
    Outcome out;
    out.table.columns = {"quantity", "mean", "stderr"};
    out.table.rows.push_back({"quadratic_variation_term", report.quadratic_variation_term.mean[0],
                              report.quadratic_variation_term.std_error[0]});
    out.table.rows.push_back(
        {"drift_term", report.drift_term.mean[0], report.drift_term.std_error[0]});
    out.table.rows.push_back(
        {"difference", report.difference.mean[0], report.difference.std_error[0]});
    out.table.rows.push_back(
        {"max_relative_identity_residual", report.max_relative_identity_residual, 0.0});
    out.results = {{"z", report.z},
                   {"identity_pass", report.identity_pass},
                   {"statistical_pass", report.statistical_pass},
                   {"all_pass", report.all_pass()}};
    out.status = report.all_pass() ? kExitPass : kExitCriteriaFailed;
    out.summary = std::string("ito-check ") + (report.all_pass() ? "passed" : "FAILED");
    return out;
}

Outcome run_jacobian_check(const ExperimentSpec& spec) {
    const auto lattice = spec.lattice();
    const auto params = spec.params();
    StreamRng rng(spec.sampler.seed, static_cast<std::uint64_t>(RngStream::Check), 0);
    Path phi(lattice.n_nodes(), 0.0);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = 4.0 * rng.uniform() - 2.0;
    const double det = numeric_jacobian_det(phi, spec.branch, lattice, params);
    const bool pass = std::abs(det - 1.0) <= 1e-6;

    Outcome out;
    out.table.columns = {"det", "tolerance_pass"};
    out.table.rows.push_back({det, pass});
    out.table.single_object = true;
    out.results = {{"det", det}, {"tolerance_pass", pass}};
    out.status = pass ? kExitPass : kExitCriteriaFailed;
    out.summary = "jacobian det = " + format_number(det);
    return out;
}

}  // namespace

ExecutionResult execute(const ExperimentSpec& spec, const fs::path& output_dir) {
    ExecutionResult result;
    result.results_file = resolve_output(spec, output_dir);
    result.metadata_file = result.results_file;
    result.metadata_file += ".meta.json";

    json meta = {
        {"code_version", PATHLAB_VERSION},
        {"command", std::string(to_string(spec.command))},
        {"seed", spec.sampler.seed},
        {"kernel_isa", std::string(kernels::to_string(kernels::active().isa))},
        {"threads", resolve_threads(spec.sampler.threads)},
        {"spec", serialize(spec)},
        {"results_file", result.results_file.filename().string()},
        {"timestamp", timestamp_utc()},
    };

    Outcome outcome;
    try {
        switch (spec.command) {
            case Command::Equivalence: outcome = run_equivalence(spec); break;
            case Command::ClassicalLimit: outcome = run_classical_limit(spec); break;
            case Command::Bvp: outcome = run_bvp(spec); break;
            case Command::Kink: outcome = run_kink(spec); break;
            case Command::ItoCheck: outcome = run_ito_check(spec); break;
            case Command::JacobianCheck: outcome = run_jacobian_check(spec); break;
        }
        write_table(result.results_file, spec.format, outcome.table);
    } catch (const std::exception& e) {
        result.exit_status = kExitOperational;
        result.summary = std::string("error: ") + e.what();
        meta["error"] = e.what();
        meta["exit_status"] = result.exit_status;
        try {
            write_text(result.metadata_file, meta.dump(2) + "\n");
        } catch (const std::exception&) {
        }
        return result;
    }

    result.exit_status = outcome.status;
    result.summary = outcome.summary;
    meta["results"] = std::move(outcome.results);
    meta["exit_status"] = result.exit_status;
    try {
        write_text(result.metadata_file, meta.dump(2) + "\n");
    } catch (const std::exception& e) {
        result.exit_status = kExitOperational;
        result.summary = std::string("error: ") + e.what();
    }
    return result;
}

}  // namespace pathlab::cli

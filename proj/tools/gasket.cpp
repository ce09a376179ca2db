// Command-line driver: ball tables, stabilization runs, the three-wave
// decomposition, the verification suite, and SVG rendering.
//
// Exit codes: 0 success, 1 verification failure, 2 infrastructure error
// (I/O, malformed input, non-convergence).
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gasket/io.hpp"
#include "gasket/svg.hpp"
#include "gasket/verifier.hpp"

namespace {

using namespace gasket;
using sandpile::HeightFunction;
using sandpile::SandState;
using sandpile::Schedule;
using sandpile::StabilizeOptions;

int cmd_table(std::int64_t n_max, const std::string& out) {
    io::write_text_file(out, io::ball_table_csv(n_max));
    std::cout << "wrote " << out << " (n <= " << n_max << ")\n";
    return 0;
}

int cmd_stabilize(double mass, double epsilon, const std::string& schedule,
                  const std::string& prefix, const std::string& format) {
    StabilizeOptions opts;
    opts.schedule = schedule == "round_robin" ? Schedule::round_robin : Schedule::parallel;
    opts.epsilon = epsilon;
    const auto result = stabilize(SandState::point_mass(mass), HeightFunction::uniform(1.0), opts);

    const std::int64_t n = BallStatsTable::shape_radius(mass);
    std::int64_t rmin = 0, rmax = 0;
    for (Vertex v : result.report.cluster) rmax = std::max(rmax, radius(v));
    std::cout << "mass " << io::format_double(mass) << ": b_" << n << " <= m < b_" << n + 1
              << " predicts B_" << n - 1 << " <= cluster <= B_" << n << "\n"
              << "observed cluster: " << result.report.cluster.size() << " vertices, radius ["
              << rmin << ", " << rmax << "], sweeps " << result.report.iterations
              << ", residual " << io::format_double(result.report.residual) << "\n";

    if (format == "csv") {
        io::write_text_file(prefix + ".state.csv", io::value_map_csv(result.final_state.masses()));
        io::write_text_file(prefix + ".odometer.csv", io::value_map_csv(result.odometer.values()));
    } else {
        io::write_text_file(prefix + ".state.json", io::sand_state_json(result.final_state));
        io::write_text_file(prefix + ".odometer.json", io::odometer_json(result.odometer));
    }
    io::write_text_file(prefix + ".report.json",
                        io::stabilize_report_json(result.report, mass));
    if (!result.report.converged) {
        std::cerr << "not converged within the sweep cap\n";
        return 2;
    }
    return 0;
}

int cmd_waves(std::int64_t n, double epsilon, const std::string& prefix) {
    const auto w = sandpile::run_three_waves(n, epsilon);
    io::write_text_file(prefix + ".wave1.json", io::odometer_json(w.wave1));
    io::write_text_file(prefix + ".wave2.json", io::odometer_json(w.wave2));
    io::write_text_file(prefix + ".wave3.json", io::odometer_json(w.wave3));
    io::write_text_file(prefix + ".final.json", io::sand_state_json(w.final_state));
    std::cout << "n=" << n << " second-wave mass " << io::format_double(w.wave2_mass_added)
              << "\ndeviation from predicted states: wave2 "
              << io::format_double(w.wave2_state_dev) << ", wave3 odometer "
              << io::format_double(w.wave3_odometer_dev) << ", final distribution "
              << io::format_double(w.final_distribution_dev) << "\n";
    return w.converged ? 0 : 2;
}

int cmd_render(const std::string& input, double scale, std::string out) {
    const auto values = io::read_value_map(io::read_text_file(input));
    if (out.empty()) out = input + ".svg";
    io::write_text_file(out, io::render_svg(values, scale));
    std::cout << "wrote " << out << " (" << values.entries.size() << " vertices)\n";
    return 0;
}

int cmd_verify(const std::string& suite, const std::string& masses_range, std::uint64_t seed,
               const std::string& out) {
    using verify::CheckResult;
    verify::reset_conservation_ledger();

    const std::map<std::string, std::function<std::vector<CheckResult>()>> suites{
        {"shape", [&] { return std::vector<CheckResult>{verify::check_shape_sweep(
                            200, 3.0, 1e4, 40, seed)}; }},
        {"ball", verify::suite_ball},
        {"closed-form", verify::suite_closed_form},
        {"utilde", verify::suite_u_tilde},
        {"appendix",
         [&] {
             std::vector<CheckResult> out_;
             for (int k = 1; k <= 4; ++k) out_.push_back(verify::check_appendix_rule(k, 50, seed));
             return out_;
         }},
        {"counting", verify::suite_counting},
        {"green", verify::suite_green},
        {"abelian", verify::suite_abelian},
        {"cross", verify::suite_cross},
        {"waves", verify::suite_waves},
    };

    std::vector<CheckResult> results;
    auto append = [&](const std::vector<CheckResult>& rs) {
        results.insert(results.end(), rs.begin(), rs.end());
    };

    if (!masses_range.empty()) {
        long long lo = 0, hi = 0;
        if (std::sscanf(masses_range.c_str(), "%lld..%lld", &lo, &hi) != 2 || lo < 3 || hi < lo)
            throw std::runtime_error("bad --masses range, expected A..B with 3 <= A <= B");
        for (long long m = lo; m <= hi; ++m)
            results.push_back(verify::check_shape_theorem(static_cast<double>(m)));
    } else if (suite == "all") {
        for (const auto& [name, fn] : suites) append(fn());
    } else {
        auto it = suites.find(suite);
        if (it == suites.end()) throw std::runtime_error("unknown suite: " + suite);
        append(it->second());
    }
    results.push_back(verify::conservation_summary());

    bool all_passed = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "[pass] " : "[FAIL] ") << r.name << "  " << r.details << "\n";
        all_passed = all_passed && r.passed;
    }
    io::write_text_file(out, verify::report_json(results));
    std::cout << (all_passed ? "all checks passed" : "CHECKS FAILED") << " -> " << out << "\n";
    return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"divisible sandpile on the Sierpinski gasket graph"};
    app.require_subcommand(1);

    std::int64_t n_max = 40;
    std::string out_table = "ball_table.csv";
    auto* table = app.add_subcommand("table", "ball sizes, boundaries, and masses b_n as CSV");
    table->add_option("--n-max", n_max, "largest radius")->check(CLI::PositiveNumber);
    table->add_option("--out", out_table, "output path");

    double mass = 9.0;
    double epsilon = 1e-12;
    std::string schedule = "parallel";
    std::string prefix = "stabilize";
    std::string format = "json";
    auto* stab = app.add_subcommand("stabilize", "stabilize a point mass and write the results");
    stab->add_option("--mass", mass, "initial mass at the origin")->required();
    stab->add_option("--epsilon", epsilon, "relative stopping tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    stab->add_option("--schedule", schedule, "parallel or round_robin")->capture_default_str()
        ->check(CLI::IsMember({"parallel", "round_robin"}));
    stab->add_option("--out", prefix, "output path prefix")->capture_default_str();
    stab->add_option("--format", format, "json or csv for state/odometer")->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));

    std::int64_t radius_n = 1;
    double eps_waves = 1e-12;
    std::string prefix_waves = "waves";
    auto* waves = app.add_subcommand("waves", "run the three-wave decomposition at radius n");
    waves->add_option("--radius", radius_n, "ball radius n")->required()->check(CLI::PositiveNumber);
    waves->add_option("--epsilon", eps_waves, "relative stopping tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    waves->add_option("--out", prefix_waves, "output path prefix")->capture_default_str();

    std::string suite = "all";
    std::string masses_range;
    std::uint64_t seed = 20240915;
    std::string out_report = "verify_report.json";
    auto* verify_cmd = app.add_subcommand("verify", "run verification checks");
    verify_cmd->add_option("--suite", suite,
                           "all, shape, ball, closed-form, utilde, appendix, counting, green, "
                           "abelian, cross, waves")
        ->capture_default_str();
    verify_cmd->add_option("--masses", masses_range,
                           "integer range A..B: check the shape theorem for every mass");
    verify_cmd->add_option("--seed", seed, "seed for randomized checks")->capture_default_str();
    verify_cmd->add_option("--out", out_report, "report path")->capture_default_str();

    std::string render_input;
    double scale = 40.0;
    std::string render_out;
    auto* render = app.add_subcommand("render", "render a state or odometer JSON file as SVG");
    render->add_option("input", render_input, "state/odometer JSON file")->required();
    render->add_option("--scale", scale, "pixels per unit step")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    render->add_option("--out", render_out, "output path (default: input + .svg)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (table->parsed()) return cmd_table(n_max, out_table);
        if (stab->parsed()) return cmd_stabilize(mass, epsilon, schedule, prefix, format);
        if (waves->parsed()) return cmd_waves(radius_n, eps_waves, prefix_waves);
        if (verify_cmd->parsed()) return cmd_verify(suite, masses_range, seed, out_report);
        if (render->parsed()) return cmd_render(render_input, scale, render_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

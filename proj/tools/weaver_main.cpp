// Command-line front end for the weaver shared library. Talks to the solver
// exclusively through the public C interface.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weaver.h"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

int die(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return 1;
}

struct LoadedModel {
    weaver_model* handle = nullptr;
    std::string digest;

    ~LoadedModel() { weaver_model_free(handle); }
};

bool load(const std::string& path, const std::string& format, LoadedModel& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "error: cannot open %s\n", path.c_str());
        return false;
    }
    std::ostringstream bytes;
    bytes << in.rdbuf();
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016" PRIx64, fnv1a64(bytes.str()));
    out.digest = digest;

    const int rc = weaver_model_from_file(path.c_str(), format.c_str(), &out.handle);
    if (rc != WEAVER_OK) {
        std::fprintf(stderr, "error: %s\n", weaver_last_error());
        return false;
    }
    return true;
}

size_t regularity_cap() {
    if (const char* env = std::getenv("WEAVER_MAX_REG_N")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<size_t>(v);
    }
    return 20;
}

std::string regularity_name(int verdict) {
    switch (verdict) {
        case WEAVER_REGULAR: return "regular";
        case WEAVER_IRREGULAR: return "irregular";
        default: return "size_cap";
    }
}

std::string join(const std::vector<double>& v, const char* sep, bool full) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += full ? fmt(v[i]) : fmt_fixed(v[i], 4);
    }
    return out;
}

struct SolveData {
    std::vector<double> p, tau, a, b;
    double tau0 = 0.0, sse = 0.0;
    int iterations = 0;
    std::string solver, status, regularity;
};

void print_json(const SolveData& d) {
    std::string out = "{\"p\":[" + join(d.p, ",", true) + "]";
    out += ",\"tau0\":" + fmt(d.tau0);
    out += ",\"tau\":[" + join(d.tau, ",", true) + "]";
    out += ",\"sse\":" + fmt(d.sse);
    out += ",\"iterations\":" + std::to_string(d.iterations);
    out += ",\"solver\":\"" + d.solver + "\"";
    out += ",\"status\":\"" + d.status + "\"";
    out += ",\"regularity\":\"" + d.regularity + "\"";
    out += "}";
    std::printf("%s\n", out.c_str());
}

void print_csv(const SolveData& d) {
    std::string header, row;
    for (size_t i = 0; i < d.p.size(); ++i) {
        header += "p" + std::to_string(i + 1) + ",";
        row += fmt(d.p[i]) + ",";
    }
    header += "tau0,";
    row += fmt(d.tau0) + ",";
    for (size_t j = 0; j < d.tau.size(); ++j) {
        header += "tau" + std::to_string(j + 1) + ",";
        row += fmt(d.tau[j]) + ",";
    }
    header += "sse,iterations,solver,status,regularity";
    row += fmt(d.sse) + "," + std::to_string(d.iterations) + "," + d.solver + "," + d.status +
           "," + d.regularity;
    std::printf("%s\n%s\n", header.c_str(), row.c_str());
}

// Play-board table: top margin p, left margin tau0/tau, the weaving grid,
// right margin b, bottom margin a.
void print_table(const weaver_model* m, const SolveData& d) {
    const size_t n = d.p.size(), q = d.tau.size();
    auto cell = [](const std::string& s, int w) {
        std::string out = s;
        while (out.size() < static_cast<size_t>(w)) out.insert(out.begin(), ' ');
        return out;
    };
    std::string line = cell("", 10);
    for (size_t i = 0; i < n; ++i) line += cell(fmt_fixed(d.p[i], 4), 10);
    std::printf("%s\n", line.c_str());

    line = cell(fmt_fixed(d.tau0, 2), 10);
    for (size_t i = 0; i < n; ++i) line += cell("0", 10);
    std::printf("%s\n", line.c_str());

    std::vector<char> bits(n + 1);
    for (size_t j = 0; j < q; ++j) {
        weaver_model_pattern(m, j, bits.data(), bits.size());
        line = cell(fmt_fixed(d.tau[j], 2), 10);
        for (size_t i = 0; i < n; ++i) line += cell(std::string(1, bits[i]), 10);
        line += cell(fmt(d.b[j]), 10);
        std::printf("%s\n", line.c_str());
    }
    line = cell("", 10);
    for (size_t i = 0; i < n; ++i) line += cell(fmt(d.a[i]), 10);
    std::printf("%s\n", line.c_str());
    std::printf("sse=%s iterations=%d solver=%s status=%s regularity=%s\n", fmt(d.sse).c_str(),
                d.iterations, d.solver.c_str(), d.status.c_str(), d.regularity.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum-likelihood estimation for generalized counting data"};
    app.require_subcommand(1);

    std::string input, format = "expr", solver_name = "alliance", out_format = "json", at;
    double tol = 1e-13;
    int max_iter = 10000;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("input", input, "input file")->required();
        cmd->add_option("--format", format, "expr|grid|matches|model")
            ->check(CLI::IsMember({"expr", "grid", "matches", "model"}));
    };

    auto* solve = app.add_subcommand("solve", "estimate the probability vector");
    add_common(solve);
    solve->add_option("--solver", solver_name, "alliance|weaver|greedy|mm|newton")
        ->check(CLI::IsMember({"alliance", "weaver", "greedy", "mm", "newton"}));
    solve->add_option("--tol", tol, "reconstruction error tolerance");
    solve->add_option("--max-iter", max_iter, "iteration cap");
    solve->add_option("--out", out_format, "json|csv|table")
        ->check(CLI::IsMember({"json", "csv", "table"}));

    auto* check = app.add_subcommand("check", "uniform regularity check");
    add_common(check);

    auto* reconstruct = app.add_subcommand("reconstruct", "reconstruction audit at a point");
    add_common(reconstruct);
    reconstruct->add_option("--at", at, "comma-separated probabilities")->required();

    auto* export_cmd = app.add_subcommand("export", "canonical model document to stdout");
    add_common(export_cmd);

    auto* graph = app.add_subcommand("graph", "covering graph as DOT to stdout");
    add_common(graph);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const auto t_start = Clock::now();
    LoadedModel model;
    if (!load(input, format, model)) return 1;
    const double t_parse = ms_since(t_start);

    if (solve->parsed()) {
        const auto t_reg = Clock::now();
        weaver_regularity reg{};
        if (weaver_check_regularity(model.handle, regularity_cap(), &reg) != WEAVER_OK)
            return die(weaver_last_error());
        const double reg_ms = ms_since(t_reg);

        weaver_options opts;
        weaver_options_init(&opts);
        opts.sse_tolerance = tol;
        opts.max_iterations = max_iter;
        int solver_id = WEAVER_SOLVER_ALLIANCE;
        if (solver_name == "weaver") solver_id = WEAVER_SOLVER_WEAVER;
        else if (solver_name == "greedy") solver_id = WEAVER_SOLVER_GREEDY;
        else if (solver_name == "mm") solver_id = WEAVER_SOLVER_MM;
        else if (solver_name == "newton") solver_id = WEAVER_SOLVER_NEWTON;

        const auto t_solve = Clock::now();
        weaver_solution* sol = nullptr;
        if (weaver_solve(model.handle, solver_id, &opts, &sol) != WEAVER_OK)
            return die(weaver_last_error());
        const double solve_ms = ms_since(t_solve);

        SolveData d;
        d.p.resize(weaver_model_n(model.handle));
        d.tau.resize(weaver_model_q(model.handle));
        d.a.resize(d.p.size());
        d.b.resize(d.tau.size());
        weaver_solution_p(sol, d.p.data(), d.p.size());
        weaver_solution_tau(sol, d.tau.data(), d.tau.size());
        weaver_model_ionic_counts(model.handle, d.a.data(), d.a.size());
        weaver_model_union_counts(model.handle, d.b.data(), d.b.size());
        d.tau0 = weaver_solution_tau0(sol);
        d.sse = weaver_solution_sse(sol);
        d.iterations = weaver_solution_iterations(sol);
        d.solver = weaver_solution_solver_name(sol);
        const int status = weaver_solution_status(sol);
        d.status = status == WEAVER_STATUS_CONVERGED        ? "converged"
                   : status == WEAVER_STATUS_ITERATION_CAP ? "iteration_cap"
                                                            : "diverged_with_best";
        d.regularity = regularity_name(reg.verdict);

        if (out_format == "json") print_json(d);
        else if (out_format == "csv") print_csv(d);
        else print_table(model.handle, d);
        weaver_solution_free(sol);

        std::fprintf(stderr, "input_digest fnv1a64=%s\n", model.digest.c_str());
        std::fprintf(stderr, "timings_ms parse=%.3f regularity=%.3f solve=%.3f total=%.3f\n",
                     t_parse, reg_ms, solve_ms, ms_since(t_start));
        if (status == WEAVER_STATUS_CONVERGED) return 0;
        return status == WEAVER_STATUS_DIVERGED_WITH_BEST ? 2 : 3;
    }

    if (check->parsed()) {
        weaver_regularity reg{};
        if (weaver_check_regularity(model.handle, regularity_cap(), &reg) != WEAVER_OK)
            return die(weaver_last_error());
        std::fprintf(stderr, "input_digest fnv1a64=%s\n", model.digest.c_str());
        std::fprintf(stderr, "timings_ms parse=%.3f total=%.3f\n", t_parse, ms_since(t_start));
        if (reg.verdict == WEAVER_REGULAR) {
            std::printf("regular negative_terms=%zu unions_checked=%zu\n", reg.negative_terms,
                        reg.unions_checked);
            return 0;
        }
        if (reg.verdict == WEAVER_IRREGULAR) {
            std::printf("irregular witness=%s union_count=%s covered_sum=%s\n", reg.witness_bits,
                        fmt(reg.witness_union_count).c_str(), fmt(reg.witness_covered_sum).c_str());
            return 4;
        }
        std::printf("size_cap negative_terms=%zu\n", reg.negative_terms);
        return 5;
    }

    if (reconstruct->parsed()) {
        std::vector<double> point;
        std::stringstream ss(at);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str()) return die("bad probability '" + tok + "'");
            point.push_back(v);
        }
        const size_t n = weaver_model_n(model.handle);
        if (point.size() != n) return die("--at needs exactly " + std::to_string(n) + " values");
        double sum = 0.0;
        for (double v : point) sum += v;
        if (sum <= 0.0) return die("--at must have positive total mass");
        if (std::abs(sum - 1.0) > 1e-9)
            std::fprintf(stderr, "warning: --at sums to %s; renormalizing\n", fmt(sum).c_str());

        const size_t q = weaver_model_q(model.handle);
        std::vector<double> tau(q), recon(n), dev(n);
        double tau0 = 0.0, sse = 0.0;
        if (weaver_reconstruct_at(model.handle, point.data(), point.size(), tau.data(), &tau0,
                                  recon.data(), dev.data(), &sse) != WEAVER_OK)
            return die(weaver_last_error());
        std::printf("tau0 %s\n", fmt(tau0).c_str());
        std::printf("tau %s\n", join(tau, " ", true).c_str());
        std::printf("R %s\n", join(recon, " ", true).c_str());
        std::printf("d %s\n", join(dev, " ", true).c_str());
        std::printf("sse %s\n", fmt(sse).c_str());
        std::fprintf(stderr, "input_digest fnv1a64=%s\n", model.digest.c_str());
        return 0;
    }

    if (export_cmd->parsed()) {
        char* text = nullptr;
        if (weaver_model_text(model.handle, &text) != WEAVER_OK)
            return die(weaver_last_error());
        std::printf("%s", text);
        weaver_string_free(text);
        return 0;
    }

    if (graph->parsed()) {
        char* dot = nullptr;
        if (weaver_covering_graph_dot(model.handle, &dot) != WEAVER_OK)
            return die(weaver_last_error());
        std::printf("%s", dot);
        weaver_string_free(dot);
        return 0;
    }

    return 1;
}

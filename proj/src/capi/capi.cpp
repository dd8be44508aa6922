#include "weaver.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "core/algebra.hpp"
#include "core/errors.hpp"
#include "core/ingest.hpp"
#include "core/model.hpp"
#include "core/reconstruction.hpp"
#include "core/solvers.hpp"

struct weaver_model {
    weaver::CountModel impl;
};

struct weaver_solution {
    weaver::solvers::Solution impl;
};

namespace {

thread_local std::string g_last_error;

int code_of(const weaver::Error& e) {
    switch (e.code()) {
        case weaver::ErrorCode::invalid_argument: return WEAVER_ERR_INVALID_ARGUMENT;
        case weaver::ErrorCode::parse_error: return WEAVER_ERR_PARSE;
        case weaver::ErrorCode::model_invariant: return WEAVER_ERR_MODEL;
        case weaver::ErrorCode::singular_evaluation: return WEAVER_ERR_SINGULAR;
        case weaver::ErrorCode::size_cap: return WEAVER_ERR_SIZE_CAP;
        case weaver::ErrorCode::io_error: return WEAVER_ERR_IO;
        case weaver::ErrorCode::numeric_failure: return WEAVER_ERR_NUMERIC;
    }
    return WEAVER_ERR_UNKNOWN;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return WEAVER_OK;
    } catch (const weaver::Error& e) {
        g_last_error = e.what();
        return code_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return WEAVER_ERR_UNKNOWN;
    }
}

int fill(const std::vector<double>& src, double* buf, size_t len) {
    if (!buf || len < src.size()) {
        g_last_error = "output buffer too small";
        return WEAVER_ERR_INVALID_ARGUMENT;
    }
    std::memcpy(buf, src.data(), src.size() * sizeof(double));
    return WEAVER_OK;
}

}  // namespace

extern "C" {

void weaver_options_init(weaver_options* opts) {
    if (!opts) return;
    const weaver::solvers::SolverOptions defaults;
    opts->sse_tolerance = defaults.sse_tolerance;
    opts->max_iterations = defaults.max_iterations;
    opts->perturbation_factor = defaults.perturbation_factor;
    opts->bookkeeping = defaults.bookkeeping ? 1 : 0;
}

const char* weaver_last_error(void) { return g_last_error.c_str(); }

const char* weaver_version(void) { return "1.0.0"; }

int weaver_model_from_expression(const char* text, weaver_model** out) {
    if (!text || !out) return WEAVER_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new weaver_model{weaver::ingest::parse_expression(text)};
    });
}

int weaver_model_from_file(const char* path, const char* format, weaver_model** out) {
    if (!path || !format || !out) return WEAVER_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new weaver_model{weaver::ingest::load_model_file(path, format)};
    });
}

void weaver_model_free(weaver_model* m) { delete m; }

size_t weaver_model_n(const weaver_model* m) { return m ? m->impl.n() : 0; }
size_t weaver_model_q(const weaver_model* m) { return m ? m->impl.q() : 0; }

int weaver_model_ionic_counts(const weaver_model* m, double* buf, size_t len) {
    if (!m) return WEAVER_ERR_INVALID_ARGUMENT;
    return fill(m->impl.ionic_counts(), buf, len);
}

int weaver_model_union_counts(const weaver_model* m, double* buf, size_t len) {
    if (!m) return WEAVER_ERR_INVALID_ARGUMENT;
    return fill(m->impl.union_counts(), buf, len);
}

int weaver_model_pattern(const weaver_model* m, size_t term, char* bits, size_t len) {
    if (!m || !bits || term >= m->impl.q() || len < m->impl.n() + 1)
        return WEAVER_ERR_INVALID_ARGUMENT;
    const std::string s = m->impl.patterns()[term].to_string();
    std::memcpy(bits, s.c_str(), s.size() + 1);
    return WEAVER_OK;
}

const char* weaver_model_ion_name(const weaver_model* m, size_t i) {
    if (!m || i >= m->impl.n()) return nullptr;
    return m->impl.ion_names()[i].c_str();
}

int weaver_model_write(const weaver_model* m, const char* path) {
    if (!m || !path) return WEAVER_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        std::ofstream out(path);
        if (!out) weaver::throw_error(weaver::ErrorCode::io_error, std::string("cannot open ") + path);
        weaver::ingest::write_model(m->impl, out);
    });
}

int weaver_model_text(const weaver_model* m, char** out) {
    if (!m || !out) return WEAVER_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        std::ostringstream ss;
        weaver::ingest::write_model(m->impl, ss);
        const std::string text = ss.str();
        char* s = new char[text.size() + 1];
        std::memcpy(s, text.c_str(), text.size() + 1);
        *out = s;
    });
}

int weaver_solve(const weaver_model* m, int solver, const weaver_options* opts,
                 weaver_solution** out) {
    if (!m || !out) return WEAVER_ERR_INVALID_ARGUMENT;
    weaver::solvers::SolverOptions o;
    if (opts) {
        o.sse_tolerance = opts->sse_tolerance;
        o.max_iterations = opts->max_iterations;
        o.perturbation_factor = opts->perturbation_factor;
        o.bookkeeping = opts->bookkeeping != 0;
    }
    return guarded([&] {
        namespace ws = weaver::solvers;
        ws::Solution s = [&] {
            switch (solver) {
                case WEAVER_SOLVER_ALLIANCE: return ws::alliance(m->impl, o);
                case WEAVER_SOLVER_WEAVER: return ws::weaver(m->impl, o);
                case WEAVER_SOLVER_GREEDY: return ws::greedy_weaver(m->impl, o);
                case WEAVER_SOLVER_MM: return ws::mm_solve(m->impl, o);
                case WEAVER_SOLVER_NEWTON: return ws::newton_solve(m->impl, o).solution;
            }
            weaver::throw_error(weaver::ErrorCode::invalid_argument, "unknown solver id");
        }();
        *out = new weaver_solution{std::move(s)};
    });
}

void weaver_solution_free(weaver_solution* s) { delete s; }

int weaver_solution_p(const weaver_solution* s, double* buf, size_t len) {
    if (!s) return WEAVER_ERR_INVALID_ARGUMENT;
    return fill(s->impl.p.coords(), buf, len);
}

double weaver_solution_tau0(const weaver_solution* s) {
    return s ? s->impl.thickness.tau0 : 0.0;
}

int weaver_solution_tau(const weaver_solution* s, double* buf, size_t len) {
    if (!s) return WEAVER_ERR_INVALID_ARGUMENT;
    if (s->impl.thickness.tau.empty()) return WEAVER_OK;
    return fill(s->impl.thickness.tau, buf, len);
}

double weaver_solution_sse(const weaver_solution* s) { return s ? s->impl.sse : 0.0; }

int weaver_solution_iterations(const weaver_solution* s) { return s ? s->impl.iterations : 0; }

size_t weaver_solution_trace_len(const weaver_solution* s) {
    return s ? s->impl.sse_trace.size() : 0;
}

int weaver_solution_trace(const weaver_solution* s, double* buf, size_t len) {
    if (!s) return WEAVER_ERR_INVALID_ARGUMENT;
    if (s->impl.sse_trace.empty()) return WEAVER_OK;
    return fill(s->impl.sse_trace, buf, len);
}

int weaver_solution_status(const weaver_solution* s) {
    if (!s) return WEAVER_ERR_INVALID_ARGUMENT;
    switch (s->impl.status) {
        case weaver::solvers::SolveStatus::converged: return WEAVER_STATUS_CONVERGED;
        case weaver::solvers::SolveStatus::iteration_cap: return WEAVER_STATUS_ITERATION_CAP;
        case weaver::solvers::SolveStatus::diverged_with_best:
            return WEAVER_STATUS_DIVERGED_WITH_BEST;
    }
    return WEAVER_STATUS_DIVERGED_WITH_BEST;
}

const char* weaver_solution_solver_name(const weaver_solution* s) {
    return s ? weaver::solvers::to_string(s->impl.solver) : "?";
}

int weaver_check_regularity(const weaver_model* m, size_t max_negative_terms,
                            weaver_regularity* out) {
    if (!m || !out) return WEAVER_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto res = weaver::algebra::check_uniform_regularity(m->impl, max_negative_terms);
        using V = weaver::algebra::RegularityResult::Verdict;
        out->verdict = res.verdict == V::regular    ? WEAVER_REGULAR
                       : res.verdict == V::irregular ? WEAVER_IRREGULAR
                                                      : WEAVER_REGULARITY_SIZE_CAP;
        out->witness_union_count = res.witness_union_count;
        out->witness_covered_sum = res.witness_covered_sum;
        out->negative_terms = res.negative_terms;
        out->unions_checked = res.unions_checked;
        out->witness_bits[0] = '\0';
        if (res.witness_pattern) {
            const std::string bits = res.witness_pattern->to_string();
            const size_t len = std::min(bits.size(), sizeof out->witness_bits - 1);
            std::memcpy(out->witness_bits, bits.c_str(), len);
            out->witness_bits[len] = '\0';
        }
    });
}

int weaver_reconstruct_at(const weaver_model* m, const double* point, size_t len,
                          double* tau, double* tau0, double* recon, double* dev,
                          double* sse_out) {
    if (!m || !point || len != m->impl.n()) return WEAVER_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const weaver::SimplexPoint p(std::vector<double>(point, point + len));
        const auto t = weaver::thickness(m->impl, p);
        const double t0 = weaver::tau0_star(m->impl, p);
        if (tau && !t.empty()) std::memcpy(tau, t.data(), t.size() * sizeof(double));
        if (tau0) *tau0 = t0;
        const auto r = weaver::reconstruct(m->impl, p, t0);
        if (recon) std::memcpy(recon, r.data(), r.size() * sizeof(double));
        double e = 0.0;
        for (size_t i = 0; i < r.size(); ++i) {
            const double di = r[i] - m->impl.ionic_counts()[i];
            if (dev) dev[i] = di;
            e += di * di;
        }
        if (sse_out) *sse_out = e;
    });
}

int weaver_covering_graph_dot(const weaver_model* m, char** out) {
    if (!m || !out) return WEAVER_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const std::string dot = weaver::algebra::covering_graph(m->impl).to_dot();
        char* s = new char[dot.size() + 1];
        std::memcpy(s, dot.c_str(), dot.size() + 1);
        *out = s;
    });
}

void weaver_string_free(char* s) { delete[] s; }

}  // extern "C"

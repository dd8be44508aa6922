#include "core/ingest.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace weaver::ingest {

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct ExpressionParser {
    std::string_view text;
    std::size_t pos = 0;
    std::vector<std::string> names;
    std::unordered_map<std::string, std::size_t> ion_index;
    struct Factor {
        std::vector<std::size_t> ions;
        double exponent = 1.0;
        std::size_t at = 0;
    };
    std::vector<Factor> factors;
    std::vector<std::string>* warnings;

    [[noreturn]] void fail(const std::string& msg) const {
        throw_error(ErrorCode::parse_error,
                    "syntax error at position " + std::to_string(pos + 1) + ": " + msg);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    std::size_t ion() {
        skip_ws();
        if (pos >= text.size() || !ident_start(text[pos])) fail("expected an ion name");
        const std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        std::string name(text.substr(start, pos - start));
        auto [it, inserted] = ion_index.try_emplace(name, names.size());
        if (inserted) names.push_back(std::move(name));
        return it->second;
    }

    double number() {
        skip_ws();
        const std::string chunk(text.substr(pos, 48));
        char* end = nullptr;
        const double v = std::strtod(chunk.c_str(), &end);
        if (end == chunk.c_str()) fail("expected a number");
        if (!std::isfinite(v)) fail("exponent is not finite");
        pos += static_cast<std::size_t>(end - chunk.c_str());
        return v;
    }

    void factor(double sign) {
        skip_ws();
        Factor f;
        f.at = pos;
        if (pos < text.size() && text[pos] == '(') {
            ++pos;
            f.ions.push_back(ion());
            skip_ws();
            if (pos >= text.size() || text[pos] != '+') fail("a union needs at least two ions");
            while (pos < text.size() && text[pos] == '+') {
                ++pos;
                f.ions.push_back(ion());
                skip_ws();
            }
            if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
            ++pos;
        } else if (pos < text.size() && ident_start(text[pos])) {
            f.ions.push_back(ion());
        } else {
            fail("expected a factor");
        }
        skip_ws();
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            f.exponent = number();
        }
        f.exponent *= sign;
        factors.push_back(std::move(f));
    }

    void parse() {
        if (eof()) fail("empty product");
        factor(1.0);
        while (!eof()) {
            const char c = text[pos];
            if (c == '*') {
                ++pos;
                factor(1.0);
            } else if (c == '/') {
                ++pos;
                factor(-1.0);
            } else if (c == '(' || ident_start(c)) {
                factor(1.0);
            } else {
                fail("unexpected character '" + std::string(1, c) + "'");
            }
        }
    }

    CountModel build() {
        parse();
        std::vector<RawTerm> terms;
        for (const auto& f : factors) {
            if (f.exponent == 0.0) {
                if (warnings)
                    warnings->push_back("dropped zero-exponent factor at position " +
                                        std::to_string(f.at + 1));
                continue;
            }
            Pattern p(names.size());
            for (std::size_t i : f.ions) p.set(i);
            terms.push_back({std::move(p), f.exponent});
        }
        if (terms.empty()) throw_error(ErrorCode::parse_error, "empty product");
        return CountModel::canonicalize(terms, names);
    }
};

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' || c == '\t') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        while (!f.empty() && std::isspace(static_cast<unsigned char>(f.front()))) f.erase(f.begin());
        while (!f.empty() && std::isspace(static_cast<unsigned char>(f.back()))) f.pop_back();
    }
    return out;
}

double parse_real(const std::string& field, const std::string& what, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v))
        throw_error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": bad " + what + " '" + field + "'");
    return v;
}

}  // namespace

CountModel parse_expression(std::string_view text, std::vector<std::string>* warnings) {
    ExpressionParser p{text};
    p.warnings = warnings;
    return p.build();
}

std::string render_expression(const CountModel& m) {
    std::string out;
    // every ion in index order (exponent 0 pins first-appearance order)
    for (std::size_t i = 0; i < m.n(); ++i) {
        if (!out.empty()) out += "*";
        out += m.ion_names()[i];
        if (m.ionic_counts()[i] != 1.0) out += "^" + format_real(m.ionic_counts()[i]);
    }
    // union terms in model order; '/' absorbs the sign of negative counts
    for (std::size_t j = 0; j < m.q(); ++j) {
        const double b = m.union_counts()[j];
        out += b < 0.0 ? "/(" : "*(";
        for (std::size_t i = 0, k = 0; i < m.n(); ++i)
            if (m.patterns()[j].test(i)) out += (k++ ? "+" : "") + m.ion_names()[i];
        out += ")";
        if (std::abs(b) != 1.0) out += "^" + format_real(std::abs(b));
    }
    return out;
}

CountModel parse_grid(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> ionic;
    std::vector<double> counts;
    std::vector<Pattern> patterns;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        auto fields = split_fields(line);
        if (ionic.empty()) {
            for (const auto& f : fields) ionic.push_back(parse_real(f, "ionic count", line_no));
            if (ionic.size() < 2)
                throw_error(ErrorCode::parse_error, "grid header needs at least two ionic counts");
            continue;
        }
        if (fields.size() != ionic.size() + 1)
            throw_error(ErrorCode::parse_error,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(ionic.size()) + " bits and one count");
        Pattern p(ionic.size());
        for (std::size_t i = 0; i < ionic.size(); ++i) {
            if (fields[i] == "1")
                p.set(i);
            else if (fields[i] != "0")
                throw_error(ErrorCode::parse_error, "line " + std::to_string(line_no) +
                                                        ": pattern entry must be 0 or 1");
        }
        if (p.none())
            throw_error(ErrorCode::parse_error,
                        "line " + std::to_string(line_no) +
                            ": the all-zero ionic row is implicit and must not appear");
        const double b = parse_real(fields.back(), "union count", line_no);
        if (b == 0.0)
            throw_error(ErrorCode::parse_error,
                        "line " + std::to_string(line_no) + ": zero union count");
        patterns.push_back(std::move(p));
        counts.push_back(b);
    }
    if (ionic.empty()) throw_error(ErrorCode::parse_error, "empty grid file");
    return CountModel::from_parts(std::move(ionic), std::move(counts), std::move(patterns));
}

CountModel parse_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(ErrorCode::io_error, "cannot open " + path);
    return parse_grid(in);
}

void write_grid(const CountModel& m, std::ostream& out) {
    for (std::size_t i = 0; i < m.n(); ++i) out << (i ? "," : "") << format_real(m.ionic_counts()[i]);
    out << "\n";
    for (std::size_t j = 0; j < m.q(); ++j) {
        for (std::size_t i = 0; i < m.n(); ++i) out << (m.patterns()[j].test(i) ? "1," : "0,");
        out << format_real(m.union_counts()[j]) << "\n";
    }
}

std::vector<MatchRecord> parse_matches(std::istream& in) {
    std::vector<MatchRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        auto fields = split_fields(line);
        if (fields.size() != 4)
            throw_error(ErrorCode::parse_error,
                        "line " + std::to_string(line_no) + ": expected i,j,score_i,score_j");
        MatchRecord r{fields[0], fields[1], parse_real(fields[2], "score", line_no),
                      parse_real(fields[3], "score", line_no)};
        if (r.player_i.empty() || r.player_j.empty())
            throw_error(ErrorCode::parse_error,
                        "line " + std::to_string(line_no) + ": empty player id");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<MatchRecord> parse_matches_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(ErrorCode::io_error, "cannot open " + path);
    return parse_matches(in);
}

MatchesResult from_matches(const std::vector<MatchRecord>& records) {
    if (records.empty()) throw_error(ErrorCode::invalid_argument, "no match records");
    std::vector<std::string> names;
    std::unordered_map<std::string, std::size_t> index;
    auto ion_of = [&](const std::string& name) {
        auto [it, inserted] = index.try_emplace(name, names.size());
        if (inserted) names.push_back(name);
        return it->second;
    };
    for (const auto& r : records) {
        if (r.player_i == r.player_j)
            throw_error(ErrorCode::invalid_argument, "a player cannot meet itself");
        if (r.score_i < 0.0 || r.score_j < 0.0 || (r.score_i == 0.0 && r.score_j == 0.0))
            throw_error(ErrorCode::invalid_argument,
                        "scores must be non-negative and not both zero");
        ion_of(r.player_i);
        ion_of(r.player_j);
    }

    const std::size_t n = names.size();
    std::vector<RawTerm> terms;
    std::vector<double> ionic(n, 0.0);
    for (const auto& r : records) {
        const std::size_t i = index[r.player_i], j = index[r.player_j];
        ionic[i] += r.score_i;
        ionic[j] += r.score_j;
        Pattern p(n);
        p.set(i);
        p.set(j);
        terms.push_back({std::move(p), -(r.score_i + r.score_j)});
    }
    for (std::size_t i = 0; i < n; ++i)
        if (ionic[i] != 0.0) terms.push_back({Pattern::unit(n, i), ionic[i]});

    // connectivity of the comparison graph (union-find)
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& r : records) parent[find(index[r.player_i])] = find(index[r.player_j]);
    bool connected = true;
    for (std::size_t i = 1; i < n; ++i)
        if (find(i) != find(0)) connected = false;

    return MatchesResult{CountModel::canonicalize(terms, names), connected};
}

void write_model(const CountModel& m, std::ostream& out) {
    out << "weaver-model 1\n";
    out << "n " << m.n() << "\n";
    out << "ions";
    for (const auto& name : m.ion_names()) out << "\t" << name;
    out << "\n";
    out << "a";
    for (double a : m.ionic_counts()) out << " " << format_real(a);
    out << "\n";
    out << "b";
    for (double b : m.union_counts()) out << " " << format_real(b);
    out << "\n";
    out << "delta";
    for (std::size_t i = 0; i < m.n(); ++i) {
        std::string row(m.q(), '0');
        for (std::size_t j = 0; j < m.q(); ++j)
            if (m.patterns()[j].test(i)) row[j] = '1';
        out << " " << row;
    }
    out << "\n";
}

CountModel read_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_fields(line).front().rfind("weaver-model", 0) != 0)
        throw_error(ErrorCode::parse_error, "not a weaver-model document");

    std::size_t n = 0;
    std::vector<std::string> names;
    std::vector<double> a, b;
    std::vector<std::string> rows;
    bool saw_a = false, saw_b = false, saw_delta = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "n") {
            ss >> n;
        } else if (key == "ions") {
            std::string rest;
            std::getline(ss, rest);
            for (const auto& f : split_fields(rest))
                if (!f.empty()) names.push_back(f);
        } else if (key == "a" || key == "b") {
            std::string tok;
            auto& dst = key == "a" ? a : b;
            (key == "a" ? saw_a : saw_b) = true;
            while (ss >> tok) dst.push_back(parse_real(tok, "count", line_no));
        } else if (key == "delta") {
            std::string tok;
            saw_delta = true;
            while (ss >> tok) rows.push_back(tok);
        } else {
            throw_error(ErrorCode::parse_error, "unknown field '" + key + "'");
        }
    }
    if (n < 2 || a.size() != n || !saw_a || !saw_b || !saw_delta)
        throw_error(ErrorCode::parse_error, "incomplete model document");
    if (!names.empty() && names.size() != n)
        throw_error(ErrorCode::parse_error, "ion name list has wrong length");
    const std::size_t q = b.size();
    if (q > 0 && rows.size() != n)
        throw_error(ErrorCode::parse_error, "delta needs one bit row per ion");
    std::vector<Pattern> patterns(q, Pattern(n));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != q)
            throw_error(ErrorCode::parse_error, "delta row has wrong length");
        for (std::size_t j = 0; j < q; ++j) {
            if (rows[i][j] == '1')
                patterns[j].set(i);
            else if (rows[i][j] != '0')
                throw_error(ErrorCode::parse_error, "delta entries must be 0 or 1");
        }
    }
    return CountModel::from_parts(std::move(a), std::move(b), std::move(patterns),
                                  std::move(names));
}

CountModel load_model_file(const std::string& path, const std::string& format,
                           std::vector<std::string>* warnings) {
    if (format == "grid") return parse_grid_file(path);
    if (format == "matches") {
        auto res = from_matches(parse_matches_file(path));
        if (!res.connected && warnings)
            warnings->push_back("the comparison graph is not connected");
        return std::move(res.model);
    }
    if (format == "expr") {
        std::ifstream in(path);
        if (!in) throw_error(ErrorCode::io_error, "cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_expression(ss.str(), warnings);
    }
    if (format == "model") {
        std::ifstream in(path);
        if (!in) throw_error(ErrorCode::io_error, "cannot open " + path);
        return read_model(in);
    }
    throw_error(ErrorCode::invalid_argument, "unknown format '" + format + "'");
}

}  // namespace weaver::ingest

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "core/model.hpp"

namespace weaver::ingest {

// Product/quotient grammar over named ions:
//   expression := factor (('*' | '/')? factor)*      '*' is optional
//   factor     := atom ('^' real)?                    default exponent 1
//   atom       := ion | '(' ion ('+' ion)+ ')'
//   ion        := identifier, registered in order of first appearance
// '/' negates the exponent of the factor it introduces.
CountModel parse_expression(std::string_view text, std::vector<std::string>* warnings = nullptr);

// Canonical model back to the grammar above. Ions appear in index order;
// an ion with no ionic count is emitted with exponent 0 to pin its position.
std::string render_expression(const CountModel& m);

// Grid file: header row holds the ionic counts; each following row holds n
// bits and that row's union count. Comma- or tab-delimited.
CountModel parse_grid(std::istream& in);
CountModel parse_grid_file(const std::string& path);
void write_grid(const CountModel& m, std::ostream& out);

struct MatchRecord {
    std::string player_i;
    std::string player_j;
    double score_i = 0.0;
    double score_j = 0.0;
};

struct MatchesResult {
    CountModel model;
    bool connected = true;  // whether the comparison graph is connected
};

// One record per line: i,j,score_i,score_j
std::vector<MatchRecord> parse_matches(std::istream& in);
std::vector<MatchRecord> parse_matches_file(const std::string& path);

// Paired-comparison kernel: each player's ionic count is their total score;
// each pairing contributes a negative union count of the points played.
MatchesResult from_matches(const std::vector<MatchRecord>& records);

// Structured-text model document (fields n, ions, a, b, delta); round-trips
// bit-exactly through read_model.
void write_model(const CountModel& m, std::ostream& out);
CountModel read_model(std::istream& in);

CountModel load_model_file(const std::string& path, const std::string& format,
                           std::vector<std::string>* warnings = nullptr);

}  // namespace weaver::ingest

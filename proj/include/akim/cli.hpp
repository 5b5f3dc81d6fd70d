#pragma once

// Command-line front end. Every run writes its data files, a manifest.json
// (config snapshot, version, tolerances, checks) and a timing.json with the
// wall-clock time; everything except timing.json is byte-identical across
// repeated runs with the same configuration.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "akim/qlinalg.hpp"

namespace akim::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kCheckFailed = 1, kArgumentError = 2 };

// Option values are kept as the strings given, so a snapshot fed back through
// --config reproduces the run exactly.
struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> values;
};
std::string to_json_text(const RunConfig& c);
RunConfig config_from_json_text(const std::string& text);  // throws ArgumentError

struct Check {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

// Radians, or multiples of pi: "0.7", "0.5pi", "-pi", "3pi/2", "pi/4".
double parse_angle(const std::string& s);

// Dimer descriptors (bath states, or A-states repeated over dimers):
//   zero                              (|0>, |0>)
//   case-a:theta=..,branch=1|2,variant=0|1,swapped=0|1   (also case-b)
//   bloch:theta0,phi0,theta1,phi1
//   product:s0,s1                     tokens 0 1 + - y+ y-
std::pair<Vector2, Vector2> parse_dimer(const std::string& descriptor);
// A-state on n qubits: any dimer descriptor (repeated, n even), product:s0,..,s_{n-1},
// or amplitudes:re0,im0,re1,im1,... (normalised on input).
PureState parse_state(const std::string& descriptor, int n);
bool is_dimer_descriptor(const std::string& descriptor);

std::string csv_field(const std::string& s);  // RFC-4180 quoting
std::string format_number(double x);           // shortest round-trip form

int dispatch(int argc, const char* const* argv);
int dispatch(const std::vector<std::string>& args);  // args exclude the program name

}  // namespace akim::cli

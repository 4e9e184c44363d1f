#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "raman/lambda_frame.hpp"
#include "raman/sweeps.hpp"

namespace raman::cli {

inline constexpr const char* kToolName = "raman_sim";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericFailure = 3 };

/// "pi", "pi/2", "3pi/4", "2*pi", "0.5pi", "1.2", "1.2rad".
double parse_angle(std::string_view text);
/// "1meV", "1500ns^-1", "1500/ns". A bare zero is accepted without a unit.
double parse_energy(std::string_view text, const PhysicalUnits& units);
/// "13.3ps", "0.01ns". Result in ns.
double parse_time(std::string_view text);
/// Comma separated list, each item parsed by `parse`.
template <class Parse>
std::vector<double> parse_list(std::string_view text, Parse parse);

/// Metadata lines (# key=value), header row, data rows; 12 significant digits.
void write_csv(const SweepTable& table, std::ostream& out);

/// Entry point behind the raman_sim binary. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::vector<std::string> split_list(std::string_view text);

template <class Parse>
std::vector<double> parse_list(std::string_view text, Parse parse) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse(item));
  return out;
}

}  // namespace raman::cli

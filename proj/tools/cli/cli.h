#ifndef HGMLP_TOOLS_CLI_H_
#define HGMLP_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace hgmlp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// Runs one `hgmlp` invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1..20" or "1,2,5"; ranges are inclusive.
std::vector<unsigned long long> parse_seed_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace hgmlp::cli

#endif  // HGMLP_TOOLS_CLI_H_

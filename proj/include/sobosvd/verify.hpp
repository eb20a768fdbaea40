#pragma once

#include <cstddef>
#include <ostream>
#include <string_view>
#include <vector>

namespace sobosvd {

// Runs every applicable check on one catalog case and prints one PASS/FAIL
// line per check. Returns 0 when all pass, 1 otherwise.
int verify_case(std::string_view case_spec, const std::vector<std::size_t>& n, std::ostream& out);

}  // namespace sobosvd

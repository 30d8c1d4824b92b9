#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdtopo {

// Entry point of the `cdtopo` tool; args excludes the program name.
// Returns 0 when the optimizer converged, 2 when it stopped at its iteration
// cap and 1 on usage or runtime errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdtopo

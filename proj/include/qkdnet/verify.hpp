#pragma once

// Quick self-checks behind `qkdsim verify`: exact identities plus a few
// small seeded sessions. Meant to finish in seconds, not to replace tests.

#include <cstdint>
#include <string>
#include <vector>

namespace qkdnet {

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<VerifyCheck> run_verification(std::uint64_t seed = 1);

}  // namespace qkdnet

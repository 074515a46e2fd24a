#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace rollball {

/// Deliberate corruptions for the negative-control path: FieldSign flips the
/// rotation sense of the reduced field only, EnergySign perturbs the
/// conserved energy by a multiple of its Omega-coupling term. Either one must
/// break the field/energy compatibility identity.
enum class FaultInjection { None, FieldSign, EnergySign };

struct CheckResult {
    std::string name;
    double measured = 0;
    double threshold = 0;
    char relation = '<'; // pass iff measured <relation> threshold
    bool pass = false;
};

struct VerifyReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool all_pass() const;
    const CheckResult* first_failure() const;
};

/// Self-verification suites. Each runs a fixed list of identity, oracle and
/// structure checks over seeded sample sets and returns one CheckResult per
/// check. Parameters and profiles are fixed per check; the seed only moves
/// the sampled states.
VerifyReport verify_poisson(std::uint64_t seed, FaultInjection fault = FaultInjection::None);
VerifyReport verify_engine(std::uint64_t seed);
VerifyReport verify_parabolic(std::uint64_t seed);
VerifyReport verify_equilibria(std::uint64_t seed);
VerifyReport verify_conservation(std::uint64_t seed);

/// Run one suite by name ("poisson", "engine", "parabolic", "equilibria",
/// "conservation") or every suite in that order ("all"). Throws
/// std::invalid_argument on an unknown name.
std::vector<VerifyReport> run_verify(const std::string& suite, std::uint64_t seed,
                                     FaultInjection fault = FaultInjection::None);

/// Machine-readable report: {"pass": ..., "suites": [...]}, every number
/// with 17 significant digits.
void write_verify_json(std::ostream& os, const std::vector<VerifyReport>& reports);

} // namespace rollball

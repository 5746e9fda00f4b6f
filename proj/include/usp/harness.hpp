#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "usp/orbital.hpp"

// Verification suites over seeded random samples, reported as versioned
// JSON.  Every case verdict is an exact integer comparison; failing cases
// embed the payload needed to re-run them in isolation.

namespace usp {

using Json = nlohmann::ordered_json;

// SplitMix64: a counter-based stream, so forked substreams are cheap and
// every draw is reproducible from (seed, draw index) alone
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next();
    // uniform in [0, bound) by rejection; bound >= 1
    uint64_t below(uint64_t bound);
    // independent stream for substream idx, detached from this one's position
    Rng fork(uint64_t idx) const;

private:
    uint64_t state_ = 0;
};

// uniform integer mod p^N, decomposed into p^v * unit
FScalar rand_int_f(const PrecisionContext& c, Rng& rng);
// uniform p-unit mod p^N
FScalar rand_unit_f(const PrecisionContext& c, Rng& rng);
// uniform p-unit with the given residue digit (1 <= res < p)
FScalar rand_unit_res(const PrecisionContext& c, Rng& rng, int64_t res);
// random element of U(phi1) x U(phi2) for the split rank-n space, assembled
// from rotations and norm-one torus factors
std::pair<EMatrix, EMatrix> rand_unitary_pair(const PrecisionContext& c, Rng& rng, int n);

struct Datum {
    int a = 1;
    int b = 1;
    bool alpha_split = true;
    bool beta_split = true;
};

struct VerifyConfig {
    int64_t p = 3;
    int N = 12;
    int n = 2;
    Datum datum;
    int trials = 50;
    uint64_t seed = 1;
    int64_t window = -1;  // -1 grows from the invariant floor
};

// suites; each returns a "schema": "v1" report and never throws on
// per-case failures (they are recorded and counted instead)
Json verify_fl(const VerifyConfig& cfg);
Json verify_fl_lie(const VerifyConfig& cfg);
Json verify_descent(const VerifyConfig& cfg);
// named property sections: cayley, tjd, lattice, oracle
Json property_suite(const VerifyConfig& cfg, const std::vector<std::string>& suites);

// re-runs one case from its embedded replay payload and returns the fresh
// record (without index/replay wrapping)
Json run_case(const Json& payload);

// structural checks on a report; throws Error::Kind::BadInput on violation
void validate_report(const Json& report);
bool report_passed(const Json& report);

}  // namespace usp

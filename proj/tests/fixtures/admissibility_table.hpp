#pragma once

#include <string>
#include <vector>

#include "sgkdv/estimates.hpp"

// Hand-checked truth for the two admissibility relations.
//   Kato:       2/p = 1/2 - 1/q,  alpha = 2/q - 1/p,  p >= 4, q >= 2, -1/4 <= alpha <= 1
//   Strichartz: 1/q = (beta + 1)/3 (1/2 - 1/p),  p >= 2, 0 <= beta <= 1/2
struct AdmissibilityCase {
    bool kato;
    sgkdv::Exponent p, q;
    double order;
    bool expected;
    std::string note;
};

inline std::vector<AdmissibilityCase> admissibility_table() {
    using sgkdv::kInf;
    return {
        {true, 5.0, 10.0, 0.0, true, "2/5 = 1/2 - 1/10, 0 = 1/5 - 1/5"},
        {true, kInf, 2.0, 1.0, true, "0 = 1/2 - 1/2, 1 = 1 - 0"},
        {true, 4.0, 4.0, 0.25, false, "1/2 != 1/2 - 1/4"},
        {true, 4.0, kInf, -0.25, true, "endpoint of the p < q family"},
        {true, 5.0 / 0.9, 10.0 / 1.4, 0.1, true, "family member alpha = 1/10"},
        {true, 5.0, 10.0, 0.1, false, "alpha should be 0"},
        {true, 6.0, 6.0, 1.0 / 6.0, true, "p = q = 6"},
        {true, 8.0, 4.0, 0.375, true, "1/4 = 1/2 - 1/4, 3/8 = 1/2 - 1/8"},
        {false, kInf, 6.0, 0.0, true, "1/6 = 1/3 * 1/2"},
        {false, 2.0, kInf, 0.0, true, "energy endpoint"},
        {false, kInf, 4.0, 0.5, true, "1/4 = 1/2 * 1/2"},
        {false, kInf, 1.0 / ((1.75 / 3.0) * 0.5), 0.75, false, "beta above 1/2"},
    };
}

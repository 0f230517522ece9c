#pragma once

// Reduction of the complementary system to a linear complementarity problem
//     0 <= u = q + M w  _|_  w >= 0,   z = u - w.

#include "plabs/cpl.hpp"

#include <vector>

namespace plabs {

struct LcpData {
    Vector q;
    Matrix M;
    Matrix sourceS;
    Vector sourceCHat;
    /// I - S was singular: q = -(I+S)^{-1} c_hat, M = (I+S)^{-1}(I-S), and the
    /// roles of u and w are exchanged, so z = w - u.
    bool swapped = false;
};

/// q = (I-S)^{-1} c_hat, M = (I-S)^{-1}(I+S); falls back to the swapped
/// convention when only I + S is nonsingular, else throws SingularIMinusS.
[[nodiscard]] LcpData to_lcp(const CplSystem& sys);

/// All principal minors exceed 1e-12 * scale; throws TooLarge when s > limit.
[[nodiscard]] bool p_matrix_check(const Matrix& M, int limit = kDefaultGraphLimit);

struct LcpSolution {
    Vector u;
    Vector w;
    Vector z;
};

struct LcpEnumeration {
    std::vector<LcpSolution> solutions;
    /// Support sets whose subsystem was singular.
    int degenerateSupports = 0;
};

/// Enumerates all complementary supports; throws TooLarge when s > limit.
[[nodiscard]] LcpEnumeration lcp_solve_enum(const LcpData& lcp, int limit = kDefaultEnumLimit);

} // namespace plabs

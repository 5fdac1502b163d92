#pragma once

#include "suffpcr/linalg.hpp"

#include <random>

namespace suffpcr {

/// k-step Lanczos bidiagonalization of an operator M,
///
///     M P = Z W,    M^T Z = P W^T + r e_k^T,
///
/// with P^T P = Z^T Z = I_k and P^T r = 0. After an augmented restart W is
/// upper triangular with a spike in its last column rather than strictly
/// bidiagonal; the relations above still hold.
struct LanczosState
{
    Matrix basis_p;     // p x work
    Matrix basis_z;     // p x work
    Matrix bidiagonal;  // work x work, leading `steps` x `steps` block valid
    Vector residual;    // r
    Vector start;       // p_1
    Eigen::Index steps = 0;

    Eigen::Index dim() const noexcept { return basis_p.rows(); }
};

/// Applies the symmetric operator (Q + shift I) used by the truncated solver.
class ShiftedOperator
{
public:
    ShiftedOperator(const Matrix& q, double shift) : q_(q), shift_(shift) {}

    // Reads one triangle only; the product is memory bound.
    Vector apply(const Vector& x) const
    {
        Vector y = shift_ * x;
        y.noalias() += q_.selfadjointView<Eigen::Lower>() * x;
        return y;
    }
    double shift() const noexcept { return shift_; }
    Eigen::Index dim() const noexcept { return q_.rows(); }

private:
    const Matrix& q_;
    double shift_;
};

/// Allocates a state with a working size of `work` columns and the given
/// starting vector (normalized internally).
LanczosState lanczos_init(Eigen::Index dim, Eigen::Index work, const Vector& start);

/// Extends the factorization from `state.steps` to `target` steps with full
/// reorthogonalization. On breakdown a random direction orthogonal to the
/// current basis is injected. Returns the number of operator applications.
int lanczos_extend(const ShiftedOperator& op, LanczosState& state,
                   Eigen::Index target, std::mt19937_64& rng);

} // namespace suffpcr

#pragma once

// Every certificate and invariant check reads its tolerance from here.
namespace lsssc::tol {

/// Primal feasibility (e = x - Ac) and slackness (nu = lambda e).
inline constexpr double kFeas = 1e-8;
/// Dual feasibility and support sign agreement.
inline constexpr double kDual = 1e-6;
/// Orthonormality of subspace bases.
inline constexpr double kOrtho = 1e-10;
/// Unit norm of clean samples and subspace membership.
inline constexpr double kUnit = 1e-12;

}  // namespace lsssc::tol

#pragma once

#include "bcolab/body.hpp"
#include "bcolab/explore.hpp"
#include "bcolab/ids_bandit.hpp"
#include "bcolab/msa.hpp"

#include "json.hpp"

namespace bcolab {

using Json = nlohmann::json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

/// Polytopes: {kind, normals, offsets, bbox}; ellipsoids: {kind, center, shape}.
/// Level-set wrappers have no closed form and throw InvalidArgument.
Json to_json(const ConvexBody& body);
ConvexBody body_from_json(const Json& j);

/// {T, residual, iterations, converged}
Json to_json(const PositionResult& r);

/// {support, weights}
Json to_json(const FiniteMeasure& m);
FiniteMeasure measure_from_json(const Json& j);

/// {tag, level, witness_psi} plus the grid index and raw epsilon.
Json to_json(const ClassLabel& c);

/// {seeds, mean_regret, bound_value, beta_hat, cover_size} plus the remaining
/// sweep statistics; traces are not included.
Json to_json(const ids::SweepSummary& s);

}  // namespace bcolab

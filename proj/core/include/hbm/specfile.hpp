#pragma once

#include <string>

#include "hbm/body.hpp"

namespace hbm {

/// Parse a body-spec text file. The format is line-oriented `key = value`
/// with `#` comments:
///
///   dim    = 2
///   family = ellipsoid          # ball | ellipsoid | lp-ball | harmonic
///   axes   = 1 2                # ellipsoid
///   radius = 1.0                # ball / harmonic base radius
///   exponent = 4                # lp-ball (q > 2)
///   scale  = 1.0                # lp-ball, optional
///   mode   = 2 0.05             # harmonic, repeatable: degree coefficient
///   ell    = 1 0 0 1            # optional n*n row-major linear map
///
/// Errors carry file:line and the offending key.
BodySpec parse_body_spec(const std::string& text, const std::string& filename = "<memory>");

BodySpec load_body_spec(const std::string& path);

/// Canonical text form; parse(serialize(s)) reproduces s.
std::string serialize_body_spec(const BodySpec& spec);

}  // namespace hbm

#pragma once

#include <stdexcept>
#include <string>

namespace staticprop {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define STATICPROP_DEFINE_ERROR(name)                 \
    struct name : error {                             \
        using error::error;                           \
    }

// numerics
STATICPROP_DEFINE_ERROR(not_hermitian_in_weight);
STATICPROP_DEFINE_ERROR(decomposition_failure);
STATICPROP_DEFINE_ERROR(ill_conditioned);
STATICPROP_DEFINE_ERROR(bad_interval);
// model
STATICPROP_DEFINE_ERROR(invalid_field);
STATICPROP_DEFINE_ERROR(length_mismatch);
// block system
STATICPROP_DEFINE_ERROR(not_positive);
STATICPROP_DEFINE_ERROR(kernel_detected);
STATICPROP_DEFINE_ERROR(spectrum_hit);
// propagators
STATICPROP_DEFINE_ERROR(grid_too_coarse);
// absorption
STATICPROP_DEFINE_ERROR(bad_constants);
STATICPROP_DEFINE_ERROR(gap_violated);
STATICPROP_DEFINE_ERROR(contraction_violated);
STATICPROP_DEFINE_ERROR(bound_violated);
STATICPROP_DEFINE_ERROR(spectrum_near_contour);
// wick
STATICPROP_DEFINE_ERROR(angle_out_of_range);
// config
STATICPROP_DEFINE_ERROR(parse_error);
STATICPROP_DEFINE_ERROR(validation_error);

#undef STATICPROP_DEFINE_ERROR

}  // namespace staticprop

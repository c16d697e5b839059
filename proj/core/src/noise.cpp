#include "tdtw/noise.hpp"

// All of NoiseSource is header-inline for the engine hot path; this TU just
// anchors the header in the library.
namespace tdtw {
static_assert(sizeof(NoiseSource) > 0);
} // namespace tdtw

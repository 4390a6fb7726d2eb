#include "kernels.hpp"

#include "../errors.hpp"

namespace uswg::kernels {

bool avx2_supported() {
#if defined(USWG_BUILD_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa parse_isa(const std::string& s) {
    if (s == "auto") return Isa::Auto;
    if (s == "scalar") return Isa::Scalar;
    if (s == "avx2") return Isa::Avx2;
    throw ConfigError("kernels must be one of auto|scalar|avx2, got '" + s + "'");
}

const Table& select(Isa isa) {
    switch (isa) {
    case Isa::Scalar:
        return scalar_table;
    case Isa::Avx2:
#if defined(USWG_BUILD_AVX2)
        if (avx2_supported()) return avx2_table;
#endif
        throw ConfigError("kernels=avx2 requested but this CPU/build has no AVX2+FMA");
    case Isa::Auto:
    default:
#if defined(USWG_BUILD_AVX2)
        if (avx2_supported()) return avx2_table;
#endif
        return scalar_table;
    }
}

} // namespace uswg::kernels
